#include <cmath>

#include "doctest.h"
#include "nvlev/ramsey.hpp"
#include "nvlev/rng.hpp"

using namespace nvlev;

namespace {

CouplingSet couplings(double lambda, double dlambda, double zfs = 2.5) {
    CouplingSet c;
    c.lambda_ = lambda;
    c.dlambda = dlambda;
    c.zfs     = zfs;
    return c;
}

SequenceSpec spec_for(Model m) {
    SequenceSpec s;
    s.model = m;
    return s;
}

}  // namespace

TEST_SUITE("ramsey") {

TEST_CASE("horizontal axis gives unit population") {
    const RunResult r = run_sequence(spec_for(Model::analytic1d), couplings(0.1, 0.0));
    CHECK(r.p0 == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("exact 1d run matches the analytic population") {
    SequenceSpec s    = spec_for(Model::exact1d);
    s.initial_motion  = InitialMotion::coherent;
    s.beta            = Complex(1.0, 0.0);
    s.n_z             = FockSpec(60);
    const CouplingSet c = couplings(0.05, 0.1);
    const RunResult r   = run_sequence(s, c);
    const double ideal  = ramsey_population(gravitational_phase(c));
    CHECK(std::abs(r.p0 - ideal) <= 1e-6);
    CHECK(r.populations.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.final_state.has_value());
}

TEST_CASE("proposed regime kills the population at the tilted end") {
    const double lambda = 0.15;
    const double g_over = 10.0 / (16.0 * pi * lambda);
    const double theta  = pi / 2 - pi / 20;
    const CouplingSet c = couplings(lambda, g_over * std::cos(theta));

    CHECK(run_sequence(spec_for(Model::analytic1d), c).p0 <= 0.01);
    SequenceSpec s = spec_for(Model::exact1d);
    s.n_z          = FockSpec(60);
    CHECK(run_sequence(s, c).p0 <= 0.01);
}

TEST_CASE("general hold times agree between analytic and exact engines") {
    const CouplingSet c = couplings(0.08, 0.11, 1.7);
    SequenceSpec s      = spec_for(Model::exact1d);
    s.initial_motion    = InitialMotion::coherent;
    s.beta              = Complex(0.6, -0.4);
    s.n_z               = FockSpec(80);
    for (double hold : {pi / 3, 1.0, pi, 5.5, period}) {
        s.hold_time        = hold;
        const double exact = run_sequence(s, c).p0;
        const double shut  = analytic_p0(c, s.beta, hold);
        CHECK(std::abs(exact - shut) <= 1e-8);
    }
}

TEST_CASE("cycle count scales the accumulated phase") {
    const CouplingSet c = couplings(0.05, 0.08);
    SequenceSpec s      = spec_for(Model::analytic1d);
    s.cycles            = 3;
    const double expect = ramsey_population(3.0 * gravitational_phase(c));
    CHECK(run_sequence(s, c).p0 == doctest::Approx(expect).epsilon(1e-12));

    SequenceSpec e = spec_for(Model::exact1d);
    e.cycles       = 3;
    e.n_z          = FockSpec(60);
    CHECK(run_sequence(e, c).p0 == doctest::Approx(expect).epsilon(1e-8));
}

TEST_CASE("population is independent of the initial coherent state") {
    const CouplingSet c = couplings(0.05, 0.1);
    SequenceSpec s      = spec_for(Model::exact1d);
    s.initial_motion    = InitialMotion::coherent;
    s.n_z               = FockSpec(90);
    SeededRng rng(11);
    double lo = 2.0, hi = -1.0;
    for (int k = 0; k < 20; ++k) {
        s.beta = Complex(rng.gaussian(), rng.gaussian());
        const double p0 = run_sequence(s, c).p0;
        lo = std::min(lo, p0);
        hi = std::max(hi, p0);
    }
    CHECK(hi - lo <= 1e-8);
}

TEST_CASE("motion disentangles from the spin at the period") {
    const CouplingSet c = couplings(0.07, 0.12);
    const FockSpec z(70);
    const EigSystem eig = eigendecompose(hamiltonian_1d(c, z));
    Vector spin = Vector::Zero(3);
    spin[1]     = 1.0;
    HybridState psi = tensor(HybridState(spin, Layout{3}), coherent_state(1.0, z));
    const LabeledOperator pulse =
        tensor(microwave_pulse(), LabeledOperator(Matrix::Identity(70, 70), Layout{70}, true));
    psi = HybridState::normalized(pulse.matrix * psi.amplitudes(), psi.layout());

    const Matrix rho_mid = first_factor_density(evolve(psi, eig, pi));
    CHECK((rho_mid * rho_mid).trace().real() < 0.99);  // entangled mid-cycle

    const Matrix rho_end = first_factor_density(evolve(psi, eig, period));
    CHECK((rho_end * rho_end).trace().real() >= 1.0 - 1e-8);
}

TEST_CASE("population depends on theta only through its cosine") {
    const double lambda = 0.12;
    const double g_over = 0.9;
    auto p0_at = [&](double theta) {
        return run_sequence(spec_for(Model::analytic1d),
                            couplings(lambda, g_over * std::cos(theta)))
            .p0;
    };
    for (double theta : {0.3, 1.1, 1.5}) {
        CHECK(p0_at(theta) == doctest::Approx(p0_at(-theta)).epsilon(1e-14));
        CHECK(p0_at(theta) ==
              doctest::Approx(ramsey_population(16.0 * lambda * g_over * std::cos(theta) * period))
                  .epsilon(1e-12));
    }
}

TEST_CASE("exact 3d agrees with perturbative 3d at small size") {
    CouplingSet c;
    c.lambda_       = 0.08;
    c.dlambda       = 0.1;
    c.zfs           = 2.5;
    c.omega_x_ratio = 6.25;
    c.omega_y_ratio = 6.25;

    SequenceSpec s = spec_for(Model::exact3d);
    s.n_x = FockSpec(4);
    s.n_y = FockSpec(4);
    s.n_z = FockSpec(12);
    const RunResult exact = run_sequence(s, c);
    s.model               = Model::perturb3d;
    const RunResult pert  = run_sequence(s, c);
    CHECK(std::abs(exact.p0 - pert.p0) <= 1e-4);
    CHECK(fidelity(*exact.final_state, *pert.final_state) >= 1.0 - 1e-5);
}

TEST_CASE("misaligned fringes keep contrast without alignment") {
    const double lambda = 0.15;
    const double g_over = 10.0 / (16.0 * pi * lambda);
    CouplingSet base    = couplings(lambda, g_over);

    SequenceSpec s = spec_for(Model::misaligned);
    s.n_z          = FockSpec(40);

    RealVector thetas(15);
    for (int k = 0; k < 15; ++k)
        thetas[k] = pi / 2 - pi / 20 + (pi / 20) * k / 14.0;
    RealVector cxs(2);
    cxs << 0.0, 1.0;

    const FringeScan scan = fringe_scan(thetas, cxs, s, base, 2);

    // aligned row equals the analytic fringe
    for (int k = 0; k < 15; ++k) {
        const double ideal =
            ramsey_population(16.0 * lambda * g_over * std::cos(thetas[k]) * period);
        CHECK(std::abs(scan.p0(0, k) - ideal) <= 1e-4);
    }
    CHECK(scan.visibility[1] > 0.0);
    CHECK(scan.visibility[1] < scan.visibility[0]);

    SUBCASE("perturbative rows track the exact misaligned engine") {
        SequenceSpec ex = s;
        ex.model        = Model::misaligned_exact;
        const FringeScan exact = fringe_scan(thetas, cxs, ex, base, 2);
        for (int k = 0; k < 15; ++k) {
            CHECK(std::abs(scan.p0(0, k) - exact.p0(0, k)) <= 1e-8);
            CHECK(std::abs(scan.p0(1, k) - exact.p0(1, k)) <= 0.05);
        }
        CHECK(exact.visibility[1] > 0.0);
        CHECK(exact.visibility[1] < exact.visibility[0]);
    }
}

TEST_CASE("thermal averaging") {
    const CouplingSet c = couplings(0.05, 0.1);

    SUBCASE("nbar = 0 sampling reproduces the vacuum run") {
        SequenceSpec s = spec_for(Model::exact1d);
        s.initial_motion = InitialMotion::thermal;
        s.nbar           = 0.0;
        s.n_z            = FockSpec(60);
        const ThermalResult t = thermal_p0(s, c, ThermalMethod::p_sample, 8, 5);
        SequenceSpec v        = s;
        v.initial_motion      = InitialMotion::vacuum;
        CHECK(t.mean_p0 == doctest::Approx(run_sequence(v, c).p0).epsilon(1e-12));
        CHECK(t.spread <= 1e-12);
    }

    SUBCASE("analytic population ignores a hot initial state") {
        SequenceSpec s   = spec_for(Model::analytic1d);
        s.initial_motion = InitialMotion::thermal;
        s.nbar           = 600.0;
        const ThermalResult t = thermal_p0(s, c, ThermalMethod::p_sample, 20, 123);
        CHECK(t.spread <= 1e-10);
        CHECK(t.mean_p0 ==
              doctest::Approx(ramsey_population(gravitational_phase(c))).epsilon(1e-9));
    }

    SUBCASE("density-matrix route agrees with the analytic value") {
        SequenceSpec s   = spec_for(Model::exact1d);
        s.initial_motion = InitialMotion::thermal;
        s.nbar           = 2.0;
        s.n_z            = FockSpec(60);
        const ThermalResult t = thermal_p0(s, c, ThermalMethod::density_exact);
        CHECK(std::abs(t.mean_p0 - ramsey_population(gravitational_phase(c))) <= 1e-6);
        CHECK(t.spread == 0.0);
    }

    SUBCASE("sampling is deterministic per seed") {
        SequenceSpec s   = spec_for(Model::analytic1d);
        s.initial_motion = InitialMotion::thermal;
        s.nbar           = 3.0;
        const ThermalResult a = thermal_p0(s, c, ThermalMethod::p_sample, 16, 99);
        const ThermalResult b = thermal_p0(s, c, ThermalMethod::p_sample, 16, 99);
        CHECK(a.mean_p0 == b.mean_p0);
        CHECK(a.spread == b.spread);
    }

    SUBCASE("guard rails") {
        SequenceSpec s   = spec_for(Model::exact1d);
        s.initial_motion = InitialMotion::thermal;
        s.nbar           = 2.0;
        CHECK_THROWS_AS(run_sequence(s, c), std::invalid_argument);
        SequenceSpec wrong = s;
        wrong.model        = Model::analytic1d;
        CHECK_THROWS_AS(thermal_p0(wrong, c, ThermalMethod::density_exact),
                        std::invalid_argument);
    }
}

TEST_CASE("misaligned couplings are refused by aligned engines") {
    CouplingSet c = couplings(0.1, 0.1);
    c.c_x         = 0.6;
    c.c_z         = 0.8;
    CHECK_THROWS_AS(run_sequence(spec_for(Model::exact1d), c), std::invalid_argument);
    CHECK_THROWS_AS(run_sequence(spec_for(Model::analytic1d), c), std::invalid_argument);
}

}  // TEST_SUITE
