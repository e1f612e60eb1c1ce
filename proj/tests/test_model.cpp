#include <cmath>

#include "doctest.h"
#include "nvlev/evolver.hpp"
#include "nvlev/model.hpp"

using namespace nvlev;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

PhysicalParams paper_setup() {
    PhysicalParams p;
    p.omega_z = 2.0 * pi / 50e-6;  // one period in 50 us
    p.omega_x = 10.0 * p.omega_z;
    p.omega_y = 10.0 * p.omega_z;
    p.radius  = 100e-9;
    p.theta   = pi / 2 - pi / 20;
    return p;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("couplings from physical parameters") {
    PhysicalParams p = paper_setup();

    SUBCASE("horizontal trap axis removes the axial gravity coupling") {
        p.theta = pi / 2;
        const CouplingSet c = couplings_from_physical(p);
        CHECK(std::abs(c.dlambda) <= 1e-12 * std::abs(couplings_from_physical(paper_setup()).dlambda));
    }

    SUBCASE("frequency ratio 10 gives gamma near 0.32") {
        const CouplingSet c = couplings_from_physical(p);
        CHECK(c.gamma_x() == doctest::Approx(std::sqrt(0.1)).epsilon(1e-12));
        CHECK(c.gamma_x() == doctest::Approx(0.3162278).epsilon(1e-6));
    }

    SUBCASE("magnet moment and gradient") {
        CouplingDiagnostics diag;
        couplings_from_physical(p, &diag);
        CHECK(diag.magnetic_moment == doctest::Approx(4.02e-7).epsilon(0.01));

        // independent route: differentiate the on-axis dipole field numerically
        const double m_z = 1.5e6 * (4.0 / 3.0) * pi * std::pow(40e-6, 3);
        auto b_z = [&](double z) {
            const double mu0 = 4 * pi * 1e-7;
            return mu0 * m_z / (2.0 * pi * std::pow(120e-6 - z, 3));
        };
        const double h    = 1e-9;
        const double grad = (b_z(h) - b_z(-h)) / (2 * h);
        CHECK(diag.field_gradient == doctest::Approx(grad).epsilon(1e-6));
        // of order 1e3 T/m for these magnet parameters
        CHECK(diag.field_gradient > 1e3);
        CHECK(diag.field_gradient < 2e3);
    }

    SUBCASE("mass scaling laws") {
        const CouplingSet base = couplings_from_physical(p);
        PhysicalParams heavier = p;
        heavier.radius         = 0;
        heavier.mass           = 2.0 * p.effective_mass();
        const CouplingSet two  = couplings_from_physical(heavier);
        CHECK(two.lambda_ == doctest::Approx(base.lambda_ / std::sqrt(2.0)).epsilon(1e-12));
        CHECK(two.dlambda == doctest::Approx(base.dlambda * std::sqrt(2.0)).epsilon(1e-12));
    }

    SUBCASE("invariant violations throw") {
        PhysicalParams bad = p;
        bad.omega_z        = 0;
        CHECK_THROWS_AS(couplings_from_physical(bad), std::invalid_argument);
        bad         = p;
        bad.magnet_distance = 30e-6;  // inside the magnet radius
        CHECK_THROWS_AS(couplings_from_physical(bad), std::invalid_argument);
        bad     = p;
        bad.c_x = 0.5;  // cosines no longer normalized
        CHECK_THROWS_AS(couplings_from_physical(bad), std::invalid_argument);
    }
}

TEST_CASE("1d hamiltonian structure") {
    const FockSpec z(12);

    SUBCASE("free limit") {
        CouplingSet c;
        c.zfs = 0;
        const LabeledOperator h = hamiltonian_1d(c, z);
        const FockOps f         = fock_ops(z);
        Matrix expect           = Matrix::Zero(36, 36);
        for (int b = 0; b < 3; ++b)
            expect.block(b * 12, b * 12, 12, 12) = f.number.matrix;
        CHECK(max_abs(h.matrix - expect) == 0.0);
    }

    SUBCASE("single-excitation matrix element") {
        CouplingSet c;
        c.lambda_ = 0.07;
        c.dlambda = 0.13;
        const LabeledOperator h = hamiltonian_1d(c, z);
        for (int b = 0; b < 3; ++b) {
            const int s_z    = 1 - b;
            const Complex el = h.matrix(b * 12 + 0, b * 12 + 1);
            CHECK(std::abs(el - Complex(-2.0 * (c.lambda_ * s_z - c.dlambda), 0)) <= 1e-14);
        }
    }

    SUBCASE("sector ground energies match the closed form") {
        CouplingSet c;
        c.lambda_ = 0.05;
        c.dlambda = 0.1;
        c.zfs     = 2.5;
        const FockSpec big(60);
        const LabeledOperator h = hamiltonian_1d(c, big);
        for (int b = 0; b < 3; ++b) {
            const int s_z = 1 - b;
            Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix.block(b * 60, b * 60, 60, 60),
                                                     Eigen::EigenvaluesOnly);
            const double formula = c.zfs * s_z * s_z -
                                   4.0 * std::pow(-s_z * c.lambda_ + c.dlambda, 2);
            CHECK(std::abs(es.eigenvalues()[0] - formula) <= 1e-8);
        }
    }
}

TEST_CASE("3d hamiltonian") {
    CouplingSet c;
    c.lambda_       = 0.08;
    c.dlambda       = 0.1;
    c.dlambda_x     = 0.0;
    c.dlambda_y     = 0.0;
    c.omega_x_ratio = 4.0;
    c.omega_y_ratio = 4.0;
    c.zfs           = 2.5;

    SUBCASE("couplings vanish with lambda") {
        CouplingSet free = c;
        free.lambda_     = 0;
        const Hamiltonian3D h = hamiltonian_3d(free, FockSpec(2), FockSpec(2), FockSpec(6));
        CHECK(max_abs(h.v_x.matrix) == 0.0);
        CHECK(max_abs(h.v_y.matrix) == 0.0);
    }

    SUBCASE("spin-diagonal blocks of the perturbations vanish") {
        const Hamiltonian3D h = hamiltonian_3d(c, FockSpec(3), FockSpec(3), FockSpec(8));
        const Index blk       = 3 * 3 * 8;
        for (int b = 0; b < 3; ++b) {
            CHECK(max_abs(h.v_x.matrix.block(b * blk, b * blk, blk, blk)) == 0.0);
            CHECK(max_abs(h.v_y.matrix.block(b * blk, b * blk, blk, blk)) == 0.0);
        }
    }

    SUBCASE("axial spectrum embeds in the three-mode spectrum") {
        const FockSpec zspec(10);
        const Hamiltonian3D h3 = hamiltonian_3d(c, FockSpec(2), FockSpec(2), zspec);
        const LabeledOperator h1 = hamiltonian_1d(c, zspec);
        Eigen::SelfAdjointEigenSolver<Matrix> e3(h3.h0.matrix, Eigen::EigenvaluesOnly);
        Eigen::SelfAdjointEigenSolver<Matrix> e1(h1.matrix, Eigen::EigenvaluesOnly);
        for (Index k = 0; k < e1.eigenvalues().size(); ++k) {
            double best = 1e9;
            for (Index j = 0; j < e3.eigenvalues().size(); ++j)
                best = std::min(best, std::abs(e3.eigenvalues()[j] - e1.eigenvalues()[k]));
            CHECK(best <= 1e-10);
        }
    }

    SUBCASE("full hamiltonian is hermitian at working size") {
        const Hamiltonian3D h = hamiltonian_3d(c, FockSpec(8), FockSpec(8), FockSpec(20));
        Matrix full           = h.h0.matrix + h.v_x.matrix + h.v_y.matrix;
        CHECK(max_abs(full - full.adjoint()) <= 1e-12);
    }
}

TEST_CASE("misaligned hamiltonian") {
    CouplingSet c;
    c.lambda_ = 0.15;
    c.dlambda = 0.12;
    c.zfs     = 2.5;
    const FockSpec z(14);

    SUBCASE("aligned limit reproduces the 1d model") {
        c.c_x = 0;
        c.c_y = 0;
        c.c_z = 1;
        const MisalignedHamiltonian m = hamiltonian_misaligned(c, z);
        CHECK(max_abs(m.h_i.matrix) == 0.0);
        CHECK(max_abs(m.h0.matrix - hamiltonian_1d(c, z).matrix) <= 1e-14);
    }

    SUBCASE("perpendicular case decouples spin from motion in h0") {
        c.c_x = 1;
        c.c_z = 0;
        const MisalignedHamiltonian m = hamiltonian_misaligned(c, z);
        const Index n                 = z.n_levels;
        // all sectors see the same oscillator, up to the D offset
        Matrix d_up   = m.h0.matrix.block(0, 0, n, n);
        Matrix d_zero = m.h0.matrix.block(n, n, n, n);
        Matrix d_down = m.h0.matrix.block(2 * n, 2 * n, n, n);
        CHECK(max_abs(d_up - d_down) == 0.0);
        CHECK(max_abs(d_up - d_zero - c.zfs * Matrix::Identity(n, n)) <= 1e-13);
    }

    SUBCASE("no direct +1 to -1 coupling in h_i") {
        c.c_x = 0.6;
        c.c_y = 0.0;
        c.c_z = 0.8;
        const MisalignedHamiltonian m = hamiltonian_misaligned(c, z);
        const Index n                 = z.n_levels;
        CHECK(max_abs(m.h_i.matrix.block(0, 2 * n, n, n)) == 0.0);
        CHECK(max_abs(m.h_i.matrix.block(2 * n, 0, n, n)) == 0.0);
        Matrix full = m.h0.matrix + m.h_i.matrix;
        CHECK(max_abs(full - full.adjoint()) <= 1e-12);
    }

    SUBCASE("operator norm is continuous in the direction cosine") {
        auto h_at = [&](double cx) {
            CouplingSet cc = c;
            cc.c_x         = cx;
            cc.c_z         = std::sqrt(1.0 - cx * cx);
            const MisalignedHamiltonian m = hamiltonian_misaligned(cc, z);
            return Matrix(m.h0.matrix + m.h_i.matrix);
        };
        double prev = -1.0;
        for (double delta : {1e-2, 1e-3, 1e-4}) {
            const double diff = max_abs(h_at(0.5 + delta) - h_at(0.5));
            if (prev > 0) CHECK(diff < prev);
            prev = diff;
        }
        CHECK(prev <= 1e-3);
    }

    SUBCASE("direction cosines must be normalized") {
        c.c_x = 0.5;
        c.c_z = 0.5;
        CHECK_THROWS_AS(hamiltonian_misaligned(c, z), std::invalid_argument);
    }
}

TEST_CASE("microwave pulse") {
    const LabeledOperator u = microwave_pulse();

    Vector zero = Vector::Zero(3);
    zero[1]     = 1.0;
    Vector out  = u.matrix * zero;
    // |0> goes to -i (|+1> + |-1>)/sqrt(2)
    CHECK(std::abs(out[0] - Complex(0, -1) / std::sqrt(2.0)) <= 1e-14);
    CHECK(std::abs(out[1]) <= 1e-14);
    CHECK(std::abs(out[2] - Complex(0, -1) / std::sqrt(2.0)) <= 1e-14);

    Vector dark(3);
    dark << 1.0 / std::sqrt(2.0), 0.0, -1.0 / std::sqrt(2.0);
    Vector dark_out = u.matrix * dark;
    CHECK(std::abs(std::abs(dark.dot(dark_out)) - 1.0) <= 1e-14);

    CHECK(max_abs(u.matrix * u.matrix.adjoint() - Matrix::Identity(3, 3)) <= 1e-14);

    const LabeledOperator fin = microwave_pulse(250.0, PulseMode::finite);
    CHECK(max_abs(fin.matrix - u.matrix) <= 1e-12);
    CHECK_THROWS_AS(microwave_pulse(0.0, PulseMode::finite), std::invalid_argument);
}

}  // TEST_SUITE
