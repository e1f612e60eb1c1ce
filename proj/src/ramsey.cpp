#include "nvlev/ramsey.hpp"

#include <algorithm>
#include <cmath>

#include "nvlev/parallel.hpp"
#include "nvlev/rng.hpp"

namespace nvlev {

void SequenceSpec::validate() const {
    if (hold_time <= 0) throw std::invalid_argument("SequenceSpec: hold_time must be positive");
    if (cycles < 1) throw std::invalid_argument("SequenceSpec: cycles must be >= 1");
    if (nbar < 0) throw std::invalid_argument("SequenceSpec: nbar must be >= 0");
    if (initial_motion == InitialMotion::coherent && !(std::norm(beta) >= 0))
        throw std::invalid_argument("SequenceSpec: beta is not finite");
}

namespace {

void require_aligned(const CouplingSet& c, const char* engine) {
    if (c.c_x != 0.0 || c.c_y != 0.0 || std::abs(c.c_z - 1.0) > 1e-12)
        throw std::invalid_argument(std::string(engine) +
                                    ": aligned engine needs c_x = c_y = 0, c_z = 1; "
                                    "use a misaligned model otherwise");
}

Complex initial_beta(const SequenceSpec& spec) {
    return spec.initial_motion == InitialMotion::coherent ? spec.beta : Complex{0.0, 0.0};
}

Eigen::Vector3d spin_populations(const HybridState& psi) {
    const Index rest = psi.dim() / 3;
    Eigen::Vector3d p;
    for (Index b = 0; b < 3; ++b)
        p[b] = psi.amplitudes().segment(b * rest, rest).squaredNorm();
    return p;
}

RunResult finish(HybridState psi, const LabeledOperator& pulse_full) {
    psi = HybridState::normalized(pulse_full.matrix * psi.amplitudes(), psi.layout());
    RunResult out;
    out.populations = spin_populations(psi);
    const double total = out.populations.sum();
    if (std::abs(total - 1.0) > 1e-10)
        throw std::runtime_error("run_sequence: populations sum to " + std::to_string(total));
    out.p0          = std::clamp(out.populations[1], 0.0, 1.0);
    out.final_state = std::move(psi);
    return out;
}

LabeledOperator embed_pulse(const SequenceSpec& spec, const Layout& layout) {
    LabeledOperator u = microwave_pulse(spec.pulse_omega, spec.pulse);
    for (std::size_t f = 1; f < layout.size(); ++f) {
        const Index n = layout[f];
        u = tensor(u, LabeledOperator(Matrix::Identity(n, n), Layout{n}, true));
    }
    return u;
}

HybridState spin_zero_times(const std::vector<HybridState>& motion) {
    Vector spin = Vector::Zero(3);
    spin[1]     = 1.0;
    HybridState out(spin, Layout{3});
    for (const auto& m : motion) out = tensor(out, m);
    return out;
}

RunResult run_statevector(const SequenceSpec& spec, const HybridState& psi0,
                          const LabeledOperator& h) {
    const LabeledOperator pulse = embed_pulse(spec, psi0.layout());
    HybridState psi = HybridState::normalized(pulse.matrix * psi0.amplitudes(), psi0.layout());
    const EigSystem eig = eigendecompose(h);
    psi = evolve(psi, eig, spec.hold_time * spec.cycles);
    return finish(std::move(psi), pulse);
}

RunResult run_perturbative(const SequenceSpec& spec, const HybridState& psi0,
                           const UnperturbedBasis& basis, std::span<const CouplingTerm> terms) {
    const LabeledOperator pulse = embed_pulse(spec, psi0.layout());
    HybridState psi = HybridState::normalized(pulse.matrix * psi0.amplitudes(), psi0.layout());
    const PerturbedSystem sys =
        second_order(basis, matrix_elements(terms, basis), spec.eps_degen);
    psi = perturbed_evolve(psi, sys, spec.hold_time * spec.cycles);
    return finish(std::move(psi), pulse);
}

}  // namespace

RunResult run_sequence(const SequenceSpec& spec, const CouplingSet& c) {
    spec.validate();
    c.validate();
    if (spec.initial_motion == InitialMotion::thermal)
        throw std::invalid_argument("run_sequence: thermal initial motion is handled by thermal_p0");
    const Complex beta = initial_beta(spec);

    switch (spec.model) {
        case Model::analytic1d: {
            require_aligned(c, "analytic1d");
            RunResult out;
            out.p0 = analytic_p0(c, beta, spec.hold_time * spec.cycles);
            const double x = 2.0 * out.p0 - 1.0;  // Re[e^{-i dphi} <b+|b->]
            out.populations = {0.25 * (1.0 - x), 0.5 * (1.0 + x), 0.25 * (1.0 - x)};
            return out;
        }
        case Model::exact1d: {
            require_aligned(c, "exact1d");
            const HybridState psi0 = spin_zero_times({coherent_state(beta, spec.n_z)});
            return run_statevector(spec, psi0, hamiltonian_1d(c, spec.n_z));
        }
        case Model::exact3d: {
            require_aligned(c, "exact3d");
            const double ax = -2.0 * c.dlambda_x / c.omega_x_ratio;
            const double ay = -2.0 * c.dlambda_y / c.omega_y_ratio;
            const HybridState psi0 =
                spin_zero_times({displaced_number_state(ax, 0, spec.n_x),
                                 displaced_number_state(ay, 0, spec.n_y),
                                 coherent_state(beta, spec.n_z)});
            const Hamiltonian3D h = hamiltonian_3d(c, spec.n_x, spec.n_y, spec.n_z);
            const LabeledOperator full(h.h0.matrix + h.v_x.matrix + h.v_y.matrix, h.h0.layout,
                                       true);
            return run_statevector(spec, psi0, full);
        }
        case Model::perturb3d: {
            require_aligned(c, "perturb3d");
            const std::array<FockSpec, 3> specs{spec.n_x, spec.n_y, spec.n_z};
            const UnperturbedBasis basis = unperturbed_eigensystem(c, specs);
            const HybridState psi0       = spin_zero_times(
                {HybridState::normalized(basis.mode_matrix(0, 0).col(0), Layout{spec.n_x.n_levels}),
                 HybridState::normalized(basis.mode_matrix(0, 1).col(0), Layout{spec.n_y.n_levels}),
                 coherent_state(beta, spec.n_z)});
            return run_perturbative(spec, psi0, basis, transverse_coupling_terms(c));
        }
        case Model::misaligned: {
            const std::array<FockSpec, 1> specs{spec.n_z};
            const UnperturbedBasis basis = unperturbed_eigensystem(c, specs);
            const HybridState psi0 = spin_zero_times({coherent_state(beta, spec.n_z)});
            return run_perturbative(spec, psi0, basis, misalignment_coupling_terms(c));
        }
        case Model::misaligned_exact: {
            const MisalignedHamiltonian h = hamiltonian_misaligned(c, spec.n_z);
            const LabeledOperator full(h.h0.matrix + h.h_i.matrix, h.h0.layout, true);
            const HybridState psi0 = spin_zero_times({coherent_state(beta, spec.n_z)});
            return run_statevector(spec, psi0, full);
        }
    }
    throw std::logic_error("run_sequence: unhandled model");
}

FringeScan fringe_scan(const RealVector& theta_grid, const RealVector& cx_grid,
                       const SequenceSpec& spec, const CouplingSet& base, int jobs) {
    if (theta_grid.size() == 0 || cx_grid.size() == 0)
        throw std::invalid_argument("fringe_scan: empty grid");
    FringeScan scan;
    scan.theta_grid = theta_grid;
    scan.cx_grid    = cx_grid;
    scan.p0.resize(cx_grid.size(), theta_grid.size());
    scan.visibility.resize(cx_grid.size());

    const Index n_points = cx_grid.size() * theta_grid.size();
    parallel_for_index(n_points, jobs, [&](Index k) {
        const Index r  = k / theta_grid.size();
        const Index t  = k % theta_grid.size();
        const double cx = cx_grid[r];
        if (cx < 0.0 || cx > 1.0)
            throw std::invalid_argument("fringe_scan: c_x must lie in [0, 1]");
        CouplingSet point = base;
        point.dlambda     = base.dlambda * std::cos(theta_grid[t]);
        point.c_x         = cx;
        point.c_y         = 0.0;
        point.c_z         = std::sqrt(std::max(0.0, 1.0 - cx * cx));
        scan.p0(r, t)     = run_sequence(spec, point).p0;
    });

    for (Index r = 0; r < cx_grid.size(); ++r) {
        const double hi = scan.p0.row(r).maxCoeff();
        const double lo = scan.p0.row(r).minCoeff();
        scan.visibility[r] = (hi + lo) > 0 ? (hi - lo) / (hi + lo) : 0.0;
    }
    return scan;
}

ThermalResult thermal_p0(const SequenceSpec& spec, const CouplingSet& c, ThermalMethod method,
                         int count, std::uint64_t seed) {
    if (spec.nbar < 0) throw std::invalid_argument("thermal_p0: nbar must be >= 0");

    if (method == ThermalMethod::density_exact) {
        if (spec.model != Model::exact1d)
            throw std::invalid_argument("thermal_p0: density_exact supports the exact1d model only");
        require_aligned(c, "thermal_p0");
        const Index n   = spec.n_z.n_levels;
        const Matrix mot = thermal_density(spec.nbar, spec.n_z);
        Matrix rho = Matrix::Zero(3 * n, 3 * n);
        rho.block(n, n, n, n) = mot;  // spin block s_z = 0
        const LabeledOperator pulse = embed_pulse(spec, Layout{3, n});
        rho = pulse.matrix * rho * pulse.matrix.adjoint();
        const EigSystem eig = eigendecompose(hamiltonian_1d(c, spec.n_z));
        rho = evolve_density(rho, eig, spec.hold_time * spec.cycles);
        rho = pulse.matrix * rho * pulse.matrix.adjoint();
        const double p0 = rho.block(n, n, n, n).trace().real();
        return ThermalResult{std::clamp(p0, 0.0, 1.0), 0.0, 1};
    }

    if (count < 1) throw std::invalid_argument("thermal_p0: sample count must be >= 1");
    SeededRng rng(seed);
    SequenceSpec one = spec;
    one.initial_motion = InitialMotion::coherent;
    std::vector<double> values(count);
    for (int k = 0; k < count; ++k) {
        one.beta  = rng.thermal_beta(spec.nbar);
        values[k] = run_sequence(one, c).p0;
    }
    double mean = 0;
    for (double v : values) mean += v;
    mean /= count;
    double var = 0;
    for (double v : values) var += (v - mean) * (v - mean);
    const double spread = count > 1 ? std::sqrt(var / (count - 1)) : 0.0;
    return ThermalResult{mean, spread, count};
}

}  // namespace nvlev
