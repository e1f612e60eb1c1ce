// ramsey.hpp — the full interference protocol: pulse, hold, pulse, read P0
//
// One protocol, five engines. The aligned engines (analytic1d, exact1d,
// exact3d, perturb3d) require c_x = c_y = 0; the misaligned engines take the
// NV direction cosines from the coupling set. Grid scans fan out over a
// worker pool and assemble results by grid index, never by completion order.

#pragma once

#include <cstdint>
#include <optional>

#include "nvlev/analytic.hpp"
#include "nvlev/evolver.hpp"
#include "nvlev/model.hpp"
#include "nvlev/perturb.hpp"
#include "nvlev/types.hpp"

namespace nvlev {

enum class Model {
    analytic1d,
    exact1d,
    exact3d,
    perturb3d,
    misaligned,        // perturbative, matching the paper's treatment
    misaligned_exact,  // dense cross-validation engine
};

enum class InitialMotion { vacuum, coherent, thermal };
enum class ThermalMethod { p_sample, density_exact };

struct SequenceSpec {
    Model model                  = Model::analytic1d;
    InitialMotion initial_motion = InitialMotion::vacuum;
    Complex beta{0.0, 0.0};
    double nbar      = 0.0;
    double hold_time = period;  // per cycle
    int cycles       = 1;       // gravitational phase scales linearly with cycles
    PulseMode pulse    = PulseMode::ideal;
    double pulse_omega = 0.0;
    FockSpec n_x{8};
    FockSpec n_y{8};
    FockSpec n_z{60};
    double eps_degen = 1e-6;

    void validate() const;
};

struct RunResult {
    double p0 = 0;                           // population of s_z = 0, motion traced out
    Eigen::Vector3d populations;             // (+1, 0, -1) after the second pulse
    std::optional<HybridState> final_state;  // present for state-vector engines
};

// Thermal initial motion goes through thermal_p0; run_sequence covers the
// pure-state protocols.
RunResult run_sequence(const SequenceSpec& spec, const CouplingSet& c);

struct FringeScan {
    RealVector theta_grid;
    RealVector cx_grid;
    RealMatrix p0;          // rows follow cx_grid, columns follow theta_grid
    RealVector visibility;  // (max - min)/(max + min) per c_x row
};

// base.dlambda is read as the theta-independent combination dlambda/cos(theta);
// each grid point runs with dlambda = base.dlambda * cos(theta), c_x from the
// grid, c_y = 0 and c_z = sqrt(1 - c_x^2).
FringeScan fringe_scan(const RealVector& theta_grid, const RealVector& cx_grid,
                       const SequenceSpec& spec, const CouplingSet& base, int jobs = 1);

struct ThermalResult {
    double mean_p0 = 0;
    double spread  = 0;  // standard deviation across samples (0 for density_exact)
    int samples    = 0;
};

// p_sample draws beta from the thermal Glauber-P distribution (complex
// Gaussian, <|beta|^2> = nbar) and averages the coherent-state protocol;
// density_exact evolves the thermal density matrix directly (exact1d only).
ThermalResult thermal_p0(const SequenceSpec& spec, const CouplingSet& c, ThermalMethod method,
                         int count = 256, std::uint64_t seed = 0);

}  // namespace nvlev
