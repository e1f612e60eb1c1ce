// model.hpp — laboratory parameters, dimensionless couplings, Hamiltonians
//
// All assembled operators are dimensionless (hbar = 1, energies in units of
// hbar*omega_z). Conversion from SI units happens only in
// couplings_from_physical.

#pragma once

#include "nvlev/hilbert.hpp"
#include "nvlev/types.hpp"

namespace nvlev {

// Laboratory-unit description of the trap, bead, magnet and NV orientation.
// Angles theta, theta_x, theta_y are between gravity and the trap axes;
// c_x, c_y, c_z are direction cosines of the NV symmetry axis.
struct PhysicalParams {
    double omega_x = 0, omega_y = 0, omega_z = 0;  // rad/s
    double mass    = 0;                            // kg; derived from radius/density when 0
    double radius  = 0;                            // m
    double density = 3500.0;                       // kg/m^3 (diamond)
    double theta   = pi / 2;                       // rad
    // theta_x defaults to the value forced by theta with gravity in the
    // x-z plane; theta_y defaults to pi/2. NaN marks "derive from theta".
    double theta_x = std::numeric_limits<double>::quiet_NaN();
    double theta_y = std::numeric_limits<double>::quiet_NaN();
    double magnet_radius   = 40e-6;                // m
    double magnetization   = 1.5e6;                // A/m
    double magnet_distance = 120e-6;               // m (z0)
    double zero_field_splitting = 2 * pi * 2.87e9; // rad/s
    double g_nv = 2.0028;
    double c_x = 0, c_y = 0, c_z = 1;

    double effective_mass() const;
    void validate() const;
};

// Dimensionless model constants, all energies in units of hbar*omega_z.
// gamma_x, gamma_y are derived from the frequency ratios so the tie
// gamma = sqrt(omega_z/omega_{x,y}) holds by construction.
struct CouplingSet {
    double lambda_   = 0;      // spin-motion coupling
    double dlambda   = 0;      // axial gravitational coupling
    double dlambda_x = 0;
    double dlambda_y = 0;
    double omega_x_ratio = 10.0;  // omega_x / omega_z
    double omega_y_ratio = 10.0;
    double zfs = 2.5;             // zero-field splitting D in hbar*omega_z
    double c_x = 0, c_y = 0, c_z = 1;

    double gamma_x() const { return std::sqrt(1.0 / omega_x_ratio); }
    double gamma_y() const { return std::sqrt(1.0 / omega_y_ratio); }

    void validate() const;
};

// Side-channel values worth reporting next to the couplings.
struct CouplingDiagnostics {
    double magnetic_moment = 0;  // A m^2
    double field_gradient  = 0;  // T/m, on-axis dB_z/dz at the trap center
    double k_parameter     = 0;  // K = 8 lambda (dlambda/cos theta) t0
};

CouplingSet couplings_from_physical(const PhysicalParams& p,
                                    CouplingDiagnostics* diag = nullptr);

// H = D S_z^2 + c^dag c - 2 (lambda S_z - dlambda)(c + c^dag) on spin (x) z.
LabeledOperator hamiltonian_1d(const CouplingSet& c, FockSpec z);

struct Hamiltonian3D {
    LabeledOperator h0;
    LabeledOperator v_x;  // lambda gamma_x S_x (a + a^dag)
    LabeledOperator v_y;  // lambda gamma_y S_y (b + b^dag)
};

// Zeroth-order Hamiltonian plus the transverse spin-motion couplings on
// spin (x) x (x) y (x) z.
Hamiltonian3D hamiltonian_3d(const CouplingSet& c, FockSpec x, FockSpec y, FockSpec z);

struct MisalignedHamiltonian {
    LabeledOperator h0;   // solvable part, coupling scaled by c_z
    LabeledOperator h_i;  // -2 lambda (c_x S_x + c_y S_y)(c + c^dag)
};

MisalignedHamiltonian hamiltonian_misaligned(const CouplingSet& c, FockSpec z);

enum class PulseMode { ideal, finite };

// Microwave pi/2-type pulse U_p = exp(-i H_mw t_p) with
// H_mw = Omega(|+1><0| + |-1><0| + h.c.) and t_p = pi/(2 sqrt(2) Omega):
// U_p|0> = -i(|+1> + |-1>)/sqrt(2). The ideal mode returns the closed-form
// unitary; the finite mode exponentiates H_mw numerically for the given
// Omega (free evolution during the pulse is neglected in both).
LabeledOperator microwave_pulse(double omega = 0.0, PulseMode mode = PulseMode::ideal);

}  // namespace nvlev
