// analytic.hpp — closed-form solution of the 1D conditional-oscillator model
//
// Starting from |beta>|s_z>, the motion follows a spin-conditioned coherent
// trajectory that closes after one period, leaving only a c-number phase.
// The sign of the mid-period phase term follows the dynamics generated by
// the assembled 1D Hamiltonian (verified against the evolver to machine
// precision); at integer periods all conventions agree.

#pragma once

#include "nvlev/model.hpp"
#include "nvlev/types.hpp"

namespace nvlev {

struct Trajectory {
    Complex beta_t;  // coherent amplitude at time t
    double phase;    // accumulated c-number phase in radians
    double u;        // displaced-center parameter 2(s_z lambda c_z - dlambda)
};

// beta_t = (beta - u) e^{-it} + u;
// phase  = -(D s_z^2 - u^2) t + u Im(beta)(1 - cos t) + u (Re(beta) - u) sin t.
Trajectory coherent_trajectory(Complex beta, int s_z, double t, const CouplingSet& c);

// Relative phase 16 lambda c_z dlambda t0 between the s_z = +1 and -1
// branches after one period (reported with the positive sign convention;
// the trajectory difference phase(+1) - phase(-1) is its negative).
double gravitational_phase(const CouplingSet& c);

// P0 = cos^2(dphi / 2)
double ramsey_population(double dphi);

// Full Ramsey population at arbitrary hold time, including the coherent
// overlap <beta(t,-1)|beta(t,+1)> between the not-yet-closed trajectories.
// Reduces to ramsey_population(gravitational_phase(c)) at hold = 2 pi.
double analytic_p0(const CouplingSet& c, Complex beta, double hold_time);

}  // namespace nvlev
