#include "nvlev/analytic.hpp"

#include <cmath>

namespace nvlev {

Trajectory coherent_trajectory(Complex beta, int s_z, double t, const CouplingSet& c) {
    if (s_z < -1 || s_z > 1)
        throw std::invalid_argument("coherent_trajectory: s_z must be -1, 0 or +1");
    const double u = 2.0 * (s_z * c.lambda_ * c.c_z - c.dlambda);
    const Complex beta_t = (beta - u) * std::exp(Complex(0, -t)) + u;
    const double phase = -(c.zfs * s_z * s_z - u * u) * t
                         + u * beta.imag() * (1.0 - std::cos(t))
                         + u * (beta.real() - u) * std::sin(t);
    return Trajectory{beta_t, phase, u};
}

double gravitational_phase(const CouplingSet& c) {
    return 16.0 * c.lambda_ * c.c_z * c.dlambda * period;
}

double ramsey_population(double dphi) {
    const double h = std::cos(dphi / 2.0);
    return h * h;
}

double analytic_p0(const CouplingSet& c, Complex beta, double hold_time) {
    const Trajectory up   = coherent_trajectory(beta, +1, hold_time, c);
    const Trajectory down = coherent_trajectory(beta, -1, hold_time, c);
    // <b_-|b_+> = exp(-|b_-|^2/2 - |b_+|^2/2 + conj(b_-) b_+)
    const Complex overlap = std::exp(-0.5 * std::norm(down.beta_t) - 0.5 * std::norm(up.beta_t)
                                     + std::conj(down.beta_t) * up.beta_t);
    const Complex cross = std::exp(Complex(0, -(up.phase - down.phase))) * std::conj(overlap);
    return 0.5 * (1.0 + cross.real());
}

}  // namespace nvlev
