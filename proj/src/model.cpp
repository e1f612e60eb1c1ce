#include "nvlev/model.hpp"

#include <cmath>

namespace nvlev {

namespace {

constexpr double mu_0          = 4 * pi * 1e-7;    // T m / A
constexpr double bohr_magneton = 9.2740100783e-24; // J / T
constexpr double hbar          = 1.054571817e-34;  // J s
constexpr double g_earth       = 9.80665;          // m / s^2

}  // namespace

double PhysicalParams::effective_mass() const {
    if (mass > 0) return mass;
    return density * (4.0 / 3.0) * pi * radius * radius * radius;
}

void PhysicalParams::validate() const {
    if (omega_x <= 0 || omega_y <= 0 || omega_z <= 0)
        throw std::invalid_argument("PhysicalParams: trap frequencies must be positive");
    if (effective_mass() <= 0)
        throw std::invalid_argument("PhysicalParams: mass (or radius and density) must be positive");
    if (std::abs(magnet_distance) <= magnet_radius)
        throw std::invalid_argument("PhysicalParams: |z0| must exceed the magnet radius");
    const double csum = c_x * c_x + c_y * c_y + c_z * c_z;
    if (std::abs(csum - 1.0) > 1e-9)
        throw std::invalid_argument("PhysicalParams: direction cosines not normalized, |c|^2 = " +
                                    std::to_string(csum));
    if (!std::isnan(theta_x) && !std::isnan(theta_y)) {
        const double s = std::cos(theta) * std::cos(theta) +
                         std::cos(theta_x) * std::cos(theta_x) +
                         std::cos(theta_y) * std::cos(theta_y);
        if (std::abs(s - 1.0) > 1e-9)
            throw std::invalid_argument(
                "PhysicalParams: cos^2(theta)+cos^2(theta_x)+cos^2(theta_y) = " +
                std::to_string(s) + ", expected 1");
    }
}

void CouplingSet::validate() const {
    if (omega_x_ratio <= 0 || omega_y_ratio <= 0)
        throw std::invalid_argument("CouplingSet: frequency ratios must be positive");
    const double csum = c_x * c_x + c_y * c_y + c_z * c_z;
    if (std::abs(csum - 1.0) > 1e-9)
        throw std::invalid_argument("CouplingSet: direction cosines not normalized, |c|^2 = " +
                                    std::to_string(csum));
}

CouplingSet couplings_from_physical(const PhysicalParams& p, CouplingDiagnostics* diag) {
    p.validate();
    const double m  = p.effective_mass();
    const double z0 = std::abs(p.magnet_distance);

    // Gravity direction: theta_y = pi/2 (gravity in the x-z plane) and
    // theta_x complementary to theta unless supplied explicitly.
    const double cos_t  = std::cos(p.theta);
    const double cos_tx = std::isnan(p.theta_x)
                              ? std::sqrt(std::max(0.0, 1.0 - cos_t * cos_t))
                              : std::cos(p.theta_x);
    const double cos_ty = std::isnan(p.theta_y) ? 0.0 : std::cos(p.theta_y);

    const double m_z = p.magnetization * (4.0 / 3.0) * pi * std::pow(p.magnet_radius, 3);
    // On-axis dipole field B_z(z) = mu0 m_z / (2 pi (z0 - z)^3); the linear
    // term gives dB_z/dz = 3 mu0 m_z / (2 pi z0^4) = 2 B0.
    const double b0       = 3.0 * mu_0 * m_z / (4.0 * pi * std::pow(z0, 4));
    const double gradient = 2.0 * b0;

    const double x_zpf   = std::sqrt(hbar / (2.0 * m * p.omega_z));
    const double e_scale = hbar * p.omega_z;

    auto zpf = [&](double omega) { return std::sqrt(hbar / (2.0 * m * omega)); };

    CouplingSet c;
    c.lambda_       = b0 * p.g_nv * bohr_magneton * x_zpf / e_scale;
    c.dlambda       = 0.5 * m * g_earth * cos_t * x_zpf / e_scale;
    c.dlambda_x     = 0.5 * m * g_earth * cos_tx * zpf(p.omega_x) / e_scale;
    c.dlambda_y     = 0.5 * m * g_earth * cos_ty * zpf(p.omega_y) / e_scale;
    c.omega_x_ratio = p.omega_x / p.omega_z;
    c.omega_y_ratio = p.omega_y / p.omega_z;
    c.zfs           = p.zero_field_splitting / p.omega_z;
    c.c_x           = p.c_x;
    c.c_y           = p.c_y;
    c.c_z           = p.c_z;
    c.validate();

    if (diag) {
        diag->magnetic_moment = m_z;
        diag->field_gradient  = gradient;
        const double dlambda_vertical = 0.5 * m * g_earth * x_zpf / e_scale;
        diag->k_parameter = 8.0 * c.lambda_ * dlambda_vertical * period;
    }
    return c;
}

namespace {

LabeledOperator mode_position(FockSpec spec) {
    const FockOps f = fock_ops(spec);
    Matrix x        = f.annihilate.matrix + f.create.matrix;
    return LabeledOperator(std::move(x), Layout{spec.n_levels}, true);
}

LabeledOperator identity_op(Index n) {
    return LabeledOperator(Matrix::Identity(n, n), Layout{n}, true);
}

}  // namespace

LabeledOperator hamiltonian_1d(const CouplingSet& c, FockSpec z) {
    c.validate();
    check_dense_dim(Layout{3, z.n_levels}, "hamiltonian_1d");
    const Spin1Ops s        = spin1_ops();
    const FockOps f         = fock_ops(z);
    const LabeledOperator x = mode_position(z);
    const LabeledOperator i3 = identity_op(3);
    const LabeledOperator iz = identity_op(z.n_levels);

    Matrix h = c.zfs * tensor(LabeledOperator(s.sz.matrix * s.sz.matrix, {3}, true), iz).matrix
             + tensor(i3, f.number).matrix
             - 2.0 * c.lambda_ * tensor(s.sz, x).matrix
             + 2.0 * c.dlambda * tensor(i3, x).matrix;
    return LabeledOperator(std::move(h), Layout{3, z.n_levels}, true);
}

Hamiltonian3D hamiltonian_3d(const CouplingSet& c, FockSpec x, FockSpec y, FockSpec z) {
    c.validate();
    check_dense_dim(Layout{3, x.n_levels, y.n_levels, z.n_levels}, "hamiltonian_3d");
    const Spin1Ops s = spin1_ops();
    const FockOps fx = fock_ops(x), fy = fock_ops(y), fz = fock_ops(z);
    const LabeledOperator xx = mode_position(x), xy = mode_position(y), xz = mode_position(z);
    const LabeledOperator i3 = identity_op(3);
    const LabeledOperator ix = identity_op(x.n_levels);
    const LabeledOperator iy = identity_op(y.n_levels);
    const LabeledOperator iz = identity_op(z.n_levels);

    auto lift = [&](const LabeledOperator& spin, const LabeledOperator& ox,
                    const LabeledOperator& oy, const LabeledOperator& oz) {
        return tensor(tensor(spin, ox), tensor(oy, oz)).matrix;
    };

    Matrix h0 = c.zfs * lift(LabeledOperator(s.sz.matrix * s.sz.matrix, {3}, true), ix, iy, iz)
              + c.omega_x_ratio * lift(i3, fx.number, iy, iz)
              + c.omega_y_ratio * lift(i3, ix, fy.number, iz)
              + lift(i3, ix, iy, fz.number)
              + 2.0 * c.dlambda_x * lift(i3, xx, iy, iz)
              + 2.0 * c.dlambda_y * lift(i3, ix, xy, iz)
              + 2.0 * c.dlambda * lift(i3, ix, iy, xz)
              - 2.0 * c.lambda_ * lift(s.sz, ix, iy, xz);

    Matrix vx = c.lambda_ * c.gamma_x() * lift(s.sx, xx, iy, iz);
    Matrix vy = c.lambda_ * c.gamma_y() * lift(s.sy, ix, xy, iz);

    Layout layout{3, x.n_levels, y.n_levels, z.n_levels};
    return Hamiltonian3D{LabeledOperator(std::move(h0), layout, true),
                         LabeledOperator(std::move(vx), layout, true),
                         LabeledOperator(std::move(vy), layout, true)};
}

MisalignedHamiltonian hamiltonian_misaligned(const CouplingSet& c, FockSpec z) {
    c.validate();
    check_dense_dim(Layout{3, z.n_levels}, "hamiltonian_misaligned");
    const Spin1Ops s        = spin1_ops();
    const FockOps f         = fock_ops(z);
    const LabeledOperator x = mode_position(z);
    const LabeledOperator i3 = identity_op(3);
    const LabeledOperator iz = identity_op(z.n_levels);

    Matrix h0 = c.zfs * tensor(LabeledOperator(s.sz.matrix * s.sz.matrix, {3}, true), iz).matrix
              + tensor(i3, f.number).matrix
              + 2.0 * c.dlambda * tensor(i3, x).matrix
              - 2.0 * c.lambda_ * c.c_z * tensor(s.sz, x).matrix;

    Matrix spin_i = c.c_x * s.sx.matrix + c.c_y * s.sy.matrix;
    Matrix hi     = -2.0 * c.lambda_ * tensor(LabeledOperator(spin_i, {3}, true), x).matrix;

    Layout layout{3, z.n_levels};
    return MisalignedHamiltonian{LabeledOperator(std::move(h0), layout, true),
                                 LabeledOperator(std::move(hi), layout, true)};
}

LabeledOperator microwave_pulse(double omega, PulseMode mode) {
    if (mode == PulseMode::ideal) {
        // exp(-i (pi/2) S_x) worked out on the bright/dark split:
        // |0> -> -i|b>, |b> -> -i|0>, |d> -> |d> with |b/d> = (|+1> +/- |-1>)/sqrt(2).
        const Complex mi{0.0, -1.0};
        Matrix u(3, 3);
        u << 0.5, mi / std::sqrt(2.0), -0.5,
             mi / std::sqrt(2.0), 0.0, mi / std::sqrt(2.0),
             -0.5, mi / std::sqrt(2.0), 0.5;
        return LabeledOperator(std::move(u), Layout{3}, false);
    }
    if (omega <= 0)
        throw std::invalid_argument("microwave_pulse: finite mode needs Omega > 0");
    const double t_p = pi / (2.0 * std::sqrt(2.0) * omega);
    Matrix h_mw = Matrix::Zero(3, 3);
    h_mw(0, 1) = h_mw(1, 0) = h_mw(2, 1) = h_mw(1, 2) = omega;
    Eigen::SelfAdjointEigenSolver<Matrix> es(h_mw);
    Vector phases(3);
    for (Index k = 0; k < 3; ++k)
        phases[k] = std::exp(Complex(0, -es.eigenvalues()[k] * t_p));
    Matrix u = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    return LabeledOperator(std::move(u), Layout{3}, false);
}

}  // namespace nvlev
