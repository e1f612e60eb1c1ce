#include "nvlev/evolver.hpp"

#include <cmath>

namespace nvlev {

EigSystem eigendecompose(const LabeledOperator& h) {
    const Index n = h.dim();
    check_dense_dim(h.layout, "eigendecompose");
    const double scale  = std::max(1.0, h.matrix.cwiseAbs().maxCoeff());
    const double defect = (h.matrix - h.matrix.adjoint()).cwiseAbs().maxCoeff();
    if (defect > 1e-12 * scale)
        throw std::invalid_argument("eigendecompose: input not Hermitian, max|H - H^dag| = " +
                                    std::to_string(defect));
    Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("eigendecompose: solver failed to converge");
    return EigSystem{es.eigenvalues(), es.eigenvectors(), n, h.layout};
}

namespace {

Vector phase_factors(const RealVector& energies, double t) {
    Vector p(energies.size());
    for (Index k = 0; k < energies.size(); ++k)
        p[k] = std::exp(Complex(0, -energies[k] * t));
    return p;
}

}  // namespace

HybridState evolve(const HybridState& psi, const EigSystem& eig, double t) {
    if (!same_layout(psi.layout(), eig.layout))
        throw LayoutError("evolve: state layout " + layout_string(psi.layout()) +
                          " vs operator layout " + layout_string(eig.layout));
    Vector coeffs = eig.vectors.adjoint() * psi.amplitudes();
    coeffs.array() *= phase_factors(eig.energies, t).array();
    return HybridState::normalized(eig.vectors * coeffs, psi.layout(), psi.norm_tolerance());
}

Matrix evolve_density(const Matrix& rho, const EigSystem& eig, double t, double tol) {
    if (rho.rows() != eig.source_dim || rho.cols() != eig.source_dim)
        throw LayoutError("evolve_density: density dimension " + std::to_string(rho.rows()) +
                          " vs operator dimension " + std::to_string(eig.source_dim));
    const double scale = std::max(1.0, rho.cwiseAbs().maxCoeff());
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol * scale)
        throw std::invalid_argument("evolve_density: rho not Hermitian");
    if (std::abs(rho.trace().real() - 1.0) > tol || std::abs(rho.trace().imag()) > tol)
        throw std::invalid_argument("evolve_density: tr(rho) = " +
                                    std::to_string(rho.trace().real()) + ", expected 1");
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol)
        throw std::invalid_argument("evolve_density: rho not positive semidefinite, min eig = " +
                                    std::to_string(es.eigenvalues().minCoeff()));
    const Vector p = phase_factors(eig.energies, t);
    Matrix u       = eig.vectors * p.asDiagonal() * eig.vectors.adjoint();
    return u * rho * u.adjoint();
}

Matrix thermal_density(double nbar, FockSpec spec, double tail_tol) {
    if (nbar < 0) throw std::invalid_argument("thermal_density: nbar must be >= 0");
    const Index n = spec.n_levels;
    RealVector p(n);
    if (nbar == 0) {
        p.setZero();
        p[0] = 1.0;
    } else {
        const double q = nbar / (1.0 + nbar);
        p[0] = 1.0 / (1.0 + nbar);
        for (Index k = 1; k < n; ++k) p[k] = p[k - 1] * q;
    }
    const double kept = p.sum();
    if (1.0 - kept > tail_tol)
        throw TruncationError("thermal_density: nbar = " + std::to_string(nbar) + " leaves " +
                              std::to_string(1.0 - kept) + " beyond n_levels = " +
                              std::to_string(n));
    Matrix rho = Matrix::Zero(n, n);
    for (Index k = 0; k < n; ++k) rho(k, k) = p[k] / kept;
    return rho;
}

}  // namespace nvlev
