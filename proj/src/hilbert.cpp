#include "nvlev/hilbert.hpp"

#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>

namespace nvlev {

namespace {

void check_layout_product(const Layout& layout, Index dim, const char* who) {
    if (layout.empty() || layout_dim(layout) != dim)
        throw LayoutError(std::string(who) + ": layout " + layout_string(layout) +
                          " does not match dimension " + std::to_string(dim));
}

}  // namespace

HybridState::HybridState(Vector amplitudes, Layout layout, double norm_tolerance)
    : amps_(std::move(amplitudes)), layout_(std::move(layout)), norm_tol_(norm_tolerance) {
    check_layout_product(layout_, amps_.size(), "HybridState");
    const double n = amps_.norm();
    if (std::abs(n - 1.0) > norm_tol_)
        throw std::invalid_argument("HybridState: norm " + std::to_string(n) +
                                    " outside tolerance " + std::to_string(norm_tol_));
}

HybridState HybridState::normalized(Vector amplitudes, Layout layout, double norm_tolerance) {
    const double n = amplitudes.norm();
    if (n < 1e-300)
        throw std::invalid_argument("HybridState::normalized: zero amplitude vector");
    amplitudes /= n;
    return HybridState(std::move(amplitudes), std::move(layout), norm_tolerance);
}

LabeledOperator::LabeledOperator(Matrix m, Layout l, bool hermitian)
    : matrix(std::move(m)), layout(std::move(l)), hermitian_flag(hermitian) {
    if (matrix.rows() != matrix.cols())
        throw std::invalid_argument("LabeledOperator: matrix must be square");
    check_layout_product(layout, matrix.rows(), "LabeledOperator");
    if (hermitian_flag) {
        const double scale  = std::max(1.0, matrix.cwiseAbs().maxCoeff());
        const double defect = (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
        if (defect > 1e-12 * scale)
            throw std::invalid_argument("LabeledOperator: hermitian_flag set but max|M - M^dag| = " +
                                        std::to_string(defect));
    }
}

FockOps fock_ops(FockSpec spec) {
    const Index n = spec.n_levels;
    Matrix a = Matrix::Zero(n, n);
    for (Index k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
    Layout layout{n};
    Matrix num = a.adjoint() * a;
    return FockOps{LabeledOperator(a, layout, false),
                   LabeledOperator(a.adjoint(), layout, false),
                   LabeledOperator(std::move(num), layout, true)};
}

Spin1Ops spin1_ops() {
    const double r = 1.0 / std::sqrt(2.0);
    const Complex i{0.0, 1.0};
    Matrix sx = Matrix::Zero(3, 3), sy = Matrix::Zero(3, 3), sz = Matrix::Zero(3, 3);
    sx(0, 1) = sx(1, 0) = sx(1, 2) = sx(2, 1) = r;
    sy(0, 1) = -i * r; sy(1, 0) = i * r;
    sy(1, 2) = -i * r; sy(2, 1) = i * r;
    sz(0, 0) = 1.0; sz(2, 2) = -1.0;
    Layout layout{3};
    return Spin1Ops{LabeledOperator(std::move(sx), layout, true),
                    LabeledOperator(std::move(sy), layout, true),
                    LabeledOperator(std::move(sz), layout, true)};
}

namespace {

// Unnormalized coherent amplitudes by stable recurrence c_{n+1} = c_n b/sqrt(n+1).
Vector coherent_amplitudes(Complex beta, Index n_levels) {
    Vector c(n_levels);
    c[0] = std::exp(-0.5 * std::norm(beta));
    for (Index k = 1; k < n_levels; ++k)
        c[k] = c[k - 1] * beta / std::sqrt(static_cast<double>(k));
    return c;
}

void check_leakage(Complex amp, FockSpec spec, double tol, const char* who) {
    const double kept = coherent_amplitudes(amp, spec.n_levels).squaredNorm();
    const double leak = 1.0 - kept;
    if (leak > tol)
        throw TruncationError(std::string(who) + ": |alpha| = " + std::to_string(std::abs(amp)) +
                              " leaks " + std::to_string(leak) + " past n_levels = " +
                              std::to_string(spec.n_levels) + " (bound " + std::to_string(tol) +
                              "); increase the truncation");
}

}  // namespace

double coherent_leakage(Complex beta, FockSpec spec) {
    return 1.0 - coherent_amplitudes(beta, spec.n_levels).squaredNorm();
}

HybridState coherent_state(Complex beta, FockSpec spec, double leakage_tol) {
    check_leakage(beta, spec, leakage_tol, "coherent_state");
    return HybridState::normalized(coherent_amplitudes(beta, spec.n_levels),
                                   Layout{spec.n_levels});
}

LabeledOperator displacement(Complex alpha, FockSpec spec, double leakage_tol) {
    check_leakage(alpha, spec, leakage_tol, "displacement");
    const Index n = spec.n_levels;
    // -i (alpha a^dag - conj(alpha) a) is Hermitian; D = exp(i * that).
    Matrix h = Matrix::Zero(n, n);
    for (Index k = 1; k < n; ++k) {
        const Complex g = alpha * std::sqrt(static_cast<double>(k));
        h(k, k - 1) = Complex(0, -1) * g;
        h(k - 1, k) = std::conj(h(k, k - 1));
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    const Index m = es.eigenvalues().size();
    Vector phases(m);
    for (Index k = 0; k < m; ++k)
        phases[k] = std::exp(Complex(0, es.eigenvalues()[k]));
    Matrix d = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    return LabeledOperator(std::move(d), Layout{n}, false);
}

HybridState displaced_number_state(Complex alpha, int n, FockSpec spec, double leakage_tol) {
    if (n < 0 || n >= spec.n_levels)
        throw std::out_of_range("displaced_number_state: n = " + std::to_string(n) +
                                " outside [0, " + std::to_string(spec.n_levels) + ")");
    const LabeledOperator d = displacement(alpha, spec, leakage_tol);
    return HybridState::normalized(d.matrix.col(n), Layout{spec.n_levels});
}

LabeledOperator tensor(const LabeledOperator& a, const LabeledOperator& b) {
    Matrix m = Eigen::kroneckerProduct(a.matrix, b.matrix);
    Layout layout = a.layout;
    layout.insert(layout.end(), b.layout.begin(), b.layout.end());
    return LabeledOperator(std::move(m), std::move(layout),
                           a.hermitian_flag && b.hermitian_flag);
}

LabeledOperator tensor(std::span<const LabeledOperator> factors) {
    if (factors.empty()) throw std::invalid_argument("tensor: no factors");
    LabeledOperator out = factors[0];
    for (std::size_t i = 1; i < factors.size(); ++i) out = tensor(out, factors[i]);
    return out;
}

HybridState tensor(const HybridState& a, const HybridState& b) {
    Vector v(a.dim() * b.dim());
    for (Index i = 0; i < a.dim(); ++i)
        v.segment(i * b.dim(), b.dim()) = a.amplitudes()[i] * b.amplitudes();
    Layout layout = a.layout();
    layout.insert(layout.end(), b.layout().begin(), b.layout().end());
    return HybridState::normalized(std::move(v), std::move(layout));
}

HybridState tensor(std::span<const HybridState> factors) {
    if (factors.empty()) throw std::invalid_argument("tensor: no factors");
    HybridState out = factors[0];
    for (std::size_t i = 1; i < factors.size(); ++i) out = tensor(out, factors[i]);
    return out;
}

double fidelity(const HybridState& psi, const HybridState& phi) {
    if (!same_layout(psi.layout(), phi.layout()))
        throw LayoutError("fidelity: layouts " + layout_string(psi.layout()) + " vs " +
                          layout_string(phi.layout()));
    return std::abs(psi.amplitudes().dot(phi.amplitudes()));
}

Matrix first_factor_density(const HybridState& psi) {
    const Index d0   = psi.layout().front();
    const Index rest = psi.dim() / d0;
    Eigen::Map<const Matrix> blocks(psi.amplitudes().data(), rest, d0);
    return (blocks.adjoint() * blocks).conjugate();
}

}  // namespace nvlev
