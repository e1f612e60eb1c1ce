// hilbert.hpp — truncated-Fock / spin-1 linear algebra kernel
//
// Truncation failures are loud: any constructor whose target state leaks
// more than the leakage tolerance past the cutoff throws TruncationError
// instead of silently renormalizing garbage.

#pragma once

#include <span>

#include "nvlev/types.hpp"

namespace nvlev {

inline constexpr double default_leakage_tol = 1e-10;
inline constexpr double default_norm_tol    = 1e-10;

struct FockSpec {
    int n_levels;

    explicit FockSpec(int n) : n_levels(n) {
        if (n < 2)
            throw std::invalid_argument("FockSpec: n_levels must be >= 2, got " +
                                        std::to_string(n));
    }
};

// Normalized state vector on a declared tensor-factor layout (spin first,
// then modes). Immutable after construction.
class HybridState {
public:
    HybridState(Vector amplitudes, Layout layout, double norm_tolerance = default_norm_tol);

    // Renormalizes the given amplitudes (error if the norm is numerically zero).
    static HybridState normalized(Vector amplitudes, Layout layout,
                                  double norm_tolerance = default_norm_tol);

    const Vector& amplitudes() const { return amps_; }
    const Layout& layout() const { return layout_; }
    Index dim() const { return amps_.size(); }
    double norm_tolerance() const { return norm_tol_; }

private:
    Vector amps_;
    Layout layout_;
    double norm_tol_;
};

// Square matrix on a declared tensor-factor layout. When hermitian_flag is
// set the constructor verifies max|M - M^dag| against the matrix scale.
struct LabeledOperator {
    Matrix matrix;
    Layout layout;
    bool hermitian_flag = false;

    LabeledOperator(Matrix m, Layout l, bool hermitian);

    Index dim() const { return matrix.rows(); }
};

struct FockOps {
    LabeledOperator annihilate;
    LabeledOperator create;
    LabeledOperator number;
};

// a|n> = sqrt(n)|n-1> on the truncated ladder; create = a^dag; number = a^dag a.
FockOps fock_ops(FockSpec spec);

struct Spin1Ops {
    LabeledOperator sx;
    LabeledOperator sy;
    LabeledOperator sz;
};

// Spin-1 matrices in the S_z eigenbasis |+1>,|0>,|-1>, eigenvalues {+1,0,-1}
// (hbar absorbed into the dimensionless convention).
Spin1Ops spin1_ops();

// Probability weight of |beta> beyond the top retained level.
double coherent_leakage(Complex beta, FockSpec spec);

// |beta> with <n|beta> = exp(-|beta|^2/2) beta^n / sqrt(n!), renormalized.
// Throws TruncationError when the leakage bound is violated.
HybridState coherent_state(Complex beta, FockSpec spec,
                           double leakage_tol = default_leakage_tol);

// D(alpha) = exp(alpha a^dag - conj(alpha) a), built by exponentiating the
// generator through its eigendecomposition so the result stays unitary on
// the retained subspace.
LabeledOperator displacement(Complex alpha, FockSpec spec,
                             double leakage_tol = default_leakage_tol);

// D(alpha)|n>
HybridState displaced_number_state(Complex alpha, int n, FockSpec spec,
                                   double leakage_tol = default_leakage_tol);

// Kronecker composites with concatenated layouts.
LabeledOperator tensor(std::span<const LabeledOperator> factors);
HybridState tensor(std::span<const HybridState> factors);
LabeledOperator tensor(const LabeledOperator& a, const LabeledOperator& b);
HybridState tensor(const HybridState& a, const HybridState& b);

// |<psi|phi>|, insensitive to global phase. Throws LayoutError on mismatch.
double fidelity(const HybridState& psi, const HybridState& phi);

// Reduced density matrix of the first tensor factor (the spin).
Matrix first_factor_density(const HybridState& psi);

}  // namespace nvlev
