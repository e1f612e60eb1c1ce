// evolver.hpp — exact time evolution by full eigendecomposition
//
// Exact at machine precision for any t (the Hamiltonians here are time
// independent), and the decomposition is reusable across evaluation times
// and sweep points sharing the same operator.

#pragma once

#include "nvlev/hilbert.hpp"
#include "nvlev/types.hpp"

namespace nvlev {

struct EigSystem {
    RealVector energies;  // ascending
    Matrix vectors;       // unitary, columns are eigenvectors
    Index source_dim = 0;
    Layout layout;
};

// Throws std::invalid_argument for non-Hermitian input or an oversized layout.
EigSystem eigendecompose(const LabeledOperator& h);

// psi(t) = V exp(-i E t) V^dag psi
HybridState evolve(const HybridState& psi, const EigSystem& eig, double t);

// rho -> U rho U^dag with U = V exp(-i E t) V^dag. Validates Hermiticity,
// unit trace and positive semidefiniteness (within tol) of the input.
Matrix evolve_density(const Matrix& rho, const EigSystem& eig, double t,
                      double tol = 1e-10);

// Fock-diagonal thermal state with mean occupation nbar, renormalized on the
// truncated ladder. Throws TruncationError when the tail exceeds tail_tol.
Matrix thermal_density(double nbar, FockSpec spec, double tail_tol = 1e-8);

}  // namespace nvlev
