// perturb.hpp — Rayleigh-Schrodinger machinery on the displaced-number basis
//
// The zeroth-order Hamiltonians here separate into spin sectors, each a set
// of harmonic ladders displaced by a sector-dependent amount. Everything is
// expressed in the coordinates of that analytic eigenbasis: energies come
// from the closed form, perturbation elements factorize per mode, and the
// cross-sector z overlaps are Franck-Condon factors taken from displacement
// matrices. Nondegenerate theory only; a coupled near-degenerate pair is an
// error, not a warning.

#pragma once

#include <array>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/SparseCore>

#include "nvlev/hilbert.hpp"
#include "nvlev/model.hpp"
#include "nvlev/types.hpp"

namespace nvlev {

// Eigenbasis of a sector-separable H0: product states of |s_z> and displaced
// number states, with closed-form energies. Flat indexing coincides with the
// raw tensor layout (spin-major), so sector blocks are contiguous.
class UnperturbedBasis {
public:
    UnperturbedBasis(const CouplingSet& c, std::vector<FockSpec> modes);

    Index dim() const { return energies_.size(); }
    int mode_count() const { return static_cast<int>(modes_.size()); }
    const Layout& layout() const { return layout_; }
    const RealVector& energies() const { return energies_; }
    double zfs() const { return zfs_; }

    // displacement alpha of the given mode in the given spin sector
    // (sector 0,1,2 = s_z +1,0,-1)
    double displacement(int sector, int mode) const { return alpha_[sector][mode]; }
    double ratio(int mode) const { return ratios_[mode]; }
    static int sector_spin(int sector) { return 1 - sector; }

    struct Label {
        int sector;
        std::array<int, 3> n;  // occupations for the modes present
    };
    Label label(Index flat) const;
    Index flat_index(int sector, std::span<const int> n) const;
    std::string label_string(Index flat) const;

    // D(alpha) of the given sector and mode, in the Fock basis.
    const Matrix& mode_matrix(int sector, int mode) const { return dmat_[sector][mode]; }

    // Change of coordinates between the raw Fock representation and this
    // basis; both are exactly unitary on the truncated space.
    Vector to_coords(const Vector& raw) const;
    Vector from_coords(const Vector& coords) const;

    // Raw-space vector of basis state i (column i of the basis matrix).
    Vector basis_vector(Index flat) const;

private:
    std::vector<FockSpec> modes_;
    std::vector<double> ratios_;
    std::array<std::vector<double>, 3> alpha_;  // [sector][mode]
    std::array<std::vector<Matrix>, 3> dmat_;   // [sector][mode]
    double zfs_;
    Layout layout_;
    RealVector energies_;
};

// Builds the displaced-number eigensystem for either the three-mode
// transverse-coupling analysis (specs = x, y, z) or the single-mode
// misalignment analysis (specs = z). The axial coupling is lambda * c_z.
UnperturbedBasis unperturbed_eigensystem(const CouplingSet& c, std::span<const FockSpec> specs);

// Exact H0 evolution of a raw state through the analytic basis.
HybridState unperturbed_evolve(const UnperturbedBasis& basis, const HybridState& psi0, double t);

// One factorized perturbation term: spin (x) (a_m + a_m^dag) on the given
// mode, prefactors folded into the spin matrix.
struct CouplingTerm {
    Eigen::Matrix3cd spin;
    int mode = 0;
};

// V_x + V_y = lambda gamma_x S_x (a+a^dag) + lambda gamma_y S_y (b+b^dag)
std::vector<CouplingTerm> transverse_coupling_terms(const CouplingSet& c);
// H_I = -2 lambda (c_x S_x + c_y S_y)(c+c^dag)
std::vector<CouplingTerm> misalignment_coupling_terms(const CouplingSet& c);

// Sparse table of H'_{ij} = <i|V|j> in basis coordinates.
struct ElementTable {
    std::vector<std::vector<std::pair<Index, Complex>>> rows;
    double max_abs = 0;

    Index dim() const { return static_cast<Index>(rows.size()); }
    Complex at(Index i, Index j) const;
};

// Structured route: selection rules make each term touch one mode ladder
// (by +/-1, plus a diagonal channel when that mode is displaced) while the
// cross-sector z overlap runs over a Franck-Condon column. Factors smaller
// than fc_floor are dropped. A nonzero diagonal element is refused: this
// machinery assumes vanishing first-order corrections.
ElementTable matrix_elements(std::span<const CouplingTerm> terms, const UnperturbedBasis& basis,
                             double fc_floor = 1e-14);

// Dense route for cross-validation at small dimensions: sandwiches an
// explicit operator between basis vectors.
ElementTable matrix_elements(const LabeledOperator& v, const UnperturbedBasis& basis,
                             double floor_abs = 1e-14);

class ExpansionSolver;  // factorization of the corrected-vector matrix

// Second-order energies and renormalized first-order eigenvectors.
struct PerturbedSystem {
    UnperturbedBasis basis;
    RealVector corrected_energies;
    Eigen::SparseMatrix<Complex> corrected_vectors;  // columns, in basis coordinates
    Index degenerate_excluded = 0;  // near-degenerate pairs skipped as uncoupled

    std::shared_ptr<const ExpansionSolver> expansion;
};

// Throws DegeneracyError naming the offending pair when a coupled pair sits
// closer than eps_degen.
PerturbedSystem second_order(const UnperturbedBasis& basis, const ElementTable& table,
                             double eps_degen = 1e-6);

// Expand psi0 in the corrected basis (an exact sparse solve, so t = 0 is an
// identity round trip), attach exp(-i E t) per corrected energy, reassemble,
// renormalize.
HybridState perturbed_evolve(const HybridState& psi0, const PerturbedSystem& sys, double t);

struct FidelityOptions {
    double dlambda   = 0.1;
    double dlambda_x = 0.0;
    double dlambda_y = 0.0;
    double zfs       = 2.5;
    double hold_time = period;
    double eps_degen = 1e-6;
};

// Overlap |<Psi0(t)|Psi2(t)>| between the transverse-coupled evolution
// (second order) and the axial-model prediction after one period, starting
// from |beta>_z (x) displaced ground states of x,y (x) (|+1>+|-1>)/sqrt(2).
double perturbation_fidelity(double lambda, double gamma_x, double gamma_y, Complex beta,
                             FockSpec x, FockSpec y, FockSpec z,
                             const FidelityOptions& opts = {});

}  // namespace nvlev
