#include "nvlev/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <Eigen/SparseLU>

namespace nvlev {

namespace {

double clamped_ratio(double r) {
    if (r <= 0) throw std::invalid_argument("UnperturbedBasis: frequency ratio must be positive");
    return r;
}

}  // namespace

UnperturbedBasis::UnperturbedBasis(const CouplingSet& c, std::vector<FockSpec> modes)
    : modes_(std::move(modes)), zfs_(c.zfs) {
    c.validate();
    const int nm = static_cast<int>(modes_.size());
    if (nm != 1 && nm != 3)
        throw std::invalid_argument("UnperturbedBasis: expected 1 (z) or 3 (x,y,z) mode specs");
    if (nm == 3 && (c.c_x != 0.0 || c.c_y != 0.0))
        throw std::invalid_argument("UnperturbedBasis: the three-mode basis assumes an aligned NV axis");

    layout_.push_back(3);
    for (const auto& m : modes_) layout_.push_back(m.n_levels);

    // Per-mode ladder r a^dag a + kappa (a + a^dag): eigenstates D(-kappa/r)|n>,
    // energies r n - kappa^2 / r.
    std::vector<double> kappa_fixed;  // spin-independent part per mode
    if (nm == 3) {
        ratios_     = {clamped_ratio(c.omega_x_ratio), clamped_ratio(c.omega_y_ratio), 1.0};
        kappa_fixed = {2.0 * c.dlambda_x, 2.0 * c.dlambda_y, 2.0 * c.dlambda};
    } else {
        ratios_     = {1.0};
        kappa_fixed = {2.0 * c.dlambda};
    }
    const int zmode = nm - 1;
    const double axial = c.lambda_ * c.c_z;

    for (int sector = 0; sector < 3; ++sector) {
        const int s = sector_spin(sector);
        alpha_[sector].resize(nm);
        dmat_[sector].resize(nm);
        for (int m = 0; m < nm; ++m) {
            double kappa = kappa_fixed[m];
            if (m == zmode) kappa -= 2.0 * axial * s;
            alpha_[sector][m] = -kappa / ratios_[m];
            // Leakage gate disabled here: the truncated displacement is an
            // exactly unitary change of coordinates at any cutoff. States
            // fed through it are leakage-checked where they are built.
            dmat_[sector][m] =
                nvlev::displacement(Complex(alpha_[sector][m], 0.0), modes_[m], 1.0).matrix;
        }
    }

    energies_.resize(layout_dim(layout_));
    for (Index flat = 0; flat < energies_.size(); ++flat) {
        const Label l = label(flat);
        const int s   = sector_spin(l.sector);
        double e      = zfs_ * s * s;
        for (int m = 0; m < nm; ++m) {
            const double a = alpha_[l.sector][m];
            e += ratios_[m] * (l.n[m] - a * a);
        }
        energies_[flat] = e;
    }
}

UnperturbedBasis::Label UnperturbedBasis::label(Index flat) const {
    Label l{};
    const int nm = mode_count();
    for (int m = nm - 1; m >= 0; --m) {
        l.n[m] = static_cast<int>(flat % modes_[m].n_levels);
        flat /= modes_[m].n_levels;
    }
    l.sector = static_cast<int>(flat);
    return l;
}

Index UnperturbedBasis::flat_index(int sector, std::span<const int> n) const {
    Index flat = sector;
    for (int m = 0; m < mode_count(); ++m) flat = flat * modes_[m].n_levels + n[m];
    return flat;
}

std::string UnperturbedBasis::label_string(Index flat) const {
    const Label l = label(flat);
    std::string s = "(s_z=" + std::to_string(sector_spin(l.sector));
    for (int m = 0; m < mode_count(); ++m) s += ", n=" + std::to_string(l.n[m]);
    return s + ")";
}

namespace {

// In-place contraction of matrix m along one tensor axis of v, viewed as
// [outer, axis, inner].
void apply_along_axis(const Matrix& m, Index outer, Index axis, Index inner, Vector& v) {
    Vector tmp(axis);
    for (Index o = 0; o < outer; ++o) {
        Complex* base = v.data() + o * axis * inner;
        for (Index in = 0; in < inner; ++in) {
            Eigen::Map<Vector, 0, Eigen::InnerStride<>> slice(base + in, axis,
                                                              Eigen::InnerStride<>(inner));
            tmp.noalias() = m * slice;
            slice         = tmp;
        }
    }
}

}  // namespace

Vector UnperturbedBasis::to_coords(const Vector& raw) const {
    if (raw.size() != dim())
        throw LayoutError("to_coords: dimension mismatch");
    Vector out  = raw;
    const int nm = mode_count();
    Index block = dim() / 3;
    for (int sector = 0; sector < 3; ++sector) {
        Vector seg = out.segment(sector * block, block);
        Index outer = 1;
        for (int m = 0; m < nm; ++m) {
            const Index axis  = modes_[m].n_levels;
            const Index inner = block / (outer * axis);
            apply_along_axis(dmat_[sector][m].adjoint(), outer, axis, inner, seg);
            outer *= axis;
        }
        out.segment(sector * block, block) = seg;
    }
    return out;
}

Vector UnperturbedBasis::from_coords(const Vector& coords) const {
    if (coords.size() != dim())
        throw LayoutError("from_coords: dimension mismatch");
    Vector out  = coords;
    const int nm = mode_count();
    Index block = dim() / 3;
    for (int sector = 0; sector < 3; ++sector) {
        Vector seg = out.segment(sector * block, block);
        Index outer = 1;
        for (int m = 0; m < nm; ++m) {
            const Index axis  = modes_[m].n_levels;
            const Index inner = block / (outer * axis);
            apply_along_axis(dmat_[sector][m], outer, axis, inner, seg);
            outer *= axis;
        }
        out.segment(sector * block, block) = seg;
    }
    return out;
}

Vector UnperturbedBasis::basis_vector(Index flat) const {
    Vector e = Vector::Zero(dim());
    e[flat]  = 1.0;
    return from_coords(e);
}

UnperturbedBasis unperturbed_eigensystem(const CouplingSet& c, std::span<const FockSpec> specs) {
    return UnperturbedBasis(c, std::vector<FockSpec>(specs.begin(), specs.end()));
}

HybridState unperturbed_evolve(const UnperturbedBasis& basis, const HybridState& psi0, double t) {
    if (!same_layout(psi0.layout(), basis.layout()))
        throw LayoutError("unperturbed_evolve: state layout " + layout_string(psi0.layout()) +
                          " vs basis layout " + layout_string(basis.layout()));
    Vector a = basis.to_coords(psi0.amplitudes());
    for (Index i = 0; i < a.size(); ++i)
        a[i] *= std::exp(Complex(0, -basis.energies()[i] * t));
    return HybridState::normalized(basis.from_coords(a), psi0.layout(), psi0.norm_tolerance());
}

std::vector<CouplingTerm> transverse_coupling_terms(const CouplingSet& c) {
    const Spin1Ops s = spin1_ops();
    return {CouplingTerm{c.lambda_ * c.gamma_x() * s.sx.matrix, 0},
            CouplingTerm{c.lambda_ * c.gamma_y() * s.sy.matrix, 1}};
}

std::vector<CouplingTerm> misalignment_coupling_terms(const CouplingSet& c) {
    const Spin1Ops s = spin1_ops();
    Eigen::Matrix3cd spin = -2.0 * c.lambda_ * (c.c_x * s.sx.matrix + c.c_y * s.sy.matrix);
    return {CouplingTerm{spin, 0}};
}

Complex ElementTable::at(Index i, Index j) const {
    for (const auto& [k, v] : rows[i])
        if (k == j) return v;
    return {};
}

namespace {

void insert_element(ElementTable& table, Index i, Index j, Complex v,
                    const UnperturbedBasis& basis) {
    if (i == j)
        throw std::invalid_argument("matrix_elements: nonzero diagonal element at " +
                                    basis.label_string(i) +
                                    "; first-order corrections are assumed to vanish");
    table.rows[i].emplace_back(j, v);
    table.max_abs = std::max(table.max_abs, std::abs(v));
}

void consolidate(ElementTable& table) {
    for (auto& row : table.rows) {
        std::sort(row.begin(), row.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        std::size_t w = 0;
        for (std::size_t r = 0; r < row.size(); ++r) {
            if (w > 0 && row[w - 1].first == row[r].first)
                row[w - 1].second += row[r].second;
            else
                row[w++] = row[r];
        }
        row.resize(w);
    }
}

}  // namespace

ElementTable matrix_elements(std::span<const CouplingTerm> terms, const UnperturbedBasis& basis,
                             double fc_floor) {
    const int nm = basis.mode_count();
    ElementTable table;
    table.rows.resize(basis.dim());

    // channel list per mode value n: candidate (k, factor) pairs
    using Channels = std::vector<std::vector<std::pair<int, Complex>>>;
    auto matrix_channels = [&](const Matrix& f) {
        Channels ch(f.rows());
        for (Index n = 0; n < f.rows(); ++n)
            for (Index k = 0; k < f.cols(); ++k)
                if (std::abs(f(n, k)) > fc_floor) ch[n].emplace_back(static_cast<int>(k), f(n, k));
        return ch;
    };

    for (const CouplingTerm& term : terms) {
        if (term.mode < 0 || term.mode >= nm)
            throw std::invalid_argument("matrix_elements: term mode out of range");
        for (int si = 0; si < 3; ++si) {
            for (int sj = 0; sj < 3; ++sj) {
                const Complex g = term.spin(si, sj);
                if (std::abs(g) == 0.0) continue;
                // Per-mode factor matrices between sectors si (bra) and sj
                // (ket). The coupled mode carries the full truncated sandwich
                // D_i^dag (a + a^dag) D_j, which stays consistent with exact
                // diagonalization at the same cutoff; the others reduce to
                // truncated Franck-Condon overlaps.
                std::vector<Channels> chans(nm);
                for (int m = 0; m < nm; ++m) {
                    Matrix f;
                    if (m == term.mode) {
                        const Index n = basis.mode_matrix(si, m).rows();
                        Matrix x      = Matrix::Zero(n, n);
                        for (Index k = 1; k < n; ++k) {
                            x(k - 1, k) = std::sqrt(static_cast<double>(k));
                            x(k, k - 1) = x(k - 1, k);
                        }
                        f = basis.mode_matrix(si, m).adjoint() * x * basis.mode_matrix(sj, m);
                    } else {
                        f = basis.mode_matrix(si, m).adjoint() * basis.mode_matrix(sj, m);
                    }
                    chans[m] = matrix_channels(f);
                }
                // cartesian product of per-mode channels
                std::vector<int> n(nm), k(nm);
                std::function<void(int, Complex, Index)> walk =
                    [&](int m, Complex acc, Index bra_flat) {
                        if (m == nm) {
                            const Index ket = basis.flat_index(sj, k);
                            insert_element(table, bra_flat, ket, g * acc, basis);
                            return;
                        }
                        for (const auto& [kk, f] : chans[m][n[m]]) {
                            k[m] = kk;
                            walk(m + 1, acc * f, bra_flat);
                        }
                    };
                const Index block = basis.dim() / 3;
                for (Index b = 0; b < block; ++b) {
                    const Index bra = si * block + b;
                    const auto l    = basis.label(bra);
                    for (int m = 0; m < nm; ++m) n[m] = l.n[m];
                    walk(0, Complex(1.0, 0.0), bra);
                }
            }
        }
    }
    consolidate(table);
    return table;
}

ElementTable matrix_elements(const LabeledOperator& v, const UnperturbedBasis& basis,
                             double floor_abs) {
    if (!same_layout(v.layout, basis.layout()))
        throw LayoutError("matrix_elements: operator layout " + layout_string(v.layout) +
                          " vs basis layout " + layout_string(basis.layout()));
    if (basis.dim() > 3000)
        throw std::invalid_argument("matrix_elements(dense): dimension too large for the dense "
                                    "route; use the structured overload");
    ElementTable table;
    table.rows.resize(basis.dim());
    for (Index j = 0; j < basis.dim(); ++j) {
        const Vector col = basis.to_coords(v.matrix * basis.basis_vector(j));
        for (Index i = 0; i < basis.dim(); ++i) {
            if (std::abs(col[i]) > floor_abs) insert_element(table, i, j, col[i], basis);
        }
    }
    consolidate(table);
    return table;
}

class ExpansionSolver {
public:
    explicit ExpansionSolver(const Eigen::SparseMatrix<Complex>& m) { lu_.compute(m); }
    bool ok() const { return lu_.info() == Eigen::Success; }
    Vector solve(const Vector& rhs) const { return lu_.solve(rhs); }

private:
    Eigen::SparseLU<Eigen::SparseMatrix<Complex>> lu_;
};

PerturbedSystem second_order(const UnperturbedBasis& basis, const ElementTable& table,
                             double eps_degen) {
    if (eps_degen <= 0) throw std::invalid_argument("second_order: eps_degen must be positive");
    if (table.dim() != basis.dim())
        throw LayoutError("second_order: table dimension does not match basis");
    const Index dim   = basis.dim();
    const double floor = 1e-12 * std::max(table.max_abs, 1e-300);
    const RealVector& e0 = basis.energies();

    RealVector e2 = e0;
    Index excluded = 0;
    std::vector<Eigen::Triplet<Complex>> triplets;
    std::vector<std::pair<Index, Complex>> column;
    for (Index i = 0; i < dim; ++i) {
        column.clear();
        double z2 = 1.0;
        for (const auto& [j, v] : table.rows[i]) {
            const double de = e0[i] - e0[j];
            if (std::abs(de) < eps_degen) {
                if (std::abs(v) > floor)
                    throw DegeneracyError("second_order: coupled pair " + basis.label_string(i) +
                                          " and " + basis.label_string(j) + " separated by only " +
                                          std::to_string(de) +
                                          "; nondegenerate theory does not apply");
                ++excluded;
                continue;
            }
            e2[i] += std::norm(v) / de;
            // Correction of vector i along j carries H'_{ji} = conj(H'_{ij}).
            const Complex coeff = std::conj(v) / de;
            column.emplace_back(j, coeff);
            z2 += std::norm(coeff);
        }
        const double inv_z = 1.0 / std::sqrt(z2);
        triplets.emplace_back(static_cast<int>(i), static_cast<int>(i), Complex(inv_z, 0));
        for (const auto& [j, coeff] : column)
            triplets.emplace_back(static_cast<int>(j), static_cast<int>(i), coeff * inv_z);
    }

    Eigen::SparseMatrix<Complex> vectors(dim, dim);
    vectors.setFromTriplets(triplets.begin(), triplets.end());
    vectors.makeCompressed();

    auto solver = std::make_shared<ExpansionSolver>(vectors);
    if (!solver->ok())
        throw std::runtime_error("second_order: expansion factorization failed");
    return PerturbedSystem{basis, std::move(e2), std::move(vectors), excluded, std::move(solver)};
}

HybridState perturbed_evolve(const HybridState& psi0, const PerturbedSystem& sys, double t) {
    if (!same_layout(psi0.layout(), sys.basis.layout()))
        throw LayoutError("perturbed_evolve: state layout " + layout_string(psi0.layout()) +
                          " vs basis layout " + layout_string(sys.basis.layout()));
    Vector a = sys.expansion->solve(sys.basis.to_coords(psi0.amplitudes()));
    for (Index i = 0; i < a.size(); ++i)
        a[i] *= std::exp(Complex(0, -sys.corrected_energies[i] * t));
    Vector coords = sys.corrected_vectors * a;
    return HybridState::normalized(sys.basis.from_coords(coords), psi0.layout(),
                                   psi0.norm_tolerance());
}

double perturbation_fidelity(double lambda, double gamma_x, double gamma_y, Complex beta,
                             FockSpec x, FockSpec y, FockSpec z, const FidelityOptions& opts) {
    if (gamma_x < 0 || gamma_y < 0)
        throw std::invalid_argument("perturbation_fidelity: gamma must be >= 0");
    auto ratio = [](double g) { return g > 0 ? 1.0 / (g * g) : 1e12; };  // gamma = 0: decoupled
    CouplingSet c;
    c.lambda_       = lambda;
    c.dlambda       = opts.dlambda;
    c.dlambda_x     = opts.dlambda_x;
    c.dlambda_y     = opts.dlambda_y;
    c.omega_x_ratio = ratio(gamma_x);
    c.omega_y_ratio = ratio(gamma_y);
    c.zfs           = opts.zfs;

    const std::array<FockSpec, 3> specs{x, y, z};
    const UnperturbedBasis basis = unperturbed_eigensystem(c, specs);
    const PerturbedSystem sys =
        second_order(basis, matrix_elements(transverse_coupling_terms(c), basis), opts.eps_degen);

    // (|+1> + |-1>)/sqrt(2) (x) displaced ground x,y (x) |beta>_z
    Vector spin(3);
    spin << 1.0 / std::sqrt(2.0), 0.0, 1.0 / std::sqrt(2.0);
    const HybridState spin_state(spin, Layout{3});
    const HybridState gx = HybridState::normalized(basis.mode_matrix(0, 0).col(0), Layout{x.n_levels});
    const HybridState gy = HybridState::normalized(basis.mode_matrix(0, 1).col(0), Layout{y.n_levels});
    const HybridState bz = coherent_state(beta, z);
    const HybridState psi0 = tensor(tensor(spin_state, gx), tensor(gy, bz));

    const HybridState reference = unperturbed_evolve(basis, psi0, opts.hold_time);
    const HybridState corrected = perturbed_evolve(psi0, sys, opts.hold_time);
    return fidelity(reference, corrected);
}

}  // namespace nvlev
