// types.hpp — shared scalar/matrix aliases, tensor layouts, error types
//
// Unit convention used throughout: hbar = 1, energies in units of
// hbar*omega_z, time in units of 1/omega_z (one trap period = 2*pi).
// Spin basis ordering is |+1>, |0>, |-1>; tensor factor ordering is
// spin first, then modes x, y, z as present.

#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace nvlev {

using Complex    = std::complex<double>;
using Vector     = Eigen::VectorXcd;
using Matrix     = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using Index      = Eigen::Index;

inline constexpr double pi = std::numbers::pi;

// One full oscillation of the z mode, t0 = 2*pi/omega_z, in dimensionless time.
inline constexpr double period = 2.0 * pi;

// Factor dimensions of a tensor-product space, spin first.
using Layout = std::vector<Index>;

inline Index layout_dim(const Layout& layout) {
    Index d = 1;
    for (Index f : layout) d *= f;
    return d;
}

inline bool same_layout(const Layout& a, const Layout& b) { return a == b; }

inline std::string layout_string(const Layout& layout) {
    std::string s = "(";
    for (std::size_t i = 0; i < layout.size(); ++i)
        s += (i ? "," : "") + std::to_string(layout[i]);
    return s + ")";
}

// Dense-matrix ceiling protecting the desk-scale contract: dimensions past
// this point signal a misconfigured truncation, not a bigger computer.
inline constexpr Index max_dense_dim = 20000;

inline void check_dense_dim(const Layout& layout, const char* who) {
    const Index d = layout_dim(layout);
    if (d > max_dense_dim)
        throw std::invalid_argument(std::string(who) + ": dimension " + std::to_string(d) +
                                    " exceeds the dense guard (" + std::to_string(max_dense_dim) +
                                    "); reduce the truncation");
}

// Fock cutoff too small for the requested state; construction refuses to
// proceed silently.
struct TruncationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Nondegenerate perturbation theory hit a coupled near-degenerate pair.
struct DegeneracyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Tensor-factor layouts of two operands do not match.
struct LayoutError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace nvlev
