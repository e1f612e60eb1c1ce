#include <cmath>

#include "doctest.h"
#include "nvlev/hilbert.hpp"
#include "nvlev/rng.hpp"

using namespace nvlev;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

// <m|D(delta)|n> for real delta through associated Laguerre polynomials;
// independent closed-form route for the numeric displacement matrices.
double displacement_element_closed(int m, int n, double delta) {
    const double d2 = delta * delta;
    auto lg = [](int k) { return std::lgamma(k + 1.0); };
    if (m >= n) {
        const double pre = std::exp(0.5 * (lg(n) - lg(m)) - 0.5 * d2) * std::pow(delta, m - n);
        return pre * std::assoc_laguerre(n, m - n, d2);
    }
    const double pre = std::exp(0.5 * (lg(m) - lg(n)) - 0.5 * d2) * std::pow(-delta, n - m);
    return pre * std::assoc_laguerre(m, n - m, d2);
}

}  // namespace

TEST_SUITE("hilbert") {

TEST_CASE("fock ladder basics") {
    const FockSpec two(2);
    const FockOps f2 = fock_ops(two);
    Vector one = Vector::Zero(2);
    one[1] = 1.0;
    Vector lowered = f2.annihilate.matrix * one;
    CHECK(std::abs(lowered[0] - Complex(1.0)) <= 1e-15);
    CHECK(std::abs(lowered[1]) == 0.0);

    const FockOps f5 = fock_ops(FockSpec(5));
    CHECK(f5.number.matrix(3, 3).real() == doctest::Approx(3.0));

    // [a, a^dag] = I except at the truncation boundary
    const FockOps f40 = fock_ops(FockSpec(40));
    Matrix comm = f40.annihilate.matrix * f40.create.matrix -
                  f40.create.matrix * f40.annihilate.matrix;
    Matrix defect = comm - Matrix::Identity(40, 40);
    CHECK(max_abs(defect.topLeftCorner(39, 39)) <= 1e-12);
    CHECK(std::abs(defect(39, 39).real() + 40.0) <= 1e-12);  // last level breaks by design
}

TEST_CASE("invalid fock spec") {
    CHECK_THROWS_AS(FockSpec(1), std::invalid_argument);
}

TEST_CASE("spin-1 algebra") {
    const Spin1Ops s = spin1_ops();
    Eigen::SelfAdjointEigenSolver<Matrix> es(s.sz.matrix);
    CHECK(es.eigenvalues()[0] == doctest::Approx(-1.0));
    CHECK(es.eigenvalues()[1] == doctest::Approx(0.0));
    CHECK(es.eigenvalues()[2] == doctest::Approx(1.0));

    const Complex i{0, 1};
    CHECK(max_abs(s.sx.matrix * s.sy.matrix - s.sy.matrix * s.sx.matrix - i * s.sz.matrix) <= 1e-12);
    CHECK(max_abs(s.sy.matrix * s.sz.matrix - s.sz.matrix * s.sy.matrix - i * s.sx.matrix) <= 1e-12);
    CHECK(max_abs(s.sz.matrix * s.sx.matrix - s.sx.matrix * s.sz.matrix - i * s.sy.matrix) <= 1e-12);

    Matrix casimir = s.sx.matrix * s.sx.matrix + s.sy.matrix * s.sy.matrix +
                     s.sz.matrix * s.sz.matrix;
    CHECK(max_abs(casimir - 2.0 * Matrix::Identity(3, 3)) <= 1e-12);

    // no S_x expectation in any S_z eigenstate
    for (int k = 0; k < 3; ++k) {
        CHECK(std::abs(s.sx.matrix(k, k)) == 0.0);
        CHECK(std::abs(s.sy.matrix(k, k)) == 0.0);
    }
}

TEST_CASE("coherent states") {
    const FockSpec n30(30);
    const HybridState vac = coherent_state(0.0, n30);
    CHECK(std::abs(vac.amplitudes()[0] - 1.0) <= 1e-15);
    CHECK(vac.amplitudes().tail(29).norm() == 0.0);

    const HybridState b1 = coherent_state(1.0, n30);
    const FockOps f      = fock_ops(n30);
    const Complex mean   = b1.amplitudes().dot(f.number.matrix * b1.amplitudes());
    CHECK(std::abs(mean.real() - 1.0) <= 1e-10);
    CHECK(std::abs(b1.amplitudes().norm() - 1.0) <= 1e-10);

    // cross-check against the displacement operator acting on vacuum
    const Complex beta{1.0, 0.5};
    const FockSpec n40(40);
    const HybridState direct = coherent_state(beta, n40);
    Vector vac40             = Vector::Zero(40);
    vac40[0]                 = 1.0;
    const Vector displaced   = displacement(beta, n40).matrix * vac40;
    CHECK(std::abs(std::abs(direct.amplitudes().dot(displaced)) - 1.0) <= 1e-10);

    CHECK_THROWS_AS(coherent_state(3.0, FockSpec(5)), TruncationError);
}

TEST_CASE("displacement operator") {
    const FockSpec n40(40);
    CHECK(max_abs(displacement(0.0, n40).matrix - Matrix::Identity(40, 40)) <= 1e-14);

    const LabeledOperator dp = displacement(0.5, n40);
    const LabeledOperator dm = displacement(-0.5, n40);
    CHECK(max_abs(dp.matrix * dm.matrix - Matrix::Identity(40, 40)) <= 1e-8);

    // D^dag a D = a + alpha away from the truncation boundary
    const FockSpec n60(60);
    const FockOps f = fock_ops(n60);
    const Matrix d60 = displacement(0.5, n60).matrix;
    Matrix conj     = d60.adjoint() * f.annihilate.matrix * d60;
    Matrix expect   = f.annihilate.matrix + 0.5 * Matrix::Identity(60, 60);
    CHECK(max_abs((conj - expect).topLeftCorner(40, 40)) <= 1e-8);
}

TEST_CASE("displacement converges to the untruncated operator as the cutoff grows") {
    // The constructed matrix is exactly unitary at any cutoff, so the
    // truncation defect is measured against the closed form on a fixed
    // low-level window.
    const double alpha = 3.5;
    double prev        = 1e300;
    for (int n : {20, 40, 80}) {
        const Matrix d = displacement(alpha, FockSpec(n), 1.0).matrix;
        CHECK(max_abs(d * d.adjoint() - Matrix::Identity(n, n)) <= 1e-12);
        double defect = 0;
        for (int m = 0; m < 10; ++m)
            for (int k = 0; k < 10; ++k)
                defect = std::max(defect,
                                  std::abs(d(m, k).real() - displacement_element_closed(m, k, alpha)));
        CHECK(defect < prev);
        prev = defect;
    }
    CHECK(prev <= 1e-12);
}

TEST_CASE("displacement matrix matches the Laguerre closed form") {
    const FockSpec n40(40);
    for (double delta : {0.3, 0.7}) {
        const Matrix d = displacement(delta, n40).matrix;
        for (int m = 0; m < 20; ++m)
            for (int n = 0; n < 20; ++n)
                CHECK(std::abs(d(m, n).real() - displacement_element_closed(m, n, delta)) <= 1e-10);
    }
}

TEST_CASE("displaced number states") {
    const FockSpec n40(40);
    const HybridState plain = displaced_number_state(0.0, 3, n40);
    CHECK(std::abs(plain.amplitudes()[3] - 1.0) <= 1e-14);

    for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 4; ++n) {
            const double ov = std::abs(displaced_number_state(0.4, m, n40)
                                           .amplitudes()
                                           .dot(displaced_number_state(0.4, n, n40).amplitudes()));
            CHECK(std::abs(ov - (m == n ? 1.0 : 0.0)) <= 1e-8);
        }

    const HybridState d2 = displaced_number_state(0.3, 2, n40);
    const FockOps f      = fock_ops(n40);
    const Complex occ    = d2.amplitudes().dot(f.number.matrix * d2.amplitudes());
    CHECK(std::abs(occ.real() - (2.0 + 0.09)) <= 1e-6);

    CHECK_THROWS_AS(displaced_number_state(0.1, 40, n40), std::out_of_range);
    CHECK_THROWS_AS(displaced_number_state(0.1, -1, n40), std::out_of_range);
}

TEST_CASE("tensor composition") {
    const Spin1Ops s = spin1_ops();
    const FockSpec n6(6);
    const FockOps f = fock_ops(n6);
    const LabeledOperator i3(Matrix::Identity(3, 3), Layout{3}, true);
    const LabeledOperator i6(Matrix::Identity(6, 6), Layout{6}, true);

    const LabeledOperator big = tensor(i3, i6);
    CHECK(max_abs(big.matrix - Matrix::Identity(18, 18)) == 0.0);
    CHECK(big.layout == Layout{3, 6});

    // mixed-product property
    Matrix lhs = tensor(s.sz, i6).matrix * tensor(i3, f.annihilate).matrix;
    Matrix rhs = tensor(s.sz, f.annihilate).matrix;
    CHECK(max_abs(lhs - rhs) <= 1e-14);

    SeededRng rng(7);
    Vector a(3), b(6);
    for (Index k = 0; k < 3; ++k) a[k] = Complex(rng.gaussian(), rng.gaussian());
    for (Index k = 0; k < 6; ++k) b[k] = Complex(rng.gaussian(), rng.gaussian());
    const HybridState sa = HybridState::normalized(a, Layout{3});
    const HybridState sb = HybridState::normalized(b, Layout{6});
    const HybridState ab = tensor(sa, sb);
    CHECK(std::abs(ab.amplitudes().norm() - 1.0) <= 1e-10);
    CHECK(ab.layout() == Layout{3, 6});
}

TEST_CASE("fidelity") {
    const FockSpec n10(25);
    const HybridState psi = coherent_state(0.7, n10);
    CHECK(fidelity(psi, psi) == doctest::Approx(1.0).epsilon(1e-12));

    Vector rotated = psi.amplitudes() * std::exp(Complex(0, 1.234));
    const HybridState phi(rotated, psi.layout());
    CHECK(fidelity(psi, phi) == doctest::Approx(1.0).epsilon(1e-12));

    Vector zero = Vector::Zero(10), one = Vector::Zero(10);
    zero[0] = 1.0;
    one[1]  = 1.0;
    CHECK(fidelity(HybridState(zero, Layout{10}), HybridState(one, Layout{10})) == 0.0);

    CHECK_THROWS_AS(fidelity(psi, HybridState(zero.head(5).eval(), Layout{5})), LayoutError);
    // same total dimension, different factorization still mismatches
    CHECK_THROWS_AS(fidelity(HybridState(zero, Layout{10}), HybridState(zero, Layout{2, 5})),
                    LayoutError);
}

TEST_CASE("hermitian flag is enforced") {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 1)  = 1.0;
    CHECK_THROWS_AS(LabeledOperator(m, Layout{2}, true), std::invalid_argument);
    CHECK_NOTHROW(LabeledOperator(m, Layout{2}, false));
    CHECK_THROWS_AS(LabeledOperator(m, Layout{3}, false), LayoutError);
}

TEST_CASE("first factor reduced density") {
    // product state: pure reduced density
    const Spin1Ops s = spin1_ops();
    Vector spin(3);
    spin << 1.0 / std::sqrt(2.0), 0.0, 1.0 / std::sqrt(2.0);
    const HybridState prod =
        tensor(HybridState(spin, Layout{3}), coherent_state(0.5, FockSpec(12)));
    const Matrix rho    = first_factor_density(prod);
    const double purity = (rho * rho).trace().real();
    CHECK(purity == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(rho(0, 2).real() - 0.5) <= 1e-12);
    (void)s;
}

}  // TEST_SUITE
