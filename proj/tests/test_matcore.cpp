#include <doctest.h>

#include <cmath>

#include "nc/matcore.hpp"
#include "oracles.hpp"

using namespace nc;

TEST_CASE("lu_det identity and diagonal") {
    CHECK(std::abs(lu_det(ComplexMatrix::identity(3)) - Complex(1.0, 0.0)) < 1e-15);
    CHECK(std::abs(lu_det(ComplexMatrix::diagonal({2.0, 1.0})) - Complex(2.0, 0.0)) < 1e-15);
}

TEST_CASE("lu_det agrees with cofactor expansion") {
    Rng rng(41);
    const ComplexMatrix m = random_gaussian(5, 5, rng);
    const Complex want = test::cofactor_det(m);
    CHECK(std::abs(lu_det(m) - want) <= 1e-12 * (1.0 + std::abs(want)));
}

TEST_CASE("solve_inv basic values") {
    const ComplexMatrix i4 = ComplexMatrix::identity(4);
    CHECK(rel_err(solve_inv(i4).mat, i4) < 1e-15);
    const ComplexMatrix want = ComplexMatrix::diagonal({0.5, 0.25});
    CHECK(rel_err(solve_inv(ComplexMatrix::diagonal({2.0, 4.0})).mat, want) < 1e-15);
}

TEST_CASE("solve_inv residual on a random 6x6") {
    Rng rng(7);
    const ComplexMatrix m = random_gaussian(6, 6, rng);
    const Inverse inv = solve_inv(m);
    const ComplexMatrix resid = m * inv.mat - ComplexMatrix::identity(6);
    CHECK(resid.frobenius_norm() <= 1e-10 * m.frobenius_norm());
    CHECK(inv.cond >= 1.0);
}

TEST_CASE("solve_inv flags singular input with the pivot magnitude") {
    ComplexMatrix m(3, 3);
    m(0, 0) = 1.0;
    m(1, 1) = 1.0;  // third row identically zero
    CHECK_THROWS_AS(solve_inv(m), SingularError);
    try {
        solve_inv(m);
    } catch (const SingularError& e) {
        CHECK(e.pivot() <= 1e-12);
    }
}

TEST_CASE("expm_frechet trivial cases") {
    const ComplexMatrix zero(2, 2);
    const ComplexMatrix id = ComplexMatrix::identity(2);
    const ExpFrechet a = expm_frechet(zero, id);
    CHECK(rel_err(a.value, id) < 1e-14);
    CHECK(rel_err(a.deriv, id) < 1e-14);

    const ComplexMatrix diag = ComplexMatrix::diagonal({1.0, 2.0});
    const ExpFrechet b = expm_frechet(diag, ComplexMatrix(2, 2));
    const ComplexMatrix want =
        ComplexMatrix::diagonal({std::exp(1.0), std::exp(2.0)});
    CHECK(rel_err(b.value, want) < 1e-13);
    CHECK(b.deriv.frobenius_norm() < 1e-13);
}

TEST_CASE("expm_frechet matches a finite difference") {
    Rng rng(11);
    const ComplexMatrix a = random_gaussian(3, 3, rng);
    const ComplexMatrix e = random_gaussian(3, 3, rng);
    const ExpFrechet ef = expm_frechet(a, e);
    const double h = 1e-5;
    const ComplexMatrix fd =
        (expm(a + Complex(h, 0.0) * e) - expm(a - Complex(h, 0.0) * e)) *
        Complex(1.0 / (2.0 * h), 0.0);
    CHECK(rel_err(ef.deriv, fd) <= 1e-6);
}

TEST_CASE("direct_sum neutral element and block structure") {
    const MatrixTuple x = random_tuple(2, 2, 5);
    const MatrixTuple empty(0, 2);
    const MatrixTuple left = direct_sum(x, empty);
    CHECK(left.n == 2);
    CHECK(rel_err(left, x) == 0.0);

    const MatrixTuple a({ComplexMatrix(1, 1, {Complex(2.0, 0.0)})});
    const MatrixTuple b({ComplexMatrix(1, 1, {Complex(3.0, 0.0)})});
    const MatrixTuple ab = direct_sum(a, b);
    CHECK(ab.n == 2);
    CHECK(ab[0](0, 0) == Complex(2.0, 0.0));
    CHECK(ab[0](1, 1) == Complex(3.0, 0.0));
    CHECK(ab[0](0, 1) == Complex(0.0, 0.0));

    const MatrixTuple big = direct_sum(random_tuple(2, 1, 1), random_tuple(3, 1, 2));
    CHECK(big.n == 5);
    CHECK(big[0].block(0, 2, 2, 3).frobenius_norm() == 0.0);
    CHECK(big[0].block(2, 0, 3, 2).frobenius_norm() == 0.0);
}

TEST_CASE("direct_sum rejects mismatched variable counts") {
    CHECK_THROWS_AS(direct_sum(random_tuple(2, 1, 0), random_tuple(2, 2, 0)), DimensionError);
}

TEST_CASE("random_tuple determinism and shape") {
    const MatrixTuple a = random_tuple(1, 1, 7);
    const MatrixTuple b = random_tuple(1, 1, 7);
    CHECK(a[0](0, 0) == b[0](0, 0));

    const MatrixTuple c = random_tuple(3, 2, 1);
    CHECK(c.n == 3);
    CHECK(c.d == 2);
    for (const ComplexMatrix& m : c.mats) CHECK(m.all_finite());
}

TEST_CASE("random_tuple entries have near-zero mean") {
    Complex sum = 0.0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) sum += random_tuple(1, 1, 1000 + i)[0](0, 0);
    CHECK(std::abs(sum) / draws <= 0.05);
}

TEST_CASE("determinant is multiplicative over direct sums") {
    for (uint64_t s = 0; s < 5; ++s) {
        const MatrixTuple a = random_tuple(3, 1, 100 + s);
        const MatrixTuple b = random_tuple(2, 1, 200 + s);
        const Complex got = lu_det(direct_sum(a, b)[0]);
        const Complex want = lu_det(a[0]) * lu_det(b[0]);
        CHECK(std::abs(got - want) <= 1e-10 * (1.0 + std::abs(want)));
    }
}

TEST_CASE("determinant is invariant under unitary conjugation") {
    Rng rng(77);
    for (int rep = 0; rep < 5; ++rep) {
        const int n = 2 + rep % 4;
        const ComplexMatrix a = random_gaussian(n, n, rng);
        const ComplexMatrix u = random_unitary(n, rng);
        const ComplexMatrix uu = u.adjoint() * u;
        CHECK(rel_err(uu, ComplexMatrix::identity(n)) < 1e-12);
        const Complex got = lu_det(u.adjoint() * a * u);
        const Complex want = lu_det(a);
        CHECK(std::abs(got - want) <= 1e-10 * (1.0 + std::abs(want)));
    }
}

TEST_CASE("trace is additive over direct sums") {
    const MatrixTuple a = random_tuple(3, 1, 9);
    const MatrixTuple b = random_tuple(4, 1, 10);
    const Complex got = direct_sum(a, b)[0].trace();
    CHECK(std::abs(got - a[0].trace() - b[0].trace()) < 1e-14);
}

TEST_CASE("expm inverse identity for moderate norms") {
    Rng rng(13);
    for (int rep = 0; rep < 4; ++rep) {
        ComplexMatrix a = random_gaussian(4, 4, rng);
        const double f = a.frobenius_norm();
        if (f > 5.0) a *= Complex(5.0 / f, 0.0);
        const ComplexMatrix e = random_gaussian(4, 4, rng);
        // The first component of the Frechet pair is the exponential itself.
        const ComplexMatrix prod = expm_frechet(a, e).value * expm_frechet(-a, e).value;
        CHECK(rel_err(prod, ComplexMatrix::identity(4)) <= 1e-8);
        CHECK(rel_err(expm_frechet(a, e).value, expm(a)) <= 1e-10);
    }
}

TEST_CASE("det expm equals exp of trace") {
    Rng rng(17);
    for (int rep = 0; rep < 5; ++rep) {
        const int n = 1 + rep;
        const ComplexMatrix a = random_gaussian(n, n, rng);
        const Complex got = lu_det(expm(a));
        const Complex want = std::exp(a.trace());
        CHECK(std::abs(got - want) <= 1e-8 * (1.0 + std::abs(want)));
    }
}
