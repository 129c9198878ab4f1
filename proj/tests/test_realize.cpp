#include <doctest.h>

#include <cmath>
#include <sstream>

#include "nc/json_io.hpp"
#include "nc/parse.hpp"
#include "nc/realize.hpp"
#include "oracles.hpp"

using namespace nc;

namespace {

MatrixTuple defined_point(const NcExpr& e, int n, uint64_t seed, bool nonsingular_value) {
    for (int t = 0; t < 200; ++t) {
        MatrixTuple x = random_tuple(n, e.nvars, mix_seed(seed, 2, static_cast<uint64_t>(t)));
        try {
            EvalResult r = eval(e, x);
            if (nonsingular_value) solve_inv(r.value);
            return x;
        } catch (const SingularError&) {
        }
    }
    FAIL("no defined point found");
    return MatrixTuple(n, e.nvars);
}

}  // namespace

TEST_CASE("linearize inv(x1) gives the minimal one-entry pencil") {
    const Realization r = linearize(parse("inv(x1)", 1));
    CHECK(r.m == 1);
    CHECK(r.A[0](0, 0) == Complex(0.0, 0.0));
    CHECK(r.A[1](0, 0) == Complex(1.0, 0.0));
    CHECK(r.b(0, 0) == Complex(1.0, 0.0));
    CHECK(r.c(0, 0) == Complex(1.0, 0.0));

    const MatrixTuple two({ComplexMatrix(1, 1, {Complex(2.0, 0.0)})});
    CHECK(rel_err(realization_eval(r, two), ComplexMatrix(1, 1, {Complex(0.5, 0.0)})) < 1e-14);
}

TEST_CASE("linearize x1 uses the affine seed") {
    const Realization r = linearize(parse("x1", 1));
    CHECK(r.m == 2);
    const MatrixTuple x = random_tuple(3, 1, 21);
    CHECK(rel_err(realization_eval(r, x), x[0]) <= 1e-12);

    // At zero the pencil is the constant term, which stays invertible.
    const MatrixTuple zero(3, 1);
    CHECK(realization_eval(r, zero).frobenius_norm() <= 1e-14);

    // Constant expressions evaluate to b* A0^-1 c times the identity block.
    const Realization rc = linearize(parse("2", 1));
    CHECK(rel_err(realization_eval(rc, zero), ComplexMatrix::identity(3) * Complex(2.0, 0.0)) <=
          1e-14);
}

TEST_CASE("linearize inv(1 - x1*x2) evaluates correctly at many points") {
    const NcExpr e = parse("inv(1 - x1*x2)", 2);
    const Realization r = linearize(e);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const int n = 1 + i % 4;
        const MatrixTuple x = defined_point(e, n, 2200 + i, false);
        worst = std::max(worst, rel_err(realization_eval(r, x), eval(e, x).value));
    }
    CHECK(worst <= 1e-9);
}

TEST_CASE("linearize x1 + inv(x2) matches the evaluator") {
    const NcExpr e = parse("x1 + inv(x2)", 2);
    const Realization r = linearize(e);
    const MatrixTuple x = defined_point(e, 3, 23, false);
    CHECK(rel_err(realization_eval(r, x), eval(e, x).value) <= 1e-9);

    // inv(x2) is undefined at zero, so the pencil must be singular there.
    CHECK_THROWS_AS(realization_eval(r, MatrixTuple(3, 2)), SingularError);
}

TEST_CASE("pencil dimension arithmetic of the constructors") {
    CHECK(linearize(parse("x1", 2)).m == 2);        // affine seed
    CHECK(linearize(parse("x1 + x2", 2)).m == 2);   // affine collapse
    CHECK(linearize(parse("inv(x1)", 2)).m == 1);   // inverse of an affine atom
    CHECK(linearize(parse("inv(x1) + inv(x2)", 2)).m == 2);   // sum rule
    CHECK(linearize(parse("inv(x1)*inv(x2)", 2)).m == 2);     // product rule
    CHECK(linearize(parse("inv(inv(x1) + inv(x2))", 2)).m == 3);  // bordered +1
    CHECK(linearize(parse("inv(1 - x1*x2)", 2)).m == 7);
}

TEST_CASE("det_ratio on inv(x1) at the scalar point 2") {
    const Realization r = linearize(parse("inv(x1)", 1));
    const MatrixTuple two({ComplexMatrix(1, 1, {Complex(2.0, 0.0)})});
    const DetRatio dr = det_ratio(r, two);
    CHECK(std::abs(dr.det_bordered - Complex(1.0, 0.0)) < 1e-14);
    CHECK(std::abs(dr.det_pencil - Complex(2.0, 0.0)) < 1e-14);
    CHECK(std::abs(dr.ratio - Complex(0.5, 0.0)) < 1e-14);
}

TEST_CASE("det_ratio equals det of the value") {
    const Realization rx = linearize(parse("x1", 1));
    const MatrixTuple id({ComplexMatrix::identity(2)});
    CHECK(std::abs(det_ratio(rx, id).ratio - Complex(1.0, 0.0)) <= 1e-12);

    const NcExpr e = parse("inv(1 - x1*x2)", 2);
    const Realization r = linearize(e);
    for (int i = 0; i < 10; ++i) {
        const MatrixTuple x = defined_point(e, 3, 2400 + i, false);
        const Complex want = lu_det(eval(e, x).value);
        CHECK(std::abs(det_ratio(r, x).ratio - want) <= 1e-8 * (1.0 + std::abs(want)));
    }
}

TEST_CASE("pencil expressions evaluate to the pencil matrices") {
    const NcExpr e = parse("x1 + inv(x2)", 2);
    const Realization r = linearize(e);
    const DetRatioPair pq = det_ratio_pair(r);
    const MatrixTuple x = defined_point(e, 2, 25, false);
    CHECK(rel_err(eval(pq.q, x).value, pencil_at(r, x)) <= 1e-12);
    CHECK(rel_err(eval(pq.p, x).value, bordered_pencil_at(r, x)) <= 1e-12);

    // det p / det q reproduces the determinant of the value.
    const Complex dp = lu_det(eval(pq.p, x).value);
    const Complex dq = lu_det(eval(pq.q, x).value);
    const Complex want = lu_det(eval(e, x).value);
    CHECK(std::abs(dp / dq - want) <= 1e-8 * (1.0 + std::abs(want)));
}

TEST_CASE("divisor_split difference equals the divisor: inv(x1)") {
    const NcExpr e = parse("inv(x1)", 1);
    const Realization r = linearize(e);
    const MatrixTuple x = defined_point(e, 3, 26, true);
    const auto [dp, dq] = divisor_split(r, x);
    const ComplexMatrix diff = dp.components[0] - dq.components[0];
    const ComplexMatrix want = -solve_inv(x[0]).mat;
    CHECK(rel_err(diff, want) <= 1e-9);
    CHECK(rel_err(diff, divisor(e, x).components[0]) <= 1e-9);
}

TEST_CASE("divisor_split difference equals the divisor: random rationals") {
    for (const char* text : {"inv(1 - x1*x2)", "x1*inv(x2)*x1 - 2*x1", "x1 + inv(x2)"}) {
        const NcExpr e = parse(text, 2);
        const Realization r = linearize(e);
        const MatrixTuple x = defined_point(e, 2, 27, true);
        const auto [dp, dq] = divisor_split(r, x);
        DivisorValue diff = dp;
        for (size_t i = 0; i < diff.components.size(); ++i)
            diff.components[i] -= dq.components[i];
        CHECK(rel_err(diff, divisor(e, x)) <= 1e-8);
    }
}

TEST_CASE("Schur complement divisor identity in four variables") {
    const NcExpr schur = parse("x4 - x3*inv(x1)*x2", 4);
    const NcExpr blockm = parse("[[x1, x2],[x3, x4]]", 4);
    const NcExpr corner = parse("x1", 4);
    for (int i = 0; i < 8; ++i) {
        const int n = 1 + i % 3;
        MatrixTuple x = random_tuple(n, 4, 2800 + static_cast<uint64_t>(i));
        DivisorValue ds, db, da;
        try {
            ds = divisor(schur, x);
            db = divisor(blockm, x);
            da = divisor(corner, x);
        } catch (const SingularError&) {
            continue;
        }
        DivisorValue diff = db;
        for (size_t c = 0; c < diff.components.size(); ++c)
            diff.components[c] -= da.components[c];
        CHECK(rel_err(diff, ds) <= 1e-8);
    }
}

TEST_CASE("block two-by-two inversion formula") {
    for (int i = 0; i < 10; ++i) {
        const int n = 1 + i % 3;
        const MatrixTuple x = random_tuple(n, 4, 2900 + static_cast<uint64_t>(i));
        const ComplexMatrix &a = x[0], &b = x[1], &c = x[2], &d = x[3];
        ComplexMatrix ainv, sinv;
        try {
            ainv = solve_inv(a).mat;
            sinv = solve_inv(d - c * ainv * b).mat;
        } catch (const SingularError&) {
            continue;
        }
        ComplexMatrix big(2 * n, 2 * n);
        big.set_block(0, 0, a);
        big.set_block(0, n, b);
        big.set_block(n, 0, c);
        big.set_block(n, n, d);
        ComplexMatrix assembled(2 * n, 2 * n);
        assembled.set_block(0, 0, ainv + ainv * b * sinv * c * ainv);
        assembled.set_block(0, n, -(ainv * b * sinv));
        assembled.set_block(n, 0, -(sinv * c * ainv));
        assembled.set_block(n, n, sinv);
        CHECK(rel_err(assembled, solve_inv(big).mat) <= 1e-9);
    }
}

TEST_CASE("linearize refusals") {
    CHECK_THROWS_AS(linearize(parse("exp(x1)", 1)), ValidationError);
    CHECK_THROWS_AS(linearize(parse("[[x1, 0],[0, x1]]", 1)), ValidationError);
    CHECK_THROWS_AS(linearize(parse("inv(x1*x2 - x1*x2)", 2)), ValidationError);
    try {
        linearize(parse("inv(x1*x2 - x1*x2)", 2));
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("degenerate-suspect") != std::string::npos);
    }
}

TEST_CASE("realization JSON round trip") {
    const Realization r = linearize(parse("x1 + inv(x2)", 2));
    std::ostringstream os;
    JsonWriter w(os);
    write_realization(w, r);
    const Realization back = realization_from_json(nlohmann::json::parse(os.str()));
    CHECK(back.m == r.m);
    CHECK(back.d == r.d);
    CHECK(back.k == r.k);
    for (size_t i = 0; i < r.A.size(); ++i) CHECK(rel_err(back.A[i], r.A[i]) == 0.0);
    CHECK(rel_err(back.b, r.b) == 0.0);
    CHECK(rel_err(back.c, r.c) == 0.0);
}
