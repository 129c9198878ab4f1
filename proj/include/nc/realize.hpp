#pragma once

#include <utility>
#include <vector>

#include "nc/evalad.hpp"
#include "nc/expr.hpp"
#include "nc/matcore.hpp"

namespace nc {

// Pencil realization r = b* L^-1 c with L(x) = A[0] + sum_i A[i] x_i, each
// coefficient m x m and b, c constant m x k. At a size-n point, L(X) is the
// mn x mn matrix A0 (x) I_n + sum A_i (x) X_i; scalar coefficients multiply
// identity blocks. L(X) is invertible wherever the source expression is
// defined, and there b* L(X)^-1 c reproduces its value.
struct Realization {
    int m = 0;  // pencil size
    int d = 1;  // variables
    int k = 1;  // output block size
    std::vector<ComplexMatrix> A;  // d+1 coefficients, A[0] constant term
    ComplexMatrix b, c;
};

// Structural linearization of a scalar rational expression: affine atoms
// seed 2x2 pencils, sums stack direct sums, products couple blocks, and
// inverses border the pencil, moving b and c into it. No minimization pass;
// pencils may be non-minimal. Refuses expressions containing exp, matricial
// expressions, and expressions the nondegeneracy probe rejects.
Realization linearize(const NcExpr& e);

ComplexMatrix pencil_at(const Realization& r, const MatrixTuple& x);            // L(X)
ComplexMatrix bordered_pencil_at(const Realization& r, const MatrixTuple& x);   // [[L, c], [-b*, 0]](X)

// (b (x) I)* L(X)^-1 (c (x) I)
ComplexMatrix realization_eval(const Realization& r, const MatrixTuple& x);

// The two square matricial polynomials with det r = det p / det q:
// q is the pencil L, p the bordered pencil [[L, c], [-b*, 0]].
NcExpr pencil_expr(const Realization& r);           // q
NcExpr bordered_pencil_expr(const Realization& r);  // p

struct DetRatioPair {
    NcExpr p, q;  // det r(X) = det p(X) / det q(X) wherever defined
};
DetRatioPair det_ratio_pair(const Realization& r);

struct DetRatio {
    Complex det_bordered;  // det p(X)
    Complex det_pencil;    // det q(X)
    Complex ratio;         // det p / det q = det r(X)
};
DetRatio det_ratio(const Realization& r, const MatrixTuple& x);

// (div p(X), div q(X)); their difference equals div r(X).
std::pair<DivisorValue, DivisorValue> divisor_split(const Realization& r,
                                                    const MatrixTuple& x);

}  // namespace nc
