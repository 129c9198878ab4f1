#pragma once

#include "nc/classify.hpp"
#include "nc/expr.hpp"
#include "nc/matcore.hpp"

namespace nc {

// Value of an expression at a point. For a matricial expression of block
// shape r x c at a size-n point the value is the (r*n) x (c*n) block-flat
// matrix; scalar expressions give n x n.
struct EvalResult {
    ComplexMatrix value;
    int block_rows = 1, block_cols = 1;
    int point_size = 0;
    double worst_cond = 1.0;   // worst inverse condition encountered
    double value_scale = 0.0;  // magnitude of the operands that formed the value
};

EvalResult eval(const NcExpr& e, const MatrixTuple& x);

// Directional derivative De(X)[H], forward mode. Linear in H.
ComplexMatrix dir_deriv(const NcExpr& e, const MatrixTuple& x, const MatrixTuple& h);

// Value of the principal divisor at a point: the d-tuple g with
// tr(sum_i H_i g_i) = tr(De(X)[H] e(X)^-1) for every direction H.
struct DivisorValue {
    int n = 0;
    std::vector<ComplexMatrix> components;
};

enum class DivisorMethod {
    Reverse,  // one adjoint pass seeded with e(X)^-1
    Forward,  // d*n^2 forward passes over matrix units (oracle)
};

DivisorValue divisor(const NcExpr& e, const MatrixTuple& x,
                     DivisorMethod method = DivisorMethod::Reverse);

enum class TracialKind { Trace, LogDet };

// tr e(X), or the principal-branch log det e(X). Branch tracking along
// paths lives in the continuation module, which integrates increments and
// never takes a principal branch mid-path.
Complex tracial_eval(const NcExpr& e, const MatrixTuple& x, TracialKind kind);

// tr sum_i H_i g_i
Complex trace_pair(const MatrixTuple& h, const DivisorValue& g);

double rel_err(const DivisorValue& got, const DivisorValue& want);

}  // namespace nc
