#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nc/expr.hpp"
#include "nc/matcore.hpp"

namespace nc {

struct BlockShape {
    int rows = 1, cols = 1;
    bool operator==(const BlockShape& o) const { return rows == o.rows && cols == o.cols; }
    bool scalar() const { return rows == 1 && cols == 1; }
    bool square() const { return rows == cols; }
};

struct ExprClass {
    bool is_polynomial = false;  // no Inv, no Exp
    bool is_rational = false;    // no Exp
    bool is_matricial = false;   // contains a matricial literal
    BlockShape block;            // meaningful when is_matricial
};

// Block shape of the value of e, before evaluation at any point. Scalars
// combined with square matricial blocks embed as scalar times identity;
// mixing a scalar with a non-square block is a structure error, as are
// products with mismatched inner block dimensions and nested matricial
// literals.
BlockShape block_shape(const ExprPtr& e);

// Syntactic classification only; nondegeneracy is probed separately.
ExprClass classify(const NcExpr& e);

struct ProbeVerdict {
    bool ok = false;
    std::optional<MatrixTuple> witness;  // first point where e evaluated
    int trials_run = 0;
    std::string note;
};

// Evaluates e at seeded random tuples of each requested size and reports the
// first point where every inverse met a nonsingular argument. A negative
// verdict is "degenerate-suspect": probabilistic evidence, never a proof.
// Deterministic in (seed, sizes, trials).
ProbeVerdict probe_nondegenerate(const NcExpr& e, const std::vector<int>& sizes,
                                 int trials, uint64_t seed);

}  // namespace nc
