#pragma once

#include <memory>
#include <string>
#include <vector>

#include "nc/complex_matrix.hpp"

namespace nc {

enum class ExprKind { Var, Const, Sum, Prod, Neg, Inv, Exp, Mat };

class ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

// Immutable AST node for a noncommutative expression. Sum and Prod are
// n-ary; Prod children are ordered and never reordered. Mat holds a
// rectangular grid of scalar entries, row-major.
class ExprNode {
public:
    ExprKind kind;
    int var_index = 0;            // Var, 1-based
    Complex value{0.0, 0.0};      // Const
    std::vector<ExprPtr> children;
    int mat_rows = 0, mat_cols = 0;  // Mat

    static ExprPtr var(int index);
    static ExprPtr constant(Complex value);
    static ExprPtr sum(std::vector<ExprPtr> children);
    static ExprPtr prod(std::vector<ExprPtr> children);
    static ExprPtr neg(ExprPtr child);
    static ExprPtr inv(ExprPtr child);
    static ExprPtr exp(ExprPtr child);
    static ExprPtr mat(int rows, int cols, std::vector<ExprPtr> entries);

private:
    explicit ExprNode(ExprKind k) : kind(k) {}
};

// An expression together with its ambient variable count d. Operations that
// pair expressions with matrix tuples require e.nvars == X.d.
struct NcExpr {
    ExprPtr root;
    int nvars = 1;
};

// Validates that all Var indices lie in [1..nvars].
NcExpr make_expr(ExprPtr root, int nvars);

int depth(const ExprPtr& e);
int max_var_index(const ExprPtr& e);
bool contains_kind(const ExprPtr& e, ExprKind k);
bool structurally_equal(const ExprPtr& a, const ExprPtr& b);

// Concrete syntax. Output re-parses to a structurally identical AST for any
// AST the parser can produce. Const values with both components nonzero
// have no single-literal syntax and print as a parenthesized sum.
std::string to_string(const ExprPtr& e);
std::string to_string(const NcExpr& e);

// AST export: {"kind": ..., "children": [...]} with per-kind payload fields.
std::string ast_json(const NcExpr& e);

}  // namespace nc
