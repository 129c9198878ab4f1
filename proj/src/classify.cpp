#include "nc/classify.hpp"

#include "nc/error.hpp"

namespace nc {

namespace {

BlockShape shape_of(const ExprNode& n) {
    switch (n.kind) {
        case ExprKind::Var:
        case ExprKind::Const:
            return {1, 1};
        case ExprKind::Neg:
            return shape_of(*n.children[0]);
        case ExprKind::Inv:
        case ExprKind::Exp: {
            BlockShape s = shape_of(*n.children[0]);
            if (!s.square())
                throw StructureError("inverse/exponential of a non-square block value");
            return s;
        }
        case ExprKind::Sum: {
            BlockShape target{1, 1};
            for (const ExprPtr& c : n.children) {
                const BlockShape s = shape_of(*c);
                if (s.scalar()) continue;
                if (target.scalar()) {
                    target = s;
                } else if (!(s == target)) {
                    throw StructureError("sum of mismatched block shapes");
                }
            }
            if (!target.scalar() && !target.square()) {
                for (const ExprPtr& c : n.children)
                    if (shape_of(*c).scalar())
                        throw StructureError(
                            "cannot embed a scalar into a non-square block sum");
            }
            return target;
        }
        case ExprKind::Prod: {
            BlockShape cur{1, 1};
            for (const ExprPtr& c : n.children) {
                const BlockShape s = shape_of(*c);
                if (s.scalar()) continue;
                if (cur.scalar()) {
                    cur = s;
                } else {
                    if (cur.cols != s.rows)
                        throw StructureError("product of mismatched block shapes");
                    cur = {cur.rows, s.cols};
                }
            }
            return cur;
        }
        case ExprKind::Mat: {
            for (const ExprPtr& c : n.children)
                if (!shape_of(*c).scalar())
                    throw StructureError("matricial literal entries must be scalar");
            return {n.mat_rows, n.mat_cols};
        }
    }
    throw StructureError("unreachable expression kind");
}

}  // namespace

BlockShape block_shape(const ExprPtr& e) { return shape_of(*e); }

ExprClass classify(const NcExpr& e) {
    ExprClass c;
    c.block = block_shape(e.root);
    const bool has_inv = contains_kind(e.root, ExprKind::Inv);
    const bool has_exp = contains_kind(e.root, ExprKind::Exp);
    c.is_polynomial = !has_inv && !has_exp;
    c.is_rational = !has_exp;
    c.is_matricial = contains_kind(e.root, ExprKind::Mat);
    return c;
}

}  // namespace nc
