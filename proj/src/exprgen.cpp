#include "nc/exprgen.hpp"

namespace nc {

namespace {

ExprPtr leaf(Rng& rng, int d) {
    if (rng.uniform() < 0.7) return ExprNode::var(rng.uniform_int(1, d));
    return ExprNode::constant(rng.cgauss());
}

ExprPtr gen(Rng& rng, int d, int depth) {
    if (depth <= 1) return leaf(rng, d);
    const double roll = rng.uniform();
    if (roll < 0.32) {
        const int k = rng.uniform_int(2, 3);
        std::vector<ExprPtr> kids;
        for (int i = 0; i < k; ++i) kids.push_back(gen(rng, d, depth - 1));
        return ExprNode::sum(std::move(kids));
    }
    if (roll < 0.62) {
        std::vector<ExprPtr> kids;
        kids.push_back(gen(rng, d, depth - 1));
        kids.push_back(gen(rng, d, depth - 1));
        return ExprNode::prod(std::move(kids));
    }
    if (roll < 0.72) return ExprNode::neg(gen(rng, d, depth - 1));
    if (roll < 0.88) return ExprNode::inv(gen(rng, d, depth - 1));
    if (roll < 0.94) {
        // Damped exponential argument.
        return ExprNode::exp(ExprNode::prod(
            {ExprNode::constant(Complex(0.25, 0.0)), gen(rng, d, depth - 1)}));
    }
    return leaf(rng, d);
}

}  // namespace

NcExpr random_expr(Rng& rng, int d, int max_depth) {
    if (d < 1 || max_depth < 1) throw StructureError("random_expr: bad parameters");
    return make_expr(gen(rng, d, max_depth), d);
}

}  // namespace nc
