#include "nc/realize.hpp"

#include <cassert>
#include <utility>

#include "nc/classify.hpp"
#include "nc/error.hpp"

namespace nc {

namespace {

// Affine form a0 + sum coef_i x_i of a subexpression, when it has one.
struct Affine {
    bool ok = false;
    Complex a0{0.0, 0.0};
    std::vector<Complex> coef;
};

Affine affine_of(const ExprPtr& node, int d) {
    Affine r;
    r.coef.assign(static_cast<size_t>(d), Complex(0.0, 0.0));
    switch (node->kind) {
        case ExprKind::Const:
            r.a0 = node->value;
            r.ok = true;
            return r;
        case ExprKind::Var:
            r.coef[static_cast<size_t>(node->var_index - 1)] = 1.0;
            r.ok = true;
            return r;
        case ExprKind::Neg: {
            Affine c = affine_of(node->children[0], d);
            if (!c.ok) return r;
            c.a0 = -c.a0;
            for (Complex& z : c.coef) z = -z;
            return c;
        }
        case ExprKind::Sum: {
            r.ok = true;
            for (const ExprPtr& ch : node->children) {
                Affine c = affine_of(ch, d);
                if (!c.ok) return Affine{};
                r.a0 += c.a0;
                for (int i = 0; i < d; ++i) r.coef[i] += c.coef[i];
            }
            return r;
        }
        case ExprKind::Prod: {
            // A product is affine when at most one factor is non-constant.
            Complex scale(1.0, 0.0);
            Affine core;
            core.ok = true;
            core.a0 = 1.0;
            core.coef.assign(static_cast<size_t>(d), Complex(0.0, 0.0));
            bool have_core = false;
            for (const ExprPtr& ch : node->children) {
                Affine c = affine_of(ch, d);
                if (!c.ok) return Affine{};
                bool constant = true;
                for (const Complex& z : c.coef)
                    if (z != Complex(0.0, 0.0)) constant = false;
                if (constant) {
                    scale *= c.a0;
                } else if (!have_core) {
                    core = c;
                    have_core = true;
                } else {
                    return Affine{};
                }
            }
            r.ok = true;
            r.a0 = scale * core.a0;
            for (int i = 0; i < d; ++i) r.coef[i] = scale * core.coef[i];
            if (!have_core) r.a0 = scale;
            return r;
        }
        default:
            return r;
    }
}

bool is_affine_constant(const Affine& a) {
    for (const Complex& z : a.coef)
        if (z != Complex(0.0, 0.0)) return false;
    return true;
}

Realization affine_seed(const Affine& a, int d) {
    // L = [[1, -a(x)], [0, 1]] is unimodular, and b* L^-1 c picks the (1,2)
    // entry of L^-1, which is a(x).
    Realization r;
    r.m = 2;
    r.d = d;
    r.k = 1;
    r.A.assign(static_cast<size_t>(d) + 1, ComplexMatrix(2, 2));
    r.A[0](0, 0) = 1.0;
    r.A[0](1, 1) = 1.0;
    r.A[0](0, 1) = -a.a0;
    for (int i = 0; i < d; ++i) r.A[static_cast<size_t>(i) + 1](0, 1) = -a.coef[i];
    r.b = ComplexMatrix(2, 1);
    r.b(0, 0) = 1.0;
    r.c = ComplexMatrix(2, 1);
    r.c(1, 0) = 1.0;
    return r;
}

Realization inverse_affine_seed(const Affine& a, int d) {
    // Minimal realization of a(x)^-1: L = a(x), b = c = 1.
    Realization r;
    r.m = 1;
    r.d = d;
    r.k = 1;
    r.A.assign(static_cast<size_t>(d) + 1, ComplexMatrix(1, 1));
    r.A[0](0, 0) = a.a0;
    for (int i = 0; i < d; ++i) r.A[static_cast<size_t>(i) + 1](0, 0) = a.coef[i];
    r.b = ComplexMatrix(1, 1);
    r.b(0, 0) = 1.0;
    r.c = r.b;
    return r;
}

Realization sum_rule(const Realization& r1, const Realization& r2) {
    Realization r;
    r.m = r1.m + r2.m;
    r.d = r1.d;
    r.k = 1;
    r.A.assign(static_cast<size_t>(r.d) + 1, ComplexMatrix(r.m, r.m));
    for (int v = 0; v <= r.d; ++v) {
        r.A[v].set_block(0, 0, r1.A[v]);
        r.A[v].set_block(r1.m, r1.m, r2.A[v]);
    }
    r.b = ComplexMatrix(r.m, 1);
    r.b.set_block(0, 0, r1.b);
    r.b.set_block(r1.m, 0, r2.b);
    r.c = ComplexMatrix(r.m, 1);
    r.c.set_block(0, 0, r1.c);
    r.c.set_block(r1.m, 0, r2.c);
    return r;
}

Realization prod_rule(const Realization& r1, const Realization& r2) {
    // L = [[L1, -c1 b2*], [0, L2]], b = [b1; 0], c = [0; c2] gives
    // b1* L1^-1 c1 b2* L2^-1 c2.
    Realization r;
    r.m = r1.m + r2.m;
    r.d = r1.d;
    r.k = 1;
    r.A.assign(static_cast<size_t>(r.d) + 1, ComplexMatrix(r.m, r.m));
    for (int v = 0; v <= r.d; ++v) {
        r.A[v].set_block(0, 0, r1.A[v]);
        r.A[v].set_block(r1.m, r1.m, r2.A[v]);
    }
    r.A[0].set_block(0, r1.m, -(r1.c * r2.b.adjoint()));
    r.b = ComplexMatrix(r.m, 1);
    r.b.set_block(0, 0, r1.b);
    r.c = ComplexMatrix(r.m, 1);
    r.c.set_block(r1.m, 0, r2.c);
    return r;
}

Realization neg_rule(Realization r) {
    r.c *= Complex(-1.0, 0.0);
    return r;
}

Realization inv_rule(const Realization& u) {
    // Border the pencil with the old b and c: M = [[L, c], [b*, 0]]. Its
    // bottom-right inverse block is -u^-1, so b = e_last, c = -e_last.
    Realization r;
    r.m = u.m + 1;
    r.d = u.d;
    r.k = 1;
    r.A.assign(static_cast<size_t>(r.d) + 1, ComplexMatrix(r.m, r.m));
    for (int v = 0; v <= r.d; ++v) r.A[v].set_block(0, 0, u.A[v]);
    r.A[0].set_block(0, u.m, u.c);
    r.A[0].set_block(u.m, 0, u.b.adjoint());
    r.b = ComplexMatrix(r.m, 1);
    r.b(u.m, 0) = 1.0;
    r.c = ComplexMatrix(r.m, 1);
    r.c(u.m, 0) = -1.0;
    return r;
}

Realization realize_node(const ExprPtr& node, int d) {
    const Affine a = affine_of(node, d);
    if (a.ok) return affine_seed(a, d);
    switch (node->kind) {
        case ExprKind::Sum: {
            Realization r = realize_node(node->children[0], d);
            for (size_t i = 1; i < node->children.size(); ++i)
                r = sum_rule(r, realize_node(node->children[i], d));
            return r;
        }
        case ExprKind::Prod: {
            Realization r = realize_node(node->children[0], d);
            for (size_t i = 1; i < node->children.size(); ++i)
                r = prod_rule(r, realize_node(node->children[i], d));
            return r;
        }
        case ExprKind::Neg:
            return neg_rule(realize_node(node->children[0], d));
        case ExprKind::Inv: {
            const Affine ca = affine_of(node->children[0], d);
            if (ca.ok) {
                if (is_affine_constant(ca) && ca.a0 == Complex(0.0, 0.0))
                    throw ValidationError("linearize: inverse of the zero constant");
                return inverse_affine_seed(ca, d);
            }
            return inv_rule(realize_node(node->children[0], d));
        }
        default:
            throw ValidationError("linearize: unsupported node kind");
    }
}

ExprPtr affine_entry_expr(Complex a0, const std::vector<Complex>& coef) {
    std::vector<ExprPtr> terms;
    if (a0 != Complex(0.0, 0.0)) terms.push_back(ExprNode::constant(a0));
    for (size_t i = 0; i < coef.size(); ++i) {
        if (coef[i] == Complex(0.0, 0.0)) continue;
        ExprPtr v = ExprNode::var(static_cast<int>(i) + 1);
        if (coef[i] == Complex(1.0, 0.0)) {
            terms.push_back(std::move(v));
        } else {
            terms.push_back(ExprNode::prod({ExprNode::constant(coef[i]), std::move(v)}));
        }
    }
    if (terms.empty()) return ExprNode::constant(Complex(0.0, 0.0));
    if (terms.size() == 1) return terms[0];
    return ExprNode::sum(std::move(terms));
}

}  // namespace

Realization linearize(const NcExpr& e) {
    const ExprClass cls = classify(e);
    if (!cls.is_rational)
        throw ValidationError("linearize: expressions containing exp are not supported");
    if (cls.is_matricial)
        throw ValidationError("linearize: matricial expressions are not supported");
    const ProbeVerdict probe = probe_nondegenerate(e, {1, 2, 3, 4}, 32, 0);
    if (!probe.ok)
        throw ValidationError("linearize refused: " + probe.note);
    Realization r = realize_node(e.root, e.nvars);
    assert(r.m >= 1 && static_cast<int>(r.A.size()) == r.d + 1);
    return r;
}

ComplexMatrix pencil_at(const Realization& r, const MatrixTuple& x) {
    if (x.d != r.d) throw DimensionError("pencil_at: variable counts differ");
    ComplexMatrix l = kron(r.A[0], ComplexMatrix::identity(x.n));
    for (int i = 0; i < r.d; ++i) l += kron(r.A[static_cast<size_t>(i) + 1], x[i]);
    return l;
}

ComplexMatrix bordered_pencil_at(const Realization& r, const MatrixTuple& x) {
    const int n = x.n;
    const int mn = r.m * n, kn = r.k * n;
    ComplexMatrix p(mn + kn, mn + kn);
    p.set_block(0, 0, pencil_at(r, x));
    p.set_block(0, mn, kron(r.c, ComplexMatrix::identity(n)));
    p.set_block(mn, 0, kron(-r.b.adjoint(), ComplexMatrix::identity(n)));
    return p;
}

ComplexMatrix realization_eval(const Realization& r, const MatrixTuple& x) {
    ComplexMatrix l = pencil_at(r, x);
    Inverse linv;
    try {
        linv = solve_inv(l);
    } catch (const SingularError& e) {
        throw SingularError("pencil singular at the point (outside the domain of definition)",
                            e.pivot());
    }
    const ComplexMatrix id = ComplexMatrix::identity(x.n);
    return kron(r.b, id).adjoint() * linv.mat * kron(r.c, id);
}

NcExpr pencil_expr(const Realization& r) {
    std::vector<ExprPtr> entries;
    entries.reserve(static_cast<size_t>(r.m) * r.m);
    std::vector<Complex> coef(static_cast<size_t>(r.d));
    for (int i = 0; i < r.m; ++i)
        for (int j = 0; j < r.m; ++j) {
            for (int v = 0; v < r.d; ++v) coef[static_cast<size_t>(v)] = r.A[static_cast<size_t>(v) + 1](i, j);
            entries.push_back(affine_entry_expr(r.A[0](i, j), coef));
        }
    return make_expr(ExprNode::mat(r.m, r.m, std::move(entries)), r.d);
}

NcExpr bordered_pencil_expr(const Realization& r) {
    const int s = r.m + r.k;
    std::vector<ExprPtr> entries(static_cast<size_t>(s) * s);
    std::vector<Complex> coef(static_cast<size_t>(r.d));
    for (int i = 0; i < r.m; ++i)
        for (int j = 0; j < r.m; ++j) {
            for (int v = 0; v < r.d; ++v) coef[static_cast<size_t>(v)] = r.A[static_cast<size_t>(v) + 1](i, j);
            entries[static_cast<size_t>(i) * s + j] = affine_entry_expr(r.A[0](i, j), coef);
        }
    for (int i = 0; i < r.m; ++i)
        for (int j = 0; j < r.k; ++j)
            entries[static_cast<size_t>(i) * s + r.m + j] = ExprNode::constant(r.c(i, j));
    for (int i = 0; i < r.k; ++i)
        for (int j = 0; j < r.m; ++j)
            entries[static_cast<size_t>(r.m + i) * s + j] =
                ExprNode::constant(-std::conj(r.b(j, i)));
    for (int i = 0; i < r.k; ++i)
        for (int j = 0; j < r.k; ++j)
            entries[static_cast<size_t>(r.m + i) * s + r.m + j] =
                ExprNode::constant(Complex(0.0, 0.0));
    return make_expr(ExprNode::mat(s, s, std::move(entries)), r.d);
}

DetRatioPair det_ratio_pair(const Realization& r) {
    return {bordered_pencil_expr(r), pencil_expr(r)};
}

DetRatio det_ratio(const Realization& r, const MatrixTuple& x) {
    const DetResult q = lu_det_full(pencil_at(r, x));
    if (q.singular)
        throw SingularError("det_ratio: pencil singular at the point", q.min_pivot);
    const Complex p = lu_det(bordered_pencil_at(r, x));
    return {p, q.det, p / q.det};
}

std::pair<DivisorValue, DivisorValue> divisor_split(const Realization& r,
                                                    const MatrixTuple& x) {
    const DetRatioPair pq = det_ratio_pair(r);
    return {divisor(pq.p, x), divisor(pq.q, x)};
}

}  // namespace nc
