#include "nc/evalad.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <utility>

#include "nc/error.hpp"

namespace nc {

namespace {

// A block-shaped value: flat is (br*n) x (bc*n). mag is a rough running
// bound on the magnitudes that produced the value, used to detect
// catastrophic cancellation: an inverse argument whose norm has collapsed
// relative to mag is singular to working precision even though the
// leftover rounding noise itself is well-conditioned.
struct Block {
    int br = 1, bc = 1;
    ComplexMatrix flat;
    double mag = 0.0;
};

constexpr double kCancelRatio = 1e-12;

Block embed(const Block& b, int k, int n) {
    if (b.br == k && b.bc == k) return b;
    Block out{k, k, ComplexMatrix(k * n, k * n), b.mag};
    for (int i = 0; i < k; ++i) out.flat.set_block(i * n, i * n, b.flat);
    return out;
}

// Adjoint of scalar->diag embedding: sum of the diagonal n x n blocks.
ComplexMatrix diag_block_sum(const ComplexMatrix& w, int n) {
    const int k = w.rows() / n;
    ComplexMatrix out(n, n);
    for (int i = 0; i < k; ++i) out += w.block(i * n, i * n, n, n);
    return out;
}

class Evaluator {
public:
    Evaluator(const NcExpr& e, const MatrixTuple& x) : expr_(e), x_(x), n_(x.n) {
        if (e.nvars != x.d)
            throw DimensionError("expression has d=" + std::to_string(e.nvars) +
                                 " but point has d=" + std::to_string(x.d));
    }

    double worst_cond = 1.0;

    const Block& value(const ExprPtr& node) {
        auto it = memo_.find(node.get());
        if (it != memo_.end()) return it->second;
        Block b = compute(node);
        return memo_.emplace(node.get(), std::move(b)).first->second;
    }

    ComplexMatrix invert(const ComplexMatrix& m, double mag, const ExprPtr& at) {
        const double norm = m.frobenius_norm();
        if (norm <= kCancelRatio * mag)
            throw SingularError("singular inverse in subexpression '" + to_string(at) +
                                    "': argument vanishes to working precision",
                                norm);
        try {
            Inverse inv = solve_inv(m);
            worst_cond = std::max(worst_cond, inv.cond);
            return std::move(inv.mat);
        } catch (const SingularError& e) {
            throw SingularError("singular inverse in subexpression '" +
                                    to_string(at) + "': " + e.what(),
                                e.pivot());
        }
    }

    // Reverse sweep: accumulate cotangents into the variable slots. w is the
    // cotangent of node under the pairing tr(w * d(node)).
    void backward(const ExprPtr& node, const ComplexMatrix& w,
                  std::vector<ComplexMatrix>& grad) {
        const ExprNode& nd = *node;
        switch (nd.kind) {
            case ExprKind::Var:
                grad[static_cast<size_t>(nd.var_index - 1)] += w;
                return;
            case ExprKind::Const:
                return;
            case ExprKind::Neg:
                backward(nd.children[0], -w, grad);
                return;
            case ExprKind::Sum: {
                const Block& self = value(node);
                for (const ExprPtr& c : nd.children) {
                    const Block& cv = value(c);
                    if (cv.br == self.br && cv.bc == self.bc) {
                        backward(c, w, grad);
                    } else {
                        backward(c, diag_block_sum(w, n_), grad);
                    }
                }
                return;
            }
            case ExprKind::Prod: {
                const size_t m = nd.children.size();
                std::vector<Block> vals;
                vals.reserve(m);
                for (const ExprPtr& c : nd.children) vals.push_back(value(c));
                std::vector<Block> emb = embed_chain(vals);
                std::vector<ComplexMatrix> prefix(m + 1), suffix(m + 1);
                prefix[0] = ComplexMatrix::identity(emb.front().flat.rows());
                for (size_t i = 0; i < m; ++i) prefix[i + 1] = prefix[i] * emb[i].flat;
                suffix[m] = ComplexMatrix::identity(emb.back().flat.cols());
                for (size_t i = m; i-- > 0;) suffix[i] = emb[i].flat * suffix[i + 1];
                for (size_t i = 0; i < m; ++i) {
                    ComplexMatrix wc = suffix[i + 1] * w * prefix[i];
                    const Block& orig = value(nd.children[i]);
                    if (orig.br != emb[i].br || orig.bc != emb[i].bc)
                        wc = diag_block_sum(wc, n_);
                    backward(nd.children[i], wc, grad);
                }
                return;
            }
            case ExprKind::Inv: {
                const Block& self = value(node);  // self.flat = u^-1
                backward(nd.children[0], -(self.flat * w * self.flat), grad);
                return;
            }
            case ExprKind::Exp: {
                const Block& u = value(nd.children[0]);
                // The Frechet derivative of exp is self-adjoint under the
                // bilinear trace pairing, so the adjoint direction is just
                // L(u, w).
                backward(nd.children[0], expm_frechet(u.flat, w).deriv, grad);
                return;
            }
            case ExprKind::Mat: {
                for (int r = 0; r < nd.mat_rows; ++r)
                    for (int c = 0; c < nd.mat_cols; ++c)
                        backward(nd.children[static_cast<size_t>(r) * nd.mat_cols + c],
                                 w.block(c * n_, r * n_, n_, n_), grad);
                return;
            }
        }
    }

    // Forward-mode (value, derivative) sweep.
    struct Dual {
        Block v, dv;
    };

    Dual dual(const ExprPtr& node, const MatrixTuple& h) {
        const ExprNode& nd = *node;
        switch (nd.kind) {
            case ExprKind::Var: {
                const int i = nd.var_index - 1;
                return {Block{1, 1, x_[i], x_[i].frobenius_norm()}, Block{1, 1, h[i]}};
            }
            case ExprKind::Const: {
                ComplexMatrix v = ComplexMatrix::identity(n_) * nd.value;
                const double mag = v.frobenius_norm();
                return {Block{1, 1, std::move(v), mag}, Block{1, 1, ComplexMatrix(n_, n_)}};
            }
            case ExprKind::Neg: {
                Dual c = dual(nd.children[0], h);
                return {Block{c.v.br, c.v.bc, -c.v.flat, c.v.mag},
                        Block{c.dv.br, c.dv.bc, -c.dv.flat}};
            }
            case ExprKind::Sum: {
                std::vector<Dual> kids;
                kids.reserve(nd.children.size());
                BlockShape target{1, 1};
                double mag = 0.0;
                for (const ExprPtr& c : nd.children) {
                    kids.push_back(dual(c, h));
                    const Block& v = kids.back().v;
                    mag += v.mag;
                    if (!(v.br == 1 && v.bc == 1)) target = {v.br, v.bc};
                }
                Block v{target.rows, target.cols,
                        ComplexMatrix(target.rows * n_, target.cols * n_), mag};
                Block dv = v;
                dv.mag = 0.0;
                for (Dual& c : kids) {
                    if (c.v.br == target.rows && c.v.bc == target.cols) {
                        v.flat += c.v.flat;
                        dv.flat += c.dv.flat;
                    } else if (c.v.br == 1 && c.v.bc == 1) {
                        if (target.rows != target.cols)
                            throw StructureError(
                                "cannot embed a scalar into a non-square block sum");
                        v.flat += embed(c.v, target.rows, n_).flat;
                        dv.flat += embed(c.dv, target.rows, n_).flat;
                    } else {
                        throw StructureError("sum of mismatched block shapes");
                    }
                }
                return {std::move(v), std::move(dv)};
            }
            case ExprKind::Prod: {
                std::vector<Dual> kids;
                kids.reserve(nd.children.size());
                for (const ExprPtr& c : nd.children) kids.push_back(dual(c, h));
                std::vector<Block> vals, dvs;
                for (Dual& c : kids) {
                    vals.push_back(c.v);
                    dvs.push_back(c.dv);
                }
                std::vector<Block> emb = embed_chain(vals);
                for (size_t i = 0; i < kids.size(); ++i)
                    dvs[i] = embed_like(dvs[i], emb[i]);
                // Product rule over the ordered factors.
                const size_t m = emb.size();
                std::vector<ComplexMatrix> prefix(m + 1), suffix(m + 1);
                prefix[0] = ComplexMatrix::identity(emb.front().flat.rows());
                for (size_t i = 0; i < m; ++i) prefix[i + 1] = prefix[i] * emb[i].flat;
                suffix[m] = ComplexMatrix::identity(emb.back().flat.cols());
                for (size_t i = m; i-- > 0;) suffix[i] = emb[i].flat * suffix[i + 1];
                ComplexMatrix dv(prefix[m].rows(), suffix[0].cols());
                for (size_t i = 0; i < m; ++i) dv += prefix[i] * dvs[i].flat * suffix[i + 1];
                const int br = prefix[m].rows() / n_;
                const int bc = prefix[m].cols() / n_;
                double mag = 1.0;
                for (const Block& e : emb) mag *= e.mag;
                return {Block{br, bc, prefix[m], mag}, Block{br, bc, std::move(dv)}};
            }
            case ExprKind::Inv: {
                Dual c = dual(nd.children[0], h);
                ComplexMatrix inv = invert(c.v.flat, c.v.mag, node);
                ComplexMatrix dv = -(inv * c.dv.flat * inv);
                const double mag = inv.frobenius_norm();
                return {Block{c.v.br, c.v.bc, std::move(inv), mag},
                        Block{c.v.br, c.v.bc, std::move(dv)}};
            }
            case ExprKind::Exp: {
                Dual c = dual(nd.children[0], h);
                ExpFrechet ef = expm_frechet(c.v.flat, c.dv.flat);
                const double mag = ef.value.frobenius_norm();
                return {Block{c.v.br, c.v.bc, std::move(ef.value), mag},
                        Block{c.v.br, c.v.bc, std::move(ef.deriv)}};
            }
            case ExprKind::Mat: {
                Block v{nd.mat_rows, nd.mat_cols,
                        ComplexMatrix(nd.mat_rows * n_, nd.mat_cols * n_)};
                Block dv = v;
                for (int r = 0; r < nd.mat_rows; ++r)
                    for (int c = 0; c < nd.mat_cols; ++c) {
                        Dual e = dual(nd.children[static_cast<size_t>(r) * nd.mat_cols + c], h);
                        if (!(e.v.br == 1 && e.v.bc == 1))
                            throw StructureError("matricial literal entries must be scalar");
                        v.flat.set_block(r * n_, c * n_, e.v.flat);
                        dv.flat.set_block(r * n_, c * n_, e.dv.flat);
                        v.mag += e.v.mag;
                    }
                return {std::move(v), std::move(dv)};
            }
        }
        throw StructureError("unreachable expression kind");
    }

private:
    Block compute(const ExprPtr& node) {
        const ExprNode& nd = *node;
        switch (nd.kind) {
            case ExprKind::Var: {
                const ComplexMatrix& v = x_[nd.var_index - 1];
                return {1, 1, v, v.frobenius_norm()};
            }
            case ExprKind::Const: {
                ComplexMatrix v = ComplexMatrix::identity(n_) * nd.value;
                const double mag = v.frobenius_norm();
                return {1, 1, std::move(v), mag};
            }
            case ExprKind::Neg: {
                const Block& c = value(nd.children[0]);
                return {c.br, c.bc, -c.flat, c.mag};
            }
            case ExprKind::Sum: {
                std::vector<const Block*> kids;
                kids.reserve(nd.children.size());
                BlockShape target{1, 1};
                double mag = 0.0;
                for (const ExprPtr& c : nd.children) {
                    kids.push_back(&value(c));
                    mag += kids.back()->mag;
                    if (!(kids.back()->br == 1 && kids.back()->bc == 1))
                        target = {kids.back()->br, kids.back()->bc};
                }
                if (target.scalar()) {
                    ComplexMatrix acc(n_, n_);
                    for (const Block* c : kids) acc += c->flat;
                    return {1, 1, std::move(acc), mag};
                }
                ComplexMatrix acc(target.rows * n_, target.cols * n_);
                for (const Block* c : kids) {
                    if (c->br == target.rows && c->bc == target.cols) {
                        acc += c->flat;
                    } else if (c->br == 1 && c->bc == 1) {
                        if (target.rows != target.cols)
                            throw StructureError(
                                "cannot embed a scalar into a non-square block sum");
                        acc += embed(*c, target.rows, n_).flat;
                    } else {
                        throw StructureError("sum of mismatched block shapes");
                    }
                }
                return {target.rows, target.cols, std::move(acc), mag};
            }
            case ExprKind::Prod: {
                std::vector<Block> vals;
                vals.reserve(nd.children.size());
                for (const ExprPtr& c : nd.children) vals.push_back(value(c));
                std::vector<Block> emb = embed_chain(vals);
                ComplexMatrix acc = emb[0].flat;
                double mag = emb[0].mag;
                for (size_t i = 1; i < emb.size(); ++i) {
                    acc = acc * emb[i].flat;
                    mag *= emb[i].mag;
                }
                return {acc.rows() / n_, acc.cols() / n_, std::move(acc), mag};
            }
            case ExprKind::Inv: {
                const Block& c = value(nd.children[0]);
                if (c.br != c.bc) throw StructureError("inverse of a non-square block value");
                ComplexMatrix inv = invert(c.flat, c.mag, node);
                const double mag = inv.frobenius_norm();
                return {c.br, c.bc, std::move(inv), mag};
            }
            case ExprKind::Exp: {
                const Block& c = value(nd.children[0]);
                if (c.br != c.bc)
                    throw StructureError("exponential of a non-square block value");
                ComplexMatrix v = expm(c.flat);
                const double mag = v.frobenius_norm();
                return {c.br, c.bc, std::move(v), mag};
            }
            case ExprKind::Mat: {
                ComplexMatrix acc(nd.mat_rows * n_, nd.mat_cols * n_);
                double mag = 0.0;
                for (int r = 0; r < nd.mat_rows; ++r)
                    for (int c = 0; c < nd.mat_cols; ++c) {
                        const Block& e =
                            value(nd.children[static_cast<size_t>(r) * nd.mat_cols + c]);
                        if (!(e.br == 1 && e.bc == 1))
                            throw StructureError("matricial literal entries must be scalar");
                        acc.set_block(r * n_, c * n_, e.flat);
                        mag += e.mag;
                    }
                return {nd.mat_rows, nd.mat_cols, std::move(acc), mag};
            }
        }
        throw StructureError("unreachable expression kind");
    }

    // Resolve scalar embeddings along an ordered factor chain the way the
    // value does: a scalar factor adjacent to blocks becomes a block-diagonal
    // copy matching the dimension it multiplies on.
    std::vector<Block> embed_chain(const std::vector<Block>& vals) {
        // A scalar factor embeds as a block-diagonal copy sized to whichever
        // non-scalar neighbour it multiplies against.
        const size_t m = vals.size();
        int left = 1;
        std::vector<int> left_dim(m), right_dim(m);
        for (size_t i = 0; i < m; ++i) {
            left_dim[i] = left;
            if (!(vals[i].br == 1 && vals[i].bc == 1)) left = vals[i].bc;
        }
        int right = 1;
        for (size_t i = m; i-- > 0;) {
            right_dim[i] = right;
            if (!(vals[i].br == 1 && vals[i].bc == 1)) right = vals[i].br;
        }
        std::vector<Block> out;
        out.reserve(m);
        for (size_t i = 0; i < m; ++i) {
            if (vals[i].br == 1 && vals[i].bc == 1) {
                const int k = std::max(left_dim[i], right_dim[i]);
                out.push_back(embed(vals[i], k, n_));
            } else {
                out.push_back(vals[i]);
            }
        }
        for (size_t i = 0; i + 1 < m; ++i)
            if (out[i].bc != out[i + 1].br)
                throw StructureError("product of mismatched block shapes");
        return out;
    }

    Block embed_like(const Block& b, const Block& target) {
        if (b.br == target.br && b.bc == target.bc) return b;
        return embed(b, target.br, n_);
    }

    const NcExpr& expr_;
    const MatrixTuple& x_;
    int n_;
    std::unordered_map<const ExprNode*, Block> memo_;
};

}  // namespace

EvalResult eval(const NcExpr& e, const MatrixTuple& x) {
    Evaluator ev(e, x);
    const Block& v = ev.value(e.root);
    return EvalResult{v.flat, v.br, v.bc, x.n, ev.worst_cond, v.mag};
}

ComplexMatrix dir_deriv(const NcExpr& e, const MatrixTuple& x, const MatrixTuple& h) {
    if (x.n != h.n || x.d != h.d)
        throw DimensionError("dir_deriv: point and direction shapes differ");
    Evaluator ev(e, x);
    return ev.dual(e.root, h).dv.flat;
}

DivisorValue divisor(const NcExpr& e, const MatrixTuple& x, DivisorMethod method) {
    const BlockShape shape = block_shape(e.root);
    if (!shape.square())
        throw StructureError("divisor requires a scalar or square matricial expression");
    Evaluator ev(e, x);
    const Block& f = ev.value(e.root);
    if (f.flat.frobenius_norm() <= 1e-12 * f.mag)
        throw SingularError("divisor undefined: the expression value lies on the zero set",
                            f.flat.frobenius_norm());
    ComplexMatrix finv;
    try {
        finv = solve_inv(f.flat).mat;
    } catch (const SingularError& err) {
        throw SingularError(
            "divisor undefined: the expression value lies on the zero set", err.pivot());
    }

    DivisorValue g;
    g.n = x.n;
    g.components.assign(static_cast<size_t>(x.d), ComplexMatrix(x.n, x.n));

    if (method == DivisorMethod::Reverse) {
        ev.backward(e.root, finv, g.components);
        return g;
    }

    // Forward basis extraction: one directional derivative per matrix unit
    // and slot. Kept as an independent oracle for the adjoint pass.
    for (int i = 0; i < x.d; ++i) {
        for (int k = 0; k < x.n; ++k)
            for (int l = 0; l < x.n; ++l) {
                MatrixTuple h(x.n, x.d);
                h[i](k, l) = 1.0;
                Evaluator fev(e, x);
                const ComplexMatrix df = fev.dual(e.root, h).dv.flat;
                g.components[static_cast<size_t>(i)](l, k) = (df * finv).trace();
            }
    }
    return g;
}

Complex tracial_eval(const NcExpr& e, const MatrixTuple& x, TracialKind kind) {
    EvalResult r = eval(e, x);
    if (r.block_rows != r.block_cols)
        throw StructureError("tracial evaluation requires a square expression");
    if (kind == TracialKind::Trace) return r.value.trace();
    if (r.value.frobenius_norm() <= 1e-12 * r.value_scale)
        throw SingularError("logdet of a value that vanishes to working precision",
                            r.value.frobenius_norm());
    DetResult det = lu_det_full(r.value);
    if (det.singular)
        throw SingularError("logdet of a singular value", det.min_pivot);
    return std::log(det.det);
}

Complex trace_pair(const MatrixTuple& h, const DivisorValue& g) {
    if (h.d != static_cast<int>(g.components.size()) || h.n != g.n)
        throw DimensionError("trace_pair shape mismatch");
    Complex s = 0.0;
    for (int i = 0; i < h.d; ++i) s += (h[i] * g.components[static_cast<size_t>(i)]).trace();
    return s;
}

double rel_err(const DivisorValue& got, const DivisorValue& want) {
    if (got.n != want.n || got.components.size() != want.components.size())
        throw DimensionError("divisor rel_err shape mismatch");
    double worst = 0.0;
    for (size_t i = 0; i < got.components.size(); ++i)
        worst = std::max(worst, rel_err(got.components[i], want.components[i]));
    return worst;
}

}  // namespace nc
