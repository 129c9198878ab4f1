#include "nc/expr.hpp"

#include <algorithm>
#include <cstdio>
#include <utility>

#include "nc/error.hpp"
#include "nc/numfmt.hpp"

namespace nc {

ExprPtr ExprNode::var(int index) {
    if (index < 1) throw StructureError("variable index must be >= 1");
    auto n = std::shared_ptr<ExprNode>(new ExprNode(ExprKind::Var));
    n->var_index = index;
    return n;
}

ExprPtr ExprNode::constant(Complex value) {
    auto n = std::shared_ptr<ExprNode>(new ExprNode(ExprKind::Const));
    n->value = value;
    return n;
}

ExprPtr ExprNode::sum(std::vector<ExprPtr> children) {
    if (children.size() < 2) throw StructureError("sum needs at least two children");
    auto n = std::shared_ptr<ExprNode>(new ExprNode(ExprKind::Sum));
    n->children = std::move(children);
    return n;
}

ExprPtr ExprNode::prod(std::vector<ExprPtr> children) {
    if (children.size() < 2) throw StructureError("prod needs at least two children");
    auto n = std::shared_ptr<ExprNode>(new ExprNode(ExprKind::Prod));
    n->children = std::move(children);
    return n;
}

ExprPtr ExprNode::neg(ExprPtr child) {
    auto n = std::shared_ptr<ExprNode>(new ExprNode(ExprKind::Neg));
    n->children = {std::move(child)};
    return n;
}

ExprPtr ExprNode::inv(ExprPtr child) {
    auto n = std::shared_ptr<ExprNode>(new ExprNode(ExprKind::Inv));
    n->children = {std::move(child)};
    return n;
}

ExprPtr ExprNode::exp(ExprPtr child) {
    auto n = std::shared_ptr<ExprNode>(new ExprNode(ExprKind::Exp));
    n->children = {std::move(child)};
    return n;
}

ExprPtr ExprNode::mat(int rows, int cols, std::vector<ExprPtr> entries) {
    if (rows < 1 || cols < 1) throw StructureError("matricial literal needs rows, cols >= 1");
    if (entries.size() != static_cast<size_t>(rows) * cols)
        throw StructureError("matricial literal grid is ragged");
    auto n = std::shared_ptr<ExprNode>(new ExprNode(ExprKind::Mat));
    n->mat_rows = rows;
    n->mat_cols = cols;
    n->children = std::move(entries);
    return n;
}

NcExpr make_expr(ExprPtr root, int nvars) {
    if (!root) throw StructureError("empty expression");
    if (nvars < 1) throw StructureError("variable count must be >= 1");
    if (max_var_index(root) > nvars)
        throw StructureError("variable index out of range for d=" + std::to_string(nvars));
    return NcExpr{std::move(root), nvars};
}

int depth(const ExprPtr& e) {
    int best = 0;
    for (const ExprPtr& c : e->children) best = std::max(best, depth(c));
    return best + 1;
}

int max_var_index(const ExprPtr& e) {
    int best = e->kind == ExprKind::Var ? e->var_index : 0;
    for (const ExprPtr& c : e->children) best = std::max(best, max_var_index(c));
    return best;
}

bool contains_kind(const ExprPtr& e, ExprKind k) {
    if (e->kind == k) return true;
    for (const ExprPtr& c : e->children)
        if (contains_kind(c, k)) return true;
    return false;
}

bool structurally_equal(const ExprPtr& a, const ExprPtr& b) {
    if (a.get() == b.get()) return true;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case ExprKind::Var:
            return a->var_index == b->var_index;
        case ExprKind::Const:
            return a->value == b->value;
        case ExprKind::Mat:
            if (a->mat_rows != b->mat_rows || a->mat_cols != b->mat_cols) return false;
            break;
        default:
            break;
    }
    if (a->children.size() != b->children.size()) return false;
    for (size_t i = 0; i < a->children.size(); ++i)
        if (!structurally_equal(a->children[i], b->children[i])) return false;
    return true;
}

namespace {

// Precedence levels: Sum 1, Prod 2, Neg 3, atoms 4.
int prec(const ExprNode& n) {
    switch (n.kind) {
        case ExprKind::Sum: return 1;
        case ExprKind::Prod: return 2;
        case ExprKind::Neg: return 3;
        default: return 4;
    }
}

std::string fmt_const(Complex v) {
    const double re = v.real(), im = v.imag();
    if (im == 0.0 && re >= 0.0) return format_17g(re);
    if (re == 0.0 && im > 0.0) return format_17g(im) + "i";
    // No single-literal syntax; emit an equivalent parenthesized form.
    std::string s = "(";
    if (re != 0.0 || im == 0.0) s += format_17g(re);
    if (im != 0.0) {
        if (im > 0.0 && (re != 0.0)) s += "+";
        s += format_17g(im) + "i";
    }
    return s + ")";
}

void print(const ExprNode& n, int min_prec, std::string& out) {
    const bool wrap = prec(n) < min_prec;
    if (wrap) out += "(";
    switch (n.kind) {
        case ExprKind::Var:
            out += "x" + std::to_string(n.var_index);
            break;
        case ExprKind::Const:
            out += fmt_const(n.value);
            break;
        case ExprKind::Sum:
            for (size_t i = 0; i < n.children.size(); ++i) {
                const ExprNode& c = *n.children[i];
                if (i == 0) {
                    print(c, 2, out);
                } else if (c.kind == ExprKind::Neg) {
                    out += " - ";
                    print(*c.children[0], 2, out);
                } else {
                    out += " + ";
                    print(c, 2, out);
                }
            }
            break;
        case ExprKind::Prod:
            for (size_t i = 0; i < n.children.size(); ++i) {
                if (i > 0) out += "*";
                print(*n.children[i], i == 0 ? 3 : 4, out);
            }
            break;
        case ExprKind::Neg:
            out += "-";
            print(*n.children[0], 4, out);
            break;
        case ExprKind::Inv:
            out += "inv(";
            print(*n.children[0], 1, out);
            out += ")";
            break;
        case ExprKind::Exp:
            out += "exp(";
            print(*n.children[0], 1, out);
            out += ")";
            break;
        case ExprKind::Mat:
            out += "[";
            for (int r = 0; r < n.mat_rows; ++r) {
                if (r > 0) out += ", ";
                out += "[";
                for (int c = 0; c < n.mat_cols; ++c) {
                    if (c > 0) out += ", ";
                    print(*n.children[static_cast<size_t>(r) * n.mat_cols + c], 1, out);
                }
                out += "]";
            }
            out += "]";
            break;
    }
    if (wrap) out += ")";
}

void node_json(const ExprNode& n, std::string& out) {
    switch (n.kind) {
        case ExprKind::Var:
            out += "{\"kind\":\"var\",\"index\":" + std::to_string(n.var_index) + "}";
            return;
        case ExprKind::Const:
            out += "{\"kind\":\"const\",\"value\":[" + format_17g(n.value.real()) + "," +
                   format_17g(n.value.imag()) + "]}";
            return;
        default:
            break;
    }
    const char* name = nullptr;
    switch (n.kind) {
        case ExprKind::Sum: name = "sum"; break;
        case ExprKind::Prod: name = "prod"; break;
        case ExprKind::Neg: name = "neg"; break;
        case ExprKind::Inv: name = "inv"; break;
        case ExprKind::Exp: name = "exp"; break;
        case ExprKind::Mat: name = "mat"; break;
        default: name = "?"; break;
    }
    out += "{\"kind\":\"";
    out += name;
    out += "\"";
    if (n.kind == ExprKind::Mat)
        out += ",\"rows\":" + std::to_string(n.mat_rows) +
               ",\"cols\":" + std::to_string(n.mat_cols);
    out += ",\"children\":[";
    for (size_t i = 0; i < n.children.size(); ++i) {
        if (i > 0) out += ",";
        node_json(*n.children[i], out);
    }
    out += "]}";
}

}  // namespace

std::string to_string(const ExprPtr& e) {
    std::string out;
    print(*e, 1, out);
    return out;
}

std::string to_string(const NcExpr& e) { return to_string(e.root); }

std::string ast_json(const NcExpr& e) {
    std::string out;
    node_json(*e.root, out);
    return out;
}

}  // namespace nc
