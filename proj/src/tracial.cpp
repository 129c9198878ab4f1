#include "nc/tracial.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <utility>

#include "nc/classify.hpp"
#include "nc/error.hpp"

namespace nc {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
}  // namespace

void PathSpec::validate() const {
    if (d < 1) throw ValidationError("path: need d >= 1");
    if (n < 1) throw ValidationError("path: need size n >= 1");
    if (nodes.size() < 2) throw ValidationError("path: need at least two nodes");
    if (nodes.front().t != 0.0 || nodes.back().t != 1.0)
        throw ValidationError("path: nodes must start at t=0 and end at t=1");
    for (size_t i = 0; i + 1 < nodes.size(); ++i)
        if (!(nodes[i].t < nodes[i + 1].t))
            throw ValidationError("path: node times must be strictly increasing");
    for (const PathNode& nd : nodes)
        if (nd.x.n != n || nd.x.d != d)
            throw ValidationError("path: node tuple shape mismatch");
    if (pad_start < 1 || n % pad_start != 0)
        throw ValidationError("path: pad_start must divide the size");
    if (pad_end < 1 || n % pad_end != 0)
        throw ValidationError("path: pad_end must divide the size");
}

MatrixTuple PathSpec::at(double t) const {
    if (t <= 0.0) return nodes.front().x;
    if (t >= 1.0) return nodes.back().x;
    size_t hi = 1;
    while (hi + 1 < nodes.size() && nodes[hi].t < t) ++hi;
    const PathNode& a = nodes[hi - 1];
    const PathNode& b = nodes[hi];
    const double s = (t - a.t) / (b.t - a.t);
    MatrixTuple out = b.x;
    out -= a.x;
    out *= Complex(s, 0.0);
    out += a.x;
    return out;
}

GermSpec GermSpec::logdet(NcExpr e) {
    const BlockShape shape = block_shape(e.root);
    if (!shape.square())
        throw ValidationError("logdet germ needs a scalar or square matricial expression");
    GermSpec g;
    g.kind = Kind::LogDet;
    g.expr = std::move(e);
    return g;
}

GermSpec GermSpec::closed_form(std::vector<NcExpr> gs) {
    if (gs.empty()) throw ValidationError("closed-form germ needs d components");
    for (const NcExpr& g : gs) {
        if (g.nvars != gs.front().nvars)
            throw ValidationError("closed-form germ components disagree on d");
        if (!block_shape(g.root).scalar())
            throw ValidationError("closed-form germ components must be scalar expressions");
    }
    if (static_cast<int>(gs.size()) != gs.front().nvars)
        throw ValidationError("closed-form germ needs exactly d components");
    GermSpec g;
    g.kind = Kind::ClosedForm;
    g.form = std::move(gs);
    return g;
}

int GermSpec::vars() const {
    return kind == Kind::LogDet ? expr.nvars : form.front().nvars;
}

std::string GermSpec::describe() const {
    if (kind == Kind::LogDet) return "logdet(" + to_string(expr) + ")";
    std::string s = "form(";
    for (size_t i = 0; i < form.size(); ++i) {
        if (i) s += "; ";
        s += to_string(form[i]);
    }
    return s + ")";
}

void DomainSpec::require_member(const MatrixTuple& x, double t) const {
    if (!restricted) return;
    const Complex det = lu_det(x[0]);
    for (const Complex& lam : forbidden_dets)
        if (std::abs(det - lam) <= 1e-12 * (1.0 + std::abs(lam)))
            throw DomainExitError("path node violates the domain restriction det X1 != lambda", t);
}

MatrixTuple essential_base(const MatrixTuple& x, int pad, double tol) {
    if (pad < 1 || x.n % pad != 0)
        throw ValidationError("essential_base: padding does not divide the size");
    const int nb = x.n / pad;
    const double scale = 1.0 + x.frobenius_norm();
    std::vector<ComplexMatrix> base;
    base.reserve(static_cast<size_t>(x.d));
    for (int i = 0; i < x.d; ++i) base.push_back(x[i].block(0, 0, nb, nb));
    for (int i = 0; i < x.d; ++i) {
        double off = 0.0;
        for (int br = 0; br < pad; ++br)
            for (int bc = 0; bc < pad; ++bc) {
                const ComplexMatrix blk = x[i].block(br * nb, bc * nb, nb, nb);
                if (br == bc) {
                    off = std::max(off, (blk - base[static_cast<size_t>(i)]).frobenius_norm());
                } else {
                    off = std::max(off, blk.frobenius_norm());
                }
            }
        if (off > tol * scale)
            throw ValidationError("essential_base: point is not a direct-sum power");
    }
    return MatrixTuple(std::move(base));
}

PathSpec inflate(const PathSpec& g, int m) {
    if (m < 1) throw ValidationError("inflate: need m >= 1");
    g.validate();
    PathSpec out;
    out.d = g.d;
    out.n = g.n * m;
    out.pad_start = g.pad_start * m;
    out.pad_end = g.pad_end * m;
    out.base_tag = g.base_tag;
    out.nodes.reserve(g.nodes.size());
    for (const PathNode& nd : g.nodes)
        out.nodes.push_back({nd.t, direct_sum_power(nd.x, m)});
    return out;
}

PathSpec concatenate(const PathSpec& g1, const PathSpec& g2) {
    g1.validate();
    g2.validate();
    if (g1.d != g2.d) throw ValidationError("concatenate: variable counts differ");
    const int big = std::lcm(g1.n, g2.n);
    const int m1 = big / g1.n;
    const int m2 = big / g2.n;
    const MatrixTuple end1 = direct_sum_power(g1.nodes.back().x, m1);
    const MatrixTuple start2 = direct_sum_power(g2.nodes.front().x, m2);
    if (rel_err(end1, start2) > 1e-8)
        throw ValidationError("concatenate: essential endpoints differ");
    PathSpec out;
    out.d = g1.d;
    out.n = big;
    out.pad_start = g1.pad_start * m1;
    out.pad_end = g2.pad_end * m2;
    out.base_tag = g1.base_tag;
    out.nodes.reserve(g1.nodes.size() + g2.nodes.size() - 1);
    for (const PathNode& nd : g1.nodes)
        out.nodes.push_back({nd.t * 0.5, direct_sum_power(nd.x, m1)});
    for (size_t i = 1; i < g2.nodes.size(); ++i)
        out.nodes.push_back({0.5 + g2.nodes[i].t * 0.5, direct_sum_power(g2.nodes[i].x, m2)});
    return out;
}

PathSpec path_direct_sum(const PathSpec& a, const PathSpec& b) {
    a.validate();
    b.validate();
    if (a.d != b.d) throw ValidationError("path_direct_sum: variable counts differ");
    std::vector<double> grid;
    for (const PathNode& nd : a.nodes) grid.push_back(nd.t);
    for (const PathNode& nd : b.nodes) grid.push_back(nd.t);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    PathSpec out;
    out.d = a.d;
    out.n = a.n + b.n;
    out.base_tag = a.base_tag;
    for (double t : grid) out.nodes.push_back({t, direct_sum(a.at(t), b.at(t))});
    // Padding survives when both summands share the same essential base.
    out.pad_start = 1;
    out.pad_end = 1;
    try {
        const MatrixTuple ba = essential_base(a.nodes.front().x, a.pad_start);
        const MatrixTuple bb = essential_base(b.nodes.front().x, b.pad_start);
        if (ba.n == bb.n && rel_err(ba, bb) <= 1e-8)
            out.pad_start = a.pad_start + b.pad_start;
    } catch (const ValidationError&) {
    }
    try {
        const MatrixTuple ea = essential_base(a.nodes.back().x, a.pad_end);
        const MatrixTuple eb = essential_base(b.nodes.back().x, b.pad_end);
        if (ea.n == eb.n && rel_err(ea, eb) <= 1e-8)
            out.pad_end = a.pad_end + b.pad_end;
    } catch (const ValidationError&) {
    }
    return out;
}

namespace {

// Adaptive trapezoid with step doubling. Accepts an interval when the
// Richardson error estimate meets the local budget and, for branch-guarded
// integrands, the local argument change stays under pi/2.
class Integrator {
public:
    Integrator(std::function<Complex(double)> f, bool guard) : f_(std::move(f)), guard_(guard) {}

    Complex segment(double a, double b, double tol) {
        const Complex fa = f_(a);
        const Complex fb = f_(b);
        return rec(a, fa, b, fb, tol, 0);
    }

    long steps = 0;
    double max_err = 0.0;

private:
    Complex rec(double a, Complex fa, double b, Complex fb, double tol, int depth) {
        const double mid = 0.5 * (a + b);
        const Complex fm = f_(mid);
        const Complex t1 = 0.5 * (b - a) * (fa + fb);
        const Complex t2 = 0.25 * (b - a) * (fa + 2.0 * fm + fb);
        const double err = std::abs(t2 - t1) / 3.0;
        const bool branch_ok = !guard_ || std::abs(t2.imag()) <= kPi / 2.0;
        if (err <= tol && branch_ok) {
            ++steps;
            max_err = std::max(max_err, err);
            return t2 + (t2 - t1) / 3.0;
        }
        if (depth >= kMaxDepth)
            throw DomainExitError("continuation step control failed to converge", mid);
        return rec(a, fa, mid, fm, tol * 0.5, depth + 1) +
               rec(mid, fm, b, fb, tol * 0.5, depth + 1);
    }

    static constexpr int kMaxDepth = 48;
    std::function<Complex(double)> f_;
    bool guard_;
};

MatrixTuple fd_form_deriv(const std::vector<NcExpr>& form, const MatrixTuple& x,
                          const MatrixTuple& h, double step) {
    MatrixTuple plus = x, minus = x;
    MatrixTuple hh = h;
    hh *= Complex(step, 0.0);
    plus += hh;
    minus -= hh;
    std::vector<ComplexMatrix> comps;
    comps.reserve(form.size());
    for (const NcExpr& g : form) {
        ComplexMatrix dm = eval(g, plus).value - eval(g, minus).value;
        dm *= Complex(1.0 / (2.0 * step), 0.0);
        comps.push_back(std::move(dm));
    }
    return MatrixTuple(std::move(comps));
}

void require_closed_at_nodes(const std::vector<NcExpr>& form, const PathSpec& gamma) {
    const double step = 1e-5;
    const double tol = 1e-5;
    Rng rng(0x10c4ULL);
    for (const PathNode& nd : gamma.nodes) {
        for (int rep = 0; rep < 2; ++rep) {
            const MatrixTuple h = random_tuple(gamma.n, gamma.d, rng.raw());
            const MatrixTuple k = random_tuple(gamma.n, gamma.d, rng.raw());
            Complex s1 = 0.0, s2 = 0.0;
            try {
                const MatrixTuple dh = fd_form_deriv(form, nd.x, h, step);
                const MatrixTuple dk = fd_form_deriv(form, nd.x, k, step);
                for (int i = 0; i < gamma.d; ++i) {
                    s1 += (k[i] * dh[i]).trace();
                    s2 += (h[i] * dk[i]).trace();
                }
            } catch (const SingularError&) {
                throw DomainExitError("closedness test hit a singular evaluation", nd.t);
            }
            if (std::abs(s1 - s2) > tol * (1.0 + std::abs(s1) + std::abs(s2)))
                throw ValidationError(
                    "continuation refused: the supplied form fails the closedness "
                    "symmetry test at t=" + std::to_string(nd.t));
        }
    }
}

}  // namespace

ContinuationResult continue_germ(const GermSpec& germ, const PathSpec& gamma,
                                 const DomainSpec& dom, double tol) {
    gamma.validate();
    if (tol <= 0.0) throw ValidationError("continue_germ: tol must be positive");
    if (germ.vars() != gamma.d)
        throw ValidationError("continue_germ: germ and path disagree on d");
    for (const PathNode& nd : gamma.nodes) dom.require_member(nd.x, nd.t);
    if (germ.kind == GermSpec::Kind::ClosedForm) require_closed_at_nodes(germ.form, gamma);

    Complex start(0.0, 0.0);
    if (germ.kind == GermSpec::Kind::LogDet) {
        try {
            start = tracial_eval(germ.expr, gamma.nodes.front().x, TracialKind::LogDet);
        } catch (const SingularError&) {
            throw DomainExitError("germ undefined at the start of the path", 0.0);
        }
    }

    Complex increment(0.0, 0.0);
    long steps = 0;
    double max_err = 0.0;
    for (size_t seg = 0; seg + 1 < gamma.nodes.size(); ++seg) {
        const PathNode& a = gamma.nodes[seg];
        const PathNode& b = gamma.nodes[seg + 1];
        const double dt = b.t - a.t;
        MatrixTuple h = b.x;
        h -= a.x;  // gamma'(t) = h / dt on this segment
        auto point = [&](double t) {
            MatrixTuple x = h;
            x *= Complex((t - a.t) / dt, 0.0);
            x += a.x;
            return x;
        };
        std::function<Complex(double)> integrand;
        if (germ.kind == GermSpec::Kind::LogDet) {
            integrand = [&, dt](double t) {
                try {
                    const DivisorValue g = divisor(germ.expr, point(t));
                    return trace_pair(h, g) / dt;
                } catch (const SingularError&) {
                    throw DomainExitError("continuation left the domain (singular value)", t);
                }
            };
        } else {
            integrand = [&, dt](double t) {
                const MatrixTuple x = point(t);
                Complex s = 0.0;
                try {
                    for (int i = 0; i < gamma.d; ++i)
                        s += (h[i] * eval(germ.form[static_cast<size_t>(i)], x).value).trace();
                } catch (const SingularError&) {
                    throw DomainExitError("continuation left the domain (singular value)", t);
                }
                return s / dt;
            };
        }
        Integrator integ(integrand, germ.kind == GermSpec::Kind::LogDet);
        increment += integ.segment(a.t, b.t, tol * dt);
        steps += integ.steps;
        max_err = std::max(max_err, integ.max_err);
    }

    ContinuationResult r;
    r.increment = increment;
    r.end_value = start + increment;
    r.normalized_increment = increment / Complex(static_cast<double>(gamma.n), 0.0);
    r.steps = steps;
    r.max_step_error = max_err;
    return r;
}

Complex loop_phi(const GermSpec& germ, const PathSpec& gamma, const DomainSpec& dom,
                 double tol) {
    gamma.validate();
    MatrixTuple base_s = essential_base(gamma.nodes.front().x, gamma.pad_start);
    MatrixTuple base_e = essential_base(gamma.nodes.back().x, gamma.pad_end);
    if (base_s.n != base_e.n || rel_err(base_s, base_e) > 1e-8)
        throw ValidationError("loop_phi: the path is not an essential loop");
    const ContinuationResult r = continue_germ(germ, gamma, dom, tol);
    return r.normalized_increment;
}

QuantizationReport quantization_check(const std::vector<std::pair<Complex, int>>& values,
                                      double tol) {
    QuantizationReport rep;
    for (const auto& [c, n] : values) {
        if (n < 1) throw ValidationError("quantization_check: sizes must be >= 1");
        QuantizationEntry e;
        e.c = c;
        e.n = n;
        const Complex z = Complex(static_cast<double>(n), 0.0) * c;
        e.nearest = std::llround(z.imag() / kTwoPi);
        e.residual = std::abs(z - Complex(0.0, kTwoPi * static_cast<double>(e.nearest)));
        e.pass = e.residual <= tol;
        const long long g = std::gcd(std::llabs(e.nearest), static_cast<long long>(n));
        e.ratio_num = g ? e.nearest / g : e.nearest;
        e.ratio_den = g ? n / g : n;
        rep.all_pass = rep.all_pass && e.pass;
        rep.entries.push_back(e);
    }
    return rep;
}

IntegralityReport integrality_test(const GermSpec& g, const std::vector<PathSpec>& loops,
                                   const DomainSpec& dom, double tol) {
    if (g.kind != GermSpec::Kind::ClosedForm)
        throw ValidationError("integrality_test: the germ must be a closed form");
    IntegralityReport rep;
    for (const PathSpec& loop : loops) {
        const Complex phi = loop_phi(g, loop, dom, std::min(tol * 1e-2, 1e-8));
        IntegralityEntry e;
        e.n = loop.n;
        e.phi = phi;
        const Complex npz = Complex(static_cast<double>(loop.n), 0.0) * phi;
        e.ratio = npz / Complex(0.0, kTwoPi);
        e.nearest = std::llround(e.ratio.real());
        e.residual = std::abs(npz - Complex(0.0, kTwoPi * static_cast<double>(e.nearest)));
        e.pass = e.residual <= tol;
        rep.divisor_candidate = rep.divisor_candidate && e.pass;
        rep.entries.push_back(e);
    }
    return rep;
}

TraceEquivReport trace_equiv_check(const PathSpec& g1, const PathSpec& g2,
                                   const std::vector<GermSpec>& germs,
                                   const DomainSpec& dom, double tol) {
    g1.validate();
    g2.validate();
    const MatrixTuple s1 = essential_base(g1.nodes.front().x, g1.pad_start);
    const MatrixTuple s2 = essential_base(g2.nodes.front().x, g2.pad_start);
    if (s1.n != s2.n || rel_err(s1, s2) > 1e-8)
        throw ValidationError("trace_equiv_check: paths start at different essential points");
    const MatrixTuple e1 = essential_base(g1.nodes.back().x, g1.pad_end);
    const MatrixTuple e2 = essential_base(g2.nodes.back().x, g2.pad_end);
    if (e1.n != e2.n || rel_err(e1, e2) > 1e-8)
        throw ValidationError("trace_equiv_check: paths end at different essential points");

    TraceEquivReport rep;
    const double itol = std::min(tol * 1e-2, 1e-8);
    for (size_t i = 0; i < germs.size(); ++i) {
        const Complex p1 = continue_germ(germs[i], g1, dom, itol).normalized_increment;
        const Complex p2 = continue_germ(germs[i], g2, dom, itol).normalized_increment;
        rep.phi1.push_back(p1);
        rep.phi2.push_back(p2);
        if (rep.indistinguishable && std::abs(p1 - p2) > tol) {
            rep.indistinguishable = false;
            rep.separating_germ = static_cast<int>(i);
        }
    }
    rep.verdict = rep.indistinguishable
                      ? "indistinguishable (w.r.t. supplied germs)"
                      : "distinguished by germ #" + std::to_string(rep.separating_germ) +
                            " (" + germs[static_cast<size_t>(rep.separating_germ)].describe() + ")";
    return rep;
}

PathSpec circle_loop(Complex center, double radius, int winding, int samples) {
    if (radius <= 0.0) throw ValidationError("circle_loop: radius must be positive");
    if (samples < 4 * std::abs(winding) + 5)
        throw ValidationError("circle_loop: too few samples for the requested winding");
    PathSpec p;
    p.d = 1;
    p.n = 1;
    p.base_tag = "circle";
    for (int j = 0; j < samples; ++j) {
        const double t = static_cast<double>(j) / (samples - 1);
        const Complex z = center + radius * std::exp(Complex(0.0, kTwoPi * winding * t));
        p.nodes.push_back({t, MatrixTuple({ComplexMatrix(1, 1, {z})})});
    }
    p.nodes.back() = {1.0, p.nodes.front().x};
    return p;
}

PathSpec diag_rotation_loop(int n, int winding, int samples) {
    if (n < 1) throw ValidationError("diag_rotation_loop: need n >= 1");
    if (samples < 4 * std::abs(winding) + 5)
        throw ValidationError("diag_rotation_loop: too few samples for the requested winding");
    PathSpec p;
    p.d = 1;
    p.n = n;
    p.pad_start = n;
    p.pad_end = n;
    p.base_tag = "diag-rotation";
    for (int j = 0; j < samples; ++j) {
        const double t = static_cast<double>(j) / (samples - 1);
        ComplexMatrix m = ComplexMatrix::identity(n);
        m(0, 0) = std::exp(Complex(0.0, kTwoPi * winding * t));
        p.nodes.push_back({t, MatrixTuple({std::move(m)})});
    }
    p.nodes.back() = {1.0, p.nodes.front().x};
    return p;
}

PathSpec unit_det_2x2_loop(int samples) {
    if (samples < 9) throw ValidationError("unit_det_2x2_loop: need at least 9 samples");
    PathSpec p;
    p.d = 1;
    p.n = 2;
    p.base_tag = "unit-det-2x2";
    for (int j = 0; j < samples; ++j) {
        const double t = static_cast<double>(j) / (samples - 1);
        ComplexMatrix m(2, 2);
        m(0, 0) = std::exp(Complex(0.0, kTwoPi * t));
        m(0, 1) = 1.0;
        m(1, 1) = std::exp(Complex(0.0, -kTwoPi * t));
        p.nodes.push_back({t, MatrixTuple({std::move(m)})});
    }
    p.nodes.back() = {1.0, p.nodes.front().x};
    return p;
}

PathSpec constant_loop(const MatrixTuple& x) {
    if (x.n < 1) throw ValidationError("constant_loop: need a nonempty point");
    PathSpec p;
    p.d = x.d;
    p.n = x.n;
    p.base_tag = "constant";
    p.nodes.push_back({0.0, x});
    p.nodes.push_back({1.0, x});
    return p;
}

}  // namespace nc
