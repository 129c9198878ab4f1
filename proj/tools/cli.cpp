#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nc/error.hpp"
#include "nc/evalad.hpp"
#include "nc/exprgen.hpp"
#include "nc/json_io.hpp"
#include "nc/numfmt.hpp"
#include "nc/parse.hpp"
#include "nc/realize.hpp"
#include "nc/suite.hpp"
#include "nc/tracial.hpp"

namespace nc {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNumerical = 1;
constexpr int kExitUsage = 2;
constexpr int kExitCheckFailed = 3;

uint64_t env_seed() {
    if (const char* s = std::getenv("NC_SEED")) return std::strtoull(s, nullptr, 10);
    return 0;
}

struct Common {
    uint64_t seed = env_seed();
    std::string format = "json";
    double tol = 1e-8;        // integration / residual tolerance
    double check_tol = 1e-6;  // assertion tolerance for check-style commands

    void attach(CLI::App* cmd, bool with_tol = false, bool with_check_tol = false) {
        cmd->add_option("--seed", seed, "RNG seed (default: NC_SEED env or 0)");
        cmd->add_option("--format", format, "Report format: json or text")
            ->check(CLI::IsMember({"json", "text"}));
        if (with_tol) cmd->add_option("--tol", tol, "Tolerance (default 1e-8)");
        if (with_check_tol)
            cmd->add_option("--tol", check_tol, "Assertion tolerance (default 1e-6)");
    }
};

// JSON report envelope: command, argv echo, seed, body, status. Field order
// is fixed so identical invocations print identical bytes.
class Report {
public:
    Report(std::ostream& os, const std::string& command,
           const std::vector<std::string>& argv, const Common& c)
        : os_(os), w_(os), text_(c.format == "text") {
        if (text_) {
            os_ << "command: " << command << "\n";
            os_ << "seed: " << c.seed << "\n";
            return;
        }
        w_.begin_object();
        w_.key("command").value(command);
        w_.key("argv").begin_array();
        for (const std::string& a : argv) w_.value(a);
        w_.end_array();
        w_.key("seed").value(static_cast<long long>(c.seed));
    }

    bool text() const { return text_; }
    JsonWriter& w() { return w_; }
    std::ostream& os() { return os_; }

    void line(const std::string& k, const std::string& v) { os_ << k << ": " << v << "\n"; }
    void line(const std::string& k, double v) { line(k, format_17g(v)); }
    void line(const std::string& k, Complex v) {
        line(k, format_17g(v.real()) + (v.imag() < 0 ? " - " : " + ") +
                    format_17g(std::abs(v.imag())) + "i");
    }

    void finish(const char* status) {
        if (text_) {
            os_ << "status: " << status << "\n";
            return;
        }
        w_.key("status").value(status);
        w_.end_object();
        os_ << "\n";
    }

private:
    std::ostream& os_;
    JsonWriter w_;
    bool text_;
};

std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    std::string s = ss.str();
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
    return s;
}

std::string expr_text(const std::string& flag, const std::string& file) {
    if (!flag.empty()) return flag;
    if (!file.empty()) return read_text_file(file);
    throw ValidationError("an expression is required (--expr or --expr-file)");
}

int infer_d(const std::string& text, int given) {
    if (given > 0) return given;
    // Parse permissively with a large d just to find the top variable index.
    const NcExpr probe = parse(text, 64);
    const int top = max_var_index(probe.root);
    return top >= 1 ? top : 1;
}

GermSpec parse_germ(const std::string& spec, int d) {
    if (spec.rfind("logdet:", 0) == 0)
        return GermSpec::logdet(parse(spec.substr(7), d));
    if (spec.rfind("form:", 0) == 0) {
        std::vector<NcExpr> comps;
        std::string rest = spec.substr(5);
        size_t pos = 0;
        while (pos <= rest.size()) {
            const size_t semi = rest.find(';', pos);
            const std::string piece =
                rest.substr(pos, semi == std::string::npos ? std::string::npos : semi - pos);
            if (!piece.empty()) comps.push_back(parse(piece, d));
            if (semi == std::string::npos) break;
            pos = semi + 1;
        }
        return GermSpec::closed_form(std::move(comps));
    }
    throw ValidationError("germ must be 'logdet:EXPR' or 'form:E1;...;Ed'");
}

DomainSpec load_domain(const std::string& file, bool gl) {
    if (!file.empty() && gl) throw ValidationError("give either --domain or --gl, not both");
    if (gl) return DomainSpec::gl();
    if (file.empty()) return DomainSpec::unrestricted();
    return domain_from_json(load_json_file(file));
}

std::vector<PathSpec> load_paths(const std::string& file) {
    const nlohmann::json j = load_json_file(file);
    std::vector<PathSpec> out;
    if (j.is_array()) {
        for (const auto& p : j) out.push_back(path_from_json(p));
    } else if (j.contains("loops") && j["loops"].is_array()) {
        for (const auto& p : j["loops"]) out.push_back(path_from_json(p));
    } else {
        out.push_back(path_from_json(j));
    }
    return out;
}

void write_path_file(const PathSpec& p, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write file: " + path);
    JsonWriter w(out);
    write_path(w, p);
    out << "\n";
}

void emit_matrix(Report& rep, const std::string& key, const ComplexMatrix& m) {
    if (rep.text()) {
        for (int r = 0; r < m.rows(); ++r) {
            std::string row;
            for (int c = 0; c < m.cols(); ++c) {
                const Complex z = m(r, c);
                if (c) row += "  ";
                row += format_17g(z.real()) + (z.imag() < 0 ? "-" : "+") +
                       format_17g(std::abs(z.imag())) + "i";
            }
            rep.line(key + "[" + std::to_string(r) + "]", row);
        }
        return;
    }
    rep.w().key(key);
    write_matrix(rep.w(), m);
}

struct Options {
    Common common;

    std::string expr, expr_file, e1, e2;
    std::string point_file, dir_file, realization_file;
    std::string method = "reverse";
    std::string sizes = "1,2,3,4";
    int trials = 25;
    int d = 0;

    std::string kind, out_file, from_file;
    int path_n = 1;
    int winding = 1;
    int samples = 256;
    double radius = 1.0;
    double center_re = 0.0, center_im = 0.0;

    std::string path1, path2, path_file, loops_file, form;
    std::vector<std::string> germs;
    bool gl = false;
    bool emit_ast = false;
    int criterion = 0;
};

std::vector<int> parse_sizes(const std::string& s) {
    std::vector<int> out;
    size_t pos = 0;
    while (pos < s.size()) {
        size_t comma = s.find(',', pos);
        if (comma == std::string::npos) comma = s.size();
        out.push_back(std::stoi(s.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    if (out.empty()) throw ValidationError("--sizes must list at least one size");
    return out;
}

int cmd_eval(const Options& o, const std::vector<std::string>& argv, std::ostream& out) {
    const MatrixTuple x = tuple_from_json(load_json_file(o.point_file));
    const std::string text = expr_text(o.expr, o.expr_file);
    const NcExpr e = parse(text, x.d);
    const EvalResult r = eval(e, x);
    Report rep(out, "eval", argv, o.common);
    if (rep.text()) {
        rep.line("expr", text);
        emit_matrix(rep, "value", r.value);
        rep.line("worst_cond", r.worst_cond);
    } else {
        rep.w().key("expr").value(text);
        if (o.emit_ast) rep.w().key("ast").value_raw(ast_json(e));
        rep.w().key("block_rows").value(r.block_rows);
        rep.w().key("block_cols").value(r.block_cols);
        emit_matrix(rep, "value", r.value);
        rep.w().key("worst_cond").value(r.worst_cond);
    }
    rep.finish("ok");
    return kExitOk;
}

int cmd_dderiv(const Options& o, const std::vector<std::string>& argv, std::ostream& out) {
    const MatrixTuple x = tuple_from_json(load_json_file(o.point_file));
    const MatrixTuple h = tuple_from_json(load_json_file(o.dir_file));
    const std::string text = expr_text(o.expr, o.expr_file);
    const NcExpr e = parse(text, x.d);
    const ComplexMatrix dv = dir_deriv(e, x, h);
    Report rep(out, "dderiv", argv, o.common);
    if (!rep.text()) rep.w().key("expr").value(text);
    emit_matrix(rep, "derivative", dv);
    rep.finish("ok");
    return kExitOk;
}

int cmd_divisor(const Options& o, const std::vector<std::string>& argv, std::ostream& out) {
    const MatrixTuple x = tuple_from_json(load_json_file(o.point_file));
    const std::string text = expr_text(o.expr, o.expr_file);
    const NcExpr e = parse(text, x.d);
    const DivisorMethod m =
        o.method == "forward" ? DivisorMethod::Forward : DivisorMethod::Reverse;
    const DivisorValue g = divisor(e, x, m);
    Report rep(out, "divisor", argv, o.common);
    if (rep.text()) {
        rep.line("expr", text);
        rep.line("method", o.method);
        for (size_t i = 0; i < g.components.size(); ++i)
            emit_matrix(rep, "g" + std::to_string(i + 1), g.components[i]);
    } else {
        rep.w().key("expr").value(text);
        rep.w().key("method").value(o.method);
        rep.w().key("divisor");
        write_divisor(rep.w(), g);
    }
    rep.finish("ok");
    return kExitOk;
}

int cmd_check_div_eq(const Options& o, const std::vector<std::string>& argv,
                     std::ostream& out) {
    if (o.e1.empty() || o.e2.empty())
        throw ValidationError("check-div-eq needs --e1 and --e2");
    const int d = std::max({infer_d(o.e1, o.d), infer_d(o.e2, o.d), 1});
    const NcExpr a = parse(o.e1, d);
    const NcExpr b = parse(o.e2, d);
    if (!block_shape(a.root).square() || !block_shape(b.root).square())
        throw ValidationError("check-div-eq needs scalar or square matricial expressions");
    const std::vector<int> sizes = parse_sizes(o.sizes);
    if (o.trials < 1) throw ValidationError("--trials must be >= 1");

    Report rep(out, "check-div-eq", argv, o.common);
    double worst = 0.0;
    int checked = 0, skipped = 0;
    bool pass = true;
    if (!rep.text()) {
        rep.w().key("e1").value(o.e1);
        rep.w().key("e2").value(o.e2);
        rep.w().key("tol").value(o.common.tol);
        rep.w().key("trials").begin_array();
    }
    for (int n : sizes) {
        for (int t = 0; t < o.trials; ++t) {
            const MatrixTuple x = random_tuple(
                n, d, mix_seed(o.common.seed, static_cast<uint64_t>(n), static_cast<uint64_t>(t)));
            double res = -1.0;
            bool defined = true;
            try {
                res = rel_err(divisor(a, x), divisor(b, x));
            } catch (const SingularError&) {
                defined = false;
                ++skipped;
            }
            if (defined) {
                ++checked;
                worst = std::max(worst, res);
                if (res > o.common.tol) pass = false;
            }
            if (!rep.text()) {
                rep.w().begin_object();
                rep.w().key("n").value(n);
                rep.w().key("trial").value(t);
                rep.w().key("defined").value(defined);
                if (defined) rep.w().key("residual").value(res);
                rep.w().end_object();
            }
        }
    }
    if (checked == 0) pass = false;
    if (rep.text()) {
        rep.line("checked", std::to_string(checked));
        rep.line("skipped", std::to_string(skipped));
        rep.line("worst_residual", worst);
    } else {
        rep.w().end_array();
        rep.w().key("checked").value(checked);
        rep.w().key("skipped").value(skipped);
        rep.w().key("worst_residual").value(worst);
    }
    rep.finish(pass ? "pass" : "fail");
    return pass ? kExitOk : kExitCheckFailed;
}

int cmd_linearize(const Options& o, const std::vector<std::string>& argv, std::ostream& out) {
    const std::string text = expr_text(o.expr, o.expr_file);
    const int d = infer_d(text, o.d);
    const NcExpr e = parse(text, d);
    const Realization r = linearize(e);
    Report rep(out, "linearize", argv, o.common);
    if (rep.text()) {
        rep.line("expr", text);
        rep.line("m", std::to_string(r.m));
        rep.line("d", std::to_string(r.d));
        rep.line("k", std::to_string(r.k));
    } else {
        rep.w().key("expr").value(text);
        rep.w().key("realization");
        write_realization(rep.w(), r);
    }
    if (!o.out_file.empty()) {
        std::ofstream f(o.out_file);
        if (!f) throw ValidationError("cannot write file: " + o.out_file);
        JsonWriter w(f);
        write_realization(w, r);
        f << "\n";
    }
    rep.finish("ok");
    return kExitOk;
}

Realization realization_from_options(const Options& o) {
    const bool have_expr = !o.expr.empty() || !o.expr_file.empty();
    if (have_expr && !o.realization_file.empty())
        throw ValidationError("give either an expression or --realization, not both");
    if (!o.realization_file.empty())
        return realization_from_json(load_json_file(o.realization_file));
    const std::string text = expr_text(o.expr, o.expr_file);
    return linearize(parse(text, infer_d(text, o.d)));
}

int cmd_realization_eval(const Options& o, const std::vector<std::string>& argv,
                         std::ostream& out) {
    const Realization r = realization_from_options(o);
    const MatrixTuple x = tuple_from_json(load_json_file(o.point_file));
    const ComplexMatrix v = realization_eval(r, x);
    Report rep(out, "realization-eval", argv, o.common);
    emit_matrix(rep, "value", v);
    rep.finish("ok");
    return kExitOk;
}

int cmd_det_ratio(const Options& o, const std::vector<std::string>& argv, std::ostream& out) {
    const MatrixTuple x = tuple_from_json(load_json_file(o.point_file));
    const bool have_expr = !o.expr.empty() || !o.expr_file.empty();
    Realization r;
    NcExpr e;
    std::string text;
    if (have_expr) {
        text = expr_text(o.expr, o.expr_file);
        e = parse(text, x.d);
        r = linearize(e);
    } else {
        r = realization_from_options(o);
    }
    const DetRatio dr = det_ratio(r, x);
    Report rep(out, "det-ratio", argv, o.common);
    if (rep.text()) {
        rep.line("det_bordered", dr.det_bordered);
        rep.line("det_pencil", dr.det_pencil);
        rep.line("ratio", dr.ratio);
    } else {
        if (have_expr) rep.w().key("expr").value(text);
        rep.w().key("det_bordered").value(dr.det_bordered);
        rep.w().key("det_pencil").value(dr.det_pencil);
        rep.w().key("ratio").value(dr.ratio);
    }
    if (have_expr) {
        const Complex dv = lu_det(eval(e, x).value);
        const double resid = std::abs(dr.ratio - dv) / (1.0 + std::abs(dv));
        if (rep.text()) {
            rep.line("det_eval", dv);
            rep.line("residual", resid);
        } else {
            rep.w().key("det_eval").value(dv);
            rep.w().key("residual").value(resid);
        }
    }
    rep.finish("ok");
    return kExitOk;
}

int cmd_divisor_split(const Options& o, const std::vector<std::string>& argv,
                      std::ostream& out) {
    const MatrixTuple x = tuple_from_json(load_json_file(o.point_file));
    const bool have_expr = !o.expr.empty() || !o.expr_file.empty();
    Realization r;
    NcExpr e;
    std::string text;
    if (have_expr) {
        text = expr_text(o.expr, o.expr_file);
        e = parse(text, x.d);
        r = linearize(e);
    } else {
        r = realization_from_options(o);
    }
    const auto [dp, dq] = divisor_split(r, x);
    DivisorValue diff = dp;
    for (size_t i = 0; i < diff.components.size(); ++i)
        diff.components[i] -= dq.components[i];

    Report rep(out, "divisor-split", argv, o.common);
    if (!rep.text()) {
        if (have_expr) rep.w().key("expr").value(text);
        rep.w().key("div_p");
        write_divisor(rep.w(), dp);
        rep.w().key("div_q");
        write_divisor(rep.w(), dq);
        rep.w().key("difference");
        write_divisor(rep.w(), diff);
    }
    if (have_expr) {
        const double resid = rel_err(diff, divisor(e, x));
        if (rep.text())
            rep.line("residual_vs_divisor", resid);
        else
            rep.w().key("residual_vs_divisor").value(resid);
    }
    rep.finish("ok");
    return kExitOk;
}

int cmd_gen_path(const Options& o, const std::vector<std::string>& argv, std::ostream& out) {
    PathSpec p;
    if (o.kind == "circle-det") {
        p = circle_loop(Complex(o.center_re, o.center_im), o.radius, o.winding, o.samples);
    } else if (o.kind == "diag-rotation") {
        p = diag_rotation_loop(o.path_n, o.winding, o.samples);
    } else if (o.kind == "unit-det-2x2") {
        p = unit_det_2x2_loop(o.samples);
    } else if (o.kind == "custom") {
        if (o.from_file.empty())
            throw ValidationError("--kind custom needs --from FILE");
        p = path_from_json(load_json_file(o.from_file));
    } else {
        throw ValidationError(
            "unknown path kind (use circle-det, diag-rotation, unit-det-2x2, custom)");
    }
    p.validate();
    if (!o.out_file.empty()) write_path_file(p, o.out_file);
    Report rep(out, "gen-path", argv, o.common);
    if (rep.text()) {
        rep.line("kind", o.kind);
        rep.line("n", std::to_string(p.n));
        rep.line("nodes", std::to_string(p.nodes.size()));
    } else {
        rep.w().key("kind").value(o.kind);
        if (o.out_file.empty()) {
            rep.w().key("path");
            write_path(rep.w(), p);
        } else {
            rep.w().key("written").value(o.out_file);
            rep.w().key("nodes").value(static_cast<long long>(p.nodes.size()));
        }
    }
    rep.finish("ok");
    return kExitOk;
}

int cmd_concat(const Options& o, const std::vector<std::string>& argv, std::ostream& out) {
    const PathSpec a = path_from_json(load_json_file(o.path1));
    const PathSpec b = path_from_json(load_json_file(o.path2));
    const PathSpec c = concatenate(a, b);
    if (!o.out_file.empty()) write_path_file(c, o.out_file);
    Report rep(out, "concat", argv, o.common);
    if (rep.text()) {
        rep.line("n", std::to_string(c.n));
        rep.line("nodes", std::to_string(c.nodes.size()));
    } else if (o.out_file.empty()) {
        rep.w().key("path");
        write_path(rep.w(), c);
    } else {
        rep.w().key("written").value(o.out_file);
        rep.w().key("n").value(c.n);
        rep.w().key("nodes").value(static_cast<long long>(c.nodes.size()));
    }
    rep.finish("ok");
    return kExitOk;
}

void emit_continuation(Report& rep, const ContinuationResult& r) {
    if (rep.text()) {
        rep.line("end_value", r.end_value);
        rep.line("increment", r.increment);
        rep.line("normalized_increment", r.normalized_increment);
        rep.line("steps", std::to_string(r.steps));
        rep.line("max_step_error", r.max_step_error);
        return;
    }
    rep.w().key("end_value").value(r.end_value);
    rep.w().key("increment").value(r.increment);
    rep.w().key("normalized_increment").value(r.normalized_increment);
    rep.w().key("steps").value(r.steps);
    rep.w().key("max_step_error").value(r.max_step_error);
}

int cmd_continue(const Options& o, const std::vector<std::string>& argv, std::ostream& out) {
    if (o.germs.empty()) throw ValidationError("continue needs --germ");
    const PathSpec p = path_from_json(load_json_file(o.path_file));
    const GermSpec germ = parse_germ(o.germs.front(), p.d);
    const DomainSpec dom = load_domain(o.from_file, o.gl);
    const ContinuationResult r = continue_germ(germ, p, dom, o.common.tol);
    Report rep(out, "continue", argv, o.common);
    if (!rep.text()) rep.w().key("germ").value(o.germs.front());
    emit_continuation(rep, r);
    rep.finish("ok");
    return kExitOk;
}

int cmd_loop_phi(const Options& o, const std::vector<std::string>& argv, std::ostream& out) {
    if (o.germs.empty()) throw ValidationError("loop-phi needs --germ");
    const PathSpec p = path_from_json(load_json_file(o.path_file));
    const GermSpec germ = parse_germ(o.germs.front(), p.d);
    const DomainSpec dom = load_domain(o.from_file, o.gl);
    const Complex phi = loop_phi(germ, p, dom, o.common.tol);
    Report rep(out, "loop-phi", argv, o.common);
    if (rep.text()) {
        rep.line("phi", phi);
    } else {
        rep.w().key("germ").value(o.germs.front());
        rep.w().key("phi").value(phi);
    }
    rep.finish("ok");
    return kExitOk;
}

int cmd_quantize(const Options& o, const std::vector<std::string>& argv, std::ostream& out) {
    // The file holds recorded loop_phi outputs: [{"increment": [re,im], "n": k}, ...].
    const nlohmann::json j = load_json_file(o.loops_file);
    std::vector<std::pair<Complex, int>> values;
    const nlohmann::json& arr = j.is_array() ? j : j.at("values");
    for (const auto& v : arr) {
        Complex c;
        if (v.contains("increment")) {
            const auto& inc = v["increment"];
            c = inc.is_array() ? Complex(inc[0].get<double>(), inc[1].get<double>())
                               : Complex(inc.get<double>(), 0.0);
        } else if (v.contains("c")) {
            const auto& inc = v["c"];
            c = inc.is_array() ? Complex(inc[0].get<double>(), inc[1].get<double>())
                               : Complex(inc.get<double>(), 0.0);
        } else {
            throw ValidationError("quantize entries need \"increment\" (or \"c\") and \"n\"");
        }
        if (!v.contains("n")) throw ValidationError("quantize entries need \"n\"");
        values.push_back({c, v["n"].get<int>()});
    }
    const QuantizationReport qr = quantization_check(values, o.common.check_tol);
    Report rep(out, "quantize", argv, o.common);
    if (rep.text()) {
        for (const QuantizationEntry& e : qr.entries)
            rep.line("entry",
                     "n=" + std::to_string(e.n) + " ratio=" + std::to_string(e.ratio_num) + "/" +
                         std::to_string(e.ratio_den) + " residual=" + format_17g(e.residual) +
                         (e.pass ? " pass" : " FAIL"));
    } else {
        rep.w().key("tol").value(o.common.check_tol);
        rep.w().key("entries").begin_array();
        for (const QuantizationEntry& e : qr.entries) {
            rep.w().begin_object();
            rep.w().key("c").value(e.c);
            rep.w().key("n").value(e.n);
            rep.w().key("nearest").value(e.nearest);
            rep.w().key("residual").value(e.residual);
            rep.w().key("ratio_num").value(e.ratio_num);
            rep.w().key("ratio_den").value(e.ratio_den);
            rep.w().key("pass").value(e.pass);
            rep.w().end_object();
        }
        rep.w().end_array();
    }
    rep.finish(qr.all_pass ? "pass" : "fail");
    return qr.all_pass ? kExitOk : kExitCheckFailed;
}

int cmd_integrality(const Options& o, const std::vector<std::string>& argv,
                    std::ostream& out) {
    if (o.form.empty()) throw ValidationError("integrality needs --form \"E1;...;Ed\"");
    const std::vector<PathSpec> loops = load_paths(o.loops_file);
    if (loops.empty()) throw ValidationError("integrality needs at least a loops file");
    const GermSpec germ = parse_germ("form:" + o.form, loops.front().d);
    const DomainSpec dom = load_domain(o.from_file, o.gl);
    const IntegralityReport ir = integrality_test(germ, loops, dom, o.common.check_tol);
    Report rep(out, "integrality", argv, o.common);
    if (rep.text()) {
        for (const IntegralityEntry& e : ir.entries)
            rep.line("loop", "n=" + std::to_string(e.n) + " ratio=" + format_17g(e.ratio.real()) +
                                 " residual=" + format_17g(e.residual) +
                                 (e.pass ? " integral" : " OBSTRUCTED"));
        rep.line("verdict", ir.divisor_candidate ? "divisor-candidate" : "obstructed");
    } else {
        rep.w().key("form").value(o.form);
        rep.w().key("tol").value(o.common.check_tol);
        rep.w().key("entries").begin_array();
        for (const IntegralityEntry& e : ir.entries) {
            rep.w().begin_object();
            rep.w().key("n").value(e.n);
            rep.w().key("phi").value(e.phi);
            rep.w().key("ratio").value(e.ratio);
            rep.w().key("nearest").value(e.nearest);
            rep.w().key("residual").value(e.residual);
            rep.w().key("pass").value(e.pass);
            rep.w().end_object();
        }
        rep.w().end_array();
        rep.w().key("verdict").value(ir.divisor_candidate ? "divisor-candidate" : "obstructed");
    }
    rep.finish(ir.divisor_candidate ? "pass" : "fail");
    return ir.divisor_candidate ? kExitOk : kExitCheckFailed;
}

int cmd_trace_equiv(const Options& o, const std::vector<std::string>& argv,
                    std::ostream& out) {
    if (o.germs.empty()) throw ValidationError("trace-equiv needs at least one --germ");
    const PathSpec p1 = path_from_json(load_json_file(o.path1));
    const PathSpec p2 = path_from_json(load_json_file(o.path2));
    std::vector<GermSpec> germs;
    for (const std::string& g : o.germs) germs.push_back(parse_germ(g, p1.d));
    const DomainSpec dom = load_domain(o.from_file, o.gl);
    const TraceEquivReport tr = trace_equiv_check(p1, p2, germs, dom, o.common.check_tol);
    Report rep(out, "trace-equiv", argv, o.common);
    if (rep.text()) {
        rep.line("verdict", tr.verdict);
    } else {
        rep.w().key("tol").value(o.common.check_tol);
        rep.w().key("phi1").begin_array();
        for (Complex c : tr.phi1) rep.w().value(c);
        rep.w().end_array();
        rep.w().key("phi2").begin_array();
        for (Complex c : tr.phi2) rep.w().value(c);
        rep.w().end_array();
        rep.w().key("verdict").value(tr.verdict);
    }
    rep.finish(tr.indistinguishable ? "pass" : "fail");
    return tr.indistinguishable ? kExitOk : kExitCheckFailed;
}

int cmd_suite(const Options& o, const std::vector<std::string>& argv, std::ostream& out,
              std::ostream& err) {
    const std::vector<CriterionResult> results = run_acceptance_suite(o.common.seed);
    bool all = true;
    double total = 0.0;
    Report rep(out, "suite", argv, o.common);
    if (!rep.text()) rep.w().key("criteria").begin_array();
    for (const CriterionResult& r : results) {
        if (o.criterion != 0 && r.id != o.criterion) continue;
        all = all && r.pass;
        total += r.seconds;
        if (rep.text()) {
            char line[256];
            std::snprintf(line, sizeof(line), "criterion %02d [%s] %s (%s)", r.id,
                          r.pass ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
            rep.os() << line << "\n";
        } else {
            rep.w().begin_object();
            rep.w().key("id").value(r.id);
            rep.w().key("name").value(r.name);
            rep.w().key("pass").value(r.pass);
            rep.w().key("worst").value(r.worst);
            rep.w().key("tol").value(r.tol);
            rep.w().key("detail").value(r.detail);
            rep.w().end_object();
        }
    }
    if (!rep.text()) rep.w().end_array();
    rep.finish(all ? "pass" : "fail");
    err << "suite total runtime: " << format_17g(total) << " s\n";
    return all ? kExitOk : kExitCheckFailed;
}

}  // namespace

int nc_cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"noncommutative function computations: evaluation, divisors, "
                 "linearization, tracial continuation"};
    app.require_subcommand(1);
    Options o;

    auto* c_eval = app.add_subcommand("eval", "Evaluate an expression at a matrix tuple");
    c_eval->add_option("--expr", o.expr, "Expression text");
    c_eval->add_option("--expr-file", o.expr_file, "Expression file")->excludes("--expr");
    c_eval->add_option("--point", o.point_file, "Point tuple JSON file")->required();
    c_eval->add_flag("--emit-ast", o.emit_ast, "Include the AST in the report");
    o.common.attach(c_eval);

    auto* c_dd = app.add_subcommand("dderiv", "Directional derivative at a point");
    c_dd->add_option("--expr", o.expr, "Expression text");
    c_dd->add_option("--expr-file", o.expr_file, "Expression file")->excludes("--expr");
    c_dd->add_option("--point", o.point_file, "Point tuple JSON file")->required();
    c_dd->add_option("--dir", o.dir_file, "Direction tuple JSON file")->required();
    o.common.attach(c_dd);

    auto* c_div = app.add_subcommand("divisor", "Principal divisor value at a point");
    c_div->add_option("--expr", o.expr, "Expression text");
    c_div->add_option("--expr-file", o.expr_file, "Expression file")->excludes("--expr");
    c_div->add_option("--point", o.point_file, "Point tuple JSON file")->required();
    c_div->add_option("--method", o.method, "reverse or forward")
        ->check(CLI::IsMember({"reverse", "forward"}));
    o.common.attach(c_div);

    auto* c_cde = app.add_subcommand("check-div-eq",
                                     "Check two expressions have equal divisors at random points");
    c_cde->add_option("--e1", o.e1, "First expression")->required();
    c_cde->add_option("--e2", o.e2, "Second expression")->required();
    c_cde->add_option("--sizes", o.sizes, "Comma-separated sizes (default 1,2,3,4)");
    c_cde->add_option("--trials", o.trials, "Trials per size (default 25)");
    c_cde->add_option("--d", o.d, "Variable count (default: inferred)");
    o.common.attach(c_cde, true);

    auto* c_lin = app.add_subcommand("linearize", "Pencil realization of a rational expression");
    c_lin->add_option("--expr", o.expr, "Expression text");
    c_lin->add_option("--expr-file", o.expr_file, "Expression file")->excludes("--expr");
    c_lin->add_option("--d", o.d, "Variable count (default: inferred)");
    c_lin->add_option("--out", o.out_file, "Write the realization JSON to a file");
    o.common.attach(c_lin);

    auto* c_re = app.add_subcommand("realization-eval", "Evaluate a pencil realization");
    c_re->add_option("--realization", o.realization_file, "Realization JSON file");
    c_re->add_option("--expr", o.expr, "Expression to linearize instead of a file");
    c_re->add_option("--point", o.point_file, "Point tuple JSON file")->required();
    c_re->add_option("--d", o.d, "Variable count (default: inferred)");
    o.common.attach(c_re);

    auto* c_dr = app.add_subcommand("det-ratio", "Determinant ratio of the bordered pencil");
    c_dr->add_option("--expr", o.expr, "Expression text");
    c_dr->add_option("--expr-file", o.expr_file, "Expression file")->excludes("--expr");
    c_dr->add_option("--realization", o.realization_file, "Realization JSON file");
    c_dr->add_option("--point", o.point_file, "Point tuple JSON file")->required();
    o.common.attach(c_dr);

    auto* c_ds = app.add_subcommand("divisor-split", "Split a divisor as div p - div q");
    c_ds->add_option("--expr", o.expr, "Expression text");
    c_ds->add_option("--expr-file", o.expr_file, "Expression file")->excludes("--expr");
    c_ds->add_option("--realization", o.realization_file, "Realization JSON file");
    c_ds->add_option("--point", o.point_file, "Point tuple JSON file")->required();
    o.common.attach(c_ds);

    auto* c_gp = app.add_subcommand("gen-path", "Emit a sampled built-in path");
    c_gp->add_option("--kind", o.kind, "circle-det | diag-rotation | unit-det-2x2 | custom")
        ->required();
    c_gp->add_option("--n", o.path_n, "Matrix size for diag-rotation");
    c_gp->add_option("--winding", o.winding, "Winding count (default 1)");
    c_gp->add_option("--samples", o.samples, "Sample count (default 256)");
    c_gp->add_option("--radius", o.radius, "Circle radius (default 1)");
    c_gp->add_option("--center-re", o.center_re, "Circle center, real part");
    c_gp->add_option("--center-im", o.center_im, "Circle center, imaginary part");
    c_gp->add_option("--from", o.from_file, "Source path file for --kind custom");
    c_gp->add_option("--out", o.out_file, "Write the path JSON to a file");
    o.common.attach(c_gp);

    auto* c_cc = app.add_subcommand("concat", "Concatenate two paths with padding");
    c_cc->add_option("--path1", o.path1, "First path JSON file")->required();
    c_cc->add_option("--path2", o.path2, "Second path JSON file")->required();
    c_cc->add_option("--out", o.out_file, "Write the result to a file");
    o.common.attach(c_cc);

    auto* c_ct = app.add_subcommand("continue", "Continue a tracial germ along a path");
    c_ct->add_option("--germ", o.germs, "Germ: logdet:EXPR or form:E1;...;Ed")->required();
    c_ct->add_option("--path", o.path_file, "Path JSON file")->required();
    c_ct->add_option("--domain", o.from_file, "Domain JSON file");
    c_ct->add_flag("--gl", o.gl, "Use the domain det X1 != 0");
    o.common.attach(c_ct, true);

    auto* c_lp = app.add_subcommand("loop-phi", "Monodromy increment of a loop");
    c_lp->add_option("--germ", o.germs, "Germ: logdet:EXPR or form:E1;...;Ed")->required();
    c_lp->add_option("--path", o.path_file, "Loop path JSON file")->required();
    c_lp->add_option("--domain", o.from_file, "Domain JSON file");
    c_lp->add_flag("--gl", o.gl, "Use the domain det X1 != 0");
    o.common.attach(c_lp, true);

    auto* c_qz = app.add_subcommand("quantize", "Check recorded loop increments quantize");
    c_qz->add_option("--loops", o.loops_file, "File of {increment, n} records")->required();
    o.common.attach(c_qz, false, true);

    auto* c_ig = app.add_subcommand("integrality", "Integrality test for a closed form");
    c_ig->add_option("--form", o.form, "Closed form components E1;...;Ed")->required();
    c_ig->add_option("--loops", o.loops_file, "File with one path or an array of paths")
        ->required();
    c_ig->add_option("--domain", o.from_file, "Domain JSON file");
    c_ig->add_flag("--gl", o.gl, "Use the domain det X1 != 0");
    o.common.attach(c_ig, false, true);

    auto* c_te = app.add_subcommand("trace-equiv", "Compare two paths under a germ family");
    c_te->add_option("--path1", o.path1, "First path JSON file")->required();
    c_te->add_option("--path2", o.path2, "Second path JSON file")->required();
    c_te->add_option("--germ", o.germs, "Germ (repeatable)")->required();
    c_te->add_option("--domain", o.from_file, "Domain JSON file");
    c_te->add_flag("--gl", o.gl, "Use the domain det X1 != 0");
    o.common.attach(c_te, false, true);

    auto* c_st = app.add_subcommand("suite", "Run the full acceptance battery");
    c_st->add_option("--criterion", o.criterion, "Run a single criterion by number");
    o.common.attach(c_st);

    std::vector<std::string> argv_echo(argv, argv + argc);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (c_eval->parsed()) return cmd_eval(o, argv_echo, out);
        if (c_dd->parsed()) return cmd_dderiv(o, argv_echo, out);
        if (c_div->parsed()) return cmd_divisor(o, argv_echo, out);
        if (c_cde->parsed()) return cmd_check_div_eq(o, argv_echo, out);
        if (c_lin->parsed()) return cmd_linearize(o, argv_echo, out);
        if (c_re->parsed()) return cmd_realization_eval(o, argv_echo, out);
        if (c_dr->parsed()) return cmd_det_ratio(o, argv_echo, out);
        if (c_ds->parsed()) return cmd_divisor_split(o, argv_echo, out);
        if (c_gp->parsed()) return cmd_gen_path(o, argv_echo, out);
        if (c_cc->parsed()) return cmd_concat(o, argv_echo, out);
        if (c_ct->parsed()) return cmd_continue(o, argv_echo, out);
        if (c_lp->parsed()) return cmd_loop_phi(o, argv_echo, out);
        if (c_qz->parsed()) return cmd_quantize(o, argv_echo, out);
        if (c_ig->parsed()) return cmd_integrality(o, argv_echo, out);
        if (c_te->parsed()) return cmd_trace_equiv(o, argv_echo, out);
        if (c_st->parsed()) return cmd_suite(o, argv_echo, out, err);
        err << "error: unknown subcommand\n";
        return kExitUsage;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ValidationError& e) {
        err << "invalid input: " << e.what() << "\n";
        return kExitUsage;
    } catch (const StructureError& e) {
        err << "structure error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DimensionError& e) {
        err << "dimension error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const SingularError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const DomainExitError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}

}  // namespace nc
