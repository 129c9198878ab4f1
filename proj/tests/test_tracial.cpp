#include <doctest.h>

#include <cmath>
#include <sstream>

#include "nc/json_io.hpp"
#include "nc/parse.hpp"
#include "nc/tracial.hpp"

using namespace nc;

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
const Complex kTwoPiI(0.0, kTwoPi);

PathSpec resample_monotone(const PathSpec& p, int factor) {
    PathSpec out;
    out.d = p.d;
    out.n = p.n;
    out.pad_start = p.pad_start;
    out.pad_end = p.pad_end;
    out.base_tag = p.base_tag;
    const int segs = static_cast<int>(p.nodes.size()) - 1;
    for (int j = 0; j <= segs * factor; ++j) {
        // Nonuniform monotone reparametrization of the same polygon.
        const double u = static_cast<double>(j) / (segs * factor);
        const double t = u * u * (3.0 - 2.0 * u);  // smoothstep, strictly increasing
        out.nodes.push_back({j == segs * factor ? 1.0 : t, p.at(t)});
    }
    out.nodes.front().t = 0.0;
    return out;
}
}  // namespace

TEST_CASE("path validation rejects malformed specs") {
    PathSpec p;
    p.d = 1;
    p.n = 1;
    CHECK_THROWS_AS(p.validate(), ValidationError);  // too few nodes
    p.nodes.push_back({0.0, random_tuple(1, 1, 1)});
    p.nodes.push_back({0.5, random_tuple(1, 1, 2)});
    CHECK_THROWS_AS(p.validate(), ValidationError);  // must end at t=1
    p.nodes.back().t = 1.0;
    p.validate();
    p.pad_start = 2;
    CHECK_THROWS_AS(p.validate(), ValidationError);  // pad does not divide n
}

TEST_CASE("essential_base detects direct-sum powers") {
    const MatrixTuple x = random_tuple(2, 1, 31);
    const MatrixTuple xx = direct_sum_power(x, 3);
    const MatrixTuple base = essential_base(xx, 3);
    CHECK(rel_err(base, x) == 0.0);
    CHECK_THROWS_AS(essential_base(random_tuple(4, 1, 32), 2), ValidationError);
}

TEST_CASE("concatenate keeps the trivial path trivial") {
    const MatrixTuple x = random_tuple(2, 1, 33);
    const PathSpec c = constant_loop(x);
    const PathSpec cc = concatenate(c, c);
    CHECK(cc.n == 2);
    for (const PathNode& nd : cc.nodes) CHECK(rel_err(nd.x, x) == 0.0);
}

TEST_CASE("concatenate inflates to the lcm size") {
    const MatrixTuple base = random_tuple(1, 1, 34);
    const PathSpec a = inflate(constant_loop(base), 2);  // size 2
    const PathSpec b = inflate(constant_loop(base), 3);  // size 3
    const PathSpec ab = concatenate(a, b);
    CHECK(ab.n == 6);
    CHECK(ab.pad_start == 6);
    CHECK(ab.pad_end == 6);
    CHECK(rel_err(ab.nodes.front().x, direct_sum_power(base, 6)) == 0.0);
}

TEST_CASE("concatenate rejects mismatched essential endpoints") {
    const PathSpec a = constant_loop(random_tuple(2, 1, 35));
    const PathSpec b = constant_loop(random_tuple(2, 1, 36));
    CHECK_THROWS_AS(concatenate(a, b), ValidationError);
}

TEST_CASE("winding circle has increment 2 pi i") {
    const GermSpec germ = GermSpec::logdet(parse("x1", 1));
    const ContinuationResult r =
        continue_germ(germ, circle_loop(Complex(0, 0), 1.0, 1, 256), DomainSpec::gl(), 1e-9);
    CHECK(std::abs(r.increment - kTwoPiI) <= 1e-8);
    CHECK(std::abs(r.normalized_increment - kTwoPiI) <= 1e-8);
    CHECK(r.steps > 0);
}

TEST_CASE("unit-det 2x2 loop has increment 0") {
    const GermSpec germ = GermSpec::logdet(parse("x1", 1));
    const PathSpec loop = unit_det_2x2_loop(256);
    CHECK(rel_err(loop.nodes.front().x[0],
                  ComplexMatrix(2, 2, {Complex(1, 0), Complex(1, 0), Complex(0, 0),
                                       Complex(1, 0)})) == 0.0);
    const ContinuationResult r = continue_germ(germ, loop, DomainSpec::gl(), 1e-9);
    CHECK(std::abs(r.increment) <= 1e-8);
}

TEST_CASE("diagonal rotation in GL_2 halves the normalized increment") {
    const GermSpec germ = GermSpec::logdet(parse("x1", 1));
    const PathSpec loop = diag_rotation_loop(2, 1, 256);
    const ContinuationResult r = continue_germ(germ, loop, DomainSpec::gl(), 1e-9);
    CHECK(std::abs(r.increment - kTwoPiI) <= 1e-8);
    CHECK(std::abs(r.normalized_increment - kTwoPiI / Complex(2.0, 0.0)) <= 1e-8);
}

TEST_CASE("loop_phi of the trivial loop is zero and padding invariant") {
    const GermSpec germ = GermSpec::logdet(parse("x1", 1));
    const MatrixTuple x = random_tuple(1, 1, 37);
    CHECK(std::abs(loop_phi(germ, constant_loop(x), DomainSpec::unrestricted())) <= 1e-12);

    const PathSpec circle = circle_loop(Complex(0, 0), 1.0, 1, 128);
    const Complex phi = loop_phi(germ, circle, DomainSpec::gl());
    CHECK(std::abs(phi - kTwoPiI) <= 1e-6);
    for (int m : {2, 3}) {
        const Complex padded = loop_phi(germ, inflate(circle, m), DomainSpec::gl());
        CHECK(std::abs(padded - phi) <= 1e-6);
    }
}

TEST_CASE("loop_phi rejects non-loops") {
    const GermSpec germ = GermSpec::logdet(parse("x1", 1));
    PathSpec p;
    p.d = 1;
    p.n = 1;
    p.nodes.push_back({0.0, MatrixTuple({ComplexMatrix(1, 1, {Complex(1, 0)})})});
    p.nodes.push_back({1.0, MatrixTuple({ComplexMatrix(1, 1, {Complex(2, 0)})})});
    CHECK_THROWS_AS(loop_phi(germ, p, DomainSpec::gl()), ValidationError);
}

TEST_CASE("reparametrization invariance of the increment") {
    const GermSpec germ = GermSpec::logdet(parse("x1", 1));
    const PathSpec loop = diag_rotation_loop(2, 1, 64);
    const ContinuationResult a = continue_germ(germ, loop, DomainSpec::gl(), 1e-9);
    const ContinuationResult b =
        continue_germ(germ, resample_monotone(loop, 2), DomainSpec::gl(), 1e-9);
    CHECK(std::abs(a.increment - b.increment) <= 1e-8);
}

TEST_CASE("homomorphism of increments under concatenation") {
    const GermSpec germ = GermSpec::logdet(parse("x1", 1));
    const DomainSpec gl = DomainSpec::gl();
    const PathSpec g1 = circle_loop(Complex(0, 0), 1.0, 1, 64);
    const PathSpec g2 = circle_loop(Complex(0, 0), 1.0, 2, 64);
    const Complex p1 = loop_phi(germ, g1, gl);
    const Complex p2 = loop_phi(germ, g2, gl);
    const Complex p12 = loop_phi(germ, concatenate(g1, g2), gl);
    const Complex p21 = loop_phi(germ, concatenate(g2, g1), gl);
    CHECK(std::abs(p12 - p1 - p2) <= 1e-6);
    CHECK(std::abs(p12 - p21) <= 1e-6);
}

TEST_CASE("domain restrictions reject nodes on the forbidden set") {
    const GermSpec germ = GermSpec::logdet(parse("x1", 1));
    PathSpec p;
    p.d = 1;
    p.n = 1;
    p.nodes.push_back({0.0, MatrixTuple({ComplexMatrix(1, 1, {Complex(-1, 0)})})});
    p.nodes.push_back({0.5, MatrixTuple({ComplexMatrix(1, 1, {Complex(0, 0)})})});
    p.nodes.push_back({1.0, MatrixTuple({ComplexMatrix(1, 1, {Complex(-1, 0)})})});
    CHECK_THROWS_AS(continue_germ(germ, p, DomainSpec::gl(), 1e-8), DomainExitError);
}

TEST_CASE("continuation through a singularity exits with a location") {
    const GermSpec germ = GermSpec::logdet(parse("x1", 1));
    PathSpec p;
    p.d = 1;
    p.n = 1;
    p.nodes.push_back({0.0, MatrixTuple({ComplexMatrix(1, 1, {Complex(-1, 0)})})});
    p.nodes.push_back({1.0, MatrixTuple({ComplexMatrix(1, 1, {Complex(1, 0)})})});
    // The segment crosses zero between the nodes.
    try {
        continue_germ(germ, p, DomainSpec::unrestricted(), 1e-8);
        FAIL("expected a domain exit");
    } catch (const DomainExitError& e) {
        CHECK(e.t() > 0.4);
        CHECK(e.t() < 0.6);
    }
}

TEST_CASE("closed forms integrate like logdet for inv(x1)") {
    const GermSpec form = GermSpec::closed_form({parse("inv(x1)", 1)});
    const PathSpec loop = circle_loop(Complex(0, 0), 1.0, 1, 128);
    const ContinuationResult r = continue_germ(form, loop, DomainSpec::gl(), 1e-9);
    CHECK(std::abs(r.increment - kTwoPiI) <= 1e-7);
}

TEST_CASE("non-closed forms are refused") {
    // g = (x2, 0) fails tr K.Dg[H] = tr H.Dg[K].
    const GermSpec bad = GermSpec::closed_form(
        {parse("x2", 2), make_expr(ExprNode::constant(Complex(0, 0)), 2)});
    const PathSpec p = constant_loop(random_tuple(2, 2, 38));
    CHECK_THROWS_AS(continue_germ(bad, p, DomainSpec::unrestricted(), 1e-8),
                    ValidationError);
}

TEST_CASE("exact closed forms have zero loop increments") {
    // g = (x2, x1) is the gradient of tr(x1 x2).
    const GermSpec form = GermSpec::closed_form({parse("x2", 2), parse("x1", 2)});
    PathSpec p;
    p.d = 2;
    p.n = 1;
    const int samples = 64;
    for (int j = 0; j <= samples; ++j) {
        const double t = static_cast<double>(j) / samples;
        const Complex z = std::exp(Complex(0.0, kTwoPi * t)) + Complex(3.0, 0.0);
        p.nodes.push_back({t, MatrixTuple({ComplexMatrix(1, 1, {z}),
                                           ComplexMatrix(1, 1, {Complex(0.5, 0.25)})})});
    }
    p.nodes.back() = {1.0, p.nodes.front().x};
    const ContinuationResult r = continue_germ(form, p, DomainSpec::unrestricted(), 1e-9);
    CHECK(std::abs(r.increment) <= 1e-7);
}

TEST_CASE("quantization report accepts and rejects as specified") {
    const QuantizationReport rep = quantization_check(
        {{kTwoPiI, 1}, {kTwoPiI / Complex(2.0, 0.0), 2}, {Complex(1.0, 0.0), 1}}, 1e-6);
    REQUIRE(rep.entries.size() == 3);
    CHECK(rep.entries[0].pass);
    CHECK(rep.entries[0].ratio_num == 1);
    CHECK(rep.entries[0].ratio_den == 1);
    CHECK(rep.entries[1].pass);
    CHECK(rep.entries[1].ratio_num == 1);
    CHECK(rep.entries[1].ratio_den == 2);
    CHECK(!rep.entries[2].pass);
    CHECK(!rep.all_pass);
}

TEST_CASE("integrality test recognizes divisors and obstructions") {
    const DomainSpec gl = DomainSpec::gl();
    const std::vector<PathSpec> loops = {circle_loop(Complex(0, 0), 1.0, 1, 128)};

    const GermSpec whole = GermSpec::closed_form({parse("inv(x1)", 1)});
    const IntegralityReport a = integrality_test(whole, loops, gl, 1e-6);
    CHECK(a.divisor_candidate);
    CHECK(a.entries[0].nearest == 1);

    const NcExpr third = make_expr(
        ExprNode::prod({ExprNode::constant(Complex(1.0 / 3.0, 0.0)),
                        ExprNode::inv(ExprNode::var(1))}),
        1);
    const IntegralityReport b =
        integrality_test(GermSpec::closed_form({third}), loops, gl, 1e-6);
    CHECK(!b.divisor_candidate);
    CHECK(std::abs(b.entries[0].ratio - Complex(1.0 / 3.0, 0.0)) <= 1e-6);

    const IntegralityReport vac = integrality_test(whole, {}, gl, 1e-6);
    CHECK(vac.divisor_candidate);
    CHECK(vac.entries.empty());
}

TEST_CASE("trace equivalence: refinement, the 2x2 loop, and rotation padding") {
    const GermSpec germ = GermSpec::logdet(parse("x1", 1));
    const DomainSpec gl = DomainSpec::gl();

    const PathSpec loop = diag_rotation_loop(2, 1, 64);
    CHECK(trace_equiv_check(loop, resample_monotone(loop, 2), {germ}, gl, 1e-6)
              .indistinguishable);

    const PathSpec twist = unit_det_2x2_loop(128);
    CHECK(trace_equiv_check(twist, constant_loop(twist.nodes.front().x), {germ}, gl, 1e-6)
              .indistinguishable);

    // Rotation homotopy: the two direct-sum orders are indistinguishable.
    const PathSpec gamma = circle_loop(Complex(0, 0), 1.0, 1, 64);
    const PathSpec still = constant_loop(gamma.nodes.front().x);
    CHECK(trace_equiv_check(path_direct_sum(gamma, still), path_direct_sum(still, gamma),
                            {germ}, gl, 1e-6)
              .indistinguishable);

    // A germ that separates: winding 1 vs winding 2.
    const TraceEquivReport sep = trace_equiv_check(
        gamma, circle_loop(Complex(0, 0), 1.0, 2, 64), {germ}, gl, 1e-6);
    CHECK(!sep.indistinguishable);
    CHECK(sep.separating_germ == 0);
}

TEST_CASE("path JSON round trip") {
    const PathSpec p = diag_rotation_loop(2, 1, 16);
    std::ostringstream os;
    JsonWriter w(os);
    write_path(w, p);
    const PathSpec back = path_from_json(nlohmann::json::parse(os.str()));
    CHECK(back.n == p.n);
    CHECK(back.pad_start == p.pad_start);
    CHECK(back.nodes.size() == p.nodes.size());
    double worst = 0.0;
    for (size_t i = 0; i < p.nodes.size(); ++i)
        worst = std::max(worst, rel_err(back.nodes[i].x, p.nodes[i].x));
    CHECK(worst == 0.0);
}
