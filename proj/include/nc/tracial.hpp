#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nc/evalad.hpp"
#include "nc/expr.hpp"
#include "nc/matcore.hpp"

namespace nc {

// A piecewise-linear path in matrix-tuple space. The stored nodes are the
// full size-n path; gamma(0) is the base point padded pad_start times and
// gamma(1) the endpoint padded pad_end times, so n = pad_start * |base| =
// pad_end * |end|. Linear interpolation between nodes defines gamma(t).
struct PathNode {
    double t = 0.0;
    MatrixTuple x;
};

struct PathSpec {
    int d = 1;
    int n = 0;
    int pad_start = 1;
    int pad_end = 1;
    std::string base_tag;
    std::vector<PathNode> nodes;

    void validate() const;
    MatrixTuple at(double t) const;  // linear interpolation
};

// A tracial germ to continue: either log det of an expression, or a closed
// free 1-form given as d scalar expressions g_1..g_d integrated as
// tr(gamma'(t) . g(gamma(t))) dt.
struct GermSpec {
    enum class Kind { LogDet, ClosedForm };
    Kind kind = Kind::LogDet;
    NcExpr expr;                // LogDet
    std::vector<NcExpr> form;   // ClosedForm, size d

    static GermSpec logdet(NcExpr e);
    static GermSpec closed_form(std::vector<NcExpr> g);
    int vars() const;
    std::string describe() const;
};

// Membership restriction det X_1 != lambda for each forbidden value; the
// unrestricted domain accepts everything.
struct DomainSpec {
    bool restricted = false;
    std::vector<Complex> forbidden_dets;

    static DomainSpec unrestricted() { return {}; }
    static DomainSpec gl() { return {true, {Complex(0.0, 0.0)}}; }
    static DomainSpec g_lambda(std::vector<Complex> lambda) { return {true, std::move(lambda)}; }

    // Throws DomainExitError when det X_1 coincides with a forbidden value
    // to double precision.
    void require_member(const MatrixTuple& x, double t) const;
};

struct ContinuationResult {
    Complex end_value{0.0, 0.0};
    Complex increment{0.0, 0.0};             // end minus start of the germ
    Complex normalized_increment{0.0, 0.0};  // increment / n
    long steps = 0;
    double max_step_error = 0.0;
};

// Padded concatenation running g1 on [0,1/2] and g2 on [1/2,1]; both paths
// are inflated by direct-sum powers so the sizes agree at lcm(n1,n2).
PathSpec concatenate(const PathSpec& g1, const PathSpec& g2);

PathSpec inflate(const PathSpec& g, int m);  // gamma^{(+) m}

// Pointwise direct sum on the union of the two node grids.
PathSpec path_direct_sum(const PathSpec& a, const PathSpec& b);

// Checks X = B^{(+) pad} and returns B.
MatrixTuple essential_base(const MatrixTuple& x, int pad, double tol = 1e-8);

// Branch-tracked continuation: integrates the exact differential along the
// path (for logdet, tr(Df[gamma'] f^-1) dt), with adaptive trapezoid steps,
// step-doubling error control, and a pi/2 bound on the local argument
// change per accepted step. The increment is an integral, never a
// principal-branch log, so branch continuity is automatic.
ContinuationResult continue_germ(const GermSpec& germ, const PathSpec& gamma,
                                 const DomainSpec& dom, double tol = 1e-8);

// Monodromy increment of a loop: increment / n, n the path matrix size.
Complex loop_phi(const GermSpec& germ, const PathSpec& gamma, const DomainSpec& dom,
                 double tol = 1e-8);

struct QuantizationEntry {
    Complex c;          // normalized loop increment
    int n = 1;          // loop matrix size
    long long nearest = 0;  // nearest integer w with n*c ~ 2*pi*i*w
    double residual = 0.0;  // |n*c - 2*pi*i*w|
    bool pass = false;
    long long ratio_num = 0;  // c/(2*pi*i) = ratio_num/ratio_den, reduced
    long long ratio_den = 1;
};

struct QuantizationReport {
    std::vector<QuantizationEntry> entries;
    bool all_pass = true;
};

// Asserts n*c in 2*pi*i*Z for recorded loop increments.
QuantizationReport quantization_check(const std::vector<std::pair<Complex, int>>& values,
                                      double tol = 1e-6);

struct IntegralityEntry {
    int n = 1;
    Complex phi{0.0, 0.0};
    Complex ratio{0.0, 0.0};  // n*phi / (2*pi*i)
    long long nearest = 0;
    double residual = 0.0;
    bool pass = false;
};

struct IntegralityReport {
    bool divisor_candidate = true;  // vacuously true with no loops
    std::vector<IntegralityEntry> entries;
};

// Necessary condition for a closed form to be a divisor: every sampled loop
// must give an integral ratio n*phi/(2*pi*i).
IntegralityReport integrality_test(const GermSpec& g, const std::vector<PathSpec>& loops,
                                   const DomainSpec& dom, double tol = 1e-6);

struct TraceEquivReport {
    bool indistinguishable = true;
    int separating_germ = -1;  // index into the germ family when distinguished
    std::vector<Complex> phi1, phi2;
    std::string verdict;
};

// Compares normalized increments of each supplied germ along the two paths.
// Necessarily a finite-family approximation of quantifying over all global
// germs; the verdict text records that.
TraceEquivReport trace_equiv_check(const PathSpec& g1, const PathSpec& g2,
                                   const std::vector<GermSpec>& germs,
                                   const DomainSpec& dom, double tol = 1e-6);

// Built-in sampled paths. Endpoint nodes are snapped exactly closed.
PathSpec circle_loop(Complex center, double radius, int winding, int samples);
PathSpec diag_rotation_loop(int n, int winding, int samples);
PathSpec unit_det_2x2_loop(int samples);  // [[e^{2 pi i t}, 1], [0, e^{-2 pi i t}]]
PathSpec constant_loop(const MatrixTuple& x);

}  // namespace nc
