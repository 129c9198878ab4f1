#include "nc/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace nc {

namespace {

constexpr double kSingularRatio = 1e-12;

struct Lu {
    ComplexMatrix a;        // combined unit-lower / upper factors
    std::vector<int> piv;   // row swapped with k at step k
    int sign = 1;
    double min_pivot = std::numeric_limits<double>::infinity();
    double scale = 0.0;

    bool singular() const { return min_pivot <= kSingularRatio * scale; }
};

Lu lu_factor(const ComplexMatrix& m) {
    if (!m.is_square()) throw DimensionError("lu_factor: matrix must be square");
    const int n = m.rows();
    Lu f;
    f.a = m;
    f.piv.resize(n);
    f.scale = m.inf_norm();
    for (int k = 0; k < n; ++k) {
        int p = k;
        double best = std::abs(f.a(k, k));
        for (int r = k + 1; r < n; ++r) {
            const double v = std::abs(f.a(r, k));
            if (v > best) { best = v; p = r; }
        }
        f.piv[k] = p;
        if (p != k) {
            for (int c = 0; c < n; ++c) std::swap(f.a(k, c), f.a(p, c));
            f.sign = -f.sign;
        }
        const double pk = std::abs(f.a(k, k));
        f.min_pivot = std::min(f.min_pivot, pk);
        if (pk == 0.0) continue;  // column already eliminated; det will be 0
        for (int r = k + 1; r < n; ++r) {
            const Complex l = f.a(r, k) / f.a(k, k);
            f.a(r, k) = l;
            if (l == Complex(0.0, 0.0)) continue;
            for (int c = k + 1; c < n; ++c) f.a(r, c) -= l * f.a(k, c);
        }
    }
    return f;
}

// Solve A x = b in place given the factorization.
void lu_solve(const Lu& f, std::vector<Complex>& b) {
    const int n = f.a.rows();
    for (int k = 0; k < n; ++k)
        if (f.piv[k] != k) std::swap(b[k], b[f.piv[k]]);
    for (int r = 1; r < n; ++r)
        for (int c = 0; c < r; ++c) b[r] -= f.a(r, c) * b[c];
    for (int r = n - 1; r >= 0; --r) {
        for (int c = r + 1; c < n; ++c) b[r] -= f.a(r, c) * b[c];
        b[r] /= f.a(r, r);
    }
}

Complex det_of(const Lu& f) {
    const int n = f.a.rows();
    Complex det(static_cast<double>(f.sign), 0.0);
    for (int k = 0; k < n; ++k) det *= f.a(k, k);
    return det;
}

}  // namespace

Complex lu_det(const ComplexMatrix& m) { return lu_det_full(m).det; }

DetResult lu_det_full(const ComplexMatrix& m) {
    if (!m.is_square()) throw DimensionError("lu_det: matrix must be square");
    if (m.rows() == 0) return {Complex(1.0, 0.0), std::numeric_limits<double>::infinity(), 0.0, false};
    Lu f = lu_factor(m);
    return {det_of(f), f.min_pivot, f.scale, f.singular()};
}

Inverse solve_inv(const ComplexMatrix& m) {
    if (!m.is_square()) throw DimensionError("solve_inv: matrix must be square");
    const int n = m.rows();
    if (n == 0) return {ComplexMatrix(), 1.0};
    Lu f = lu_factor(m);
    if (f.singular())
        throw SingularError("matrix singular to working precision (pivot " +
                                std::to_string(f.min_pivot) + ")",
                            f.min_pivot);
    ComplexMatrix inv(n, n);
    std::vector<Complex> col(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) {
        std::fill(col.begin(), col.end(), Complex(0.0, 0.0));
        col[j] = 1.0;
        lu_solve(f, col);
        for (int r = 0; r < n; ++r) inv(r, j) = col[r];
    }
    const double cond = m.frobenius_norm() * inv.frobenius_norm();
    return {std::move(inv), cond};
}

namespace {

// Diagonal Pade degree-13 coefficients.
constexpr double kPade13[] = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0,  129060195264000.0,   10559470521600.0,
    670442572800.0,      33522128640.0,       1323241920.0,
    40840800.0,          960960.0,            16380.0,
    182.0,               1.0};
constexpr double kTheta13 = 5.371920351148152;

}  // namespace

ComplexMatrix expm(const ComplexMatrix& a) {
    if (!a.is_square()) throw DimensionError("expm: matrix must be square");
    const int n = a.rows();
    if (n == 0) return a;

    const double norm = a.one_norm();
    int s = 0;
    if (norm > kTheta13) s = static_cast<int>(std::ceil(std::log2(norm / kTheta13)));
    ComplexMatrix as = a * Complex(std::ldexp(1.0, -s), 0.0);

    const ComplexMatrix id = ComplexMatrix::identity(n);
    const ComplexMatrix a2 = as * as;
    const ComplexMatrix a4 = a2 * a2;
    const ComplexMatrix a6 = a2 * a4;

    ComplexMatrix u = a6 * (kPade13[13] * a6 + kPade13[11] * a4 + kPade13[9] * a2);
    u += kPade13[7] * a6 + kPade13[5] * a4 + kPade13[3] * a2 + kPade13[1] * id;
    u = as * u;
    ComplexMatrix v = a6 * (kPade13[12] * a6 + kPade13[10] * a4 + kPade13[8] * a2);
    v += kPade13[6] * a6 + kPade13[4] * a4 + kPade13[2] * a2 + kPade13[0] * id;

    ComplexMatrix r = solve_inv(v - u).mat * (v + u);
    for (int i = 0; i < s; ++i) r = r * r;
    return r;
}

ExpFrechet expm_frechet(const ComplexMatrix& a, const ComplexMatrix& e) {
    if (!a.is_square() || !e.is_square() || a.rows() != e.rows())
        throw DimensionError("expm_frechet: A and E must be square of equal size");
    const int n = a.rows();
    ComplexMatrix blk(2 * n, 2 * n);
    blk.set_block(0, 0, a);
    blk.set_block(0, n, e);
    blk.set_block(n, n, a);
    ComplexMatrix big = expm(blk);
    return {big.block(0, 0, n, n), big.block(0, n, n, n)};
}

MatrixTuple::MatrixTuple(int n_, int d_) : n(n_), d(d_) {
    if (n < 0 || d < 1) throw DimensionError("MatrixTuple: need n >= 0, d >= 1");
    mats.assign(static_cast<size_t>(d), ComplexMatrix(n, n));
}

MatrixTuple::MatrixTuple(std::vector<ComplexMatrix> ms) : mats(std::move(ms)) {
    if (mats.empty()) throw DimensionError("MatrixTuple: need at least one component");
    d = static_cast<int>(mats.size());
    n = mats[0].rows();
    for (const ComplexMatrix& m : mats)
        if (!m.is_square() || m.rows() != n)
            throw DimensionError("MatrixTuple: components must be square of identical size");
}

MatrixTuple& MatrixTuple::operator+=(const MatrixTuple& o) {
    if (n != o.n || d != o.d) throw DimensionError("tuple addition shape mismatch");
    for (int i = 0; i < d; ++i) mats[i] += o.mats[i];
    return *this;
}

MatrixTuple& MatrixTuple::operator-=(const MatrixTuple& o) {
    if (n != o.n || d != o.d) throw DimensionError("tuple subtraction shape mismatch");
    for (int i = 0; i < d; ++i) mats[i] -= o.mats[i];
    return *this;
}

MatrixTuple& MatrixTuple::operator*=(Complex s) {
    for (ComplexMatrix& m : mats) m *= s;
    return *this;
}

double MatrixTuple::frobenius_norm() const {
    double s = 0.0;
    for (const ComplexMatrix& m : mats) {
        const double f = m.frobenius_norm();
        s += f * f;
    }
    return std::sqrt(s);
}

MatrixTuple direct_sum(const MatrixTuple& x, const MatrixTuple& y) {
    if (x.d != y.d) throw DimensionError("direct_sum: variable counts differ");
    std::vector<ComplexMatrix> ms;
    ms.reserve(static_cast<size_t>(x.d));
    for (int i = 0; i < x.d; ++i) ms.push_back(ComplexMatrix::direct_sum(x[i], y[i]));
    return MatrixTuple(std::move(ms));
}

MatrixTuple direct_sum_power(const MatrixTuple& x, int m) {
    if (m < 1) throw DimensionError("direct_sum_power: need m >= 1");
    MatrixTuple r = x;
    for (int i = 1; i < m; ++i) r = direct_sum(r, x);
    return r;
}

MatrixTuple random_tuple(int n, int d, uint64_t seed) {
    if (n < 0 || d < 1) throw DimensionError("random_tuple: need n >= 0, d >= 1");
    Rng rng(seed);
    std::vector<ComplexMatrix> ms;
    ms.reserve(static_cast<size_t>(d));
    for (int i = 0; i < d; ++i) ms.push_back(random_gaussian(n, n, rng));
    return MatrixTuple(std::move(ms));
}

ComplexMatrix random_gaussian(int rows, int cols, Rng& rng) {
    ComplexMatrix m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = rng.cgauss();
    return m;
}

ComplexMatrix random_unitary(int n, Rng& rng) {
    ComplexMatrix g = random_gaussian(n, n, rng);
    ComplexMatrix q(n, n);
    for (int j = 0; j < n; ++j) {
        std::vector<Complex> v(static_cast<size_t>(n));
        for (int r = 0; r < n; ++r) v[r] = g(r, j);
        for (int k = 0; k < j; ++k) {
            Complex proj = 0.0;
            for (int r = 0; r < n; ++r) proj += std::conj(q(r, k)) * v[r];
            for (int r = 0; r < n; ++r) v[r] -= proj * q(r, k);
        }
        double nv = 0.0;
        for (int r = 0; r < n; ++r) nv += std::norm(v[r]);
        nv = std::sqrt(nv);
        if (nv < 1e-14) throw SingularError("random_unitary: degenerate draw", nv);
        for (int r = 0; r < n; ++r) q(r, j) = v[r] / nv;
    }
    return q;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix m(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) {
            const Complex s = a(i, j);
            if (s == Complex(0.0, 0.0)) continue;
            for (int r = 0; r < b.rows(); ++r)
                for (int c = 0; c < b.cols(); ++c)
                    m(i * b.rows() + r, j * b.cols() + c) = s * b(r, c);
        }
    return m;
}

double rel_err(const MatrixTuple& got, const MatrixTuple& want) {
    if (got.n != want.n || got.d != want.d)
        throw DimensionError("rel_err tuple shape mismatch");
    double worst = 0.0;
    for (int i = 0; i < got.d; ++i) worst = std::max(worst, rel_err(got[i], want[i]));
    return worst;
}

}  // namespace nc
