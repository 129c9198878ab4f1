#include "nc/complex_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace nc {

ComplexMatrix::ComplexMatrix(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0)
        throw DimensionError("matrix dimensions must be nonnegative");
    e_.assign(static_cast<size_t>(rows) * cols, Complex(0.0, 0.0));
}

ComplexMatrix::ComplexMatrix(int rows, int cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), e_(std::move(entries)) {
    if (rows < 0 || cols < 0)
        throw DimensionError("matrix dimensions must be nonnegative");
    if (e_.size() != static_cast<size_t>(rows) * cols)
        throw DimensionError("entry count does not match rows*cols");
    if (!all_finite())
        throw ValidationError("matrix entries must be finite");
}

ComplexMatrix ComplexMatrix::identity(int n) {
    ComplexMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(const std::vector<Complex>& d) {
    ComplexMatrix m(static_cast<int>(d.size()), static_cast<int>(d.size()));
    for (int i = 0; i < m.rows(); ++i) m(i, i) = d[i];
    return m;
}

ComplexMatrix ComplexMatrix::direct_sum(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix m(a.rows() + b.rows(), a.cols() + b.cols());
    m.set_block(0, 0, a);
    m.set_block(a.rows(), a.cols(), b);
    return m;
}

ComplexMatrix ComplexMatrix::block(int r0, int c0, int h, int w) const {
    if (r0 < 0 || c0 < 0 || r0 + h > rows_ || c0 + w > cols_)
        throw DimensionError("block out of range");
    ComplexMatrix m(h, w);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) m(r, c) = (*this)(r0 + r, c0 + c);
    return m;
}

void ComplexMatrix::set_block(int r0, int c0, const ComplexMatrix& m) {
    if (r0 < 0 || c0 < 0 || r0 + m.rows() > rows_ || c0 + m.cols() > cols_)
        throw DimensionError("block out of range");
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) (*this)(r0 + r, c0 + c) = m(r, c);
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix m(cols_, rows_);
    for (int r = 0; r < rows_; ++r)
        for (int c = 0; c < cols_; ++c) m(c, r) = std::conj((*this)(r, c));
    return m;
}

ComplexMatrix ComplexMatrix::transpose() const {
    ComplexMatrix m(cols_, rows_);
    for (int r = 0; r < rows_; ++r)
        for (int c = 0; c < cols_; ++c) m(c, r) = (*this)(r, c);
    return m;
}

Complex ComplexMatrix::trace() const {
    if (!is_square()) throw DimensionError("trace of non-square matrix");
    Complex t = 0.0;
    for (int i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
}

double ComplexMatrix::frobenius_norm() const {
    double s = 0.0;
    for (const Complex& z : e_) s += std::norm(z);
    return std::sqrt(s);
}

double ComplexMatrix::one_norm() const {
    double best = 0.0;
    for (int c = 0; c < cols_; ++c) {
        double s = 0.0;
        for (int r = 0; r < rows_; ++r) s += std::abs((*this)(r, c));
        best = std::max(best, s);
    }
    return best;
}

double ComplexMatrix::inf_norm() const {
    double best = 0.0;
    for (int r = 0; r < rows_; ++r) {
        double s = 0.0;
        for (int c = 0; c < cols_; ++c) s += std::abs((*this)(r, c));
        best = std::max(best, s);
    }
    return best;
}

double ComplexMatrix::max_abs() const {
    double best = 0.0;
    for (const Complex& z : e_) best = std::max(best, std::abs(z));
    return best;
}

bool ComplexMatrix::all_finite() const {
    for (const Complex& z : e_)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_)
        throw DimensionError("matrix addition shape mismatch");
    for (size_t i = 0; i < e_.size(); ++i) e_[i] += o.e_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_)
        throw DimensionError("matrix subtraction shape mismatch");
    for (size_t i = 0; i < e_.size(); ++i) e_[i] -= o.e_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex s) {
    for (Complex& z : e_) z *= s;
    return *this;
}

ComplexMatrix ComplexMatrix::operator-() const {
    ComplexMatrix m = *this;
    return m *= Complex(-1.0, 0.0);
}

ComplexMatrix ComplexMatrix::operator*(const ComplexMatrix& o) const {
    if (cols_ != o.rows_) throw DimensionError("matrix product shape mismatch");
    ComplexMatrix m(rows_, o.cols_);
    for (int r = 0; r < rows_; ++r) {
        for (int k = 0; k < cols_; ++k) {
            const Complex a = (*this)(r, k);
            if (a == Complex(0.0, 0.0)) continue;
            for (int c = 0; c < o.cols_; ++c) m(r, c) += a * o(k, c);
        }
    }
    return m;
}

double rel_err(const ComplexMatrix& got, const ComplexMatrix& want) {
    if (got.rows() != want.rows() || got.cols() != want.cols())
        throw DimensionError("rel_err shape mismatch");
    return (got - want).frobenius_norm() / (1.0 + want.frobenius_norm());
}

double rel_err(Complex got, Complex want) {
    return std::abs(got - want) / (1.0 + std::abs(want));
}

}  // namespace nc
