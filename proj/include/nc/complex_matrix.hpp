#pragma once

#include <complex>
#include <vector>

#include "nc/error.hpp"

namespace nc {

using Complex = std::complex<double>;

// Dense row-major complex matrix. All library functions treat matrices as
// values: operations return fresh matrices and never mutate shared state.
// The 0x0 matrix is allowed as the neutral element of direct sums.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(int rows, int cols);  // zero-filled
    ComplexMatrix(int rows, int cols, std::vector<Complex> entries);

    static ComplexMatrix identity(int n);
    static ComplexMatrix diagonal(const std::vector<Complex>& d);
    static ComplexMatrix direct_sum(const ComplexMatrix& a, const ComplexMatrix& b);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    Complex& operator()(int r, int c) { return e_[static_cast<size_t>(r) * cols_ + c]; }
    const Complex& operator()(int r, int c) const { return e_[static_cast<size_t>(r) * cols_ + c]; }

    ComplexMatrix block(int r0, int c0, int h, int w) const;
    void set_block(int r0, int c0, const ComplexMatrix& m);

    ComplexMatrix adjoint() const;  // conjugate transpose
    ComplexMatrix transpose() const;
    Complex trace() const;
    double frobenius_norm() const;
    double one_norm() const;  // max column sum of absolute values
    double inf_norm() const;  // max row sum of absolute values
    double max_abs() const;
    bool all_finite() const;

    ComplexMatrix& operator+=(const ComplexMatrix& o);
    ComplexMatrix& operator-=(const ComplexMatrix& o);
    ComplexMatrix& operator*=(Complex s);

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
    friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
    friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }
    ComplexMatrix operator-() const;
    ComplexMatrix operator*(const ComplexMatrix& o) const;

    bool operator==(const ComplexMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && e_ == o.e_;
    }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<Complex> e_;
};

// Mixed absolute/relative discrepancy: ||got - want||_F / (1 + ||want||_F).
double rel_err(const ComplexMatrix& got, const ComplexMatrix& want);
double rel_err(Complex got, Complex want);

}  // namespace nc
