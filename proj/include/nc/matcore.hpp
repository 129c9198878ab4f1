#pragma once

#include <cstdint>
#include <vector>

#include "nc/complex_matrix.hpp"
#include "nc/rng.hpp"

namespace nc {

// A point of the matrix universe: d complex matrices of identical size n.
// n = 0 is allowed and acts as the neutral element of direct sums.
struct MatrixTuple {
    int n = 0;
    int d = 1;
    std::vector<ComplexMatrix> mats;

    MatrixTuple() = default;
    MatrixTuple(int n, int d);  // zero tuple
    explicit MatrixTuple(std::vector<ComplexMatrix> ms);

    const ComplexMatrix& operator[](int i) const { return mats[static_cast<size_t>(i)]; }
    ComplexMatrix& operator[](int i) { return mats[static_cast<size_t>(i)]; }

    MatrixTuple& operator+=(const MatrixTuple& o);
    MatrixTuple& operator-=(const MatrixTuple& o);
    MatrixTuple& operator*=(Complex s);
    friend MatrixTuple operator+(MatrixTuple a, const MatrixTuple& b) { return a += b; }
    friend MatrixTuple operator-(MatrixTuple a, const MatrixTuple& b) { return a -= b; }
    friend MatrixTuple operator*(Complex s, MatrixTuple a) { return a *= s; }

    double frobenius_norm() const;
};

// Determinant by partially pivoted LU. Deterministic for fixed input; the
// determinant of the 0x0 matrix is 1.
Complex lu_det(const ComplexMatrix& m);

struct DetResult {
    Complex det;
    double min_pivot;
    double scale;    // max row sum of the input
    bool singular;   // min_pivot <= 1e-12 * scale
};
DetResult lu_det_full(const ComplexMatrix& m);

// Inverse with a condition estimate ||M||_F * ||M^-1||_F. Throws
// SingularError (carrying the pivot magnitude) when a pivot falls below
// 1e-12 times the max row sum of the input.
struct Inverse {
    ComplexMatrix mat;
    double cond;
};
Inverse solve_inv(const ComplexMatrix& m);

// Matrix exponential, scaling-and-squaring with diagonal Pade of degree 13.
ComplexMatrix expm(const ComplexMatrix& a);

// exp(A) together with the Frechet derivative of exp at A in direction E,
// obtained from exp([[A,E],[0,A]]) = [[exp(A), L(A,E)],[0, exp(A)]].
struct ExpFrechet {
    ComplexMatrix value;
    ComplexMatrix deriv;
};
ExpFrechet expm_frechet(const ComplexMatrix& a, const ComplexMatrix& e);

MatrixTuple direct_sum(const MatrixTuple& x, const MatrixTuple& y);
MatrixTuple direct_sum_power(const MatrixTuple& x, int m);

// d independent n x n matrices with i.i.d. standard complex Gaussian
// entries; identical seed gives bit-identical output.
MatrixTuple random_tuple(int n, int d, uint64_t seed);

ComplexMatrix random_gaussian(int rows, int cols, Rng& rng);

// Approximately Haar unitary: modified Gram-Schmidt QR of a complex
// Gaussian matrix. MGS yields a positive real R diagonal, which fixes the
// phase ambiguity.
ComplexMatrix random_unitary(int n, Rng& rng);

// Kronecker product, blocks of a(i,j)*b.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

double rel_err(const MatrixTuple& got, const MatrixTuple& want);

}  // namespace nc
