#pragma once

// Test-only oracles, independent of the library's computation paths.

#include "nc/evalad.hpp"
#include "nc/matcore.hpp"

namespace nc::test {

// Cofactor expansion along the first row. O(n!), fine for n <= 6.
inline Complex cofactor_det(const ComplexMatrix& m) {
    const int n = m.rows();
    if (n == 0) return 1.0;
    if (n == 1) return m(0, 0);
    Complex det = 0.0;
    for (int j = 0; j < n; ++j) {
        ComplexMatrix minor(n - 1, n - 1);
        for (int r = 1; r < n; ++r) {
            int cc = 0;
            for (int c = 0; c < n; ++c) {
                if (c == j) continue;
                minor(r - 1, cc++) = m(r, c);
            }
        }
        const Complex sign = (j % 2 == 0) ? Complex(1.0, 0.0) : Complex(-1.0, 0.0);
        det += sign * m(0, j) * cofactor_det(minor);
    }
    return det;
}

// Central finite difference of an expression in direction h.
inline ComplexMatrix fd_dir_deriv(const NcExpr& e, const MatrixTuple& x, const MatrixTuple& h,
                                  double step = 1e-5) {
    MatrixTuple hp = h;
    hp *= Complex(step, 0.0);
    MatrixTuple xp = x;
    xp += hp;
    MatrixTuple xm = x;
    xm -= hp;
    ComplexMatrix diff = eval(e, xp).value - eval(e, xm).value;
    diff *= Complex(1.0 / (2.0 * step), 0.0);
    return diff;
}

}  // namespace nc::test
