#pragma once

#include "expr.hpp"

#include <optional>
#include <vector>

namespace varform {

// Exact rational Gaussian elimination for the small ansatz systems used by
// the boundary-term search. A is row-major, solves A x = b; returns nullopt
// when the system is inconsistent.
inline std::optional<std::vector<Rational>> solve_rational(std::vector<std::vector<Rational>> A,
                                                           std::vector<Rational> b) {
    const size_t rows = A.size();
    const size_t cols = rows ? A[0].size() : 0;
    std::vector<size_t> pivot_col_of_row;
    size_t r = 0;
    for (size_t c = 0; c < cols && r < rows; ++c) {
        size_t piv = r;
        while (piv < rows && A[piv][c] == 0) ++piv;
        if (piv == rows) continue;
        std::swap(A[piv], A[r]);
        std::swap(b[piv], b[r]);
        Rational inv = Rational(1) / A[r][c];
        for (size_t j = c; j < cols; ++j) A[r][j] *= inv;
        b[r] *= inv;
        for (size_t i = 0; i < rows; ++i) {
            if (i == r || A[i][c] == 0) continue;
            Rational f = A[i][c];
            for (size_t j = c; j < cols; ++j) A[i][j] -= f * A[r][j];
            b[i] -= f * b[r];
        }
        pivot_col_of_row.push_back(c);
        ++r;
    }
    for (size_t i = r; i < rows; ++i)
        if (b[i] != 0) return std::nullopt;
    std::vector<Rational> x(cols, Rational(0));
    for (size_t i = 0; i < r; ++i) x[pivot_col_of_row[i]] = b[i];
    return x;
}

} // namespace varform
