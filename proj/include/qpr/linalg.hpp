#pragma once

#include <cstddef>
#include <vector>

#include "qpr/error.hpp"
#include "qpr/rat_matrix.hpp"

namespace qpr {

namespace detail {

// Fraction-free forward elimination (Bareiss one-step division scheme).
// Pivoting is deterministic: first row with a nonzero entry in the current
// column, scanning columns left to right. Returns the echelon matrix, the
// pivot columns and the row permutation applied.
struct Echelon {
    RatMatrix m;
    std::vector<std::size_t> pivot_cols;
};

inline Echelon forward_eliminate(RatMatrix m) {
    const std::size_t rows = m.rows(), cols = m.cols();
    Echelon e;
    Rational prev(1);
    std::size_t pr = 0;
    for (std::size_t c = 0; c < cols && pr < rows; ++c) {
        std::size_t piv = pr;
        while (piv < rows && m(piv, c) == 0) ++piv;
        if (piv == rows) continue;
        m.swap_rows(pr, piv);
        const Rational pivot = m(pr, c);
        for (std::size_t i = pr + 1; i < rows; ++i) {
            for (std::size_t j = c + 1; j < cols; ++j)
                m(i, j) = (pivot * m(i, j) - m(i, c) * m(pr, j)) / prev;
            m(i, c) = 0;
        }
        prev = pivot;
        e.pivot_cols.push_back(c);
        ++pr;
    }
    e.m = std::move(m);
    return e;
}

// Reduced row echelon form: forward elimination followed by back
// substitution and pivot normalization.
inline Echelon rref(RatMatrix m) {
    Echelon e = forward_eliminate(std::move(m));
    const std::size_t cols = e.m.cols();
    for (std::size_t pi = e.pivot_cols.size(); pi-- > 0;) {
        const std::size_t c = e.pivot_cols[pi];
        const Rational pivot = e.m(pi, c);
        for (std::size_t j = c; j < cols; ++j) e.m(pi, j) /= pivot;
        for (std::size_t i = 0; i < pi; ++i) {
            const Rational f = e.m(i, c);
            if (f == 0) continue;
            for (std::size_t j = c; j < cols; ++j) e.m(i, j) -= f * e.m(pi, j);
        }
    }
    return e;
}

}  // namespace detail

/// Exact rank via fraction-free elimination.
inline std::size_t rank(const RatMatrix& m) {
    return detail::forward_eliminate(m).pivot_cols.size();
}

/// B with an all-ones column appended on the right.
inline RatMatrix augment_ones(const RatMatrix& b) {
    RatMatrix out(b.rows(), b.cols() + 1);
    for (std::size_t i = 0; i < b.rows(); ++i) {
        for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) = b(i, j);
        out(i, b.cols()) = 1;
    }
    return out;
}

/// Unique C with B·C = Bp, for B of full column rank. Reports the first
/// right-hand-side column outside the column space of B.
inline RatMatrix solve_right(const RatMatrix& b, const RatMatrix& bp) {
    if (b.rows() != bp.rows()) throw Error("solve_right: row count mismatch");
    const std::size_t m = b.rows(), n = b.cols(), k = bp.cols();
    RatMatrix aug(m, n + k);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) aug(i, j) = b(i, j);
        for (std::size_t j = 0; j < k; ++j) aug(i, n + j) = bp(i, j);
    }
    detail::Echelon e = detail::rref(std::move(aug));
    std::size_t rank_b = 0;
    for (std::size_t c : e.pivot_cols)
        if (c < n) ++rank_b;
    if (rank_b < n) throw NonMaximalRankError(rank_b);
    // Rows beyond the first n are zero in the B part; a nonzero entry in the
    // Bp part there marks an inconsistent column.
    for (std::size_t j = 0; j < k; ++j)
        for (std::size_t i = n; i < m; ++i)
            if (e.m(i, n + j) != 0) throw InconsistentColumnError(j);
    RatMatrix c(n, k);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j) c(i, j) = e.m(i, n + j);
    return c;
}

/// Exact inverse; throws SingularMatrixError when rank < dimension.
inline RatMatrix invert(const RatMatrix& m) {
    if (m.rows() != m.cols()) throw Error("invert: matrix not square");
    const std::size_t n = m.rows();
    try {
        return solve_right(m, RatMatrix::identity(n));
    } catch (const NonMaximalRankError&) {
        throw SingularMatrixError();
    }
}

inline bool is_invertible(const RatMatrix& m) {
    return m.rows() == m.cols() && rank(m) == m.rows();
}

/// Basis of {v : M·v = 0} as matrix rows, in RREF free-column order, each
/// scaled so its first nonzero entry is positive.
inline RatMatrix null_space(const RatMatrix& m) {
    detail::Echelon e = detail::rref(m);
    const std::size_t cols = m.cols();
    std::vector<bool> is_pivot(cols, false);
    for (std::size_t c : e.pivot_cols) is_pivot[c] = true;
    std::vector<std::vector<Rational>> basis;
    for (std::size_t f = 0; f < cols; ++f) {
        if (is_pivot[f]) continue;
        std::vector<Rational> v(cols);
        v[f] = 1;
        for (std::size_t pi = 0; pi < e.pivot_cols.size(); ++pi)
            v[e.pivot_cols[pi]] = -e.m(pi, f);
        for (const Rational& x : v) {
            if (x == 0) continue;
            if (x < 0)
                for (Rational& y : v) y = -y;
            break;
        }
        basis.push_back(std::move(v));
    }
    RatMatrix out(basis.size(), cols);
    for (std::size_t i = 0; i < basis.size(); ++i) out.set_row(i, basis[i]);
    return out;
}

/// Basis of the left null space {v : v·M = 0}, one vector per row.
inline RatMatrix left_kernel(const RatMatrix& m) { return null_space(m.transpose()); }

}  // namespace qpr
