#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "qpr/coefficient.hpp"
#include "qpr/error.hpp"
#include "qpr/linalg.hpp"
#include "qpr/rat_matrix.hpp"

namespace qpr {

/// Quasipolynomial system
///     dx_i/dt = x_i (lambda_i + sum_j A[i][j] * prod_k x_k^B(j,k))
/// with n variables and m quasimonomials. Canonical form keeps the rows of B
/// sorted lexicographically with the columns of A aligned.
struct QPSystem {
    std::size_t n = 0;
    std::size_t m = 0;
    std::vector<std::string> var_names;       // size n
    std::vector<std::vector<Coefficient>> A;  // n rows, m columns
    RatMatrix B;                              // m x n
    std::vector<Coefficient> lambda;          // size n

    bool lambda_is_zero() const { return all_zero(lambda); }

    std::vector<std::string> parameters() const {
        std::set<std::string> names;
        for (const auto& row : A)
            for (const auto& c : row) c.collect_parameters(names);
        for (const auto& c : lambda) c.collect_parameters(names);
        return {names.begin(), names.end()};
    }

    friend bool operator==(const QPSystem& a, const QPSystem& b) {
        return a.n == b.n && a.m == b.m && a.var_names == b.var_names && a.A == b.A &&
               a.B == b.B && a.lambda == b.lambda;
    }
};

/// Quasipolynomial system with a per-quasimonomial exponential time factor:
///     dy_i/dt = y_i * sum_j A[i][j] * e^(Gamma_j t) * prod_k y_k^B(j,k)
/// The scaling that produced it is remembered in origin_lambda.
struct ExpQPSystem {
    std::size_t n = 0;
    std::size_t m = 0;
    std::vector<std::string> var_names;
    std::vector<std::vector<Coefficient>> A;
    RatMatrix B;
    std::vector<Coefficient> gamma;          // size m
    std::vector<Coefficient> origin_lambda;  // size n

    friend bool operator==(const ExpQPSystem& a, const ExpQPSystem& b) {
        return a.n == b.n && a.m == b.m && a.var_names == b.var_names && a.A == b.A &&
               a.B == b.B && a.gamma == b.gamma && a.origin_lambda == b.origin_lambda;
    }
};

namespace detail {

inline bool row_less(const RatMatrix& b, std::size_t r1, std::size_t r2) {
    for (std::size_t k = 0; k < b.cols(); ++k) {
        if (b(r1, k) < b(r2, k)) return true;
        if (b(r2, k) < b(r1, k)) return false;
    }
    return false;
}

template <typename Sys>
void apply_monomial_order(Sys& sys, const std::vector<std::size_t>& order) {
    RatMatrix b(order.size(), sys.B.cols());
    for (std::size_t j = 0; j < order.size(); ++j) b.set_row(j, sys.B.row(order[j]));
    std::vector<std::vector<Coefficient>> a(sys.n);
    for (std::size_t i = 0; i < sys.n; ++i) {
        a[i].resize(order.size());
        for (std::size_t j = 0; j < order.size(); ++j) a[i][j] = sys.A[i][order[j]];
    }
    sys.B = std::move(b);
    sys.A = std::move(a);
    sys.m = order.size();
}

}  // namespace detail

/// Sorts quasimonomials into the canonical lexicographic row order.
template <typename Sys>
void canonicalize(Sys& sys) {
    std::vector<std::size_t> order(sys.m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return detail::row_less(sys.B, a, b); });
    if constexpr (requires { sys.gamma; }) {
        std::vector<Coefficient> g(sys.m);
        for (std::size_t j = 0; j < sys.m; ++j) g[j] = sys.gamma[order[j]];
        sys.gamma = std::move(g);
    }
    detail::apply_monomial_order(sys, order);
}

/// Merges duplicate B rows (summing A columns), folds all-zero exponent rows
/// into lambda, drops quasimonomials whose A column is entirely zero, and
/// sorts canonically. Never throws.
inline QPSystem structural_normalize(QPSystem sys) {
    // merge duplicates
    std::map<std::vector<Rational>, std::size_t> seen;
    std::vector<std::size_t> keep;
    for (std::size_t j = 0; j < sys.m; ++j) {
        auto key = sys.B.row(j);
        auto [it, inserted] = seen.emplace(std::move(key), j);
        if (inserted) {
            keep.push_back(j);
        } else {
            for (std::size_t i = 0; i < sys.n; ++i) sys.A[i][it->second] += sys.A[i][j];
        }
    }
    detail::apply_monomial_order(sys, keep);

    // fold zero exponent rows into lambda, drop zero A columns
    keep.clear();
    for (std::size_t j = 0; j < sys.m; ++j) {
        bool zero_row = true;
        for (std::size_t k = 0; k < sys.n; ++k)
            if (sys.B(j, k) != 0) {
                zero_row = false;
                break;
            }
        if (zero_row) {
            for (std::size_t i = 0; i < sys.n; ++i) sys.lambda[i] += sys.A[i][j];
            continue;
        }
        bool zero_col = true;
        for (std::size_t i = 0; i < sys.n; ++i)
            if (!sys.A[i][j].is_zero()) {
                zero_col = false;
                break;
            }
        if (!zero_col) keep.push_back(j);
    }
    detail::apply_monomial_order(sys, keep);
    canonicalize(sys);
    return sys;
}

/// Standardizes a system: structural normalization plus the maximal-rank
/// gate. A system with no quasimonomials is accepted as the pure-lambda
/// degenerate form when lambda != 0 and rejected as empty otherwise; the
/// redundant case rank(B) < n is rejected (reducing it is out of scope).
inline QPSystem normalize(const QPSystem& sys) {
    QPSystem out = structural_normalize(sys);
    if (out.m == 0) {
        if (out.lambda_is_zero()) throw EmptySystemError();
        return out;  // pure-lambda system
    }
    const std::size_t r = rank(out.B);
    if (r < out.n) throw NonMaximalRankError(r);
    return out;
}

}  // namespace qpr
