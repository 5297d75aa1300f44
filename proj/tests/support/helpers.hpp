#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qpr/qpr.hpp"

namespace qpr::test {

inline std::string read_fixture(const std::string& name) {
    const std::string path = std::string(QPR_FIXTURES_DIR) + "/" + name;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("missing fixture " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline QPSystem fixture_system(const std::string& name) {
    return parse_system(read_fixture(name));
}

// parameter shorthand: P("a1"), P("a1", -2) == -2*a1
inline Coefficient P(const std::string& name, const Rational& weight = 1) {
    return Coefficient::term(weight, ParamAtom{{name, 1}});
}

inline Rational Q(const std::string& text) { return parse_rational(text); }

/// Builds a canonicalized system from rows/entries given in any order.
inline QPSystem make_sys(std::vector<std::string> vars,
                         const std::vector<std::vector<std::string>>& b_rows,
                         std::vector<std::vector<Coefficient>> a,
                         std::vector<Coefficient> lambda) {
    QPSystem sys;
    sys.n = vars.size();
    sys.m = b_rows.size();
    sys.var_names = std::move(vars);
    sys.B = RatMatrix::from_strings(b_rows);
    sys.A = std::move(a);
    sys.lambda = std::move(lambda);
    canonicalize(sys);
    return sys;
}

// ---------------------------------------------------------------------------
// Independent oracles
// ---------------------------------------------------------------------------

/// Laplace-expansion determinant; independent of the elimination core.
inline Rational det_cofactor(const RatMatrix& m) {
    const std::size_t n = m.rows();
    if (n == 0) return 1;
    if (n == 1) return m(0, 0);
    Rational det = 0;
    for (std::size_t j = 0; j < n; ++j) {
        if (m(0, j) == 0) continue;
        RatMatrix minor(n - 1, n - 1);
        for (std::size_t r = 1; r < n; ++r) {
            std::size_t cc = 0;
            for (std::size_t c = 0; c < n; ++c) {
                if (c == j) continue;
                minor(r - 1, cc++) = m(r, c);
            }
        }
        const Rational term = m(0, j) * det_cofactor(minor);
        det += (j % 2 == 0) ? term : Rational(-term);
    }
    return det;
}

namespace detail {
inline bool next_combination(std::vector<std::size_t>& idx, std::size_t limit) {
    const std::size_t k = idx.size();
    for (std::size_t i = k; i-- > 0;) {
        if (idx[i] < limit - (k - i)) {
            ++idx[i];
            for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
            return true;
        }
    }
    return false;
}
}  // namespace detail

/// Brute-force rank: the largest k with a nonzero k x k minor.
inline std::size_t rank_minor_oracle(const RatMatrix& m) {
    const std::size_t maxk = std::min(m.rows(), m.cols());
    for (std::size_t k = maxk; k >= 1; --k) {
        std::vector<std::size_t> ri(k), ci(k);
        for (std::size_t i = 0; i < k; ++i) ri[i] = i;
        do {
            for (std::size_t i = 0; i < k; ++i) ci[i] = i;
            do {
                RatMatrix sub(k, k);
                for (std::size_t i = 0; i < k; ++i)
                    for (std::size_t j = 0; j < k; ++j) sub(i, j) = m(ri[i], ci[j]);
                if (det_cofactor(sub) != 0) return k;
            } while (detail::next_combination(ci, m.cols()));
        } while (detail::next_combination(ri, m.rows()));
    }
    return 0;
}

// ---------------------------------------------------------------------------
// Random generation (fixed seeds keep runs reproducible)
// ---------------------------------------------------------------------------

using Rng = std::mt19937;

inline Rational random_rational(Rng& rng, int num_span = 4, int den_max = 3) {
    std::uniform_int_distribution<int> num(-num_span, num_span);
    std::uniform_int_distribution<int> den(1, den_max);
    return Rational(num(rng), den(rng));
}

inline RatMatrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols,
                               int num_span = 4, int den_max = 3) {
    RatMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = random_rational(rng, num_span, den_max);
    return m;
}

inline RatMatrix random_invertible(Rng& rng, std::size_t n) {
    for (;;) {
        RatMatrix m = random_matrix(rng, n, n, 3, 2);
        if (rank(m) == n) return m;
    }
}

inline RatMatrix random_full_column_rank(Rng& rng, std::size_t rows, std::size_t cols) {
    for (;;) {
        RatMatrix m = random_matrix(rng, rows, cols, 3, 2);
        if (rank(m) == cols) return m;
    }
}

inline Coefficient random_coefficient(Rng& rng, bool allow_params = true) {
    std::uniform_int_distribution<int> shape(0, 3);
    Rational w = random_rational(rng, 3, 2);
    while (w == 0) w = random_rational(rng, 3, 2);
    if (!allow_params || shape(rng) == 0) return Coefficient(w);
    std::uniform_int_distribution<int> which(1, 3);
    Coefficient c = Coefficient::term(w, ParamAtom{{"p" + std::to_string(which(rng)), 1}});
    if (shape(rng) == 3) {
        Rational w2 = random_rational(rng, 2, 1);
        if (w2 != 0) c += Coefficient::term(w2, ParamAtom{{"p" + std::to_string(which(rng)), 1}});
    }
    return c;
}

/// Random normalized system (distinct nonzero B rows of full rank, no zero
/// A columns), suitable for parser round-trips and QMT properties.
inline QPSystem random_system(Rng& rng, std::size_t n, std::size_t m, bool with_lambda,
                              bool allow_params = true) {
    QPSystem sys;
    sys.n = n;
    sys.m = m;
    for (std::size_t i = 0; i < n; ++i) sys.var_names.push_back("x" + std::to_string(i + 1));
    for (;;) {
        sys.B = random_matrix(rng, m, n, 2, 2);
        bool ok = rank(sys.B) == n;
        for (std::size_t j = 0; ok && j < m; ++j) {
            bool zero = true;
            for (std::size_t k = 0; k < n; ++k)
                if (sys.B(j, k) != 0) zero = false;
            if (zero) ok = false;
            for (std::size_t j2 = j + 1; ok && j2 < m; ++j2)
                if (sys.B.row(j) == sys.B.row(j2)) ok = false;
        }
        if (ok) break;
    }
    sys.A.assign(n, std::vector<Coefficient>(m));
    for (std::size_t j = 0; j < m; ++j) {
        // keep every column nonzero
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        const std::size_t keep = pick(rng);
        for (std::size_t i = 0; i < n; ++i) {
            std::uniform_int_distribution<int> coin(0, 2);
            if (i == keep || coin(rng) == 0) sys.A[i][j] = random_coefficient(rng, allow_params);
        }
        if (sys.A[keep][j].is_zero()) sys.A[keep][j] = Coefficient(1);
    }
    sys.lambda.assign(n, Coefficient());
    if (with_lambda) {
        std::uniform_int_distribution<int> coin(0, 1);
        for (std::size_t i = 0; i < n; ++i)
            if (coin(rng)) sys.lambda[i] = random_coefficient(rng, allow_params);
    }
    canonicalize(sys);
    return sys;
}

/// Random lambda = 0 system guaranteed reducible: B = B' · C0^-1 with B' of
/// full rank and an all-ones first column.
inline QPSystem random_reducible_system(Rng& rng, std::size_t n, std::size_t m) {
    for (;;) {
        RatMatrix bp(m, n);
        for (std::size_t j = 0; j < m; ++j) {
            bp(j, 0) = 1;
            for (std::size_t k = 1; k < n; ++k) bp(j, k) = random_rational(rng, 2, 2);
        }
        if (rank(bp) != n) continue;
        bool distinct = true;
        for (std::size_t j = 0; distinct && j < m; ++j)
            for (std::size_t j2 = j + 1; distinct && j2 < m; ++j2)
                if (bp.row(j) == bp.row(j2)) distinct = false;
        if (!distinct) continue;
        const RatMatrix c0 = random_invertible(rng, n);
        QPSystem sys;
        sys.n = n;
        sys.m = m;
        for (std::size_t i = 0; i < n; ++i) sys.var_names.push_back("x" + std::to_string(i + 1));
        sys.B = bp * invert(c0);
        bool zero_row = false;
        for (std::size_t j = 0; j < m; ++j) {
            bool z = true;
            for (std::size_t k = 0; k < n; ++k)
                if (sys.B(j, k) != 0) z = false;
            if (z) zero_row = true;
        }
        if (zero_row) continue;
        sys.A.assign(n, std::vector<Coefficient>(m));
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t i = 0; i < n; ++i) {
                std::uniform_int_distribution<int> coin(0, 1);
                if (i == j % n || coin(rng)) sys.A[i][j] = random_coefficient(rng, false);
            }
        for (std::size_t j = 0; j < m; ++j)
            if (sys.A[j % n][j].is_zero()) sys.A[j % n][j] = Coefficient(1);
        sys.lambda.assign(n, Coefficient());
        canonicalize(sys);
        return sys;
    }
}

}  // namespace qpr::test
