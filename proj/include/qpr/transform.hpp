#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "qpr/qp_system.hpp"

namespace qpr {

/// Quasimonomial change of variables x_i = prod_k y_k^C(i,k), C invertible.
struct QmtStep {
    RatMatrix C;
};

/// New time d(tau) = prefactor * prod_k x_k^beta_k * dt.
struct MonomialNttStep {
    Coefficient prefactor;
    std::vector<Rational> beta;
};

/// Exponential scaling y_i = e^(-lambda_i t) x_i.
struct ExpScalingStep {
    std::vector<Coefficient> lambda;
};

/// New time d(tau) = e^(gamma t) dt.
struct ExpNttStep {
    Coefficient gamma;
};

using TransformStep = std::variant<QmtStep, MonomialNttStep, ExpScalingStep, ExpNttStep>;

/// Ordered record of the substitutions applied to a system, each invertible
/// on the positive orthant.
struct TransformChain {
    std::vector<TransformStep> steps;
};

enum class Direction { Forward, Inverse };

// ---------------------------------------------------------------------------
// Format-preserving transformations
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<Coefficient> mat_apply(const RatMatrix& m,
                                          const std::vector<Coefficient>& v) {
    std::vector<Coefficient> out(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (m(i, j) != 0) out[i] += m(i, j) * v[j];
    return out;
}

// A' = Cinv * A, column count preserved.
inline std::vector<std::vector<Coefficient>> transform_coeffs(
    const RatMatrix& cinv, const std::vector<std::vector<Coefficient>>& a, std::size_t m) {
    const std::size_t n = a.size();
    std::vector<std::vector<Coefficient>> out(n, std::vector<Coefficient>(m));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            if (cinv(i, k) == 0) continue;
            for (std::size_t j = 0; j < m; ++j) out[i][j] += cinv(i, k) * a[k][j];
        }
    return out;
}

}  // namespace detail

/// Applies the QMT of matrix C: B' = B·C, A' = C⁻¹·A, λ' = C⁻¹·λ.
inline QPSystem apply_qmt(const QPSystem& sys, const RatMatrix& C) {
    if (C.rows() != sys.n || C.cols() != sys.n) throw Error("QMT matrix has wrong shape");
    const RatMatrix cinv = invert(C);  // throws SingularMatrixError
    QPSystem out = sys;
    out.B = sys.B * C;
    out.A = detail::transform_coeffs(cinv, sys.A, sys.m);
    out.lambda = detail::mat_apply(cinv, sys.lambda);
    canonicalize(out);
    return out;
}

inline ExpQPSystem apply_qmt(const ExpQPSystem& sys, const RatMatrix& C) {
    if (C.rows() != sys.n || C.cols() != sys.n) throw Error("QMT matrix has wrong shape");
    const RatMatrix cinv = invert(C);
    ExpQPSystem out = sys;
    out.B = sys.B * C;
    out.A = detail::transform_coeffs(cinv, sys.A, sys.m);
    canonicalize(out);
    return out;
}

/// Applies the new-time transformation d(tau) = prefactor * prod x^beta * dt:
/// every exponent row shifts by -beta, A is divided by the prefactor, and a
/// nonzero lambda is absorbed as the extra quasimonomial row -beta with
/// coefficient column lambda/prefactor. Duplicate rows are merged; zero
/// exponent rows are kept (structural_normalize folds them into lambda).
inline QPSystem apply_monomial_ntt(const QPSystem& sys, const Coefficient& prefactor,
                                   const std::vector<Rational>& beta) {
    if (prefactor.is_zero()) throw ZeroPrefactorError();
    if (!prefactor.is_monomial())
        throw Error("new-time prefactor must be a single product term");
    if (beta.size() != sys.n) throw Error("beta has wrong length");

    QPSystem out = sys;
    const bool absorb = !sys.lambda_is_zero();
    out.m = sys.m + (absorb ? 1 : 0);
    out.B = RatMatrix(out.m, sys.n);
    for (std::size_t j = 0; j < sys.m; ++j)
        for (std::size_t k = 0; k < sys.n; ++k) out.B(j, k) = sys.B(j, k) - beta[k];
    out.A.assign(sys.n, std::vector<Coefficient>(out.m));
    for (std::size_t i = 0; i < sys.n; ++i)
        for (std::size_t j = 0; j < sys.m; ++j)
            out.A[i][j] = sys.A[i][j].divide_by_monomial(prefactor);
    if (absorb) {
        for (std::size_t k = 0; k < sys.n; ++k) out.B(sys.m, k) = -beta[k];
        for (std::size_t i = 0; i < sys.n; ++i)
            out.A[i][sys.m] = sys.lambda[i].divide_by_monomial(prefactor);
    }
    out.lambda.assign(sys.n, Coefficient());

    // merge duplicate rows and drop zero columns, but keep zero exponent rows
    std::map<std::vector<Rational>, std::size_t> seen;
    std::vector<std::size_t> keep;
    for (std::size_t j = 0; j < out.m; ++j) {
        auto [it, inserted] = seen.emplace(out.B.row(j), j);
        if (inserted) {
            keep.push_back(j);
        } else {
            for (std::size_t i = 0; i < sys.n; ++i) out.A[i][it->second] += out.A[i][j];
        }
    }
    detail::apply_monomial_order(out, keep);
    keep.clear();
    for (std::size_t j = 0; j < out.m; ++j) {
        bool zero_col = true;
        for (std::size_t i = 0; i < sys.n; ++i)
            if (!out.A[i][j].is_zero()) {
                zero_col = false;
                break;
            }
        if (!zero_col) keep.push_back(j);
    }
    detail::apply_monomial_order(out, keep);
    canonicalize(out);
    return out;
}

/// Scales variables by e^(-lambda_i t); the lambda terms move into the
/// per-quasimonomial exponents Gamma = B·lambda.
inline ExpQPSystem exp_scale(const QPSystem& sys) {
    ExpQPSystem out;
    out.n = sys.n;
    out.m = sys.m;
    out.var_names = sys.var_names;
    out.A = sys.A;
    out.B = sys.B;
    out.origin_lambda = sys.lambda;
    out.gamma.resize(sys.m);
    for (std::size_t j = 0; j < sys.m; ++j)
        for (std::size_t k = 0; k < sys.n; ++k)
            if (sys.B(j, k) != 0) out.gamma[j] += sys.B(j, k) * sys.lambda[k];
    return out;
}

/// Drops uniform exponential factors after d(tau) = e^(gamma t) dt; the
/// caller is responsible for gamma actually being the common value.
inline QPSystem strip_exp(const ExpQPSystem& sys) {
    QPSystem out;
    out.n = sys.n;
    out.m = sys.m;
    out.var_names = sys.var_names;
    out.A = sys.A;
    out.B = sys.B;
    out.lambda.assign(sys.n, Coefficient());
    return out;
}

// ---------------------------------------------------------------------------
// Parameter binding
// ---------------------------------------------------------------------------

using Bindings = std::map<std::string, Rational>;

/// Partial substitution; remaining parameters stay symbolic. Columns whose
/// coefficients vanish under the substitution are dropped.
inline QPSystem substitute_params(const QPSystem& sys, const Bindings& values) {
    QPSystem out = sys;
    for (auto& row : out.A)
        for (auto& c : row) c = c.substitute(values);
    for (auto& c : out.lambda) c = c.substitute(values);
    return structural_normalize(std::move(out));
}

inline ExpQPSystem substitute_params(const ExpQPSystem& sys, const Bindings& values) {
    ExpQPSystem out = sys;
    for (auto& row : out.A)
        for (auto& c : row) c = c.substitute(values);
    for (auto& c : out.gamma) c = c.substitute(values);
    for (auto& c : out.origin_lambda) c = c.substitute(values);
    return out;
}

namespace detail {

template <typename Sys>
void require_numeric(const Sys& sys) {
    for (const auto& row : sys.A)
        for (const auto& c : row)
            if (!c.is_constant()) throw UnboundParameterError(c.first_parameter());
    if constexpr (requires { sys.lambda; }) {
        for (const auto& c : sys.lambda)
            if (!c.is_constant()) throw UnboundParameterError(c.first_parameter());
    } else {
        for (const auto& c : sys.gamma)
            if (!c.is_constant()) throw UnboundParameterError(c.first_parameter());
        for (const auto& c : sys.origin_lambda)
            if (!c.is_constant()) throw UnboundParameterError(c.first_parameter());
    }
}

}  // namespace detail

/// Full binding: all coefficients collapse to rationals, or
/// UnboundParameterError names a missing parameter.
template <typename Sys>
Sys bind_params(const Sys& sys, const Bindings& values) {
    Sys out = substitute_params(sys, values);
    detail::require_numeric(out);
    return out;
}

inline TransformChain substitute_params(const TransformChain& chain, const Bindings& values) {
    TransformChain out = chain;
    for (TransformStep& step : out.steps) {
        if (auto* ntt = std::get_if<MonomialNttStep>(&step)) {
            ntt->prefactor = ntt->prefactor.substitute(values);
        } else if (auto* sc = std::get_if<ExpScalingStep>(&step)) {
            for (auto& c : sc->lambda) c = c.substitute(values);
        } else if (auto* en = std::get_if<ExpNttStep>(&step)) {
            en->gamma = en->gamma.substitute(values);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// State transport
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<double> exponent_map(const RatMatrix& e, const std::vector<double>& x) {
    std::vector<double> logs(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) logs[k] = std::log(x[k]);
    std::vector<double> out(e.rows());
    for (std::size_t i = 0; i < e.rows(); ++i) {
        // keep plain coordinate rows exact
        std::size_t nonzero = 0, last = 0;
        for (std::size_t k = 0; k < e.cols(); ++k)
            if (e(i, k) != 0) {
                ++nonzero;
                last = k;
            }
        if (nonzero == 0) {
            out[i] = 1.0;
            continue;
        }
        if (nonzero == 1 && e(i, last) == 1) {
            out[i] = x[last];
            continue;
        }
        double acc = 0;
        for (std::size_t k = 0; k < e.cols(); ++k)
            if (e(i, k) != 0) acc += to_double(e(i, k)) * logs[k];
        out[i] = std::exp(acc);
    }
    return out;
}

inline double numeric_value(const Coefficient& c, const char* what) {
    if (!c.is_constant())
        throw UnboundParameterError(c.first_parameter().empty() ? what : c.first_parameter());
    return to_double(c.constant_value());
}

}  // namespace detail

/// Transports a state through the chain's coordinate maps. Forward maps an
/// original-system state to the transformed system; inverse goes back. The
/// time argument is the original-system time of the sample (exponential
/// scalings always sit ahead of any reparametrization in engine-built
/// chains). New-time steps do not move states.
inline std::vector<double> map_state(const TransformChain& chain, Direction dir,
                                     std::vector<double> state, double t) {
    for (double v : state)
        if (!(v > 0)) throw NonPositiveStateError();
    auto apply = [&](const TransformStep& step, bool forward) {
        if (const auto* qmt = std::get_if<QmtStep>(&step)) {
            // x_old = y_new^C, so forward transport uses C^-1.
            const RatMatrix& e = forward ? invert(qmt->C) : qmt->C;
            state = detail::exponent_map(e, state);
        } else if (const auto* sc = std::get_if<ExpScalingStep>(&step)) {
            for (std::size_t i = 0; i < state.size(); ++i) {
                double li = detail::numeric_value(sc->lambda[i], "lambda");
                state[i] *= std::exp((forward ? -li : li) * t);
            }
        }
    };
    if (dir == Direction::Forward) {
        for (const auto& step : chain.steps) apply(step, true);
    } else {
        for (auto it = chain.steps.rbegin(); it != chain.steps.rend(); ++it) apply(*it, false);
    }
    return state;
}

}  // namespace qpr
