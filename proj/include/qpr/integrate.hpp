#pragma once

#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <vector>

#include "qpr/reduce.hpp"

namespace qpr {

/// Double-precision snapshot of a fully bound QPSystem.
struct NumericQP {
    std::size_t n = 0;
    std::vector<double> lambda;
    std::vector<std::vector<double>> A;  // n x m
    std::vector<std::vector<double>> B;  // m x n

    std::size_t monomials() const { return B.size(); }

    // dx_i/dt = x_i (lambda_i + sum_j A_ij prod_k x_k^B_jk); NaN outside the
    // positive orthant so trial steps there are rejected.
    void rhs(const std::vector<double>& x, std::vector<double>& dxdt) const {
        std::vector<double> logs(n);
        for (std::size_t k = 0; k < n; ++k) {
            if (!(x[k] > 0.0)) {
                dxdt.assign(n, std::numeric_limits<double>::quiet_NaN());
                return;
            }
            logs[k] = std::log(x[k]);
        }
        std::vector<double> mono(B.size());
        for (std::size_t j = 0; j < B.size(); ++j) {
            double acc = 0;
            for (std::size_t k = 0; k < n; ++k) acc += B[j][k] * logs[k];
            mono[j] = std::exp(acc);
        }
        for (std::size_t i = 0; i < n; ++i) {
            double s = lambda[i];
            for (std::size_t j = 0; j < mono.size(); ++j) s += A[i][j] * mono[j];
            dxdt[i] = x[i] * s;
        }
    }
};

inline NumericQP to_numeric(const QPSystem& sys, const Bindings& values = {}) {
    const QPSystem bound = bind_params(sys, values);
    NumericQP out;
    out.n = bound.n;
    out.lambda.resize(bound.n);
    for (std::size_t i = 0; i < bound.n; ++i)
        out.lambda[i] = to_double(bound.lambda[i].constant_value());
    out.A.assign(bound.n, std::vector<double>(bound.m));
    for (std::size_t i = 0; i < bound.n; ++i)
        for (std::size_t j = 0; j < bound.m; ++j)
            out.A[i][j] = to_double(bound.A[i][j].constant_value());
    out.B.assign(bound.m, std::vector<double>(bound.n));
    for (std::size_t j = 0; j < bound.m; ++j)
        for (std::size_t k = 0; k < bound.n; ++k) out.B[j][k] = to_double(bound.B(j, k));
    return out;
}

/// Sampled solution curve in the positive orthant.
struct Trajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> states;
    std::string time_label = "t";
    std::shared_ptr<const NumericQP> system;  // what produced it (for transport)
    double tol = 1e-10;
    std::size_t steps_taken = 0;
};

namespace detail {

// Adaptive dopri5 with dense output sampled at the given increasing times.
// The first `positive_dims` components must stay positive.
template <typename Rhs>
std::pair<std::vector<std::vector<double>>, std::size_t> integrate_dense(
    Rhs&& rhs, std::vector<double> x0, const std::vector<double>& sample_times, double tol,
    std::size_t positive_dims) {
    namespace ode = boost::numeric::odeint;
    using state_type = std::vector<double>;

    if (sample_times.empty()) return {{}, 0};
    for (std::size_t i = 0; i < positive_dims; ++i)
        if (!(x0[i] > 0.0)) throw LeftPositiveOrthantError(sample_times.front());
    const double t0 = sample_times.front();
    const double t_end = sample_times.back();

    std::vector<std::vector<double>> samples;
    samples.reserve(sample_times.size());
    samples.push_back(x0);
    if (sample_times.size() == 1) return {samples, 0};

    auto system = [&rhs](const state_type& x, state_type& dxdt, double t) { rhs(x, dxdt, t); };
    auto stepper =
        ode::make_dense_output(tol * 1e-4, tol, ode::runge_kutta_dopri5<state_type>());
    stepper.initialize(x0, t0, (t_end - t0) / 1000.0);

    std::size_t next_sample = 1;
    std::size_t steps = 0;
    state_type probe(x0.size());
    while (next_sample < sample_times.size()) {
        double t_before = stepper.current_time();
        try {
            stepper.do_step(system);
        } catch (const Error&) {
            throw;
        } catch (const std::runtime_error& e) {
            throw StepSizeUnderflowError(t_before, e.what());
        }
        ++steps;
        if (steps > 5000000) throw StepSizeUnderflowError(stepper.current_time(), "step budget exhausted");
        const double t_now = stepper.current_time();
        for (double v : stepper.current_state())
            if (!std::isfinite(v)) throw StepSizeUnderflowError(t_now, "solution diverged");
        for (std::size_t i = 0; i < positive_dims; ++i)
            if (!(stepper.current_state()[i] > 0.0)) throw LeftPositiveOrthantError(t_now);
        if (std::abs(stepper.current_time_step()) <
            1e-15 * std::max(1.0, std::abs(t_now)))
            throw StepSizeUnderflowError(t_now);
        while (next_sample < sample_times.size() && sample_times[next_sample] <= t_now) {
            stepper.calc_state(sample_times[next_sample], probe);
            for (std::size_t i = 0; i < positive_dims; ++i)
                if (!(probe[i] > 0.0))
                    throw LeftPositiveOrthantError(sample_times[next_sample]);
            samples.push_back(probe);
            ++next_sample;
        }
    }
    return {samples, steps};
}

inline std::vector<double> linspace(double a, double b, std::size_t count) {
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i)
        out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1);
    out.back() = b;
    return out;
}

}  // namespace detail

/// Integrates from t = 0 with local relative error control at `tol`,
/// sampling a uniform grid (default 200 points). Aborts when the trajectory
/// leaves the positive orthant or the step size underflows.
inline Trajectory integrate(const NumericQP& sys, const std::vector<double>& x0, double t_end,
                            double tol, std::size_t samples = 200) {
    if (x0.size() != sys.n) throw Error("initial state has wrong dimension");
    if (!(t_end > 0)) throw Error("t_end must be positive");
    Trajectory traj;
    traj.times = detail::linspace(0.0, t_end, samples);
    auto rhs = [&sys](const std::vector<double>& x, std::vector<double>& dxdt, double) {
        sys.rhs(x, dxdt);
    };
    auto [states, steps] = detail::integrate_dense(rhs, x0, traj.times, tol, sys.n);
    traj.states = std::move(states);
    traj.steps_taken = steps;
    traj.tol = tol;
    traj.system = std::make_shared<NumericQP>(sys);
    return traj;
}

/// Same, but sampling at caller-provided increasing times; integration
/// starts at sample_times.front() from the given state.
inline Trajectory integrate_at(const NumericQP& sys, const std::vector<double>& x0,
                               const std::vector<double>& sample_times, double tol) {
    if (x0.size() != sys.n) throw Error("initial state has wrong dimension");
    Trajectory traj;
    traj.times = sample_times;
    auto rhs = [&sys](const std::vector<double>& x, std::vector<double>& dxdt, double) {
        sys.rhs(x, dxdt);
    };
    auto [states, steps] = detail::integrate_dense(rhs, x0, sample_times, tol, sys.n);
    traj.states = std::move(states);
    traj.steps_taken = steps;
    traj.tol = tol;
    traj.system = std::make_shared<NumericQP>(sys);
    return traj;
}

// ---------------------------------------------------------------------------
// Time transport
// ---------------------------------------------------------------------------

namespace detail {

struct CompiledStateStep {
    bool is_qmt = false;
    std::vector<std::vector<double>> exponents;  // C^-1 for forward transport
    std::vector<double> lambda;
};

struct CompiledNtt {
    bool is_exp = false;
    double gamma = 0;
    double prefactor = 1;
    std::vector<double> beta;
    std::size_t state_steps_before = 0;
};

struct CompiledChain {
    std::vector<CompiledStateStep> state_steps;
    std::vector<CompiledNtt> ntts;
};

inline CompiledChain compile_chain(const TransformChain& chain) {
    CompiledChain out;
    for (const TransformStep& step : chain.steps) {
        if (const auto* qmt = std::get_if<QmtStep>(&step)) {
            CompiledStateStep s;
            s.is_qmt = true;
            const RatMatrix cinv = invert(qmt->C);
            s.exponents.assign(cinv.rows(), std::vector<double>(cinv.cols()));
            for (std::size_t i = 0; i < cinv.rows(); ++i)
                for (std::size_t j = 0; j < cinv.cols(); ++j)
                    s.exponents[i][j] = to_double(cinv(i, j));
            out.state_steps.push_back(std::move(s));
        } else if (const auto* sc = std::get_if<ExpScalingStep>(&step)) {
            CompiledStateStep s;
            for (const Coefficient& c : sc->lambda)
                s.lambda.push_back(to_double(c.evaluate({})));
            out.state_steps.push_back(std::move(s));
        } else if (const auto* mn = std::get_if<MonomialNttStep>(&step)) {
            CompiledNtt n;
            n.prefactor = to_double(mn->prefactor.evaluate({}));
            if (!(n.prefactor > 0)) throw Error("new-time prefactor must bind positive");
            for (const Rational& b : mn->beta) n.beta.push_back(to_double(b));
            n.state_steps_before = out.state_steps.size();
            out.ntts.push_back(std::move(n));
        } else if (const auto* en = std::get_if<ExpNttStep>(&step)) {
            CompiledNtt n;
            n.is_exp = true;
            n.gamma = to_double(en->gamma.evaluate({}));
            n.state_steps_before = out.state_steps.size();
            out.ntts.push_back(std::move(n));
        }
    }
    return out;
}

inline std::vector<double> map_forward(const CompiledChain& chain, std::vector<double> x,
                                       double t, std::size_t upto_state_steps) {
    for (std::size_t s = 0; s < upto_state_steps && s < chain.state_steps.size(); ++s) {
        const CompiledStateStep& step = chain.state_steps[s];
        if (step.is_qmt) {
            std::vector<double> logs(x.size());
            for (std::size_t k = 0; k < x.size(); ++k) logs[k] = std::log(x[k]);
            std::vector<double> y(step.exponents.size());
            for (std::size_t i = 0; i < y.size(); ++i) {
                std::size_t nonzero = 0, last = 0;
                for (std::size_t k = 0; k < x.size(); ++k)
                    if (step.exponents[i][k] != 0) {
                        ++nonzero;
                        last = k;
                    }
                if (nonzero == 1 && step.exponents[i][last] == 1.0) {
                    y[i] = x[last];
                    continue;
                }
                double acc = 0;
                for (std::size_t k = 0; k < x.size(); ++k)
                    acc += step.exponents[i][k] * logs[k];
                y[i] = nonzero == 0 ? 1.0 : std::exp(acc);
            }
            x = std::move(y);
        } else {
            for (std::size_t i = 0; i < x.size(); ++i) x[i] *= std::exp(-step.lambda[i] * t);
        }
    }
    return x;
}

}  // namespace detail

/// The new-time values tau(t) at the base trajectory's sample times, with
/// tau(0) = 0. A lone exponential reparametrization uses the closed form
/// (e^(gamma t) - 1)/gamma; monomial reparametrizations integrate the
/// original system augmented with d(tau)/dt = xi(x).
inline std::vector<double> transport_time(const TransformChain& chain, const Trajectory& base) {
    const detail::CompiledChain compiled = detail::compile_chain(chain);
    if (compiled.ntts.empty()) return base.times;

    const bool exp_only =
        compiled.ntts.size() == 1 && compiled.ntts.front().is_exp;
    if (exp_only) {
        const double gamma = compiled.ntts.front().gamma;
        std::vector<double> tau(base.times.size());
        for (std::size_t k = 0; k < base.times.size(); ++k)
            tau[k] = gamma == 0 ? base.times[k] : (std::expm1(gamma * base.times[k])) / gamma;
        return tau;
    }

    if (!base.system) throw Error("trajectory carries no system; cannot transport time");
    const NumericQP& sys = *base.system;
    const std::size_t n = sys.n;
    const std::size_t kcount = compiled.ntts.size();

    auto rhs = [&](const std::vector<double>& z, std::vector<double>& dzdt, double t) {
        std::vector<double> x(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(n));
        std::vector<double> dx(n);
        sys.rhs(x, dx);
        for (std::size_t i = 0; i < n; ++i) dzdt[i] = dx[i];
        double rate = 1.0;  // d(tau_j)/dt accumulates across stacked reparametrizations
        for (std::size_t j = 0; j < kcount; ++j) {
            const detail::CompiledNtt& ntt = compiled.ntts[j];
            const double prev_time = j == 0 ? t : z[n + j - 1];
            double xi;
            if (ntt.is_exp) {
                xi = std::exp(ntt.gamma * prev_time);
            } else {
                const std::vector<double> y =
                    detail::map_forward(compiled, x, t, ntt.state_steps_before);
                double acc = 0;
                for (std::size_t k = 0; k < y.size(); ++k)
                    if (ntt.beta[k] != 0) acc += ntt.beta[k] * std::log(y[k]);
                xi = ntt.prefactor * std::exp(acc);
            }
            rate *= xi;
            dzdt[n + j] = rate;
        }
    };

    std::vector<double> z0 = base.states.front();
    z0.resize(n + kcount, 0.0);
    auto [samples, steps] = detail::integrate_dense(rhs, z0, base.times, base.tol, n);
    std::vector<double> tau(base.times.size());
    for (std::size_t k = 0; k < samples.size(); ++k) tau[k] = samples[k].back();
    return tau;
}

}  // namespace qpr
