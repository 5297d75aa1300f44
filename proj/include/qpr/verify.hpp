#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "qpr/integrate.hpp"

namespace qpr {

/// Outcome of a trajectory round-trip check.
struct VerifyReport {
    double max_rel_error = 0;             // variables 2..n against the reduced flow
    std::vector<double> per_variable;     // relative deviation per variable
    double quadrature_error = 0;          // decoupled variable 1 against its quadrature
    double constants_drift = 0;           // kernel / pure-lambda constants
    std::size_t steps_taken = 0;
    double tol = 0;
    std::size_t samples = 0;
};

namespace detail {

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-30);
}

}  // namespace detail

/// Integrates the original system, transports states and times through the
/// chain, independently integrates the reduced system in its own time, and
/// reports the worst relative deviation over variables 2..n (kernel and
/// pure-lambda reductions instead report the drift of their constants).
/// All parameters must be bound.
inline VerifyReport verify_reduction(const QPSystem& sys, const ReductionResult& result,
                                     const std::vector<double>& x0, double t_end, double tol,
                                     std::size_t samples = 200) {
    VerifyReport report;
    report.tol = tol;
    report.samples = samples;

    const NumericQP numeric = to_numeric(sys);
    const Trajectory base = integrate(numeric, x0, t_end, tol, samples);
    report.steps_taken = base.steps_taken;

    const detail::CompiledChain compiled = detail::compile_chain(result.chain);
    std::vector<std::vector<double>> mapped(base.times.size());
    for (std::size_t k = 0; k < base.times.size(); ++k)
        mapped[k] = detail::map_forward(compiled, base.states[k], base.times[k],
                                        compiled.state_steps.size());

    if (result.method != ReductionMethod::QmtNtt) {
        // constants of motion: no reduced integration, just drift
        double drift = 0;
        report.per_variable.assign(sys.n, 0.0);
        for (const ConstantOfMotion& com : result.constants) {
            const double z0 = mapped.front()[com.var_index];
            double worst = 0;
            for (const auto& state : mapped)
                worst = std::max(worst, std::abs(state[com.var_index] - z0) /
                                            std::max(std::abs(z0), 1e-30));
            report.per_variable[com.var_index] = worst;
            drift = std::max(drift, worst);
        }
        report.constants_drift = drift;
        report.max_rel_error = drift;
        return report;
    }

    const std::vector<double> tau = transport_time(result.chain, base);
    for (std::size_t k = 1; k < tau.size(); ++k)
        if (!(tau[k] > tau[k - 1])) throw Error("new time is not strictly increasing");

    const NumericQP reduced = to_numeric(result.reduced_qp());
    const Trajectory rtraj = integrate_at(reduced, mapped.front(), tau, tol);
    report.steps_taken += rtraj.steps_taken;

    report.per_variable.assign(sys.n, 0.0);
    for (std::size_t i = 0; i < sys.n; ++i) {
        double worst = 0;
        for (std::size_t k = 0; k < tau.size(); ++k)
            worst = std::max(worst, detail::rel_err(rtraj.states[k][i], mapped[k][i]));
        report.per_variable[i] = worst;
    }
    report.quadrature_error = report.per_variable[0];
    for (std::size_t i = 1; i < sys.n; ++i)
        report.max_rel_error = std::max(report.max_rel_error, report.per_variable[i]);
    return report;
}

/// Local residual of the mapped trajectory against the reduced flow: restart
/// the reduced integration from each mapped sample and compare one sample
/// later. Bounded by a small multiple of tol when the mapped trajectory
/// solves the reduced ODE.
inline double reduced_flow_residual(const QPSystem& sys, const ReductionResult& result,
                                    const std::vector<double>& x0, double t_end, double tol,
                                    std::size_t samples = 50) {
    const NumericQP numeric = to_numeric(sys);
    const Trajectory base = integrate(numeric, x0, t_end, tol, samples);
    const detail::CompiledChain compiled = detail::compile_chain(result.chain);
    std::vector<std::vector<double>> mapped(base.times.size());
    for (std::size_t k = 0; k < base.times.size(); ++k)
        mapped[k] = detail::map_forward(compiled, base.states[k], base.times[k],
                                        compiled.state_steps.size());
    const std::vector<double> tau = transport_time(result.chain, base);
    const NumericQP reduced = to_numeric(result.reduced_qp());

    double worst = 0;
    for (std::size_t k = 0; k + 1 < tau.size(); ++k) {
        const Trajectory hop =
            integrate_at(reduced, mapped[k], {tau[k], tau[k + 1]}, tol);
        for (std::size_t i = 1; i < sys.n; ++i)
            worst = std::max(worst, detail::rel_err(hop.states.back()[i], mapped[k + 1][i]));
    }
    return worst;
}

}  // namespace qpr
