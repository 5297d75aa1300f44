#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qpr/parse.hpp"
#include "qpr/transform.hpp"

namespace qpr {

enum class CaseLabel { CaseI, CaseII, CaseIII };

inline std::string to_string(CaseLabel c) {
    switch (c) {
        case CaseLabel::CaseI: return "CaseI";
        case CaseLabel::CaseII: return "CaseII";
        case CaseLabel::CaseIII: return "CaseIII";
    }
    return "?";
}

/// How the target exponent matrix B' (all-ones first column) is chosen.
struct BPrimePolicy {
    enum class Kind {
        Completion,   // solve B·c1 = 1, complete with standard basis columns
        CvmIdentity,  // B'_{ij} = delta_{ij} for j >= 2
        Explicit,     // caller-supplied C
    };
    Kind kind = Kind::Completion;
    RatMatrix C;                      // Explicit only
    Coefficient prefactor = Coefficient(1);  // new-time prefactor

    static BPrimePolicy completion() { return {}; }
    static BPrimePolicy cvm() { return {Kind::CvmIdentity, {}, Coefficient(1)}; }
    static BPrimePolicy explicit_qmt(RatMatrix c, Coefficient prefactor = Coefficient(1)) {
        return {Kind::Explicit, std::move(c), std::move(prefactor)};
    }

    std::string name() const {
        switch (kind) {
            case Kind::Completion: return "completion";
            case Kind::CvmIdentity: return "cvm";
            case Kind::Explicit: return "explicit";
        }
        return "?";
    }
};

enum class Satisfiability { Yes, No, NeedsBinding };

inline std::string to_string(Satisfiability s) {
    switch (s) {
        case Satisfiability::Yes: return "yes";
        case Satisfiability::No: return "no";
        case Satisfiability::NeedsBinding: return "needs-binding";
    }
    return "?";
}

/// The linear forms (in parameters) that must vanish for the exponential
/// factors to share a common rate; derived from the differences
/// Gamma_j - Gamma_1.
struct ConditionSet {
    std::vector<Coefficient> equations;
    Satisfiability satisfiable = Satisfiability::Yes;
};

struct NotReducibleError : Error {
    std::optional<std::size_t> btilde_rank;
    std::optional<ConditionSet> conditions;
    explicit NotReducibleError(std::size_t rank_witness)
        : Error("not reducible: rank of the ones-augmented exponent matrix is " +
                std::to_string(rank_witness)),
          btilde_rank(rank_witness) {}
    explicit NotReducibleError(ConditionSet cs)
        : Error("not reducible: exponential rates admit no common value"),
          conditions(std::move(cs)) {}
};

struct ConditionsUnsatisfiedError : Error {
    ConditionSet conditions;
    explicit ConditionsUnsatisfiedError(ConditionSet cs)
        : Error(cs.satisfiable == Satisfiability::NeedsBinding
                    ? "uniform-rate conditions need parameter bindings"
                    : "uniform-rate conditions are unsatisfiable"),
          conditions(std::move(cs)) {}
};

enum class ReductionMethod { QmtNtt, Kernel, PureLambda };

inline std::string to_string(ReductionMethod m) {
    switch (m) {
        case ReductionMethod::QmtNtt: return "qmt-ntt";
        case ReductionMethod::Kernel: return "kernel";
        case ReductionMethod::PureLambda: return "pure-lambda";
    }
    return "?";
}

/// A transformed variable that is constant along every trajectory:
/// z = prod_k x_k^exponents_k * e^(-rate*t).
struct ConstantOfMotion {
    std::size_t var_index;
    std::vector<Rational> exponents;
    Coefficient rate;
    std::string text;
};

struct ReductionResult {
    CaseLabel case_label = CaseLabel::CaseI;
    ReductionMethod method = ReductionMethod::QmtNtt;
    std::variant<QPSystem, ExpQPSystem> reduced;
    std::size_t decoupled_index = 0;  // always the first variable
    TransformChain chain;
    std::string quadrature_note;
    std::vector<ConstantOfMotion> constants;

    const QPSystem& reduced_qp() const { return std::get<QPSystem>(reduced); }
    const ExpQPSystem& reduced_exp() const { return std::get<ExpQPSystem>(reduced); }
    bool reduced_is_exp() const { return std::holds_alternative<ExpQPSystem>(reduced); }
};

// ---------------------------------------------------------------------------
// Classification and reducibility
// ---------------------------------------------------------------------------

/// Case label for a normalized system. A parametric lambda counts as nonzero
/// until it is bound to zero.
inline CaseLabel classify(const QPSystem& sys) {
    if (!sys.lambda_is_zero()) return CaseLabel::CaseIII;
    return sys.m == sys.n ? CaseLabel::CaseI : CaseLabel::CaseII;
}

namespace detail {

// Rational coefficient matrix of linear forms over their parameter atoms;
// rows are forms, columns are atoms of the given basis.
inline RatMatrix atom_matrix(const std::vector<Coefficient>& forms,
                             const std::vector<ParamAtom>& basis) {
    RatMatrix m(forms.size(), basis.size());
    for (std::size_t i = 0; i < forms.size(); ++i)
        for (const auto& [atom, w] : forms[i].terms())
            for (std::size_t j = 0; j < basis.size(); ++j)
                if (basis[j] == atom) {
                    m(i, j) = w;
                    break;
                }
    return m;
}

inline std::vector<ParamAtom> atom_basis(const std::vector<const Coefficient*>& coeffs) {
    std::set<ParamAtom> atoms;
    for (const Coefficient* c : coeffs)
        for (const auto& [atom, w] : c->terms()) atoms.insert(atom);
    return {atoms.begin(), atoms.end()};
}

// True when `form` is a rational linear combination of `basis_forms`.
inline bool in_row_space(const RatMatrix& basis_rows, const std::vector<Rational>& row) {
    RatMatrix stacked(basis_rows.rows() + 1, basis_rows.cols());
    for (std::size_t i = 0; i < basis_rows.rows(); ++i) stacked.set_row(i, basis_rows.row(i));
    stacked.set_row(basis_rows.rows(), row);
    return rank(stacked) == rank(basis_rows);
}

}  // namespace detail

/// Pairwise uniformity conditions Gamma_j = Gamma_1 as linear forms that must
/// vanish. Verdicts: yes (all identically zero), no (a nonzero constant form,
/// or every solution forces lambda = 0 so only the degenerate non-exponential
/// system remains), needs-binding otherwise.
inline ConditionSet gamma_conditions(const ExpQPSystem& sys) {
    ConditionSet out;
    for (std::size_t j = 1; j < sys.m; ++j) {
        Coefficient diff = sys.gamma[j] - sys.gamma[0];
        if (!diff.is_zero()) out.equations.push_back(std::move(diff));
    }
    if (out.equations.empty()) {
        out.satisfiable = Satisfiability::Yes;
        return out;
    }
    for (const Coefficient& eq : out.equations) {
        if (eq.is_constant()) {  // nonzero constant: numerically contradictory
            out.satisfiable = Satisfiability::No;
            return out;
        }
    }
    // If the condition forms span every component of lambda, any solution
    // zeroes lambda out entirely and the exponential case degenerates.
    std::vector<const Coefficient*> all;
    for (const auto& c : out.equations) all.push_back(&c);
    for (const auto& c : sys.origin_lambda) all.push_back(&c);
    const std::vector<ParamAtom> basis = detail::atom_basis(all);
    const RatMatrix cond_rows = detail::atom_matrix(out.equations, basis);
    bool lambda_forced_zero = true;
    for (const Coefficient& li : sys.origin_lambda) {
        if (li.is_zero()) continue;
        const RatMatrix row = detail::atom_matrix({li}, basis);
        if (!detail::in_row_space(cond_rows, row.row(0))) {
            lambda_forced_zero = false;
            break;
        }
    }
    out.satisfiable = lambda_forced_zero ? Satisfiability::No : Satisfiability::NeedsBinding;
    return out;
}

// ---------------------------------------------------------------------------
// QMT construction
// ---------------------------------------------------------------------------

/// Builds the invertible C with (B·C) having an all-ones first column, per
/// the policy. Completion solves B·c1 = 1 and pads with standard basis
/// columns; it succeeds exactly when rank(augment_ones(B)) = rank(B) = n.
inline RatMatrix build_qmt(const QPSystem& sys, const BPrimePolicy& policy) {
    const std::size_t n = sys.n, m = sys.m;
    switch (policy.kind) {
        case BPrimePolicy::Kind::Explicit: {
            const RatMatrix& c = policy.C;
            if (c.rows() != n || c.cols() != n)
                throw PolicyInfeasibleError("explicit QMT matrix has wrong shape");
            if (!is_invertible(c)) throw PolicyInfeasibleError("explicit QMT matrix is singular");
            const RatMatrix bp = sys.B * c;
            for (std::size_t j = 0; j < m; ++j)
                if (bp(j, 0) != 1)
                    throw PolicyInfeasibleError(
                        "explicit QMT does not produce an all-ones first column");
            return c;
        }
        case BPrimePolicy::Kind::CvmIdentity: {
            RatMatrix bp(m, n);
            for (std::size_t j = 0; j < m; ++j) bp(j, 0) = 1;
            for (std::size_t j = 1; j < n; ++j) bp(j, j) = 1;
            RatMatrix c;
            try {
                c = solve_right(sys.B, bp);
            } catch (const InconsistentColumnError& e) {
                throw PolicyInfeasibleError("CVM target column " + std::to_string(e.column + 1) +
                                            " lies outside the column space of B");
            }
            if (!is_invertible(c))
                throw PolicyInfeasibleError("CVM target produces a singular QMT matrix");
            return c;
        }
        case BPrimePolicy::Kind::Completion: {
            if (m > n) {
                const std::size_t rt = rank(augment_ones(sys.B));
                if (rt == n + 1) throw NotReducibleError(rt);
            }
            RatMatrix ones(m, 1);
            for (std::size_t j = 0; j < m; ++j) ones(j, 0) = 1;
            const RatMatrix c1 = solve_right(sys.B, ones);  // unique, rank(B) = n
            std::size_t pivot = n;
            for (std::size_t i = 0; i < n; ++i)
                if (c1(i, 0) != 0) {
                    pivot = i;
                    break;
                }
            RatMatrix c(n, n);
            for (std::size_t i = 0; i < n; ++i) c(i, 0) = c1(i, 0);
            std::size_t col = 1;
            for (std::size_t k = 0; k < n; ++k) {
                if (k == pivot) continue;
                c(k, col++) = 1;
            }
            return c;  // det = ±c1[pivot] != 0
        }
    }
    throw Error("unreachable");
}

// ---------------------------------------------------------------------------
// Reduction algorithms
// ---------------------------------------------------------------------------

namespace detail {

inline std::string quadrature_text(const QPSystem& reduced) {
    if (reduced.n == 1)
        return "d" + reduced.var_names[0] + "/dtau = " +
               [&] {
                   std::string line = render(reduced);
                   std::size_t eq = line.find("' = ");
                   std::size_t nl = line.find('\n', eq);
                   return line.substr(eq + 4, nl - eq - 4);
               }() +
               " is a pure quadrature (no remaining equations)";
    std::string body;
    if (!reduced.lambda[0].is_zero()) body += reduced.lambda[0].to_string();
    for (std::size_t j = 0; j < reduced.m; ++j) {
        if (reduced.A[0][j].is_zero()) continue;
        if (!body.empty()) body += " + ";
        body += "(" + reduced.A[0][j].to_string() + ")*";
        bool any = false;
        for (std::size_t k = 0; k < reduced.n; ++k) {
            if (reduced.B(j, k) == 0) continue;
            if (any) body += "*";
            body += reduced.var_names[k];
            if (reduced.B(j, k) != 1) body += render_exponent(reduced.B(j, k));
            any = true;
        }
        if (!any) body += "1";
    }
    const std::string v1 = reduced.var_names[0];
    return "d" + v1 + "/dtau = " + v1 + "*(" + body +
           ") integrates by quadrature once the remaining variables are known";
}

}  // namespace detail

/// Case I/II reduction: QMT to an all-ones first exponent column, then the
/// new time d(tau) = prefactor * y1 * dt. The first variable of the result
/// appears in no other equation.
inline ReductionResult reduce_lambda_zero(const QPSystem& input, const BPrimePolicy& policy) {
    const QPSystem sys = normalize(input);
    if (!sys.lambda_is_zero())
        throw WrongCaseError("reduce_lambda_zero requires lambda = 0 (Case I/II)");
    if (sys.m == 0) throw WrongCaseError("system has no quasimonomials");

    const RatMatrix c = build_qmt(sys, policy);
    const QPSystem transformed = apply_qmt(sys, c);
    std::vector<Rational> beta(sys.n, Rational(0));
    beta[0] = 1;
    const QPSystem reduced =
        structural_normalize(apply_monomial_ntt(transformed, policy.prefactor, beta));

    ReductionResult out;
    out.case_label = classify(sys);
    out.method = ReductionMethod::QmtNtt;
    out.reduced = reduced;
    out.chain.steps.push_back(QmtStep{c});
    out.chain.steps.push_back(MonomialNttStep{policy.prefactor, beta});
    out.quadrature_note = detail::quadrature_text(reduced);
    return out;
}

namespace detail {

// Stacks one rational matrix per parameter atom of A side by side; a rational
// row vector annihilates the parametric A iff it annihilates the stack.
inline RatMatrix atom_expansion(const std::vector<std::vector<Coefficient>>& a, std::size_t m) {
    const std::size_t n = a.size();
    std::vector<const Coefficient*> all;
    for (const auto& row : a)
        for (const auto& c : row) all.push_back(&c);
    const std::vector<ParamAtom> basis = atom_basis(all);
    RatMatrix out(n, m * basis.size());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
            for (const auto& [atom, w] : a[i][j].terms())
                for (std::size_t b = 0; b < basis.size(); ++b)
                    if (basis[b] == atom) {
                        out(i, b * m + j) = w;
                        break;
                    }
    return out;
}

}  // namespace detail

/// Structural rank of a (possibly parametric) coefficient matrix over the
/// rationals: n minus the dimension of its rational left null space.
inline std::size_t coefficient_rank(const std::vector<std::vector<Coefficient>>& a,
                                    std::size_t m) {
    if (a.empty()) return 0;
    const RatMatrix expanded = detail::atom_expansion(a, m);
    return rank(expanded);
}

/// Riccati-style decoupling: choose C^-1 rows in the left null space of A so
/// the corresponding transformed variables obey dz/dt = 0. The first rows of
/// C^-1 are a standard-basis completion (preferring e1); the last
/// n - rank(A) rows are the sign-normalized kernel basis and become the
/// constants of motion z_i = prod_k x_k^{C^-1_{ik}} * e^{-(C^-1 lambda)_i t}.
inline ReductionResult kernel_decoupling(const ExpQPSystem& esys) {
    const std::size_t n = esys.n;
    const RatMatrix expanded = detail::atom_expansion(esys.A, esys.m);
    const RatMatrix kernel = left_kernel(expanded);
    const std::size_t d = kernel.rows();
    if (d == 0) throw FullRankError();

    // greedy completion with standard basis vectors, e1 first
    std::vector<std::vector<Rational>> rows;
    for (std::size_t i = 0; i < d; ++i) rows.push_back(kernel.row(i));
    std::vector<std::vector<Rational>> completion;
    auto stack_rank = [&](const std::vector<std::vector<Rational>>& extra) {
        RatMatrix s(rows.size() + extra.size(), n);
        for (std::size_t i = 0; i < rows.size(); ++i) s.set_row(i, rows[i]);
        for (std::size_t i = 0; i < extra.size(); ++i) s.set_row(rows.size() + i, extra[i]);
        return rank(s);
    };
    for (std::size_t k = 0; k < n && completion.size() < n - d; ++k) {
        std::vector<Rational> e(n, Rational(0));
        e[k] = 1;
        auto trial = completion;
        trial.push_back(e);
        if (stack_rank(trial) == rows.size() + trial.size()) completion = std::move(trial);
    }
    RatMatrix cinv(n, n);
    for (std::size_t i = 0; i < completion.size(); ++i) cinv.set_row(i, completion[i]);
    for (std::size_t i = 0; i < d; ++i) cinv.set_row(n - d + i, kernel.row(i));
    const RatMatrix c = invert(cinv);

    ExpQPSystem reduced = apply_qmt(esys, c);

    ReductionResult out;
    const bool scaled = !all_zero(esys.origin_lambda);
    out.case_label = scaled ? CaseLabel::CaseIII
                            : (esys.m == n ? CaseLabel::CaseI : CaseLabel::CaseII);
    out.method = ReductionMethod::Kernel;
    out.reduced = reduced;
    if (scaled) out.chain.steps.push_back(ExpScalingStep{esys.origin_lambda});
    out.chain.steps.push_back(QmtStep{c});
    out.quadrature_note =
        "z1 obeys a nonautonomous quadrature in the original time; variables " +
        std::to_string(n - d + 1) + ".." + std::to_string(n) + " are constant";

    const std::vector<Coefficient> rates = detail::mat_apply(cinv, esys.origin_lambda);
    for (std::size_t i = n - d; i < n; ++i) {
        ConstantOfMotion com;
        com.var_index = i;
        com.exponents = cinv.row(i);
        com.rate = rates[i];
        std::string text;
        for (std::size_t k = 0; k < n; ++k) {
            if (com.exponents[k] == 0) continue;
            if (!text.empty()) text += "*";
            text += esys.var_names[k];
            if (com.exponents[k] != 1) text += detail::render_exponent(com.exponents[k]);
        }
        if (!com.rate.is_zero()) text += " * exp(-(" + com.rate.to_string() + ")*t)";
        com.text = std::move(text);
        out.constants.push_back(std::move(com));
    }
    return out;
}

/// Case III: scale out lambda, require a common exponential rate gamma, pass
/// to the new time d(tau) = e^(gamma t) dt, then reduce as Case I/II. A
/// system with no quasimonomials at all is solved outright by the scaling.
inline ReductionResult reduce_case3(const QPSystem& input, const BPrimePolicy& policy) {
    const QPSystem sys = normalize(input);
    if (sys.lambda_is_zero())
        throw WrongCaseError("reduce_case3 requires lambda != 0 (Case III)");

    const ExpQPSystem esys = exp_scale(sys);
    if (esys.m == 0) {
        // pure-lambda system: y_i = e^(-lambda_i t) x_i are all constant
        ReductionResult out;
        out.case_label = CaseLabel::CaseIII;
        out.method = ReductionMethod::PureLambda;
        QPSystem reduced = strip_exp(esys);
        out.reduced = reduced;
        out.chain.steps.push_back(ExpScalingStep{sys.lambda});
        out.quadrature_note =
            "no quasimonomials: every scaled variable is constant, x_i(t) = x_i(0)*e^(lambda_i t)";
        for (std::size_t i = 0; i < sys.n; ++i) {
            ConstantOfMotion com;
            com.var_index = i;
            com.exponents.assign(sys.n, Rational(0));
            com.exponents[i] = 1;
            com.rate = sys.lambda[i];
            com.text = sys.var_names[i] + " * exp(-(" + com.rate.to_string() + ")*t)";
            out.constants.push_back(std::move(com));
        }
        return out;
    }

    const ConditionSet conds = gamma_conditions(esys);
    if (conds.satisfiable != Satisfiability::Yes) throw ConditionsUnsatisfiedError(conds);
    const Coefficient gamma = esys.gamma.empty() ? Coefficient() : esys.gamma[0];

    ReductionResult inner = reduce_lambda_zero(strip_exp(esys), policy);
    ReductionResult out;
    out.case_label = CaseLabel::CaseIII;
    out.method = ReductionMethod::QmtNtt;
    out.reduced = std::move(inner.reduced);
    out.chain.steps.push_back(ExpScalingStep{sys.lambda});
    out.chain.steps.push_back(ExpNttStep{gamma});
    for (auto& step : inner.chain.steps) out.chain.steps.push_back(std::move(step));
    out.quadrature_note = inner.quadrature_note;
    return out;
}

/// Structural decoupling check: no equation past the first may involve the
/// first variable (kernel results: the constant rows of A' must vanish).
inline bool check_decoupled(const ReductionResult& r) {
    if (r.reduced_is_exp()) {
        const ExpQPSystem& sys = r.reduced_exp();
        for (const ConstantOfMotion& com : r.constants)
            for (std::size_t j = 0; j < sys.m; ++j)
                if (!sys.A[com.var_index][j].is_zero()) return false;
        return true;
    }
    const QPSystem& sys = r.reduced_qp();
    for (std::size_t j = 0; j < sys.m; ++j) {
        bool used_past_first = false;
        for (std::size_t i = 1; i < sys.n; ++i)
            if (!sys.A[i][j].is_zero()) {
                used_past_first = true;
                break;
            }
        if (used_past_first && sys.B(j, 0) != 0) return false;
    }
    return true;
}

/// Dispatch over the three cases with the kernel fallback; throws
/// NotReducibleError carrying the strongest witness otherwise.
inline ReductionResult reduce(const QPSystem& input,
                              const BPrimePolicy& policy = BPrimePolicy::completion()) {
    const QPSystem sys = normalize(input);
    ReductionResult out;
    switch (classify(sys)) {
        case CaseLabel::CaseI:
        case CaseLabel::CaseII:
            out = reduce_lambda_zero(sys, policy);
            break;
        case CaseLabel::CaseIII:
            try {
                out = reduce_case3(sys, policy);
            } catch (const ConditionsUnsatisfiedError& e) {
                if (coefficient_rank(sys.A, sys.m) < sys.n)
                    out = kernel_decoupling(exp_scale(sys));
                else
                    throw NotReducibleError(e.conditions);
            }
            break;
    }
    if (!check_decoupled(out)) throw Error("internal: reduction failed the decoupling check");
    return out;
}

/// Binds the numeric payload of a reduction result (reduced system and chain).
inline ReductionResult bind_params(const ReductionResult& r, const Bindings& values) {
    ReductionResult out = r;
    if (r.reduced_is_exp())
        out.reduced = bind_params(r.reduced_exp(), values);
    else
        out.reduced = bind_params(r.reduced_qp(), values);
    out.chain = substitute_params(r.chain, values);
    for (auto& com : out.constants) com.rate = com.rate.substitute(values);
    return out;
}

}  // namespace qpr
