#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qpr/reduce.hpp"
#include "qpr/verify.hpp"

namespace qpr {

using Json = nlohmann::json;  // std::map-backed: keys serialize sorted

/// FNV-1a 64-bit content digest, hex encoded.
inline std::string fnv1a64(std::string_view data) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline Json to_json(const Rational& r) { return to_string(r); }

inline Json to_json(const RatMatrix& m) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(to_string(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Json to_json(const Coefficient& c) { return c.to_string(); }

inline Json to_json(const std::vector<Coefficient>& v) {
    Json out = Json::array();
    for (const auto& c : v) out.push_back(to_json(c));
    return out;
}

inline Json to_json(const QPSystem& sys) {
    Json a = Json::array();
    for (const auto& row : sys.A) {
        Json jrow = Json::array();
        for (const auto& c : row) jrow.push_back(to_json(c));
        a.push_back(std::move(jrow));
    }
    return Json{{"n", sys.n},
                {"m", sys.m},
                {"variables", sys.var_names},
                {"parameters", sys.parameters()},
                {"A", std::move(a)},
                {"B", to_json(sys.B)},
                {"lambda", to_json(sys.lambda)}};
}

inline Json to_json(const ExpQPSystem& sys) {
    Json a = Json::array();
    for (const auto& row : sys.A) {
        Json jrow = Json::array();
        for (const auto& c : row) jrow.push_back(to_json(c));
        a.push_back(std::move(jrow));
    }
    return Json{{"n", sys.n},
                {"m", sys.m},
                {"variables", sys.var_names},
                {"A", std::move(a)},
                {"B", to_json(sys.B)},
                {"gamma", to_json(sys.gamma)},
                {"origin_lambda", to_json(sys.origin_lambda)}};
}

inline Json to_json(const ConditionSet& cs) {
    Json eqs = Json::array();
    for (const auto& eq : cs.equations) eqs.push_back(eq.to_string() + " = 0");
    return Json{{"equations", std::move(eqs)}, {"satisfiable", to_string(cs.satisfiable)}};
}

inline Json to_json(const TransformChain& chain) {
    Json steps = Json::array();
    for (const TransformStep& step : chain.steps) {
        if (const auto* qmt = std::get_if<QmtStep>(&step)) {
            steps.push_back(Json{{"type", "qmt"}, {"C", to_json(qmt->C)}});
        } else if (const auto* mn = std::get_if<MonomialNttStep>(&step)) {
            Json beta = Json::array();
            for (const auto& b : mn->beta) beta.push_back(to_string(b));
            steps.push_back(Json{{"type", "monomial-ntt"},
                                 {"prefactor", mn->prefactor.to_string()},
                                 {"beta", std::move(beta)}});
        } else if (const auto* sc = std::get_if<ExpScalingStep>(&step)) {
            steps.push_back(Json{{"type", "exp-scaling"}, {"lambda", to_json(sc->lambda)}});
        } else if (const auto* en = std::get_if<ExpNttStep>(&step)) {
            steps.push_back(Json{{"type", "exp-ntt"}, {"gamma", en->gamma.to_string()}});
        }
    }
    return steps;
}

inline Json to_json(const ReductionResult& r) {
    Json out{{"case", to_string(r.case_label)},
             {"method", to_string(r.method)},
             {"decoupled_variable", r.decoupled_index + 1},
             {"chain", to_json(r.chain)},
             {"quadrature", r.quadrature_note}};
    if (r.reduced_is_exp()) {
        out["reduced_exp"] = to_json(r.reduced_exp());
    } else {
        out["reduced"] = to_json(r.reduced_qp());
        out["reduced_text"] = render(r.reduced_qp());
    }
    if (!r.constants.empty()) {
        Json consts = Json::array();
        for (const ConstantOfMotion& c : r.constants) {
            Json e = Json::array();
            for (const auto& x : c.exponents) e.push_back(to_string(x));
            consts.push_back(Json{{"variable", c.var_index + 1},
                                  {"exponents", std::move(e)},
                                  {"rate", c.rate.to_string()},
                                  {"text", c.text}});
        }
        out["constants"] = std::move(consts);
    }
    return out;
}

inline Json to_json(const VerifyReport& v) {
    return Json{{"max_rel_error", v.max_rel_error},
                {"per_variable", v.per_variable},
                {"quadrature_error", v.quadrature_error},
                {"constants_drift", v.constants_drift},
                {"steps_taken", v.steps_taken},
                {"tol", v.tol},
                {"samples", v.samples}};
}

}  // namespace qpr
