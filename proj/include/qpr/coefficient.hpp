#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "qpr/error.hpp"
#include "qpr/rational.hpp"

namespace qpr {

/// Formal product of named parameters with integer powers; empty = 1.
using ParamAtom = std::map<std::string, int>;

inline std::string atom_to_string(const ParamAtom& a) {
    std::string s;
    for (const auto& [name, pow] : a) {
        if (!s.empty()) s += '*';
        s += name;
        if (pow != 1) s += '^' + std::to_string(pow);
    }
    return s;
}

/// Rational-weighted sum of parameter atoms. Closed under the operations the
/// reduction algorithms need: addition, negation, rational scaling, and exact
/// division by a single-term coefficient. Purely numeric values have only the
/// empty atom; zero-weight terms are never stored.
class Coefficient {
public:
    Coefficient() = default;
    Coefficient(const Rational& value) {  // NOLINT: implicit by design
        if (value != 0) terms_[{}] = value;
    }
    Coefficient(int value) : Coefficient(Rational(value)) {}

    static Coefficient parameter(const std::string& name, int power = 1) {
        return term(Rational(1), ParamAtom{{name, power}});
    }

    static Coefficient term(const Rational& weight, ParamAtom atom) {
        Coefficient c;
        if (weight != 0) c.terms_[std::move(atom)] = weight;
        return c;
    }

    const std::map<ParamAtom, Rational>& terms() const { return terms_; }

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const {
        return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
    }
    bool is_monomial() const { return terms_.size() <= 1; }

    /// Numeric value of a constant coefficient.
    Rational constant_value() const {
        if (terms_.empty()) return Rational(0);
        if (!is_constant()) throw UnboundParameterError(first_parameter());
        return terms_.begin()->second;
    }

    std::string first_parameter() const {
        for (const auto& [atom, w] : terms_)
            if (!atom.empty()) return atom.begin()->first;
        return {};
    }

    void collect_parameters(std::set<std::string>& out) const {
        for (const auto& [atom, w] : terms_)
            for (const auto& [name, pow] : atom) out.insert(name);
    }

    Coefficient operator-() const {
        Coefficient c = *this;
        for (auto& [atom, w] : c.terms_) w = -w;
        return c;
    }

    Coefficient& operator+=(const Coefficient& o) {
        for (const auto& [atom, w] : o.terms_) {
            Rational& slot = terms_[atom];
            slot += w;
            if (slot == 0) terms_.erase(atom);
        }
        return *this;
    }

    friend Coefficient operator+(Coefficient a, const Coefficient& b) { return a += b; }
    friend Coefficient operator-(Coefficient a, const Coefficient& b) { return a += -b; }

    friend Coefficient operator*(const Rational& s, const Coefficient& c) {
        Coefficient out;
        if (s == 0) return out;
        for (const auto& [atom, w] : c.terms_) out.terms_[atom] = s * w;
        return out;
    }
    friend Coefficient operator*(const Coefficient& c, const Rational& s) { return s * c; }

    friend Coefficient operator/(const Coefficient& c, const Rational& s) {
        if (s == 0) throw Error("division of coefficient by zero");
        return Rational(1) / s * c;
    }

    /// Exact division by a nonzero single-term coefficient (atom powers
    /// subtract, so the quotient may carry negative parameter powers).
    Coefficient divide_by_monomial(const Coefficient& d) const {
        if (d.is_zero()) throw Error("division of coefficient by zero");
        if (d.terms_.size() != 1)
            throw Error("division only defined for single-term coefficients");
        const auto& [datom, dweight] = *d.terms_.begin();
        Coefficient out;
        for (const auto& [atom, w] : terms_) {
            ParamAtom q = atom;
            for (const auto& [name, pow] : datom) {
                q[name] -= pow;
                if (q[name] == 0) q.erase(name);
            }
            out.terms_[std::move(q)] = w / dweight;
        }
        return out;
    }

    /// Substitutes the given parameters, leaving the rest symbolic.
    Coefficient substitute(const std::map<std::string, Rational>& values) const {
        Coefficient out;
        for (const auto& [atom, w] : terms_) {
            Rational weight = w;
            ParamAtom rest;
            for (const auto& [name, pow] : atom) {
                auto it = values.find(name);
                if (it == values.end()) {
                    rest[name] = pow;
                } else if (it->second == 0 && pow > 0) {
                    weight = 0;
                    break;
                } else {
                    weight *= rat_pow(it->second, pow);
                }
            }
            if (weight != 0) out += term(weight, std::move(rest));
        }
        return out;
    }

    /// Full numeric evaluation; every parameter must be bound.
    Rational evaluate(const std::map<std::string, Rational>& values) const {
        Coefficient c = substitute(values);
        if (!c.is_constant()) throw UnboundParameterError(c.first_parameter());
        return c.constant_value();
    }

    friend bool operator==(const Coefficient& a, const Coefficient& b) {
        return a.terms_ == b.terms_;
    }
    friend bool operator<(const Coefficient& a, const Coefficient& b) {
        return a.terms_ < b.terms_;
    }

    /// Canonical text, terms in atom order, e.g. "-2*a1 + 1/2*a2*x30".
    std::string to_string() const {
        if (terms_.empty()) return "0";
        std::string s;
        bool first = true;
        for (const auto& [atom, w] : terms_) {
            Rational mag = w < 0 ? Rational(-w) : w;
            if (first) {
                if (w < 0) s += '-';
            } else {
                s += w < 0 ? " - " : " + ";
            }
            std::string atom_str = atom_to_string(atom);
            if (atom_str.empty()) {
                s += qpr::to_string(mag);
            } else {
                if (mag != 1) s += qpr::to_string(mag) + "*";
                s += atom_str;
            }
            first = false;
        }
        return s;
    }

private:
    std::map<ParamAtom, Rational> terms_;
};

inline bool all_zero(const std::vector<Coefficient>& v) {
    for (const auto& c : v)
        if (!c.is_zero()) return false;
    return true;
}

}  // namespace qpr
