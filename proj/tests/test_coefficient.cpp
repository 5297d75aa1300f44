#include <catch2/catch_amalgamated.hpp>

#include "support/helpers.hpp"

using namespace qpr;
using test::P;
using test::Q;

TEST_CASE("coefficient arithmetic and canonical text") {
    const Coefficient c = P("a1", 2) + P("a2", Q("-1/2")) + Coefficient(3);
    CHECK(c.to_string() == "3 + 2*a1 - 1/2*a2");
    CHECK((c - c).is_zero());
    CHECK((Q("2") * P("a1")).to_string() == "2*a1");
    CHECK((-P("a1")).to_string() == "-a1");
    CHECK(Coefficient().to_string() == "0");

    const Coefficient atom = Coefficient::term(1, ParamAtom{{"a4", 1}, {"x30", 1}});
    CHECK(atom.to_string() == "a4*x30");
}

TEST_CASE("zero weights are never stored") {
    Coefficient c = P("a1") + P("a1", -1);
    CHECK(c.is_zero());
    CHECK(c.terms().empty());
}

TEST_CASE("division by a single-term coefficient") {
    const Coefficient c = P("a2", 2) + Coefficient(Q("-4")) * Rational(1);
    const Coefficient q = c.divide_by_monomial(P("a2"));
    // 2*a2/a2 = 2, -4/a2 = -4*a2^-1
    CHECK(q.to_string() == "2 - 4*a2^-1");
    CHECK_THROWS_AS(c.divide_by_monomial(Coefficient()), Error);
    CHECK_THROWS_AS(c.divide_by_monomial(P("a1") + P("a2")), Error);
    CHECK(c.divide_by_monomial(Coefficient(1)) == c);
}

TEST_CASE("substitution and evaluation") {
    const Coefficient c = P("a1", 2) + Coefficient::term(1, ParamAtom{{"a4", 1}, {"x30", 1}});
    SECTION("partial substitution keeps the rest symbolic") {
        const Coefficient s = c.substitute({{"x30", Rational(0)}});
        CHECK(s == P("a1", 2));
    }
    SECTION("full evaluation") {
        CHECK(c.evaluate({{"a1", Rational(1)}, {"a4", Rational(2)}, {"x30", Rational(3)}}) ==
              Rational(8));
    }
    SECTION("unbound parameter is named") {
        try {
            c.evaluate({{"a1", Rational(1)}});
            FAIL("expected UnboundParameterError");
        } catch (const UnboundParameterError& e) {
            CHECK((e.name == "a4" || e.name == "x30"));
        }
    }
    SECTION("negative powers of a substituted value") {
        const Coefficient inv = Coefficient::term(1, ParamAtom{{"a1", -2}});
        CHECK(inv.evaluate({{"a1", Q("2/3")}}) == Q("9/4"));
    }
}
