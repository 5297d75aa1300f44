#include <catch2/catch_amalgamated.hpp>

#include "support/helpers.hpp"

using namespace qpr;
using test::P;
using test::Q;

TEST_CASE("parse single lines") {
    SECTION("one product term") {
        const OdeAst ast = parse("params: a1;\nx1' = a1*x2*x3\nx2' = 0\nx3' = 0\n");
        REQUIRE(ast.equations[0].size() == 1);
        const AstTerm& t = ast.equations[0][0];
        CHECK(t.weight == 1);
        CHECK(t.param_pows == std::map<std::string, int>{{"a1", 1}});
        CHECK(t.var_pows ==
              std::map<std::string, Rational>{{"x2", Rational(1)}, {"x3", Rational(1)}});
    }
    SECTION("zero right-hand side") {
        const OdeAst ast = parse("x1' = 0");
        CHECK(ast.equations[0].empty());
    }
    SECTION("fractional exponent") {
        const OdeAst ast = parse("x1' = x2^(1/2)\nx2' = 0");
        CHECK(ast.equations[0][0].var_pows.at("x2") == Q("1/2"));
    }
    SECTION("negative integer exponent without parentheses") {
        const OdeAst ast = parse("x1' = x1^-2");
        CHECK(ast.equations[0][0].var_pows.at("x1") == Rational(-2));
    }
}

TEST_CASE("parse errors carry positions") {
    SECTION("syntax error") {
        try {
            parse("x1' = +\n");
            FAIL("expected SyntaxError");
        } catch (const SyntaxError& e) {
            CHECK(e.line == 1);
            CHECK(e.col == 8);
        }
    }
    SECTION("unknown symbol") {
        try {
            parse("x1' = b2*x1");
            FAIL("expected UnknownSymbolError");
        } catch (const UnknownSymbolError& e) {
            CHECK(e.name == "b2");
            CHECK(e.line == 1);
        }
    }
    SECTION("non-rational exponent") {
        CHECK_THROWS_AS(parse("params: a1;\nx1' = x1^a1"), IrrationalExponentError);
    }
    SECTION("duplicate equation") { CHECK_THROWS_AS(parse("x1' = 0\nx1' = x1"), SyntaxError); }
    SECTION("missing prime") { CHECK_THROWS_AS(parse("x1 = x1"), SyntaxError); }
}

TEST_CASE("lowering") {
    SECTION("Euler text gives the exact matrices") {
        const QPSystem sys = test::fixture_system("euler.qp");
        CHECK(sys.n == 3);
        CHECK(sys.m == 3);
        CHECK(sys.var_names == std::vector<std::string>{"x1", "x2", "x3"});
        CHECK(sys.B == RatMatrix::from_strings(
                           {{"-1", "1", "1"}, {"1", "-1", "1"}, {"1", "1", "-1"}}));
        CHECK(sys.A[0] == std::vector<Coefficient>{P("a1"), Coefficient(), Coefficient()});
        CHECK(sys.A[1] == std::vector<Coefficient>{Coefficient(), P("a2"), Coefficient()});
        CHECK(sys.A[2] == std::vector<Coefficient>{Coefficient(), Coefficient(), P("a3")});
        CHECK(sys.lambda_is_zero());
    }
    SECTION("Maxwell-Bloch text: lambda reads off the linear terms") {
        const QPSystem sys = test::fixture_system("maxwell_bloch.qp");
        CHECK(sys.m == 4);
        CHECK(sys.lambda ==
              std::vector<Coefficient>{-P("a1"), -P("a3"), -P("a4")});
        std::map<std::vector<Rational>, std::vector<Coefficient>> cols;
        for (std::size_t j = 0; j < sys.m; ++j) {
            std::vector<Coefficient> col(3);
            for (std::size_t i = 0; i < 3; ++i) col[i] = sys.A[i][j];
            cols[sys.B.row(j)] = col;
        }
        const Coefficient zero;
        CHECK(cols.at({Q("-1"), Q("1"), Q("0")}) ==
              std::vector<Coefficient>{P("a2"), zero, zero});
        CHECK(cols.at({Q("1"), Q("-1"), Q("1")}) ==
              std::vector<Coefficient>{zero, P("a2"), zero});
        CHECK(cols.at({Q("1"), Q("1"), Q("-1")}) ==
              std::vector<Coefficient>{zero, zero, P("a2", -4)});
        CHECK(cols.at({Q("0"), Q("0"), Q("-1")}) ==
              std::vector<Coefficient>{zero, zero,
                                       Coefficient::term(1, ParamAtom{{"a4", 1}, {"x30", 1}})});
    }
    SECTION("a purely linear equation lowers to the pure-lambda form") {
        const QPSystem sys = parse_system("x1' = 2*x1");
        CHECK(sys.n == 1);
        CHECK(sys.m == 0);
        CHECK(sys.lambda[0] == Coefficient(2));
        CHECK(classify(sys) == CaseLabel::CaseIII);
    }
    SECTION("strict lowering propagates the rank gate") {
        CHECK_THROWS_AS(parse_system("x1' = x1*x2\nx2' = 2*x2^2"), NonMaximalRankError);
        CHECK_NOTHROW(parse_system_raw("x1' = x1*x2\nx2' = 2*x2^2"));
    }
}

TEST_CASE("rendering") {
    SECTION("Euler round-trips") {
        const QPSystem sys = test::fixture_system("euler.qp");
        CHECK(parse_system_raw(render(sys)) == sys);
    }
    SECTION("reduced Halphen text") {
        const QPSystem reduced = parse_system_raw(
            "x1' = x1*x2*x3 - x1*x2 - x1*x3\n"
            "x2' = -x2 + x2^2 - x2^2*x3 + x3\n"
            "x3' = -x3 + x3^2 - x2*x3^2 + x2\n");
        CHECK(parse_system_raw(render(reduced)) == reduced);
        CHECK(reduced.lambda ==
              std::vector<Coefficient>{Coefficient(), Coefficient(-1), Coefficient(-1)});
    }
    SECTION("empty system renders as a header comment only") {
        QPSystem empty;
        CHECK(render(empty) == "# quasipolynomial system: n=0 m=0\n");
    }
    SECTION("negative and fractional exponents survive the round trip") {
        const QPSystem sys =
            parse_system_raw("params: a1;\nx1' = 3/2*a1*x1^(1/2)*x2^-2\nx2' = x1\n");
        CHECK(parse_system_raw(render(sys)) == sys);
    }
}
