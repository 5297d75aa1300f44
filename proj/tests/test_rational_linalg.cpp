#include <catch2/catch_amalgamated.hpp>

#include "support/helpers.hpp"

using namespace qpr;
using test::Q;

namespace {

RatMatrix euler_b() {
    return RatMatrix::from_strings({{"-1", "1", "1"}, {"1", "-1", "1"}, {"1", "1", "-1"}});
}

RatMatrix halphen_b() {
    return RatMatrix::from_strings({{"-1", "1", "1"},
                                    {"1", "-1", "1"},
                                    {"1", "1", "-1"},
                                    {"1", "0", "0"},
                                    {"0", "1", "0"},
                                    {"0", "0", "1"}});
}

}  // namespace

TEST_CASE("rational literals") {
    CHECK(parse_rational("3/4") == Rational(3, 4));
    CHECK(parse_rational("-6/8") == Rational(-3, 4));
    CHECK(parse_rational("0.25") == Rational(1, 4));
    CHECK(parse_rational("-1.5") == Rational(-3, 2));
    CHECK(to_string(Rational(-3, 4)) == "-3/4");
    CHECK(to_string(Rational(7)) == "7");
    CHECK_THROWS_AS(parse_rational("1/0"), Error);
    CHECK_THROWS_AS(parse_rational("x"), Error);
    CHECK(rat_pow(Q("2/3"), -2) == Q("9/4"));
}

TEST_CASE("rank") {
    SECTION("ones-augmented Halphen matrix has rank 3") {
        CHECK(rank(augment_ones(halphen_b())) == 3);
    }
    SECTION("identity") { CHECK(rank(RatMatrix::identity(3)) == 3); }
    SECTION("proportional rows collapse") {
        RatMatrix m = RatMatrix::from_strings({{"1", "2"}, {"2", "4"}, {"3", "6"}});
        CHECK(rank(m) == 1);
        CHECK(test::rank_minor_oracle(m) == 1);
    }
}

TEST_CASE("invert") {
    SECTION("Euler exponent matrix") {
        const RatMatrix b = euler_b();
        const RatMatrix inv = invert(b);
        const RatMatrix expected = RatMatrix::from_strings(
            {{"0", "1/2", "1/2"}, {"1/2", "0", "1/2"}, {"1/2", "1/2", "0"}});
        CHECK(inv == expected);
        CHECK(b * inv == RatMatrix::identity(3));
    }
    SECTION("identity") { CHECK(invert(RatMatrix::identity(4)) == RatMatrix::identity(4)); }
    SECTION("rank-deficient") {
        CHECK_THROWS_AS(invert(RatMatrix::from_strings({{"1", "1"}, {"1", "1"}})),
                        SingularMatrixError);
    }
}

TEST_CASE("solve_right") {
    SECTION("Euler target reproduces the known QMT matrix") {
        const RatMatrix bp =
            RatMatrix::from_strings({{"1", "0", "0"}, {"1", "1", "0"}, {"1", "0", "1"}});
        const RatMatrix c = solve_right(euler_b(), bp);
        CHECK(c == RatMatrix::from_strings(
                       {{"1", "1/2", "1/2"}, {"1", "0", "1/2"}, {"1", "1/2", "0"}}));
        CHECK(euler_b() * c == bp);
    }
    SECTION("square invertible with Bp = B gives the identity") {
        CHECK(solve_right(euler_b(), euler_b()) == RatMatrix::identity(3));
    }
    SECTION("Halphen rectangular solve") {
        const RatMatrix b = halphen_b();
        RatMatrix bp(6, 3);
        for (std::size_t j = 0; j < 6; ++j) {
            bp(j, 0) = 1;
            bp(j, 1) = b(j, 1);
            bp(j, 2) = b(j, 2);
        }
        CHECK(solve_right(b, bp) ==
              RatMatrix::from_strings({{"1", "0", "0"}, {"1", "1", "0"}, {"1", "0", "1"}}));
    }
    SECTION("column outside the column space is reported per column") {
        const RatMatrix b = halphen_b();
        RatMatrix bp(6, 2);
        for (std::size_t j = 0; j < 6; ++j) bp(j, 0) = 1;
        bp(1, 1) = 1;  // e2 is not reachable
        try {
            solve_right(b, bp);
            FAIL("expected InconsistentColumnError");
        } catch (const InconsistentColumnError& e) {
            CHECK(e.column == 1);
        }
    }
}

TEST_CASE("augment_ones") {
    SECTION("Halphen") {
        const RatMatrix bt = augment_ones(halphen_b());
        REQUIRE(bt.rows() == 6);
        REQUIRE(bt.cols() == 4);
        for (std::size_t j = 0; j < 6; ++j) CHECK(bt(j, 3) == 1);
    }
    SECTION("zero-row matrix") {
        const RatMatrix empty(0, 3);
        const RatMatrix out = augment_ones(empty);
        CHECK(out.rows() == 0);
        CHECK(out.cols() == 4);
    }
    SECTION("1x1") {
        CHECK(augment_ones(RatMatrix{{Rational(5)}}) ==
              RatMatrix::from_strings({{"5", "1"}}));
    }
}

TEST_CASE("left kernel") {
    SECTION("row space constraint") {
        const RatMatrix a = RatMatrix::from_strings({{"1", "1"}, {"2", "2"}});
        const RatMatrix k = left_kernel(a);
        REQUIRE(k.rows() == 1);
        CHECK(k.row(0) == std::vector<Rational>{Rational(2), Rational(-1)});
    }
    SECTION("full rank has empty kernel") {
        CHECK(left_kernel(RatMatrix::identity(3)).rows() == 0);
    }
}
