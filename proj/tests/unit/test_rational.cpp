#include "cmipdual/rational.hpp"

#include <doctest.h>

#include <limits>
#include <stdexcept>

using cmipdual::Rational;

TEST_CASE("rationals normalize and compute exactly")
{
    CHECK(Rational(2, -4) == Rational(-1, 2));
    CHECK((Rational(1, 3) + Rational(1, 6)) == Rational(1, 2));
    CHECK((Rational(1, 3) - Rational(1, 2)) == Rational(-1, 6));
    CHECK((Rational(2, 3) * Rational(3, 4)) == Rational(1, 2));
    CHECK((Rational(2, 3) / Rational(4, 3)) == Rational(1, 2));
    CHECK(Rational(1, 3) < Rational(1, 2));
    CHECK(Rational(-7, 3).str() == "-7/3");
    CHECK(Rational(6, 3).str() == "2");
    CHECK_THROWS_AS(Rational(1, 0), std::domain_error);
    const Rational big(std::numeric_limits<std::int64_t>::max());
    CHECK_THROWS_AS(big * big, std::overflow_error);
}

TEST_CASE("doubles convert exactly")
{
    CHECK(Rational::from_double(0.5) == Rational(1, 2));
    CHECK(Rational::from_double(-3.0) == Rational(-3));
    CHECK(Rational::from_double(0.0) == Rational(0));
    const auto tenth = Rational::from_double(0.1);
    REQUIRE(tenth);
    CHECK(tenth->to_double() == 0.1);
    CHECK_FALSE(Rational::from_double(1e300));
    CHECK_FALSE(Rational::from_double(std::numeric_limits<double>::quiet_NaN()));
}
