#include "doctest.h"
#include "treelearn/errors.hpp"
#include "treelearn/scalar.hpp"

using namespace treelearn;

TEST_CASE("exact parsing of integers, fractions and decimals") {
  CHECK(Num<Rational>::parse("3") == Rational(3));
  CHECK(Num<Rational>::parse("-2/6") == Rational(-1, 3));
  CHECK(Num<Rational>::parse("0.456") == Rational(57, 125));
  CHECK(Num<Rational>::parse("1.5e-2") == Rational(3, 200));
  CHECK(Num<Rational>::parse("2E3") == Rational(2000));
  CHECK(Num<Rational>::parse(".25") == Rational(1, 4));
  CHECK_THROWS_AS(Num<Rational>::parse("abc"), InputError);
  CHECK_THROWS_AS(Num<Rational>::parse("1/0"), InputError);
  CHECK_THROWS_AS(Num<Rational>::parse(""), InputError);
}

TEST_CASE("float parsing and formatting") {
  CHECK(Num<double>::parse("0.25") == 0.25);
  CHECK(Num<double>::parse("1/4") == 0.25);
  CHECK_THROWS_AS(Num<double>::parse("x"), InputError);
  CHECK(Num<double>::format(0.1) == "0.1");
  CHECK(Num<double>::parse(Num<double>::format(1.0 / 3)) == 1.0 / 3);
}

TEST_CASE("terminating decimals print as decimals") {
  CHECK(format_terminating(Rational(57, 125)) == "0.456");
  CHECK(format_terminating(Rational(1, 3)) == "1/3");
  CHECK(format_terminating(Rational(-7, 4)) == "-1.75");
  CHECK(format_terminating(Rational(5)) == "5");
  CHECK(Num<Rational>::parse(format_terminating(Rational(123, 80))) == Rational(123, 80));
}

TEST_CASE("float equality uses a relative tolerance") {
  CHECK(Num<double>::equal(1.0, 1.0 + 1e-12));
  CHECK_FALSE(Num<double>::equal(1.0, 1.0 + 1e-6));
  CHECK(Num<double>::is_zero(1e-301));
  CHECK_FALSE(Num<double>::is_zero(1e-200));
}

TEST_CASE("rationalize recovers small fractions") {
  CHECK(rationalize(1.0 / 3, 1e-12) == Rational(1, 3));
  CHECK(rationalize(0.456, 1e-12) == Rational(57, 125));
  CHECK(rationalize(2.0, 1e-12) == Rational(2));
}
