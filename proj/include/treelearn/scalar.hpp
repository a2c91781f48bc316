#pragma once

#include <gmpxx.h>

#include <cmath>
#include <string>
#include <string_view>

namespace treelearn {

using Rational = mpq_class;

/// Tolerances used by the float64 backend.  Equality of two values (or two
/// vectors, measured in the max norm) is relative; `absolute` is the floor
/// below which a magnitude counts as zero.
struct FloatTolerance {
  double relative = 1e-9;
  double absolute = 1e-300;
};

FloatTolerance& float_tolerance();

/// Arithmetic policy for a scalar backend.
template <class S>
struct Num;

template <>
struct Num<Rational> {
  static constexpr bool exact = true;
  static constexpr const char* name = "exact";

  static Rational zero() { return Rational(0); }
  static Rational one() { return Rational(1); }
  static bool is_zero(const Rational& x) { return sgn(x) == 0; }
  static bool is_negative(const Rational& x) { return sgn(x) < 0; }
  static bool equal(const Rational& a, const Rational& b) { return a == b; }
  static Rational abs(const Rational& x) { return ::abs(x); }
  static double to_double(const Rational& x) { return x.get_d(); }
  static Rational from_double(double v) { return Rational(v); }
  static Rational from_rational(const Rational& r) { return r; }
  static Rational to_rational(const Rational& r) { return r; }
  /// Accepts integers, "num/den" and decimals with optional exponent; decimals
  /// are converted exactly.
  static Rational parse(std::string_view text);
  static std::string format(const Rational& x) { return x.get_str(); }
};

template <>
struct Num<double> {
  static constexpr bool exact = false;
  static constexpr const char* name = "float";

  static double zero() { return 0.0; }
  static double one() { return 1.0; }
  static bool is_zero(double x) { return std::fabs(x) <= float_tolerance().absolute; }
  static bool is_negative(double x) { return x < 0 && !is_zero(x); }
  static bool equal(double a, double b) {
    double diff = std::fabs(a - b);
    if (diff <= float_tolerance().absolute) return true;
    return diff <= float_tolerance().relative * std::fmax(std::fabs(a), std::fabs(b));
  }
  static double abs(double x) { return std::fabs(x); }
  static double to_double(double x) { return x; }
  static double from_double(double v) { return v; }
  static double from_rational(const Rational& r) { return r.get_d(); }
  static Rational to_rational(double v) { return Rational(v); }
  static double parse(std::string_view text);
  /// Shortest representation that reads back to the same double.
  static std::string format(double x);
};

/// Decimal notation when the denominator has no prime factors other than 2
/// and 5, "num/den" otherwise.
std::string format_terminating(const Rational& x);

/// Formatting used for grammar weights and reported values.
template <class S>
std::string format_value(const S& x) {
  if constexpr (Num<S>::exact)
    return format_terminating(x);
  else
    return Num<S>::format(x);
}

/// Smallest-denominator continued-fraction convergent of v within `tol`.
Rational rationalize(double v, double tol);

}  // namespace treelearn
