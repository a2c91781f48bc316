#include "treelearn/scalar.hpp"

#include <cctype>
#include <charconv>
#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "treelearn/errors.hpp"

namespace treelearn {

FloatTolerance& float_tolerance() {
  static FloatTolerance tol;
  return tol;
}

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (unsigned char ch : s)
    if (!std::isdigit(ch)) return false;
  return true;
}

[[noreturn]] void bad_number(std::string_view text) {
  throw InputError("malformed number '" + std::string(text) + "'");
}

mpz_class parse_integer(std::string_view digits) {
  mpz_class z;
  if (z.set_str(std::string(digits), 10) != 0) bad_number(digits);
  return z;
}

}  // namespace

Rational Num<Rational>::parse(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (s.empty()) bad_number(text);

  Rational result;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    std::string_view num = s.substr(0, slash), den = s.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) bad_number(text);
    mpz_class d = parse_integer(den);
    if (d == 0) throw InputError("zero denominator in '" + std::string(text) + "'");
    result = Rational(parse_integer(num), d);
    result.canonicalize();
  } else {
    std::string_view mantissa = s;
    long exponent = 0;
    if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
      mantissa = s.substr(0, e);
      std::string_view exp = s.substr(e + 1);
      bool neg_exp = false;
      if (!exp.empty() && (exp.front() == '-' || exp.front() == '+')) {
        neg_exp = exp.front() == '-';
        exp.remove_prefix(1);
      }
      if (!all_digits(exp) || exp.size() > 6) bad_number(text);
      exponent = std::strtol(std::string(exp).c_str(), nullptr, 10);
      if (neg_exp) exponent = -exponent;
    }
    std::string digits;
    if (auto dot = mantissa.find('.'); dot != std::string_view::npos) {
      std::string_view whole = mantissa.substr(0, dot), frac = mantissa.substr(dot + 1);
      if (whole.empty() && frac.empty()) bad_number(text);
      if ((!whole.empty() && !all_digits(whole)) || (!frac.empty() && !all_digits(frac)))
        bad_number(text);
      digits = std::string(whole) + std::string(frac);
      exponent -= static_cast<long>(frac.size());
    } else {
      if (!all_digits(mantissa)) bad_number(text);
      digits = std::string(mantissa);
    }
    mpz_class value = parse_integer(digits);
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
    result = exponent < 0 ? Rational(value, scale) : Rational(value * scale);
    result.canonicalize();
  }
  return negative ? Rational(-result) : result;
}

double Num<double>::parse(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.find('/') != std::string_view::npos) return Num<Rational>::parse(s).get_d();
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) bad_number(text);
  if (!std::isfinite(v)) bad_number(text);
  return v;
}

std::string format_terminating(const Rational& x) {
  mpz_class den = x.get_den();
  unsigned long twos = 0, fives = 0;
  while (mpz_divisible_ui_p(den.get_mpz_t(), 2)) den /= 2, ++twos;
  while (mpz_divisible_ui_p(den.get_mpz_t(), 5)) den /= 5, ++fives;
  if (den != 1 || x.get_den() == 1) return x.get_str();
  unsigned long places = std::max(twos, fives);
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, places);
  mpz_class scaled = abs(x.get_num()) * scale / x.get_den();
  std::string digits = scaled.get_str();
  if (digits.size() <= places) digits.insert(0, places - digits.size() + 1, '0');
  std::string out = digits.substr(0, digits.size() - places) + "." + digits.substr(digits.size() - places);
  return sgn(x) < 0 ? "-" + out : out;
}

Rational rationalize(double v, double tol) {
  Rational exact(v);
  mpz_class num = exact.get_num(), den = exact.get_den();
  mpz_class p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  for (int step = 0; step < 200 && den != 0; ++step) {
    mpz_class a;
    mpz_fdiv_q(a.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    mpz_class p2 = a * p1 + p0, q2 = a * q1 + q0;
    p0 = p1, q0 = q1, p1 = p2, q1 = q2;
    mpz_class rem = num - a * den;
    num = den;
    den = rem;
    Rational cand(p1, q1);
    if (std::fabs(cand.get_d() - v) <= tol) return cand;
  }
  return exact;
}

std::string Num<double>::format(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

}  // namespace treelearn
