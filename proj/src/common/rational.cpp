#include "obda/common/rational.hpp"

#include <cctype>

namespace obda {

namespace {

using boost::multiprecision::cpp_int;

std::optional<cpp_int> parse_digits(std::string_view s) {
  if (s.empty()) return std::nullopt;
  cpp_int v = 0;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    v = v * 10 + (c - '0');
  }
  return v;
}

cpp_int pow10(long n) {
  cpp_int p = 1;
  for (long i = 0; i < n; ++i) p *= 10;
  return p;
}

}  // namespace

std::optional<Rational> parse_rational(std::string_view text) {
  if (text.empty()) return std::nullopt;
  bool negative = false;
  if (text.front() == '-' || text.front() == '+') {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto num = parse_digits(text.substr(0, slash));
    auto den = parse_digits(text.substr(slash + 1));
    if (!num || !den || *den == 0) return std::nullopt;
    Rational r(*num, *den);
    return negative ? Rational(-r) : r;
  }
  long exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    auto exp_text = text.substr(e + 1);
    bool exp_negative = false;
    if (!exp_text.empty() && (exp_text.front() == '-' || exp_text.front() == '+')) {
      exp_negative = exp_text.front() == '-';
      exp_text.remove_prefix(1);
    }
    if (exp_text.empty() || exp_text.size() > 6) return std::nullopt;
    auto mag = parse_digits(exp_text);
    if (!mag) return std::nullopt;
    exponent = mag->convert_to<long>();
    if (exp_negative) exponent = -exponent;
    text = text.substr(0, e);
  }
  std::string_view int_part = text;
  std::string_view frac_part;
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    int_part = text.substr(0, dot);
    frac_part = text.substr(dot + 1);
  }
  if (int_part.empty() && frac_part.empty()) return std::nullopt;
  cpp_int mantissa = 0;
  if (!int_part.empty()) {
    auto v = parse_digits(int_part);
    if (!v) return std::nullopt;
    mantissa = *v;
  }
  if (!frac_part.empty()) {
    auto v = parse_digits(frac_part);
    if (!v) return std::nullopt;
    mantissa = mantissa * pow10(static_cast<long>(frac_part.size())) + *v;
  }
  exponent -= static_cast<long>(frac_part.size());
  Rational r = exponent >= 0 ? Rational(mantissa * pow10(exponent)) : Rational(mantissa, pow10(-exponent));
  return negative ? Rational(-r) : r;
}

std::string format_rational(const Rational& value) {
  cpp_int num = boost::multiprecision::numerator(value);
  cpp_int den = boost::multiprecision::denominator(value);
  cpp_int d = den;
  long twos = 0, fives = 0;
  while (d % 2 == 0) { d /= 2; ++twos; }
  while (d % 5 == 0) { d /= 5; ++fives; }
  if (d != 1) return num.str() + "/" + den.str();
  if (den == 1) return num.str();
  long digits = std::max(twos, fives);
  cpp_int scaled = num * (pow10(digits) / den);
  bool negative = scaled < 0;
  if (negative) scaled = -scaled;
  std::string s = scaled.str();
  if (static_cast<long>(s.size()) <= digits) s.insert(0, static_cast<std::size_t>(digits) - s.size() + 1, '0');
  s.insert(s.size() - static_cast<std::size_t>(digits), ".");
  return negative ? "-" + s : s;
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

}  // namespace obda
