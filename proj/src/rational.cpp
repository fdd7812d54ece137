#include "pmd/rational.hpp"

#include <algorithm>
#include <stdexcept>

namespace pmd {
namespace {

using Wide = __int128;

std::int64_t narrow(Wide v) {
  if (v > INT64_MAX || v < INT64_MIN) {
    throw std::overflow_error("rational overflow");
  }
  return static_cast<std::int64_t>(v);
}

// Unsigned decimal with optional fractional part, e.g. `0.25`.
Rational parse_decimal(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("empty number");
  const auto dot = text.find('.');
  std::string_view int_part = text.substr(0, dot);
  std::string_view frac_part =
      dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
  if (int_part.empty() || (dot != std::string_view::npos && frac_part.empty())) {
    throw std::invalid_argument("malformed number '" + std::string(text) + "'");
  }
  Wide num = 0;
  Wide den = 1;
  for (char c : int_part) {
    if (c < '0' || c > '9') {
      throw std::invalid_argument("malformed number '" + std::string(text) + "'");
    }
    num = num * 10 + (c - '0');
    if (num > INT64_MAX) throw std::overflow_error("number too large");
  }
  for (char c : frac_part) {
    if (c < '0' || c > '9') {
      throw std::invalid_argument("malformed number '" + std::string(text) + "'");
    }
    num = num * 10 + (c - '0');
    den *= 10;
    if (num > INT64_MAX || den > INT64_MAX) {
      throw std::overflow_error("number has too many digits");
    }
  }
  return Rational(narrow(num), narrow(den));
}

}  // namespace

Rational Rational::normalized(Wide num, Wide den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  Wide a = num < 0 ? -num : num;
  Wide b = den;
  while (b != 0) {
    Wide t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    num /= a;
    den /= a;
  }
  Rational r;
  r.num_ = narrow(num);
  r.den_ = narrow(den);
  return r;
}

Rational::Rational(std::int64_t num, std::int64_t den)
    : Rational(normalized(num, den)) {}

Rational Rational::parse(std::string_view text) {
  bool negative = false;
  if (!text.empty() && text.front() == '-') {
    negative = true;
    text.remove_prefix(1);
  }
  Rational value;
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    Rational n = parse_decimal(text.substr(0, slash));
    Rational d = parse_decimal(text.substr(slash + 1));
    if (d.is_zero()) throw std::invalid_argument("division by zero in number");
    value = n / d;
  } else {
    value = parse_decimal(text);
  }
  return negative ? -value : value;
}

std::string Rational::to_string() const {
  if (den_ == 1) return std::to_string(num_);
  // Exact decimal iff the denominator only has factors 2 and 5.
  std::int64_t d = den_;
  int twos = 0;
  int fives = 0;
  while (d % 2 == 0) {
    d /= 2;
    ++twos;
  }
  while (d % 5 == 0) {
    d /= 5;
    ++fives;
  }
  const int digits = std::max(twos, fives);
  if (d == 1 && digits <= 18) {
    Wide scale = 1;
    for (int i = 0; i < digits; ++i) scale *= 10;
    Wide scaled = static_cast<Wide>(num_) * (scale / den_);
    const bool negative = scaled < 0;
    if (negative) scaled = -scaled;
    std::string int_digits = std::to_string(static_cast<std::int64_t>(scaled / scale));
    std::string frac = std::to_string(static_cast<std::int64_t>(scaled % scale));
    frac.insert(0, static_cast<std::size_t>(digits) - frac.size(), '0');
    return (negative ? "-" : "") + int_digits + "." + frac;
  }
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational operator+(const Rational& a, const Rational& b) {
  return Rational::normalized(static_cast<Wide>(a.num_) * b.den_ + static_cast<Wide>(b.num_) * a.den_,
              static_cast<Wide>(a.den_) * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
  return Rational::normalized(static_cast<Wide>(a.num_) * b.num_,
              static_cast<Wide>(a.den_) * b.den_);
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.num_ == 0) throw std::domain_error("rational division by zero");
  return Rational::normalized(static_cast<Wide>(a.num_) * b.den_,
              static_cast<Wide>(a.den_) * b.num_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  const Wide lhs = static_cast<Wide>(a.num_) * b.den_;
  const Wide rhs = static_cast<Wide>(b.num_) * a.den_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

}  // namespace pmd
