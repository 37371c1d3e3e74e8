#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>
#include <string_view>

#include "tubemeasure/error.hpp"

namespace tubemeasure {

/// Exact p/q with 64-bit numerator and denominator, always in lowest terms
/// with a positive denominator. Intermediate products use 128-bit integers;
/// results that do not fit in 64 bits raise ParameterError.
class Rational {
 public:
  using Int = std::int64_t;

  constexpr Rational() = default;
  constexpr Rational(Int n) : num_(n), den_(1) {}  // NOLINT(google-explicit-constructor)
  Rational(Int n, Int d) { assign(n, d); }

  constexpr Int num() const { return num_; }
  constexpr Int den() const { return den_; }

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  /// Exact conversion of a finite double. Every finite double is dyadic; this
  /// fails only when the dyadic form needs more than 62 bits.
  static Rational from_double(double x) {
    if (!std::isfinite(x)) throw ParameterError("cannot convert non-finite value to a rational");
    if (x == 0.0) return Rational{};
    int exp = 0;
    double mant = std::frexp(x, &exp);  // x = mant * 2^exp, 0.5 <= |mant| < 1
    auto m = static_cast<Int>(std::ldexp(mant, 53));
    int shift = exp - 53;
    while (shift < 0 && (m % 2) == 0) {
      m /= 2;
      ++shift;
    }
    if (shift >= 0) {
      __int128 wide = static_cast<__int128>(m < 0 ? -m : m);
      if (shift > 62 || (wide << shift) > max_int())
        throw ParameterError("double too large for a 64-bit rational");
      return Rational(static_cast<Int>(static_cast<__int128>(m) << shift), 1);
    }
    if (-shift > 62) throw ParameterError("double needs a denominator beyond 2^62");
    return Rational(m, Int{1} << (-shift));
  }

  /// Largest dyadic k/2^bits not exceeding x.
  static Rational dyadic_floor(double x, int bits) {
    double scaled = std::floor(std::ldexp(x, bits));
    if (std::abs(scaled) > 9.0e18) throw ParameterError("value too large for dyadic rounding");
    return Rational(static_cast<Int>(scaled), Int{1} << bits);
  }

  /// Parses "p/q" or "p".
  static Rational parse(std::string_view text) {
    auto to_int = [&](std::string_view s) -> Int {
      if (s.empty()) throw ParseError("empty rational component in '" + std::string(text) + "'");
      std::size_t used = 0;
      long long v = 0;
      try {
        v = std::stoll(std::string(s), &used);
      } catch (const std::exception&) {
        throw ParseError("invalid rational '" + std::string(text) + "'");
      }
      if (used != s.size()) throw ParseError("invalid rational '" + std::string(text) + "'");
      return v;
    };
    auto slash = text.find('/');
    if (slash == std::string_view::npos) return Rational(to_int(text));
    Int d = to_int(text.substr(slash + 1));
    if (d == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
    return Rational(to_int(text.substr(0, slash)), d);
  }

  std::string str() const {
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    __int128 d = static_cast<__int128>(a.den_) * b.den_;
    __int128 n = static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_;
    return from_wide(n, d);
  }
  friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return from_wide(static_cast<__int128>(a.num_) * b.num_, static_cast<__int128>(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw ParameterError("rational division by zero");
    return from_wide(static_cast<__int128>(a.num_) * b.den_, static_cast<__int128>(a.den_) * b.num_);
  }
  Rational operator-() const { return Rational(-num_, den_); }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    __int128 l = static_cast<__int128>(a.num_) * b.den_;
    __int128 r = static_cast<__int128>(b.num_) * a.den_;
    return l <=> r;
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  static constexpr __int128 max_int() { return std::numeric_limits<Int>::max(); }

  static __int128 gcd_wide(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  static Rational from_wide(__int128 n, __int128 d) {
    if (d == 0) throw ParameterError("rational with zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    __int128 g = gcd_wide(n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    if (n > max_int() || n < -max_int() || d > max_int())
      throw ParameterError("rational overflow beyond 64 bits");
    Rational r;
    r.num_ = static_cast<Int>(n);
    r.den_ = static_cast<Int>(d);
    return r;
  }

  void assign(Int n, Int d) { *this = from_wide(n, d); }

  Int num_ = 0;
  Int den_ = 1;
};

/// Greatest common divisor of two positive rationals: the largest g with
/// a/g and b/g both integers.
inline Rational rational_gcd(const Rational& a, const Rational& b) {
  if (a.num() <= 0 || b.num() <= 0) throw ParameterError("rational gcd needs positive arguments");
  // a = an/ad, b = bn/bd. With L = lcm(ad, bd): a = (an*L/ad)/L, b = (bn*L/bd)/L.
  Rational::Int l = std::lcm(a.den(), b.den());
  auto an = static_cast<__int128>(a.num()) * (l / a.den());
  auto bn = static_cast<__int128>(b.num()) * (l / b.den());
  while (bn != 0) {
    auto t = an % bn;
    an = bn;
    bn = t;
  }
  if (an > std::numeric_limits<Rational::Int>::max()) throw ParameterError("rational gcd overflow");
  return Rational(static_cast<Rational::Int>(an), l);
}

}  // namespace tubemeasure
