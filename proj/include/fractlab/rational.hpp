#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace fractlab {

// Exact rational with int64 numerator/denominator, always normalized with
// denominator > 0.  Grid steps and window radii are rationals so that lattice
// membership tests (|c|*step <= r) and K-adic interval assignment are exact
// and platform-independent.
class Rational {
public:
  Rational() : num_(0), den_(1) {}
  Rational(std::int64_t n) : num_(n), den_(1) {}
  Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d) { normalize(); }

  static Rational pow(std::int64_t base, int exp) {
    if (base == 0) throw std::invalid_argument("Rational::pow: zero base");
    std::int64_t p = 1;
    int e = exp < 0 ? -exp : exp;
    for (int i = 0; i < e; ++i) {
      if (p > (std::int64_t{1} << 62) / (base < 0 ? -base : base))
        throw std::overflow_error("Rational::pow overflow");
      p *= base;
    }
    return exp < 0 ? Rational(1, p) : Rational(p, 1);
  }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  bool positive() const { return num_ > 0; }
  bool zero() const { return num_ == 0; }

  Rational operator*(const Rational& o) const {
    // cross-reduce first to delay overflow
    std::int64_t g1 = std::gcd(num_ < 0 ? -num_ : num_, o.den_);
    std::int64_t g2 = std::gcd(o.num_ < 0 ? -o.num_ : o.num_, den_);
    return Rational((num_ / g1) * (o.num_ / g2), (den_ / g2) * (o.den_ / g1));
  }
  Rational operator+(const Rational& o) const {
    return Rational(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
  }
  Rational operator-(const Rational& o) const {
    return Rational(num_ * o.den_ - o.num_ * den_, den_ * o.den_);
  }
  Rational operator/(const Rational& o) const {
    if (o.num_ == 0) throw std::invalid_argument("Rational: division by zero");
    return *this * Rational(o.den_, o.num_);
  }

  bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
  bool operator!=(const Rational& o) const { return !(*this == o); }
  bool operator<(const Rational& o) const {
    return static_cast<__int128>(num_) * o.den_ < static_cast<__int128>(o.num_) * den_;
  }
  bool operator<=(const Rational& o) const { return *this < o || *this == o; }
  bool operator>(const Rational& o) const { return o < *this; }
  bool operator>=(const Rational& o) const { return o <= *this; }

  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  // Parses "p", "p/q", or "b^-k" (exact power notation used by scale ladders).
  static Rational parse(const std::string& s);

private:
  void normalize() {
    if (den_ == 0) throw std::invalid_argument("Rational: zero denominator");
    if (den_ < 0) { num_ = -num_; den_ = -den_; }
    std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) { num_ /= g; den_ /= g; }
  }

  std::int64_t num_;
  std::int64_t den_;
};

// floor(a/b) with sign-correct (Euclidean-style) rounding toward -infinity.
inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b, r = a % b;
  return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}

inline __int128 floor_div128(__int128 a, __int128 b) {
  __int128 q = a / b, r = a % b;
  return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}

}  // namespace fractlab
