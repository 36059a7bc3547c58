#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <iosfwd>
#include <string>
#include <string_view>

namespace relset {

// Exact fraction over arbitrary-precision integers. Always in lowest terms
// with a positive denominator; every operation is exact (no rounding).
class Rational {
public:
  using Int = boost::multiprecision::cpp_int;

  Rational() : num_(0), den_(1) {}
  Rational(long long value) : num_(value), den_(1) {}
  Rational(Int numerator, Int denominator);

  // Accepts "p/q", plain integers and decimal strings ("0.03" -> 3/100).
  static Rational parse(std::string_view text);

  const Int& numerator() const { return num_; }
  const Int& denominator() const { return den_; }
  bool is_zero() const { return num_ == 0; }

  Rational& operator+=(const Rational& o);
  Rational& operator-=(const Rational& o);
  Rational& operator*=(const Rational& o);
  Rational& operator/=(const Rational& o);  // throws on division by zero

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  Rational operator-() const;

  friend bool operator==(const Rational&, const Rational&) = default;
  friend bool operator<(const Rational& a, const Rational& b) { return a.cmp(b) < 0; }
  friend bool operator>(const Rational& a, const Rational& b) { return a.cmp(b) > 0; }
  friend bool operator<=(const Rational& a, const Rational& b) { return a.cmp(b) <= 0; }
  friend bool operator>=(const Rational& a, const Rational& b) { return a.cmp(b) >= 0; }

  std::string ratio_string() const;  // "7/256"; integers keep the "/1"
  std::string decimal_string(int significant = 6) const;
  double to_double() const;

private:
  int cmp(const Rational& o) const;
  void normalize();
  Int num_, den_;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

}  // namespace relset
