#include "relset/rational.hpp"

#include <ostream>
#include <stdexcept>

namespace relset {

namespace {
Rational::Int pow10(int k) {
  Rational::Int r = 1;
  while (k-- > 0) r *= 10;
  return r;
}
}  // namespace

Rational::Rational(Int numerator, Int denominator) : num_(std::move(numerator)), den_(std::move(denominator)) {
  if (den_ == 0) throw std::invalid_argument("rational with zero denominator");
  normalize();
}

void Rational::normalize() {
  if (den_ < 0) {
    num_ = -num_;
    den_ = -den_;
  }
  if (num_ == 0) {
    den_ = 1;
    return;
  }
  Int g = boost::multiprecision::gcd(num_ < 0 ? Int(-num_) : num_, den_);
  if (g > 1) {
    num_ /= g;
    den_ /= g;
  }
}

Rational Rational::parse(std::string_view text) {
  auto fail = [&] { throw std::invalid_argument("cannot parse rational: '" + std::string(text) + "'"); };
  if (text.empty()) fail();
  size_t pos = 0;
  bool neg = false;
  if (text[pos] == '-' || text[pos] == '+') {
    neg = text[pos] == '-';
    ++pos;
  }
  auto read_digits = [&](std::string& out) {
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') out.push_back(text[pos++]);
  };
  std::string ip;
  read_digits(ip);
  if (pos < text.size() && text[pos] == '/') {
    ++pos;
    std::string qs;
    read_digits(qs);
    if (ip.empty() || qs.empty() || pos != text.size()) fail();
    Int p(ip), q(qs);
    if (q == 0) fail();
    return Rational(neg ? -p : p, q);
  }
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    std::string fp;
    read_digits(fp);
    if ((ip.empty() && fp.empty()) || pos != text.size()) fail();
    Int scale = pow10(static_cast<int>(fp.size()));
    Int p = Int(ip.empty() ? "0" : ip) * scale + Int(fp.empty() ? "0" : fp);
    return Rational(neg ? -p : p, scale);
  }
  if (ip.empty() || pos != text.size()) fail();
  Int p(ip);
  return Rational(neg ? -p : p, 1);
}

Rational& Rational::operator+=(const Rational& o) {
  num_ = num_ * o.den_ + o.num_ * den_;
  den_ *= o.den_;
  normalize();
  return *this;
}

Rational& Rational::operator-=(const Rational& o) {
  num_ = num_ * o.den_ - o.num_ * den_;
  den_ *= o.den_;
  normalize();
  return *this;
}

Rational& Rational::operator*=(const Rational& o) {
  num_ *= o.num_;
  den_ *= o.den_;
  normalize();
  return *this;
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.num_ == 0) throw std::invalid_argument("rational division by zero");
  num_ *= o.den_;
  den_ *= o.num_;
  normalize();
  return *this;
}

Rational Rational::operator-() const {
  Rational r = *this;
  r.num_ = -r.num_;
  return r;
}

int Rational::cmp(const Rational& o) const {
  Int lhs = num_ * o.den_;
  Int rhs = o.num_ * den_;
  if (lhs < rhs) return -1;
  if (lhs > rhs) return 1;
  return 0;
}

std::string Rational::ratio_string() const { return num_.str() + "/" + den_.str(); }

std::string Rational::decimal_string(int significant) const {
  if (num_ == 0) return "0";
  std::string out;
  Int p = num_ < 0 ? Int(-num_) : num_;
  if (num_ < 0) out.push_back('-');

  // Decimal exponent e with 10^e <= p/q < 10^(e+1).
  int e = static_cast<int>(p.str().size()) - static_cast<int>(den_.str().size());
  Int lhs = e >= 0 ? p : p * pow10(-e);
  Int rhs = e >= 0 ? den_ * pow10(e) : den_;
  if (lhs < rhs) --e;

  // Round p/q to `significant` digits, half away from zero.
  int k = significant - 1 - e;
  Int digits;
  if (k >= 0)
    digits = (2 * p * pow10(k) + den_) / (2 * den_);
  else
    digits = (2 * p + den_ * pow10(-k)) / (2 * den_ * pow10(-k));
  Int cap = pow10(significant);
  if (digits >= cap) {
    digits /= 10;
    ++e;
  }
  std::string d = digits.str();

  if (e >= -7 && e <= 9) {
    if (e >= 0) {
      int int_len = e + 1;
      if (int_len >= static_cast<int>(d.size())) {
        out += d;
        out.append(int_len - d.size(), '0');
      } else {
        out += d.substr(0, int_len);
        out.push_back('.');
        out += d.substr(int_len);
      }
    } else {
      out += "0.";
      out.append(-e - 1, '0');
      out += d;
    }
  } else {
    out += d.substr(0, 1);
    out.push_back('.');
    out += d.substr(1);
    out.push_back('e');
    out += std::to_string(e);
  }
  return out;
}

double Rational::to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.ratio_string(); }

}  // namespace relset
