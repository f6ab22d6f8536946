#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>
#include <vector>

namespace krf {

using Rational = boost::multiprecision::cpp_rational;

Rational parse_rational(const std::string& text);
std::string to_string(const Rational& q);

// Polynomial in t with exact rational coefficients; c[d] multiplies t^d.
class Poly {
 public:
  Poly() = default;
  explicit Poly(Rational constant);
  static Poly monomial(Rational coeff, int degree);

  int degree() const;  // -1 for the zero polynomial
  bool is_zero() const { return degree() < 0; }
  Rational coeff(int d) const;
  const std::vector<Rational>& coeffs() const { return c_; }

  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(const Rational& s);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(Poly a, const Rational& s) { return a *= s; }
  friend Poly operator*(const Poly& a, const Poly& b);
  friend bool operator==(const Poly& a, const Poly& b) { return a.trimmed().c_ == b.trimmed().c_; }

  Poly integral() const;    // from 0 to t
  Poly derivative() const;
  Rational operator()(const Rational& t) const;
  double evaluate(double t) const;

 private:
  Poly trimmed() const;
  std::vector<Rational> c_;
};

// Truncated power series in w with Poly coefficients; s[j] multiplies w^j.
using PolySeries = std::vector<Poly>;

PolySeries series_mul(const PolySeries& a, const PolySeries& b, int order);
// log(1 + x) and exp(x) for x without constant term, through w^order
PolySeries series_log1p(const PolySeries& x, int order);
PolySeries series_exp(const PolySeries& x, int order);

}  // namespace krf
