#include "krflow/series.hpp"

#include <algorithm>

#include "krflow/errors.hpp"

namespace krf {

Rational parse_rational(const std::string& text) {
  try {
    const auto slash = text.find('/');
    if (slash != std::string::npos)
      return Rational(boost::multiprecision::cpp_int(text.substr(0, slash)),
                      boost::multiprecision::cpp_int(text.substr(slash + 1)));
    const auto dot = text.find('.');
    if (dot != std::string::npos) {
      std::string digits = text.substr(0, dot) + text.substr(dot + 1);
      boost::multiprecision::cpp_int den = 1;
      for (std::size_t i = dot + 1; i < text.size(); ++i) den *= 10;
      return Rational(boost::multiprecision::cpp_int(digits), den);
    }
    return Rational(boost::multiprecision::cpp_int(text));
  } catch (const std::exception&) {
    fail(ErrorKind::InvalidArgument, "cannot parse rational '" + text + "'");
  }
}

std::string to_string(const Rational& q) {
  const auto num = boost::multiprecision::numerator(q);
  const auto den = boost::multiprecision::denominator(q);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

Poly::Poly(Rational constant) : c_{std::move(constant)} {}

Poly Poly::monomial(Rational coeff, int degree) {
  Poly p;
  p.c_.assign(degree + 1, Rational(0));
  p.c_[degree] = std::move(coeff);
  return p;
}

int Poly::degree() const {
  for (int d = static_cast<int>(c_.size()) - 1; d >= 0; --d)
    if (c_[d] != 0) return d;
  return -1;
}

Rational Poly::coeff(int d) const { return d >= 0 && d < static_cast<int>(c_.size()) ? c_[d] : Rational(0); }

Poly& Poly::operator+=(const Poly& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), Rational(0));
  for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), Rational(0));
  for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

Poly& Poly::operator*=(const Rational& s) {
  for (auto& v : c_) v *= s;
  return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
  const int da = a.degree(), db = b.degree();
  Poly out;
  if (da < 0 || db < 0) return out;
  out.c_.assign(da + db + 1, Rational(0));
  for (int i = 0; i <= da; ++i) {
    if (a.c_[i] == 0) continue;
    for (int j = 0; j <= db; ++j) out.c_[i + j] += a.c_[i] * b.c_[j];
  }
  return out;
}

Poly Poly::integral() const {
  Poly out;
  out.c_.assign(c_.size() + 1, Rational(0));
  for (std::size_t d = 0; d < c_.size(); ++d) out.c_[d + 1] = c_[d] / Rational(static_cast<long>(d + 1));
  return out;
}

Poly Poly::derivative() const {
  Poly out;
  for (std::size_t d = 1; d < c_.size(); ++d) out.c_.push_back(c_[d] * Rational(static_cast<long>(d)));
  return out;
}

Rational Poly::operator()(const Rational& t) const {
  Rational acc = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * t + *it;
  return acc;
}

double Poly::evaluate(double t) const {
  double acc = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * t + static_cast<double>(*it);
  return acc;
}

Poly Poly::trimmed() const {
  Poly out = *this;
  while (!out.c_.empty() && out.c_.back() == 0) out.c_.pop_back();
  return out;
}

PolySeries series_mul(const PolySeries& a, const PolySeries& b, int order) {
  PolySeries out(order + 1);
  for (int i = 0; i <= order && i < static_cast<int>(a.size()); ++i) {
    if (a[i].is_zero()) continue;
    for (int j = 0; i + j <= order && j < static_cast<int>(b.size()); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

static void require_no_constant(const PolySeries& x) {
  if (!x.empty() && !x[0].is_zero())
    fail(ErrorKind::InvalidArgument, "series log/exp need an argument without constant term");
}

PolySeries series_log1p(const PolySeries& x, int order) {
  require_no_constant(x);
  PolySeries out(order + 1), power = x;
  power.resize(order + 1);
  for (int k = 1; k <= order; ++k) {
    const Rational s = Rational(k % 2 ? 1 : -1) / Rational(k);
    for (int j = 0; j <= order; ++j) out[j] += power[j] * s;
    power = series_mul(power, x, order);
  }
  return out;
}

PolySeries series_exp(const PolySeries& x, int order) {
  require_no_constant(x);
  PolySeries out(order + 1), power(order + 1);
  out[0] = Poly(Rational(1));
  power[0] = Poly(Rational(1));
  Rational fact = 1;
  for (int k = 1; k <= order; ++k) {
    power = series_mul(power, x, order);
    fact *= k;
    for (int j = 0; j <= order; ++j) out[j] += power[j] * (Rational(1) / fact);
  }
  return out;
}

}  // namespace krf
