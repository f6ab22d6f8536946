#include "krflow/formal_expansion.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <sstream>

#include "krflow/errors.hpp"

namespace krf {

namespace {

void check_order(int order) {
  if (order < 1) fail(ErrorKind::InvalidArgument, "expansion order must be >= 1");
}

// (n-1) log E_b + log E_f for omega = omega_0 - T Ric(omega_0) + sqrt(-1) d dbar u,
// E_b = 1 - T (lambda - n) w - sum j u_j w^{j+1}, E_f = 1 + sum j^2 u_j w^{j+1}.
PolySeries log_volume_ratio(const ExpansionParams& params, const std::vector<Poly>& u, const Poly& ric_time,
                            int order) {
  PolySeries xb(order + 1), xf(order + 1);
  if (order >= 1) xb[1] -= ric_time * (params.lambda - params.n);
  for (int j = 1; j < static_cast<int>(u.size()) && j + 1 <= order; ++j) {
    xb[j + 1] -= u[j] * Rational(j);
    xf[j + 1] += u[j] * Rational(j * j);
  }
  PolySeries s = series_log1p(xb, order);
  for (auto& p : s) p *= params.n - 1;
  const PolySeries lf = series_log1p(xf, order);
  for (int j = 0; j <= order; ++j) s[j] += lf[j];
  return s;
}

std::vector<Poly> constant_polys(const std::vector<Rational>& a) {
  std::vector<Poly> out;
  for (const auto& v : a) out.emplace_back(v);
  return out;
}

}  // namespace

double TruncatedExpansion::evaluate(double w, double t) const {
  double acc = 0.0, wp = 1.0;
  for (const auto& c : coeffs) {
    acc += c.evaluate(t) * wp;
    wp *= w;
  }
  return acc;
}

bool operator==(const TruncatedExpansion& a, const TruncatedExpansion& b) {
  return a.order == b.order && a.params.n == b.params.n && a.params.lambda == b.params.lambda &&
         a.coeffs == b.coeffs && a.cone == b.cone;
}

TruncatedExpansion soliton_expand(const ExpansionParams& params, int order) {
  check_order(order);
  std::vector<Rational> a(order + 1, Rational(0));
  for (int j = 1; j <= order; ++j) {
    // slot j of the log volume ratio only involves a_1..a_{j-1}
    const auto s = log_volume_ratio(params, constant_polys(a), Poly(Rational(1)), j);
    a[j] = s[j].coeff(0) / Rational(j + 1);
  }
  TruncatedExpansion out;
  out.order = order;
  out.params = params;
  out.coeffs = constant_polys(a);
  return out;
}

std::vector<Rational> soliton_equation_residual(const ExpansionParams& params, const std::vector<Rational>& a,
                                                int order) {
  check_order(order);
  std::vector<Rational> padded(order + 1, Rational(0));
  for (int j = 1; j <= order && j < static_cast<int>(a.size()); ++j) padded[j] = a[j];
  const auto s = log_volume_ratio(params, constant_polys(padded), Poly(Rational(1)), order);
  std::vector<Rational> r(order + 1);
  for (int j = 0; j <= order; ++j) r[j] = s[j].coeff(0) - Rational(j + 1) * padded[j];
  return r;
}

TruncatedExpansion gradient_potential(const TruncatedExpansion& soliton) {
  TruncatedExpansion f = soliton;
  f.cone = Poly(Rational(-1));
  for (int j = 0; j <= f.order; ++j) f.coeffs[j] = soliton.coeffs[j] * Rational(j);
  return f;
}

bool GradientIdentityResidual::is_zero() const {
  for (const auto* v : {&potential, &base, &fiber})
    for (const auto& q : *v)
      if (q != 0) return false;
  return true;
}

GradientIdentityResidual gradient_identity_residual(const TruncatedExpansion& soliton,
                                                    const TruncatedExpansion& potential) {
  const int k = soliton.order;
  const auto& p = soliton.params;
  std::vector<Rational> a(k + 1), f(k + 1);
  for (int j = 0; j <= k; ++j) {
    a[j] = soliton.coeffs[j].coeff(0);
    f[j] = potential.coeffs.at(j).coeff(0);
  }
  const Rational f_cone = potential.cone.coeff(0);
  // d/d rho acts on w^j as -j and on e^rho as +1
  GradientIdentityResidual r;
  r.potential.assign(k + 2, Rational(0));
  r.base.assign(k + 1, Rational(0));
  r.fiber.assign(k + 1, Rational(0));
  // slot k+1 of the potential identity holds the e^rho part
  r.potential[k + 1] = f_cone + 1;
  for (int j = 1; j <= k; ++j) r.potential[j] = -Rational(j) * f[j] + Rational(j * j) * a[j];
  r.potential[0] = 0;

  const auto s = log_volume_ratio(p, constant_polys(a), Poly(Rational(1)), k);
  // phi = e^rho + (n - lambda) - sum j a_j w^j, r_base = lambda - n + sum j s_j w^j,
  // psi = e^rho + sum j^2 a_j w^j, r_fiber = -sum j^2 s_j w^j
  r.base[0] = (p.n - p.lambda) + (p.lambda - p.n) + f_cone + 1;
  r.fiber[0] = f_cone + 1;
  for (int j = 1; j <= k; ++j) {
    const Rational sj = s[j].coeff(0);
    r.base[j] = -Rational(j) * a[j] + Rational(j) * sj - Rational(j) * f[j];
    r.fiber[j] = Rational(j * j) * a[j] - Rational(j * j) * sj + Rational(j * j) * f[j];
  }
  return r;
}

TruncatedExpansion flow_expand(const ExpansionParams& params, int order, const std::map<int, Rational>& constants) {
  check_order(order);
  for (const auto& [weight, value] : constants) {
    if (weight < 0) fail(ErrorKind::InvalidArgument, "negative weight constant");
    if (weight % 2 != 0 && value != 0) {
      fail(ErrorKind::OddWeightConstant,
           "constant of odd weight " + std::to_string(weight) + " must vanish for radial data");
    }
  }
  auto constant = [&](int j) {
    const auto it = constants.find(2 * j);
    return it == constants.end() ? Rational(0) : it->second;
  };
  std::vector<Poly> u(order + 1);
  for (int j = 0; j <= order; ++j) u[j] = Poly(constant(j));
  const Poly t = Poly::monomial(Rational(1), 1);
  for (int j = 1; j <= order; ++j) {
    std::vector<Poly> known(u.begin(), u.begin() + j);
    const auto s = log_volume_ratio(params, known, t, j);
    u[j] = Poly(constant(j)) + s[j].integral();
  }
  TruncatedExpansion out;
  out.order = order;
  out.params = params;
  out.coeffs = u;
  out.time_dependent = true;
  return out;
}

std::vector<Poly> flow_cascade_rhs(const TruncatedExpansion& u) {
  return log_volume_ratio(u.params, u.coeffs, Poly::monomial(Rational(1), 1), u.order);
}

TruncatedExpansion blowdown(const TruncatedExpansion& expansion) {
  TruncatedExpansion out = expansion;
  for (int j = 0; j <= out.order; ++j) {
    const Rational top = expansion.coeffs[j].coeff(j + 1);
    out.coeffs[j] = top == 0 ? Poly() : Poly::monomial(top, j + 1);
  }
  out.cone = Poly();
  return out;
}

TruncatedExpansion parabolic_rescale(const TruncatedExpansion& expansion, const Rational& s2) {
  if (s2 <= 0) fail(ErrorKind::InvalidArgument, "rescaling factor must be positive");
  TruncatedExpansion out = expansion;
  for (int j = 0; j <= out.order; ++j) {
    Poly p;
    const auto& c = expansion.coeffs[j].coeffs();
    for (int d = 0; d < static_cast<int>(c.size()); ++d) {
      if (c[d] == 0) continue;
      const int e = d - j - 1;
      Rational f = 1;
      for (int i = 0; i < std::abs(e); ++i) f *= s2;
      p += Poly::monomial(e >= 0 ? Rational(c[d] * f) : Rational(c[d] / f), d);
    }
    out.coeffs[j] = p;
  }
  return out;
}

TruncatedExpansion at_time(const TruncatedExpansion& expansion, const Rational& t) {
  TruncatedExpansion out = expansion;
  for (auto& c : out.coeffs) c = Poly(c(t));
  out.cone = Poly(expansion.cone(t));
  out.time_dependent = false;
  return out;
}

std::string expansion_csv(const TruncatedExpansion& e) {
  std::ostringstream os;
  os << "j,coeff_t_power,numerator,denominator\n";
  auto row = [&](int j, int d, const Rational& q) {
    os << j << ',' << d << ',' << boost::multiprecision::numerator(q) << ','
       << boost::multiprecision::denominator(q) << '\n';
  };
  const auto& cc = e.cone.coeffs();
  for (int d = 0; d < static_cast<int>(cc.size()); ++d)
    if (cc[d] != 0) row(-1, d, cc[d]);
  for (int j = 0; j <= e.order; ++j) {
    const auto& c = e.coeffs[j].coeffs();
    for (int d = 0; d < static_cast<int>(c.size()); ++d)
      if (c[d] != 0) row(j, d, c[d]);
  }
  return os.str();
}

std::string pretty_print(const TruncatedExpansion& e, const std::string& name) {
  std::ostringstream os;
  os << name << " =";
  bool any = false;
  auto term = [&](const Rational& q, int d, const std::string& wpart) {
    const bool neg = q < 0;
    const Rational mag = neg ? Rational(-q) : q;
    os << (any ? (neg ? " - " : " + ") : (neg ? " -" : " "));
    const bool bare = d == 0 && wpart.empty();
    if (mag != 1 || bare) os << to_string(mag) << ((d > 0 || !wpart.empty()) ? " " : "");
    if (d == 1) os << "t" << (wpart.empty() ? "" : " ");
    if (d > 1) os << "t^" << d << (wpart.empty() ? "" : " ");
    os << wpart;
    any = true;
  };
  const auto& cc = e.cone.coeffs();
  for (int d = 0; d < static_cast<int>(cc.size()); ++d)
    if (cc[d] != 0) term(cc[d], d, "e^rho");
  for (int j = 0; j <= e.order; ++j) {
    const std::string wpart = j == 0 ? "" : (j == 1 ? "w" : "w^" + std::to_string(j));
    const auto& c = e.coeffs[j].coeffs();
    for (int d = 0; d < static_cast<int>(c.size()); ++d)
      if (c[d] != 0) term(c[d], d, wpart);
  }
  if (!any) os << " 0";
  os << " + O(w^" << e.order + 1 << ")";
  return os.str();
}

std::vector<double> truncated_soliton_residual(const TruncatedExpansion& soliton, const std::vector<double>& rho) {
  using Big = boost::multiprecision::cpp_bin_float_100;
  const Big n(static_cast<Big>(soliton.params.n));
  const Big lambda(static_cast<Big>(soliton.params.lambda));
  std::vector<Big> a(soliton.order + 1);
  for (int j = 0; j <= soliton.order; ++j) a[j] = static_cast<Big>(soliton.coeffs[j].coeff(0));
  std::vector<double> out;
  out.reserve(rho.size());
  for (double r : rho) {
    const Big e = exp(Big(r));
    const Big w = 1 / e;
    Big phi = e + (n - lambda), psi = e, dpsi = e, wj = 1;
    for (int j = 1; j <= soliton.order; ++j) {
      wj *= w;
      phi -= j * a[j] * wj;
      psi += j * j * a[j] * wj;
      dpsi -= j * j * j * a[j] * wj;
    }
    const Big dq = (n - 1) * psi / phi + dpsi / psi;
    const Big res = psi - phi - lambda + dq;
    out.push_back(static_cast<double>(abs(res)));
  }
  return out;
}

}  // namespace krf
