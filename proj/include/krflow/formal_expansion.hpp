#pragma once

#include <map>
#include <string>
#include <vector>

#include "krflow/series.hpp"

namespace krf {

struct ExpansionParams {
  Rational n = 2;
  Rational lambda = 2;
};

// u = cone e^rho + sum_{j=0..order} coeffs[j] w^j with w = e^{-rho}; coefficients
// are polynomials in t (constants for soliton data). The slot w^j holds the
// radial weight-2j term; odd weights never occur.
struct TruncatedExpansion {
  int order = 0;
  ExpansionParams params;
  std::vector<Poly> coeffs;
  Poly cone;
  bool time_dependent = false;

  Rational at(int j, int t_power = 0) const { return coeffs.at(j).coeff(t_power); }
  // evaluates the w-series (without the cone part) at numerical w and t
  double evaluate(double w, double t = 1.0) const;
  friend bool operator==(const TruncatedExpansion& a, const TruncatedExpansion& b);
};

// coefficients a_1..a_K of the radial formal expanding soliton u = sum a_j w^j
TruncatedExpansion soliton_expand(const ExpansionParams& params, int order);

// LHS - RHS of log(omega^n / omega_0^n) = sum (j+1) a_j w^j for arbitrary a (a[j] for j >= 1)
std::vector<Rational> soliton_equation_residual(const ExpansionParams& params, const std::vector<Rational>& a,
                                                int order);

// F = -e^rho + sum j a_j w^j
TruncatedExpansion gradient_potential(const TruncatedExpansion& soliton);

struct GradientIdentityResidual {
  std::vector<Rational> potential;  // F' + psi
  std::vector<Rational> base;       // phi + r_base + mu F'
  std::vector<Rational> fiber;      // psi + r_fiber + F''
  bool is_zero() const;
};

// Reduced identities for V = grad F: i_V omega = sqrt(-1) dbar F becomes F' = -psi, and the
// soliton equation becomes omega + Ric(omega) = -sqrt(-1) d dbar F, both through order K.
GradientIdentityResidual gradient_identity_residual(const TruncatedExpansion& soliton,
                                                    const TruncatedExpansion& potential);

// Solves d_t u = log((omega_0 - t Ric(omega_0) + sqrt(-1) d dbar u)^n / omega_0^n) order by order.
// constants maps L_V-weight k to the free constant c_k (k even; odd weights must vanish).
TruncatedExpansion flow_expand(const ExpansionParams& params, int order, const std::map<int, Rational>& constants);

// right side of the cascade evaluated on an expansion, slot by slot
std::vector<Poly> flow_cascade_rhs(const TruncatedExpansion& u);

// keeps the degree-(j+1) monomial in t of every w^j slot
TruncatedExpansion blowdown(const TruncatedExpansion& expansion);

// parabolic rescaling u -> s^{-2} u(w s^2 ... ) at the series level: t^d w^j -> s2^{d-j-1} t^d w^j
TruncatedExpansion parabolic_rescale(const TruncatedExpansion& expansion, const Rational& s2);

// evaluates every slot at time t
TruncatedExpansion at_time(const TruncatedExpansion& expansion, const Rational& t);

std::string expansion_csv(const TruncatedExpansion& e);
std::string pretty_print(const TruncatedExpansion& e, const std::string& name = "u");

// Residual of the reduced soliton ODE phi' - phi - lambda + Q' for the order-K truncation,
// evaluated in 100-digit floating point at each rho.
std::vector<double> truncated_soliton_residual(const TruncatedExpansion& soliton, const std::vector<double>& rho);

}  // namespace krf
