#pragma once

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "krflow/base_geometry.hpp"
#include "krflow/radial_profile.hpp"

namespace krf {

// The FIK profile function, stored as Bt(x) = B(4 e^{-x}) so that the soliton
// variable x = rho - log(t + t0) is the interpolation coordinate. s = 0 maps to
// x = +infinity, where Bt tends to B(0).
class BFunction {
 public:
  // uniform x samples with exact x-derivatives up to third order (quintic Hermite)
  BFunction(double x0, double hx, std::vector<double> value, std::vector<double> dvalue,
            std::vector<double> ddvalue, std::vector<double> dddvalue, double b0);
  // table of (s, B) pairs, s >= 0; an s = 0 row supplies B(0) (natural cubic spline in x)
  static BFunction from_table(const std::vector<double>& s, const std::vector<double>& b);

  double b0() const { return b0_; }
  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }

  // Bt, dBt/dx, d2Bt/dx2
  std::array<double, 3> tilde(double x) const;
  double operator()(double s) const;

  // rows (s, B) with s ascending, starting at s = 0
  std::vector<std::array<double, 2>> table() const;

 private:
  BFunction() = default;
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  double b0_ = 0.0;
  double x_min_ = 0.0;
  double x_max_ = 0.0;
};

enum class RegimeKind { Cylindrical, Bulging, Conical, FIK };

const char* to_string(RegimeKind kind);
RegimeKind regime_from_string(const std::string& name);

struct RegimeSpec {
  RegimeKind kind = RegimeKind::Conical;
  std::optional<double> c;
  std::optional<double> N;
  std::optional<double> k_log;
  std::optional<double> p;
  std::optional<double> t0;
  std::optional<double> offset;  // cylinder base coefficient a
  std::shared_ptr<const BFunction> B;

  double require(const std::optional<double>& field, const char* name) const;
};

RadialProfile make_cylindrical(double c, double offset, const BaseGeometry& base, const std::vector<double>& grid);
RadialProfile make_bulging(double N, const BaseGeometry& base, const std::vector<double>& grid);
RadialProfile make_conical(double k_log, const BaseGeometry& base, const std::vector<double>& grid);

// e^rho <-> |z|^{2p}: phi = (1/p) e^rho B(4 (t + t0) e^{-rho}), psi = d phi / d rho.
// Requires lambda = n / p (the divisor is CP^{n-1} with omega_D = p omega_FS).
RadialProfile make_fik(double p, double t0, const BFunction& B, const BaseGeometry& base,
                       const std::vector<double>& grid);

struct FikSlice {
  RadialProfile profile;
  std::vector<double> phi_dot;
  std::vector<double> psi_dot;
};

// member of the FIK family at flow time t together with its exact time derivative
FikSlice fik_family_at(double p, double t0, const BFunction& B, const BaseGeometry& base,
                       const std::vector<double>& grid, double t);

RadialProfile make_model(const RegimeSpec& spec, const BaseGeometry& base, const std::vector<double>& grid);

struct RegimeFit {
  double residual = 0.0;
  double value_residual = 0.0;
  double slope_residual = 0.0;
  std::map<std::string, double> parameters;
};

// Relative C^1 distance over the window between the profile and the regime's
// model pair with best-fit scale parameters. The value part compares phi and psi
// relative to the model; the slope part compares d/d rho of phi against the
// model's, in units of the model psi.
RegimeFit asymptotic_form_residual(const RadialProfile& profile, const RegimeSpec& spec, double window_lo,
                                   double window_hi);

// Least-squares fit of phi e^{-rho} = A + kappa w + sum_j b_j w^{j+1}, w = e^{-rho},
// i.e. phi = A e^rho + kappa + sum_j b_j w^j.
struct OuterExpansionFit {
  double cone_coefficient = 0.0;
  double constant = 0.0;
  std::vector<double> b;  // b[0] multiplies w^1
  double max_residual = 0.0;
};

OuterExpansionFit fit_outer_expansion(const RadialProfile& profile, double window_lo, double window_hi, int order);

}  // namespace krf
