#pragma once

#include <functional>
#include <string>
#include <vector>

#include "krflow/flow_solver.hpp"
#include "krflow/radial_profile.hpp"

namespace krf {

enum class RescalingRegime { Bulging, Conical };

struct RescalingSpec {
  RescalingRegime regime = RescalingRegime::Conical;
  double scale = 1.0;  // r for bulging, s for conical
  double N = 2.0;      // bulging only
  double window_lo = 0.0;
  double window_hi = 1.0;
  std::vector<double> times;  // rescaled times
  double time_origin = 0.0;   // conical: trajectory time mapped to rescaled time 0
};

struct RescaledSlice {
  double time = 0.0;
  std::vector<double> rho_hat;
  std::vector<double> phi_hat;
  std::vector<double> psi_hat;
  RadialProfile profile() const;
};

struct RescaledSamples {
  RescalingSpec spec;
  std::vector<RescaledSlice> slices;
};

// Bulging chart: alpha_r(u) = r u + sqrt(-1) r^2 / 2 with rho = 2 Im u, so
//   rho = r^2 + r rho_hat,  t = r^{2/N} t_hat,
//   phi_hat = r^{-2/N} phi,  psi_hat = r^{2 - 2/N} psi
// (d rho = r d rho_hat puts r^2 on the fiber slot before the overall r^{-2/N}).
RescaledSamples bulging_rescale(const FlowTrajectory& traj, const RescalingSpec& spec);

// Cone dilation: rho_hat = rho - 2 log s, t_hat = (t - origin) / s^2, coefficients / s^2.
RescaledSamples conical_blowdown(const FlowTrajectory& traj, const RescalingSpec& spec);

// applies a further cone dilation by s to already rescaled conical samples
RescaledSamples conical_blowdown(const RescaledSamples& samples, double s);

struct ProductLimitRow {
  double scale = 0.0;
  double time = 0.0;
  double sup_error = 0.0;
  double l2_error = 0.0;
  double fitted_coefficient = 0.0;  // geometric mean of phi_hat over the window
};

// Deviation of (phi_hat, psi_hat) from (C1 law(t), C2) with C1 = (N+1)^2 / (2N),
// C2 = (N+1)^2 / (2N^2), relative to the limit pair.
std::vector<ProductLimitRow> product_limit_error(const RescaledSamples& samples,
                                                 const std::function<double(double)>& divisor_law);

double max_sup_error(const std::vector<ProductLimitRow>& rows);

std::string product_limit_csv(const std::vector<ProductLimitRow>& rows);

}  // namespace krf
