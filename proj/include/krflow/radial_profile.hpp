#pragma once

#include <string>
#include <utility>
#include <vector>

#include "krflow/base_geometry.hpp"

namespace krf {

// Sampled coefficients of omega = phi omega_D + psi sqrt(-1) d rho ^ dbar rho
// on a uniform rho grid. Immutable once built.
class RadialProfile {
 public:
  RadialProfile(std::vector<double> rho, std::vector<double> phi, std::vector<double> psi,
                double closedness_scale = 0.0);

  const std::vector<double>& rho() const { return rho_; }
  const std::vector<double>& phi() const { return phi_; }
  const std::vector<double>& psi() const { return psi_; }
  int size() const { return static_cast<int>(rho_.size()); }
  double spacing() const { return h_; }
  double rho_min() const { return rho_.front(); }
  double rho_max() const { return rho_.back(); }
  double min_phi() const;
  double min_psi() const;

  // Bound on the interior closedness defect recorded by the constructor that
  // built the profile; 0 when unknown.
  double closedness_scale() const { return closedness_scale_; }

  // index of the last grid point <= rho (clamped)
  int locate(double rho) const;

 private:
  std::vector<double> rho_;
  std::vector<double> phi_;
  std::vector<double> psi_;
  double h_ = 0.0;
  double closedness_scale_ = 0.0;
};

// max over interior points of |d phi/d rho - mu psi|
double closedness_defect(const RadialProfile& profile, int mu);

// first and last grid indices inside [lo, hi]; OutOfRange when the window leaves the grid
std::pair<int, int> window_indices(const RadialProfile& profile, double lo, double hi);

bool identical(const RadialProfile& a, const RadialProfile& b);

}  // namespace krf
