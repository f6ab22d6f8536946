#include "krflow/radial_profile.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "krflow/errors.hpp"
#include "krflow/finite_difference.hpp"

namespace krf {

RadialProfile::RadialProfile(std::vector<double> rho, std::vector<double> phi, std::vector<double> psi,
                             double closedness_scale)
    : rho_(std::move(rho)), phi_(std::move(phi)), psi_(std::move(psi)), closedness_scale_(closedness_scale) {
  if (phi_.size() != rho_.size() || psi_.size() != rho_.size())
    fail(ErrorKind::InvalidArgument, "rho, phi and psi must have equal length");
  if (rho_.size() < static_cast<std::size_t>(fd::kMinPoints))
    fail(ErrorKind::GridTooCoarse, "need at least 5 grid points, got " + std::to_string(rho_.size()));
  const int n = size();
  h_ = (rho_.back() - rho_.front()) / (n - 1);
  if (!(h_ > 0.0) || !std::isfinite(h_)) fail(ErrorKind::GridNotUniform, "grid must be strictly increasing");
  for (int i = 1; i < n; ++i) {
    const double d = rho_[i] - rho_[i - 1];
    if (std::abs(d - h_) > 1e-8 * h_) {
      std::ostringstream os;
      os << "spacing " << d << " at index " << i << " differs from " << h_;
      fail(ErrorKind::GridNotUniform, os.str());
    }
  }
  for (int i = 0; i < n; ++i) {
    if (!(phi_[i] > 0.0) || !(psi_[i] > 0.0) || !std::isfinite(phi_[i]) || !std::isfinite(psi_[i])) {
      std::ostringstream os;
      os << "phi=" << phi_[i] << ", psi=" << psi_[i] << " at rho=" << rho_[i];
      fail(ErrorKind::NonKaehler, os.str());
    }
  }
}

double RadialProfile::min_phi() const { return *std::min_element(phi_.begin(), phi_.end()); }
double RadialProfile::min_psi() const { return *std::min_element(psi_.begin(), psi_.end()); }

int RadialProfile::locate(double rho) const {
  const int i = static_cast<int>(std::floor((rho - rho_.front()) / h_));
  return std::clamp(i, 0, size() - 1);
}

double closedness_defect(const RadialProfile& profile, int mu) {
  const auto dphi = fd::d1(profile.phi(), profile.spacing());
  double worst = 0.0;
  for (int i = fd::kUntrustedMargin; i < profile.size() - fd::kUntrustedMargin; ++i)
    worst = std::max(worst, std::abs(dphi[i] - mu * profile.psi()[i]));
  return worst;
}

std::pair<int, int> window_indices(const RadialProfile& profile, double lo, double hi) {
  const double tol = 1e-9 * profile.spacing();
  if (!(lo < hi) || lo < profile.rho_min() - tol || hi > profile.rho_max() + tol) {
    std::ostringstream os;
    os << "window [" << lo << ", " << hi << "] not inside grid [" << profile.rho_min() << ", "
       << profile.rho_max() << "]";
    fail(ErrorKind::OutOfRange, os.str());
  }
  const double h = profile.spacing();
  int i0 = static_cast<int>(std::ceil((lo - profile.rho_min()) / h - 1e-9));
  int i1 = static_cast<int>(std::floor((hi - profile.rho_min()) / h + 1e-9));
  i0 = std::clamp(i0, 0, profile.size() - 1);
  i1 = std::clamp(i1, 0, profile.size() - 1);
  return {i0, i1};
}

bool identical(const RadialProfile& a, const RadialProfile& b) {
  return a.rho() == b.rho() && a.phi() == b.phi() && a.psi() == b.psi();
}

}  // namespace krf
