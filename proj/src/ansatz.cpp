#include "krflow/ansatz.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "krflow/errors.hpp"
#include "krflow/finite_difference.hpp"

namespace krf {

RadialProfile profile_from_potential(const std::vector<double>& rho, const std::vector<double>& potential,
                                     const BaseGeometry& base, double offset) {
  base.validate();
  if (rho.size() != potential.size()) fail(ErrorKind::InvalidArgument, "potential and grid differ in length");
  if (rho.size() < static_cast<std::size_t>(fd::kMinPoints))
    fail(ErrorKind::GridTooCoarse, "need at least 5 grid points");
  const double h = (rho.back() - rho.front()) / (rho.size() - 1);
  std::vector<double> phi(rho.size()), psi;
  if (base.mu == 1) {
    const auto dp = fd::d1(potential, h);
    for (std::size_t i = 0; i < rho.size(); ++i) phi[i] = offset + dp[i];
    psi = fd::d1(phi, h);
  } else {
    if (!(offset > 0.0)) fail(ErrorKind::NonKaehler, "mu = 0 requires a positive base offset");
    std::fill(phi.begin(), phi.end(), offset);
    psi = fd::d2(potential, h);
  }
  double scale = 0.0;
  for (double v : fd::d1(psi, h)) scale = std::max(scale, std::abs(v));
  return RadialProfile(rho, std::move(phi), std::move(psi), 10.0 * h * h * scale + 1e-12);
}

std::vector<double> log_volume_density(const RadialProfile& profile, const BaseGeometry& base) {
  std::vector<double> q(profile.size());
  for (int i = 0; i < profile.size(); ++i)
    q[i] = (base.n - 1) * std::log(profile.phi()[i]) + std::log(profile.psi()[i]);
  return q;
}

RicciCoefficients ricci_coefficients(const RadialProfile& profile, const BaseGeometry& base) {
  base.validate();
  const auto q = log_volume_density(profile, base);
  const auto dq = fd::d1(q, profile.spacing());
  const auto ddq = fd::d2(q, profile.spacing());
  RicciCoefficients out;
  out.r_base.resize(q.size());
  out.r_fiber.resize(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    out.r_base[i] = base.lambda - base.mu * dq[i];
    out.r_fiber[i] = -ddq[i];
  }
  out.untrusted_margin = fd::kUntrustedMargin;
  return out;
}

std::vector<double> scalar_curvature(const RadialProfile& profile, const BaseGeometry& base) {
  const auto ric = ricci_coefficients(profile, base);
  std::vector<double> r(profile.size());
  for (int i = 0; i < profile.size(); ++i)
    r[i] = kScalarCurvatureFactor *
           ((base.n - 1) * ric.r_base[i] / profile.phi()[i] + ric.r_fiber[i] / profile.psi()[i]);
  return r;
}

std::vector<double> ricci_norm(const RadialProfile& profile, const BaseGeometry& base) {
  const auto ric = ricci_coefficients(profile, base);
  std::vector<double> r(profile.size());
  for (int i = 0; i < profile.size(); ++i) {
    const double eb = ric.r_base[i] / profile.phi()[i];
    const double ef = ric.r_fiber[i] / profile.psi()[i];
    r[i] = std::sqrt(2.0 * ((base.n - 1) * eb * eb + ef * ef));
  }
  return r;
}

static double arc_density(const RadialProfile& profile, double rho) {
  const double psi = fd::interpolate_cubic(profile.rho_min(), profile.spacing(), profile.psi(), rho);
  return kRadialLengthFactor * std::sqrt(std::max(psi, 0.0));
}

double radial_distance(const RadialProfile& profile, double rho0, double rho1) {
  const double tol = 1e-12 * std::max(1.0, std::abs(profile.rho_max()));
  if (rho0 < profile.rho_min() - tol || rho1 > profile.rho_max() + tol || !(rho0 <= rho1)) {
    std::ostringstream os;
    os << "[" << rho0 << ", " << rho1 << "] not inside [" << profile.rho_min() << ", " << profile.rho_max() << "]";
    fail(ErrorKind::OutOfRange, os.str());
  }
  if (rho0 == rho1) return 0.0;
  // composite Simpson on a mesh at least twice as fine as the grid
  int m = 2 * static_cast<int>(std::ceil((rho1 - rho0) / profile.spacing()));
  m = std::max(m, 2);
  const double h = (rho1 - rho0) / m;
  double acc = arc_density(profile, rho0) + arc_density(profile, rho1);
  for (int k = 1; k < m; ++k) acc += (k % 2 ? 4.0 : 2.0) * arc_density(profile, rho0 + k * h);
  return acc * h / 3.0;
}

std::vector<double> distance_from_start(const RadialProfile& profile) {
  const int n = profile.size();
  const double h = profile.spacing();
  std::vector<double> s(n, 0.0);
  for (int i = 0; i + 1 < n; ++i) {
    const double a = kRadialLengthFactor * std::sqrt(profile.psi()[i]);
    const double b = kRadialLengthFactor * std::sqrt(profile.psi()[i + 1]);
    const double mid = arc_density(profile, profile.rho()[i] + 0.5 * h);
    s[i + 1] = s[i] + h / 6.0 * (a + 4.0 * mid + b);
  }
  return s;
}

double CurvatureComponents::norm() const {
  return std::sqrt(2.0 * m * (m + 1.0) * b * b + 4.0 * m * c * c + d * d);
}

CurvatureComponents curvature_components(double phi, double psi, double dpsi, double ddpsi,
                                         const BaseGeometry& base) {
  const int m = base.n - 1;
  const double mu = base.mu;
  const double kappa = base.base_curvature();
  CurvatureComponents out;
  out.b = (kappa * phi - mu * mu * psi) / (phi * phi);
  out.c = (-mu * dpsi + mu * mu * psi * psi / phi) / (phi * psi);
  out.d = (-ddpsi + dpsi * dpsi / psi) / (psi * psi);
  out.m = m;
  return out;
}

std::vector<double> curvature_norm_samples(const RadialProfile& profile, const BaseGeometry& base) {
  base.validate();
  const auto dpsi = fd::d1(profile.psi(), profile.spacing());
  const auto ddpsi = fd::d2(profile.psi(), profile.spacing());
  std::vector<double> out(profile.size());
  for (int i = 0; i < profile.size(); ++i)
    out[i] = curvature_components(profile.phi()[i], profile.psi()[i], dpsi[i], ddpsi[i], base).norm();
  return out;
}

double curvature_norm_at(const RadialProfile& profile, const BaseGeometry& base, double rho) {
  base.validate();
  const double h = profile.spacing();
  const double margin = fd::kUntrustedMargin * h * (1.0 - 1e-9);
  if (rho < profile.rho_min() + margin || rho > profile.rho_max() - margin) {
    std::ostringstream os;
    os << "rho=" << rho << " within two grid spacings of the boundary";
    fail(ErrorKind::TooCloseToBoundary, os.str());
  }
  const auto dpsi = fd::d1(profile.psi(), h);
  const auto ddpsi = fd::d2(profile.psi(), h);
  const double x0 = profile.rho_min();
  const double phi = fd::interpolate_cubic(x0, h, profile.phi(), rho);
  const double psi = fd::interpolate_cubic(x0, h, profile.psi(), rho);
  return curvature_components(phi, psi, fd::interpolate_cubic(x0, h, dpsi, rho),
                              fd::interpolate_cubic(x0, h, ddpsi, rho), base)
      .norm();
}

}  // namespace krf
