#pragma once

#include <vector>

#include "krflow/base_geometry.hpp"
#include "krflow/radial_profile.hpp"

namespace krf {

// Length convention: the radial line element of omega is (1/4) psi d rho^2, so arc
// length is (1/2) sqrt(psi) d rho and psi = e^rho gives the cone radius R = e^{rho/2}.
// This is Re(g_{i jbar} dz^i dzbar^j), half of omega(., J .).
constexpr double kRadialLengthFactor = 0.5;
// Scalar curvature is reported as twice the trace of Ric against omega, the value for omega(., J .).
constexpr double kScalarCurvatureFactor = 2.0;

// phi = a + mu P', psi = phi' (mu = 1) or P'' (mu = 0). For mu = 1 psi is the
// grid derivative of phi itself, so the closedness defect is zero to rounding.
RadialProfile profile_from_potential(const std::vector<double>& rho, const std::vector<double>& potential,
                                     const BaseGeometry& base, double offset = 0.0);

struct RicciCoefficients {
  std::vector<double> r_base;
  std::vector<double> r_fiber;
  int untrusted_margin = 2;
};

// r_base = lambda - mu Q', r_fiber = -Q'', Q = (n-1) log phi + log psi
RicciCoefficients ricci_coefficients(const RadialProfile& profile, const BaseGeometry& base);

std::vector<double> log_volume_density(const RadialProfile& profile, const BaseGeometry& base);

// R = 2 [ (n-1) r_base / phi + r_fiber / psi ]
std::vector<double> scalar_curvature(const RadialProfile& profile, const BaseGeometry& base);

// pointwise norm of Ric as a symmetric 2-tensor in the real convention
std::vector<double> ricci_norm(const RadialProfile& profile, const BaseGeometry& base);

double radial_distance(const RadialProfile& profile, double rho0, double rho1);

// cumulative radial arc length from the first grid point to every grid point
std::vector<double> distance_from_start(const RadialProfile& profile);

// Unitary-frame curvature components, with the base modelled as a space form
// (Fubini-Study type potential) normalised so that Ric(omega_D) = lambda omega_D:
//   b  base-base block, c  base-fiber block, d  fiber-fiber component.
// |Rm|^2 = 2 m (m+1) b^2 + 4 m c^2 + d^2 with m = n - 1, the full Hermitian contraction of
// R_{i jbar k lbar}; the real-tensor norm for omega(., J .) is twice this |Rm|.
struct CurvatureComponents {
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  int m = 1;
  double norm() const;
};

CurvatureComponents curvature_components(double phi, double psi, double dpsi, double ddpsi,
                                         const BaseGeometry& base);

// |Rm| at every grid point; the outer two points on each side use low-order stencils.
std::vector<double> curvature_norm_samples(const RadialProfile& profile, const BaseGeometry& base);

double curvature_norm_at(const RadialProfile& profile, const BaseGeometry& base, double rho);

}  // namespace krf
