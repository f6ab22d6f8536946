#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "krflow/base_geometry.hpp"
#include "krflow/radial_profile.hpp"

namespace krf {

enum class TimeScheme { ExplicitRK4, ImplicitTrapezoid };
// FrozenModel holds the t = 0 end values. DriftingModel moves them with the
// initial Ricci coefficients, phi_b(t) = phi_b(0) - t r_base, psi_b(t) = psi_b(0) - t r_fiber,
// which is the exact model evolution at every end this library builds.
// SelfSimilar reads the end values from a caller-supplied model, typically an
// expanding soliton.
enum class BoundaryKind { FrozenModel, DriftingModel, SelfSimilar };

const char* to_string(TimeScheme s);
const char* to_string(BoundaryKind b);
TimeScheme scheme_from_string(const std::string& s);
BoundaryKind boundary_from_string(const std::string& s);

// (phi, psi) at (rho, t)
using BoundaryModel = std::function<std::array<double, 2>(double rho, double t)>;

struct FlowControls {
  TimeScheme scheme = TimeScheme::ExplicitRK4;
  // 0 selects a step automatically: 0.4 h^2 min(psi) for RK4, horizon / 200 (capped at 0.02) for the trapezoid rule
  double dt = 0.0;
  BoundaryKind bc_kind = BoundaryKind::DriftingModel;
  BoundaryModel boundary_model;
  // times at which profiles are recorded; the horizon is always recorded
  std::vector<double> output_times;
  double floor_fraction = 1e-6;
  double inner_tolerance = 1e-10;
  int max_inner_iterations = 30;
  // largest tolerated jump of log psi between neighbouring grid points
  double gradient_limit = 0.5;
};

struct FlowTrajectory {
  BaseGeometry base;
  std::vector<double> times;
  std::vector<RadialProfile> profiles;
  TimeScheme scheme = TimeScheme::ExplicitRK4;
  std::vector<double> dt_history;
  BoundaryKind bc_kind = BoundaryKind::DriftingModel;

  const RadialProfile& at(double t) const;
};

// explicit stability bound 1/2 h^2 min(psi): the psi equation is a heat equation with diffusivity 1/psi
double explicit_stability_bound(const RadialProfile& profile);

FlowTrajectory evolve(const RadialProfile& initial, const BaseGeometry& base, double horizon,
                      const FlowControls& controls);

struct PotentialFlowState {
  double time = 0.0;
  std::vector<double> phi_ref;  // omega_t = omega_0 - t Ric(omega_0)
  std::vector<double> psi_ref;
  std::vector<double> u;
  RadialProfile metric;
};

struct PotentialTrajectory {
  BaseGeometry base;
  std::vector<PotentialFlowState> states;
  TimeScheme scheme = TimeScheme::ExplicitRK4;
  std::vector<double> dt_history;
  BoundaryKind bc_kind = BoundaryKind::DriftingModel;
};

// d_t u = (n-1) log(phi/phi_0) + log(psi/psi_0), phi = phi_t + mu u', psi = psi_t + u''
PotentialTrajectory evolve_potential(const RadialProfile& initial, const BaseGeometry& base, double horizon,
                                     const FlowControls& controls);

// max over interior points of |d_t phi - (mu Q' - lambda)| and |d_t psi - Q''|
double flow_equation_residual(const RadialProfile& profile, const std::vector<double>& phi_dot,
                              const std::vector<double>& psi_dot, const BaseGeometry& base);

}  // namespace krf
