#pragma once

// Internal. Boost 1.74 ublas (used by odeint's rosenbrock4) does not build as
// C++20, so the stiff integration lives in its own C++17 translation unit.

#include <vector>

namespace krf::detail {

struct SolitonOdeRun {
  // samples at x = k * spacing, v = psi - phi
  std::vector<double> phi;
  std::vector<double> psi;
  std::vector<double> v;
  bool left_cone = false;  // phi or psi stopped being positive
  bool step_cap = false;  // too many steps between samples
  double stop_x = 0.0;
};

// phi' = psi, psi' = psi (lambda + phi - psi - m psi / phi), from x = 0 until phi > phi_stop
SolitonOdeRun integrate_soliton_ode(double lambda, int m, double phi0, double psi0, double spacing,
                                    double phi_stop, double atol, double rtol, long max_steps);

}  // namespace krf::detail
