#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "krflow/base_geometry.hpp"
#include "krflow/flow_solver.hpp"
#include "krflow/model_metrics.hpp"
#include "krflow/radial_profile.hpp"

namespace krf {

// Expanding soliton Ric + (1/2) L_V omega = -omega, V radial. On (phi, psi) with
// mu = 1 it reduces to
//   phi' = psi,   psi' = psi (lambda + phi - psi - (n-1) psi / phi),
// an autonomous system: translating rho rescales the cone coefficient.
// Inner end: Tip closes the fiber at a point (phi ~ e^{lambda rho / n});
// Divisor caps off along the zero section with psi ~ e^{a rho}, a = k lambda / n,
// phi -> a - lambda, k the orbifold order (needs k > n for lambda > 0).
enum class SolitonCore { Tip, Divisor };

const char* to_string(SolitonCore c);
SolitonCore core_from_string(const std::string& s);

struct SolitonOptions {
  SolitonCore core = SolitonCore::Tip;
  double start_amplitude = 1e-9;
  double rtol = 1e-12;
  double atol = 1e-14;
  double sample_spacing = 2e-3;
  double phi_stop = 1e12;
  long max_steps = 100000;  // between consecutive samples
};

class SolitonSolution {
 public:
  BaseGeometry base;
  double cone_coefficient = 1.0;
  SolitonCore core = SolitonCore::Tip;
  std::optional<RadialProfile> profile;  // on the requested window
  std::optional<BFunction> B;           // FIK normalisation p = n / lambda (lambda > 0 only)
  double fik_p = 0.0;
  double residual = 0.0;       // relative ODE residual of the dense representation
  double grid_residual = 0.0;  // same, with finite differences of the window profile

  // phi, psi, psi' of the time-1 soliton
  std::array<double, 3> evaluate(double rho) const;
  // phi, psi, v = psi - phi, v'; v and v' stay accurate where phi and psi are huge
  std::array<double, 4> evaluate_relaxed(double rho) const;
  // (rho, t) -> t phi_1(rho - log t), t psi_1(rho - log t)
  BoundaryModel self_similar_boundary() const;
  // time-t member of the self-similar flow on a grid, with exact time derivatives
  FikSlice self_similar_slice(const std::vector<double>& grid, double t) const;

  double rho_first() const { return rho0_; }
  double rho_last() const { return rho0_ + hs_ * (phi_.size() - 1); }

 private:
  friend SolitonSolution soliton_profile_solve(const BaseGeometry&, double, const std::vector<double>&,
                                               const SolitonOptions&);
  double rho0_ = 0.0;
  double hs_ = 0.0;
  double core_rate_ = 0.0;
  double core_limit_ = 0.0;
  std::vector<double> phi_, psi_;
  struct Interp;
  std::shared_ptr<const Interp> interp_;
};

// rhs of the reduced soliton system, shared with tests
std::array<double, 2> soliton_rhs(const BaseGeometry& base, double phi, double psi);

SolitonSolution soliton_profile_solve(const BaseGeometry& base, double cone_coefficient,
                                      const std::vector<double>& window_grid, const SolitonOptions& options = {});

}  // namespace krf
