#pragma once

#include <array>
#include <string>
#include <vector>

#include "krflow/base_geometry.hpp"
#include "krflow/flow_solver.hpp"
#include "krflow/radial_profile.hpp"

namespace krf {

enum class DecayQuantityKind { RicciNorm, ScalarCurv, RmNorm, CovDerivRm };

struct DecayQuantity {
  DecayQuantityKind kind = DecayQuantityKind::RmNorm;
  int k = 0;  // CovDerivRm only, 1 or 2

  std::string name() const;  // RicciNorm, ScalarCurv, RmNorm, CovDerivRm(k)
  static DecayQuantity parse(const std::string& name);
};

// Sampled quantity on the grid. CovDerivRm(k) is |d^k |Rm| / ds^k| with s the
// radial arc length; every differentiation costs another 2-point margin.
std::vector<double> decay_quantity_samples(const RadialProfile& profile, const BaseGeometry& base,
                                           const DecayQuantity& q);

// grid points at each end whose samples are not trusted for this quantity
int decay_quantity_margin(const DecayQuantity& q);

enum class DistanceReference { InitialMetric, CurrentMetric };

struct DecayReport {
  DecayQuantity quantity;
  double time = 0.0;
  double window_lo = 0.0;  // distance interval
  double window_hi = 0.0;
  double exponent = 0.0;
  double r2 = 0.0;
  bool flat = false;  // quantity vanishes identically; exponent is meaningless
  std::vector<std::array<double, 2>> samples;  // (distance, value)
};

// outer third of the grid with the quantity's margin removed, as a distance interval
std::array<double, 2> default_fit_window(const RadialProfile& distance_profile, const DecayQuantity& q);

// distances are measured from the first grid point in distance_profile's metric
DecayReport fit_decay_profile(const RadialProfile& profile, const RadialProfile& distance_profile,
                              const BaseGeometry& base, const DecayQuantity& q, double time, double window_lo,
                              double window_hi);

DecayReport fit_decay_exponent(const FlowTrajectory& traj, const DecayQuantity& q, double time, double window_lo,
                               double window_hi, DistanceReference ref = DistanceReference::InitialMetric);

struct DecayPreservation {
  std::vector<DecayReport> reports;
  double max_drift = 0.0;
  double min_r2 = 1.0;
  bool pass = false;
};

// PASS iff |exponent(t) - exponent(t_0)| <= drift_tolerance and r2 >= r2_min at every time,
// or the quantity is flat at every time
DecayPreservation decay_preservation_check(const FlowTrajectory& traj, const DecayQuantity& q,
                                           const std::vector<double>& times, double window_lo, double window_hi,
                                           double drift_tolerance = 0.05, double r2_min = 0.99);

enum class PlateauVerdict { Pass, Fail, NotApplicable };
const char* to_string(PlateauVerdict v);

struct PlateauRow {
  double horizon = 0.0;
  double c1 = 1.0;      // sup over ball and t <= horizon of the coefficient ratios
  double rm_sup = 0.0;  // sup over ball and t <= horizon of |Rm|
};

struct PlateauReport {
  std::vector<PlateauRow> rows;
  double growth = 0.0;  // relative |Rm| growth from the second-largest to the largest horizon
  PlateauVerdict verdict = PlateauVerdict::Fail;
};

struct PlateauOptions {
  double ball_lo = 0.0;  // rho window
  double ball_hi = 1.0;
  double c1_max = 10.0;
  double growth_tolerance = 0.05;
  int samples_per_horizon = 16;  // time samples inside the smallest horizon
};

PlateauReport bilipschitz_plateau_check(const RadialProfile& initial, const BaseGeometry& base,
                                        std::vector<double> horizons, const PlateauOptions& options,
                                        FlowControls controls);

// C1 and |Rm| supremum over an already computed trajectory
PlateauReport plateau_from_trajectory(const FlowTrajectory& traj, const std::vector<double>& horizons,
                                      const PlateauOptions& options);

std::string decay_csv(const std::vector<DecayReport>& reports);

}  // namespace krf
