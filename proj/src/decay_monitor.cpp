#include "krflow/decay_monitor.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "krflow/ansatz.hpp"
#include "krflow/errors.hpp"
#include "krflow/finite_difference.hpp"

namespace krf {

std::string DecayQuantity::name() const {
  switch (kind) {
    case DecayQuantityKind::RicciNorm: return "RicciNorm";
    case DecayQuantityKind::ScalarCurv: return "ScalarCurv";
    case DecayQuantityKind::RmNorm: return "RmNorm";
    case DecayQuantityKind::CovDerivRm: return "CovDerivRm(" + std::to_string(k) + ")";
  }
  return "Unknown";
}

DecayQuantity DecayQuantity::parse(const std::string& name) {
  if (name == "RicciNorm") return {DecayQuantityKind::RicciNorm, 0};
  if (name == "ScalarCurv") return {DecayQuantityKind::ScalarCurv, 0};
  if (name == "RmNorm") return {DecayQuantityKind::RmNorm, 0};
  if (name == "CovDerivRm(1)") return {DecayQuantityKind::CovDerivRm, 1};
  if (name == "CovDerivRm(2)") return {DecayQuantityKind::CovDerivRm, 2};
  fail(ErrorKind::ConfigInvalid, "unknown decay quantity '" + name + "'");
}

int decay_quantity_margin(const DecayQuantity& q) {
  return fd::kUntrustedMargin * (1 + (q.kind == DecayQuantityKind::CovDerivRm ? q.k : 0));
}

std::vector<double> decay_quantity_samples(const RadialProfile& profile, const BaseGeometry& base,
                                           const DecayQuantity& q) {
  std::vector<double> v;
  switch (q.kind) {
    case DecayQuantityKind::RicciNorm: v = ricci_norm(profile, base); break;
    case DecayQuantityKind::ScalarCurv: v = scalar_curvature(profile, base); break;
    case DecayQuantityKind::RmNorm: v = curvature_norm_samples(profile, base); break;
    case DecayQuantityKind::CovDerivRm: {
      if (q.k < 1 || q.k > 2) fail(ErrorKind::InvalidArgument, "CovDerivRm supports k = 1, 2");
      v = curvature_norm_samples(profile, base);
      for (int j = 0; j < q.k; ++j) {
        v = fd::d1(v, profile.spacing());
        // d/ds = (2 / sqrt(psi)) d/d rho
        for (int i = 0; i < profile.size(); ++i) v[i] *= 1.0 / (kRadialLengthFactor * std::sqrt(profile.psi()[i]));
      }
      break;
    }
  }
  for (auto& x : v) x = std::abs(x);
  return v;
}

namespace {

// curvature of exactly flat data is differencing noise below this level
constexpr double kFlatLevel = 1e-8;

void require_same_grid(const RadialProfile& a, const RadialProfile& b) {
  if (a.size() != b.size() || std::abs(a.rho_min() - b.rho_min()) > 1e-12 ||
      std::abs(a.rho_max() - b.rho_max()) > 1e-12)
    fail(ErrorKind::LatticeMismatch, "distance profile and sampled profile use different grids");
}

}  // namespace

std::array<double, 2> default_fit_window(const RadialProfile& distance_profile, const DecayQuantity& q) {
  const auto d = distance_from_start(distance_profile);
  const int n = distance_profile.size();
  const int hi = n - 1 - decay_quantity_margin(q);
  const int lo = std::max(decay_quantity_margin(q), n - n / 3);
  if (hi - lo + 1 < 8) fail(ErrorKind::WindowTooSmall, "grid too small for a default decay window");
  return {d[lo], d[hi]};
}

DecayReport fit_decay_profile(const RadialProfile& profile, const RadialProfile& distance_profile,
                              const BaseGeometry& base, const DecayQuantity& q, double time, double window_lo,
                              double window_hi) {
  require_same_grid(profile, distance_profile);
  if (!(window_hi > window_lo)) fail(ErrorKind::InvalidArgument, "decay window is empty");
  const auto d = distance_from_start(distance_profile);
  if (window_lo < 0.0 || window_hi > d.back() * (1 + 1e-12)) {
    std::ostringstream os;
    os << "decay window [" << window_lo << ", " << window_hi << "] leaves the grid's distance range [0, " << d.back()
       << "]";
    fail(ErrorKind::OutOfRange, os.str());
  }
  const auto v = decay_quantity_samples(profile, base, q);
  const int margin = decay_quantity_margin(q);

  DecayReport r;
  r.quantity = q;
  r.time = time;
  r.window_lo = window_lo;
  r.window_hi = window_hi;
  const double tol = 1e-12 * std::max(1.0, window_hi);
  double vmax = 0.0;
  int in_window = 0;
  for (int i = margin; i < profile.size() - margin; ++i) {
    if (d[i] < window_lo - tol || d[i] > window_hi + tol) continue;
    ++in_window;
    vmax = std::max(vmax, v[i]);
    if (v[i] > 0.0 && std::isfinite(v[i]) && d[i] > 0.0) r.samples.push_back({d[i], v[i]});
  }
  if (in_window < 8) fail(ErrorKind::WindowTooSmall, "decay window holds fewer than 8 trusted samples");
  if (vmax <= kFlatLevel) {
    r.flat = true;
    r.r2 = 1.0;
    return r;
  }
  if (r.samples.size() < 8) fail(ErrorKind::WindowTooSmall, "fewer than 8 positive samples in decay window");

  const double m = static_cast<double>(r.samples.size());
  double sx = 0, sy = 0;
  for (const auto& s : r.samples) {
    sx += std::log(s[0]);
    sy += std::log(s[1]);
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& s : r.samples) {
    const double x = std::log(s[0]) - mx, y = std::log(s[1]) - my;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  r.exponent = sxy / sxx;
  const double ssres = std::max(0.0, syy - r.exponent * sxy);
  r.r2 = syy > 0.0 ? 1.0 - ssres / syy : 1.0;
  return r;
}

DecayReport fit_decay_exponent(const FlowTrajectory& traj, const DecayQuantity& q, double time, double window_lo,
                               double window_hi, DistanceReference ref) {
  if (time > traj.times.back() * (1 + 1e-12) + 1e-12)
    fail(ErrorKind::HorizonExceeded, "decay fit requested beyond the trajectory horizon");
  const auto& p = traj.at(time);
  const auto& dp = ref == DistanceReference::InitialMetric ? traj.profiles.front() : p;
  return fit_decay_profile(p, dp, traj.base, q, time, window_lo, window_hi);
}

DecayPreservation decay_preservation_check(const FlowTrajectory& traj, const DecayQuantity& q,
                                           const std::vector<double>& times, double window_lo, double window_hi,
                                           double drift_tolerance, double r2_min) {
  if (times.empty()) fail(ErrorKind::InvalidArgument, "decay preservation needs at least one time");
  DecayPreservation out;
  for (double t : times) out.reports.push_back(fit_decay_exponent(traj, q, t, window_lo, window_hi));
  const auto& ref = out.reports.front();
  bool all_flat = true, any_flat = false;
  for (const auto& r : out.reports) {
    all_flat = all_flat && r.flat;
    any_flat = any_flat || r.flat;
    out.min_r2 = std::min(out.min_r2, r.r2);
    if (!r.flat && !ref.flat) out.max_drift = std::max(out.max_drift, std::abs(r.exponent - ref.exponent));
  }
  if (all_flat) {
    out.pass = true;
    return out;
  }
  // decay appearing from nothing, or disappearing, is not preservation
  out.pass = !any_flat && out.max_drift <= drift_tolerance && out.min_r2 >= r2_min;
  return out;
}

const char* to_string(PlateauVerdict v) {
  switch (v) {
    case PlateauVerdict::Pass: return "PASS";
    case PlateauVerdict::Fail: return "FAIL";
    case PlateauVerdict::NotApplicable: return "NotApplicable";
  }
  return "Unknown";
}

PlateauReport plateau_from_trajectory(const FlowTrajectory& traj, const std::vector<double>& horizons,
                                      const PlateauOptions& options) {
  if (horizons.size() < 2) fail(ErrorKind::InvalidArgument, "plateau check needs at least two horizons");
  const auto& p0 = traj.profiles.front();
  const auto [i0, i1] = window_indices(p0, options.ball_lo, options.ball_hi);
  const int margin = fd::kUntrustedMargin;
  if (i0 < margin || i1 > p0.size() - 1 - margin)
    fail(ErrorKind::WindowOutsideGrid, "plateau ball reaches the untrusted boundary points");

  PlateauReport rep;
  for (double T : horizons) rep.rows.push_back({T, 1.0, 0.0});
  for (std::size_t s = 0; s < traj.times.size(); ++s) {
    const double t = traj.times[s];
    const auto& p = traj.profiles[s];
    const auto rm = curvature_norm_samples(p, traj.base);
    double c1 = 1.0, rms = 0.0;
    for (int i = i0; i <= i1; ++i) {
      const double a = p.phi()[i] / p0.phi()[i], b = p.psi()[i] / p0.psi()[i];
      c1 = std::max({c1, a, 1.0 / a, b, 1.0 / b});
      rms = std::max(rms, rm[i]);
    }
    for (auto& row : rep.rows) {
      if (t > row.horizon * (1 + 1e-12)) continue;
      row.c1 = std::max(row.c1, c1);
      row.rm_sup = std::max(row.rm_sup, rms);
    }
  }
  for (const auto& row : rep.rows) {
    if (row.c1 > options.c1_max) {
      rep.verdict = PlateauVerdict::NotApplicable;
      return rep;
    }
  }
  const auto& last = rep.rows[rep.rows.size() - 1];
  const auto& prev = rep.rows[rep.rows.size() - 2];
  if (last.rm_sup <= kFlatLevel && prev.rm_sup <= kFlatLevel)
    rep.growth = 0.0;
  else
    rep.growth = prev.rm_sup > 0.0 ? (last.rm_sup - prev.rm_sup) / prev.rm_sup : 1e300;
  rep.verdict = rep.growth <= options.growth_tolerance ? PlateauVerdict::Pass : PlateauVerdict::Fail;
  return rep;
}

PlateauReport bilipschitz_plateau_check(const RadialProfile& initial, const BaseGeometry& base,
                                        std::vector<double> horizons, const PlateauOptions& options,
                                        FlowControls controls) {
  std::sort(horizons.begin(), horizons.end());
  if (horizons.size() < 2 || !(horizons.front() > 0.0))
    fail(ErrorKind::InvalidArgument, "plateau check needs at least two positive horizons");
  const double tmax = horizons.back();
  const double dt_sample = horizons.front() / std::max(1, options.samples_per_horizon);
  const int count = static_cast<int>(std::ceil(tmax / dt_sample - 1e-9));
  controls.output_times.clear();
  for (int k = 1; k <= count; ++k) controls.output_times.push_back(std::min(tmax, k * dt_sample));
  for (double T : horizons) controls.output_times.push_back(T);
  const auto traj = evolve(initial, base, tmax, controls);
  return plateau_from_trajectory(traj, horizons, options);
}

std::string decay_csv(const std::vector<DecayReport>& reports) {
  std::ostringstream os;
  os << "quantity,time,window_lo,window_hi,exponent,r2\n" << std::setprecision(17);
  for (const auto& r : reports) {
    os << r.quantity.name() << ',' << r.time << ',' << r.window_lo << ',' << r.window_hi << ',';
    if (r.flat)
      os << "flat";
    else
      os << r.exponent;
    os << ',' << r.r2 << '\n';
  }
  return os.str();
}

}  // namespace krf
