#include "krflow/rescaling.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "krflow/errors.hpp"

namespace krf {

RadialProfile RescaledSlice::profile() const { return RadialProfile(rho_hat, phi_hat, psi_hat); }

namespace {

void check_spec(const RescalingSpec& spec) {
  if (!(spec.scale >= 1.0)) fail(ErrorKind::InvalidArgument, "rescaling scale must be >= 1");
  if (!(spec.window_hi > spec.window_lo)) fail(ErrorKind::InvalidArgument, "rescaling window is empty");
  if (spec.times.empty()) fail(ErrorKind::InvalidArgument, "rescaling needs at least one time");
}

const RadialProfile& slice_at(const FlowTrajectory& traj, double t) {
  if (t > traj.times.back() * (1 + 1e-12) + 1e-12) {
    std::ostringstream os;
    os << "rescaled time needs t=" << t << " beyond trajectory horizon " << traj.times.back();
    fail(ErrorKind::HorizonExceeded, os.str());
  }
  return traj.at(t);
}

// collects grid points whose mapped coordinate lies in the window
template <class Map>
RescaledSlice map_slice(const RadialProfile& p, double lo, double hi, double t_hat, Map&& map) {
  RescaledSlice s;
  s.time = t_hat;
  const double tol = 1e-9;
  for (int i = 0; i < p.size(); ++i) {
    const auto v = map(p.rho()[i], p.phi()[i], p.psi()[i]);
    if (v[0] < lo - tol || v[0] > hi + tol) continue;
    s.rho_hat.push_back(v[0]);
    s.phi_hat.push_back(v[1]);
    s.psi_hat.push_back(v[2]);
  }
  return s;
}

void check_window(const RadialProfile& p, double lo_rho, double hi_rho) {
  const double tol = 1e-9 * std::max(1.0, std::abs(p.rho_max()));
  if (lo_rho < p.rho_min() - tol || hi_rho > p.rho_max() + tol) {
    std::ostringstream os;
    os << "rescaled window maps to [" << lo_rho << ", " << hi_rho << "] outside grid [" << p.rho_min() << ", "
       << p.rho_max() << "]";
    fail(ErrorKind::WindowOutsideGrid, os.str());
  }
}

}  // namespace

RescaledSamples bulging_rescale(const FlowTrajectory& traj, const RescalingSpec& spec) {
  check_spec(spec);
  if (spec.regime != RescalingRegime::Bulging) fail(ErrorKind::InvalidArgument, "spec is not a bulging rescaling");
  const double r = spec.scale;
  const double tfac = std::pow(r, 2.0 / spec.N);
  const double phi_fac = 1.0 / tfac;
  const double psi_fac = r * r / tfac;
  RescaledSamples out{spec, {}};
  for (double th : spec.times) {
    const auto& p = slice_at(traj, tfac * th);
    check_window(p, r * r + r * spec.window_lo, r * r + r * spec.window_hi);
    out.slices.push_back(map_slice(p, spec.window_lo, spec.window_hi, th, [&](double rho, double phi, double psi) {
      return std::array<double, 3>{(rho - r * r) / r, phi_fac * phi, psi_fac * psi};
    }));
    if (out.slices.back().rho_hat.size() < 5)
      fail(ErrorKind::WindowTooSmall, "rescaled window holds fewer than 5 grid points");
  }
  return out;
}

RescaledSamples conical_blowdown(const FlowTrajectory& traj, const RescalingSpec& spec) {
  check_spec(spec);
  if (spec.regime != RescalingRegime::Conical) fail(ErrorKind::InvalidArgument, "spec is not a conical blowdown");
  const double s2 = spec.scale * spec.scale;
  const double shift = 2.0 * std::log(spec.scale);
  RescaledSamples out{spec, {}};
  for (double th : spec.times) {
    const auto& p = slice_at(traj, spec.time_origin + s2 * th);
    check_window(p, spec.window_lo + shift, spec.window_hi + shift);
    out.slices.push_back(map_slice(p, spec.window_lo, spec.window_hi, th, [&](double rho, double phi, double psi) {
      return std::array<double, 3>{rho - shift, phi / s2, psi / s2};
    }));
    if (out.slices.back().rho_hat.size() < 5)
      fail(ErrorKind::WindowTooSmall, "rescaled window holds fewer than 5 grid points");
  }
  return out;
}

RescaledSamples conical_blowdown(const RescaledSamples& samples, double s) {
  if (samples.spec.regime != RescalingRegime::Conical)
    fail(ErrorKind::InvalidArgument, "only conical samples compose under blowdown");
  if (!(s >= 1.0)) fail(ErrorKind::InvalidArgument, "rescaling scale must be >= 1");
  const double s2 = s * s;
  const double shift = 2.0 * std::log(s);
  RescaledSamples out = samples;
  out.spec.scale *= s;
  out.spec.window_lo -= shift;
  out.spec.window_hi -= shift;
  out.spec.time_origin = samples.spec.time_origin;
  for (auto& sl : out.slices) {
    sl.time /= s2;
    for (auto& v : sl.rho_hat) v -= shift;
    for (auto& v : sl.phi_hat) v /= s2;
    for (auto& v : sl.psi_hat) v /= s2;
  }
  for (auto& t : out.spec.times) t /= s2;
  return out;
}

std::vector<ProductLimitRow> product_limit_error(const RescaledSamples& samples,
                                                 const std::function<double(double)>& divisor_law) {
  if (samples.slices.empty()) fail(ErrorKind::InvalidArgument, "no rescaled slices");
  const auto& ref = samples.slices.front().rho_hat;
  for (const auto& s : samples.slices) {
    bool same = s.rho_hat.size() == ref.size();
    for (std::size_t i = 0; same && i < ref.size(); ++i)
      same = std::abs(s.rho_hat[i] - ref[i]) <= 1e-12 * std::max(1.0, std::abs(ref[i]));
    if (!same) fail(ErrorKind::LatticeMismatch, "rescaled slices do not share a rho_hat lattice");
  }
  const double N = samples.spec.N;
  const double c1 = (N + 1) * (N + 1) / (2.0 * N);
  const double c2 = (N + 1) * (N + 1) / (2.0 * N * N);
  std::vector<ProductLimitRow> rows;
  for (const auto& s : samples.slices) {
    ProductLimitRow row;
    row.scale = samples.spec.scale;
    row.time = s.time;
    const double phi_lim = c1 * divisor_law(s.time);
    double l2 = 0.0, logsum = 0.0;
    for (std::size_t i = 0; i < s.rho_hat.size(); ++i) {
      const double e = std::max(std::abs(s.phi_hat[i] - phi_lim) / std::abs(phi_lim), std::abs(s.psi_hat[i] - c2) / c2);
      row.sup_error = std::max(row.sup_error, e);
      l2 += e * e;
      logsum += std::log(s.phi_hat[i]);
    }
    row.l2_error = std::sqrt(l2 / s.rho_hat.size());
    row.fitted_coefficient = std::exp(logsum / s.rho_hat.size());
    rows.push_back(row);
  }
  return rows;
}

double max_sup_error(const std::vector<ProductLimitRow>& rows) {
  double m = 0.0;
  for (const auto& r : rows) m = std::max(m, r.sup_error);
  return m;
}

std::string product_limit_csv(const std::vector<ProductLimitRow>& rows) {
  std::ostringstream os;
  os << "scale,time,sup_error,l2_error,fitted_coefficient\n" << std::setprecision(17);
  for (const auto& r : rows)
    os << r.scale << ',' << r.time << ',' << r.sup_error << ',' << r.l2_error << ',' << r.fitted_coefficient << '\n';
  return os.str();
}

}  // namespace krf
