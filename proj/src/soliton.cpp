#include "krflow/soliton.hpp"

#include <algorithm>
#include <boost/math/interpolators/quintic_hermite.hpp>
#include <cmath>
#include <sstream>

#include "krflow/errors.hpp"
#include "krflow/finite_difference.hpp"
#include "stiff_ode.hpp"

namespace krf {

const char* to_string(SolitonCore c) { return c == SolitonCore::Tip ? "Tip" : "Divisor"; }

SolitonCore core_from_string(const std::string& s) {
  if (s == "Tip") return SolitonCore::Tip;
  if (s == "Divisor") return SolitonCore::Divisor;
  fail(ErrorKind::ConfigInvalid, "unknown soliton core '" + s + "'");
}

std::array<double, 2> soliton_rhs(const BaseGeometry& base, double phi, double psi) {
  return {psi, psi * (base.lambda + phi - psi - (base.n - 1) * psi / phi)};
}

namespace {

// v = psi - phi along a solution: v' = psi g, g = lambda - n - v - m v / phi
constexpr double kStiffPsi = 1e3;

struct Relaxation {
  double dv, ddv;
};

Relaxation relaxation_derivatives(const BaseGeometry& base, double phi, double psi, double v) {
  const int m = base.n - 1;
  const double g = base.lambda - base.n - v - m * v / phi;
  const double dv = psi * g;
  const double dg = -dv - m * (dv / phi - v * psi / (phi * phi));
  return {dv, (psi + dv) * g + psi * dg};
}

}  // namespace

// Interpolated in the local coordinate x = rho - rho_first through
// f = phi e^{-x} and v = psi - phi, both O(1) out to the cone. phi = e^x f,
// psi = phi + v. Derivatives come from first derivatives of the two quintic
// Hermite interpolants only (boost 1.74's double_prime is mis-scaled).
struct SolitonSolution::Interp {
  boost::math::interpolators::cardinal_quintic_hermite<std::vector<double>> f;
  boost::math::interpolators::cardinal_quintic_hermite<std::vector<double>> v;
};

std::array<double, 4> SolitonSolution::evaluate_relaxed(double rho) const {
  if (rho < rho_first()) {
    // inside the core the solution is its leading exponential to O(start amplitude)
    const double e = std::exp(core_rate_ * (rho - rho_first()));
    const double psi = psi_.front() * e;
    const double phi = core_limit_ + (phi_.front() - core_limit_) * e;
    return {phi, psi, psi - phi, (core_rate_ - 1.0) * psi};
  }
  if (rho > rho_last()) {
    const double cone = cone_coefficient * std::exp(rho);
    return {cone + (base.n - base.lambda), cone, base.lambda - base.n, 0.0};
  }
  const double x = rho - rho_first();
  const double phi = std::exp(x) * interp_->f(x);
  const double v = interp_->v(x);
  return {phi, phi + v, v, interp_->v.prime(x)};
}

std::array<double, 3> SolitonSolution::evaluate(double rho) const {
  const auto r = evaluate_relaxed(rho);
  return {r[0], r[1], r[1] + r[3]};
}

BoundaryModel SolitonSolution::self_similar_boundary() const {
  const SolitonSolution self = *this;
  return [self](double rho, double t) -> std::array<double, 2> {
    // t -> 0 limit is the cone itself
    if (t <= 0.0) return {self.cone_coefficient * std::exp(rho), self.cone_coefficient * std::exp(rho)};
    const auto v = self.evaluate(rho - std::log(t));
    return {t * v[0], t * v[1]};
  };
}

FikSlice SolitonSolution::self_similar_slice(const std::vector<double>& grid, double t) const {
  if (!(t > 0.0)) fail(ErrorKind::InvalidArgument, "self-similar slice needs t > 0");
  std::vector<double> phi(grid.size()), psi(grid.size()), phi_dot(grid.size()), psi_dot(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto v = evaluate_relaxed(grid[i] - std::log(t));
    phi[i] = t * v[0];
    psi[i] = t * v[1];
    phi_dot[i] = -v[2];
    psi_dot[i] = -v[3];
  }
  return {RadialProfile(grid, std::move(phi), std::move(psi)), std::move(phi_dot), std::move(psi_dot)};
}

namespace {

double relative_ode_residual(const BaseGeometry& base, double phi, double psi, double dphi, double dpsi) {
  const auto f = soliton_rhs(base, phi, psi);
  const double scale = 1.0 + std::abs(phi);
  return std::max(std::abs(dphi - f[0]) / scale, std::abs(dpsi - f[1]) / (scale * (1.0 + std::abs(psi))));
}

}  // namespace

SolitonSolution soliton_profile_solve(const BaseGeometry& base, double cone_coefficient,
                                      const std::vector<double>& window_grid, const SolitonOptions& options) {
  base.validate();
  if (base.mu != 1) fail(ErrorKind::InvalidArgument, "soliton reduction requires mu = 1");
  if (!(cone_coefficient > 0.0)) fail(ErrorKind::InvalidArgument, "cone coefficient must be positive");
  if (window_grid.size() < 5) fail(ErrorKind::GridTooCoarse, "soliton window needs at least 5 points");
  if (window_grid.back() < 12.0) fail(ErrorKind::InvalidArgument, "soliton window must reach rho >= 12");

  const double eps = options.start_amplitude;
  const int n = base.n;
  double rate = 0.0, limit = 0.0;
  double phi0 = 0.0, psi0 = 0.0;
  if (options.core == SolitonCore::Tip) {
    rate = base.lambda / n;
    if (!(rate > 0.0)) fail(ErrorKind::NoConvergence, "a smooth tip needs lambda > 0");
    phi0 = eps;
    psi0 = rate * eps;
  } else {
    rate = base.orbifold_k * base.lambda / n;
    limit = rate - base.lambda;
    if (!(limit > 0.0)) {
      std::ostringstream os;
      os << "divisor cap needs k lambda / n > lambda (k=" << base.orbifold_k << ", n=" << n << ")";
      fail(ErrorKind::NoConvergence, os.str());
    }
    phi0 = limit + eps / rate;
    psi0 = eps;
  }

  const double hs = options.sample_spacing;
  auto run = detail::integrate_soliton_ode(base.lambda, n - 1, phi0, psi0, hs, options.phi_stop,
                                            options.atol, options.rtol, options.max_steps);
  if (run.step_cap) fail(ErrorKind::NoConvergence, "soliton integration exceeded its step cap");
  if (run.left_cone) {
    std::ostringstream os;
    os << "soliton left the Kaehler cone " << run.stop_x << " past the core start (" << to_string(options.core)
       << " core, lambda=" << base.lambda << ")";
    fail(ErrorKind::NoConvergence, os.str());
  }
  const std::vector<double>& phi = run.phi;
  const std::vector<double>& psi = run.psi;
  const std::vector<double>& v = run.v;
  const std::size_t count = phi.size();

  // raw solution ~ A_raw e^x + (n - lambda); translate so the cone coefficient is the requested one
  const double x_end = hs * (count - 1);
  const double a_raw = (phi.back() - (n - base.lambda)) * std::exp(-x_end);
  const double shift = std::log(a_raw / cone_coefficient);

  SolitonSolution sol;
  sol.base = base;
  sol.cone_coefficient = cone_coefficient;
  sol.core = options.core;
  sol.rho0_ = shift;
  sol.hs_ = hs;
  sol.core_rate_ = rate;
  sol.core_limit_ = limit;
  sol.phi_ = phi;
  sol.psi_ = psi;

  // v' = psi g needs g to ~1/psi relative accuracy, which the state cannot carry once
  // psi is large; there the derivative data come from differencing the v samples
  const auto dv_fd = fd::d1(v, hs);
  const auto ddv_fd = fd::d2(v, hs);
  std::vector<double> f(count), df(count), ddf(count), dv(count), ddv(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double w = std::exp(-hs * i);
    const auto r = relaxation_derivatives(base, phi[i], psi[i], v[i]);
    const bool stiff = psi[i] > kStiffPsi && i >= 2 && i + 2 < count;
    dv[i] = stiff ? dv_fd[i] : r.dv;
    ddv[i] = stiff ? ddv_fd[i] : r.ddv;
    f[i] = w * phi[i];
    df[i] = w * v[i];
    ddf[i] = w * (dv[i] - v[i]);
  }
  using Hermite = boost::math::interpolators::cardinal_quintic_hermite<std::vector<double>>;
  auto interp = std::make_shared<SolitonSolution::Interp>(SolitonSolution::Interp{
      Hermite(std::vector<double>(f), std::vector<double>(df), std::vector<double>(ddf), 0.0, hs),
      Hermite(std::vector<double>(v), std::vector<double>(dv), std::vector<double>(ddv), 0.0, hs)});
  sol.interp_ = interp;

  if (window_grid.front() < sol.rho_first())
    fail(ErrorKind::OutOfRange, "soliton window starts inside the unresolved core; lower start_amplitude");

  std::vector<double> wphi(window_grid.size()), wpsi(window_grid.size());
  for (std::size_t i = 0; i < window_grid.size(); ++i) {
    const auto e = sol.evaluate(window_grid[i]);
    wphi[i] = e[0];
    wpsi[i] = e[1];
  }
  sol.profile.emplace(window_grid, wphi, wpsi);

  // dense residual between samples over the window; the v equation is scaled by 1 + psi
  for (std::size_t i = 0; i + 1 < count; ++i) {
    const double x = (i + 0.5) * hs;
    if (x + shift < window_grid.front() || x + shift > window_grid.back()) continue;
    const double w = std::exp(-x);
    const double fx = interp->f(x), vx = interp->v(x);
    const double ph = fx / w;
    const auto r = relaxation_derivatives(base, ph, ph + vx, vx);
    const double scale = (1.0 + std::abs(vx)) * (1.0 + ph + vx);
    sol.residual = std::max({sol.residual, std::abs(interp->f.prime(x) - w * vx) / std::abs(fx),
                             std::abs(interp->v.prime(x) - r.dv) / scale});
  }
  {
    const auto& p = *sol.profile;
    const auto dphi = fd::d1(p.phi(), p.spacing());
    const auto dpsi = fd::d1(p.psi(), p.spacing());
    for (int i = fd::kUntrustedMargin; i < p.size() - fd::kUntrustedMargin; ++i)
      sol.grid_residual =
          std::max(sol.grid_residual, relative_ode_residual(base, p.phi()[i], p.psi()[i], dphi[i], dpsi[i]));
  }

  if (base.lambda > 0.0) {
    // Bt(x) = p e^{-x} phi_1(x) in the translated coordinate: Bt = p e^{-shift} f and
    // Bt' = p e^{-x} v, Bt'' = p e^{-x} (v' - v), Bt''' = p e^{-x} (v'' - 2 v' + v)
    const double p = n / base.lambda;
    const double c = p * std::exp(-shift);
    std::vector<double> bt(count), dbt(count), ddbt(count), dddbt(count);
    for (std::size_t i = 0; i < count; ++i) {
      const double w = c * std::exp(-hs * i);
      bt[i] = c * f[i];
      dbt[i] = w * v[i];
      ddbt[i] = w * (dv[i] - v[i]);
      dddbt[i] = w * (ddv[i] - 2.0 * dv[i] + v[i]);
    }
    sol.fik_p = p;
    sol.B.emplace(shift, hs, std::move(bt), std::move(dbt), std::move(ddbt), std::move(dddbt), p * cone_coefficient);
  }
  return sol;
}

}  // namespace krf
