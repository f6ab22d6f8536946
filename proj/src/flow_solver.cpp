#include "krflow/flow_solver.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "krflow/ansatz.hpp"
#include "krflow/banded.hpp"
#include "krflow/errors.hpp"
#include "krflow/finite_difference.hpp"

namespace krf {

const char* to_string(TimeScheme s) {
  return s == TimeScheme::ExplicitRK4 ? "ExplicitRK4" : "ImplicitTrapezoid";
}

const char* to_string(BoundaryKind b) {
  switch (b) {
    case BoundaryKind::FrozenModel: return "FrozenModel";
    case BoundaryKind::DriftingModel: return "DriftingModel";
    case BoundaryKind::SelfSimilar: return "SelfSimilar";
  }
  return "Unknown";
}

TimeScheme scheme_from_string(const std::string& s) {
  if (s == "ExplicitRK4") return TimeScheme::ExplicitRK4;
  if (s == "ImplicitTrapezoid") return TimeScheme::ImplicitTrapezoid;
  fail(ErrorKind::ConfigInvalid, "unknown scheme '" + s + "'");
}

BoundaryKind boundary_from_string(const std::string& s) {
  for (auto b : {BoundaryKind::FrozenModel, BoundaryKind::DriftingModel, BoundaryKind::SelfSimilar})
    if (s == to_string(b)) return b;
  fail(ErrorKind::ConfigInvalid, "unknown bc_kind '" + s + "'");
}

const RadialProfile& FlowTrajectory::at(double t) const {
  for (std::size_t i = 0; i < times.size(); ++i)
    if (std::abs(times[i] - t) <= 1e-9 * std::max(1.0, std::abs(t))) return profiles[i];
  std::ostringstream os;
  os << "trajectory has no slice at t=" << t;
  fail(ErrorKind::OutOfRange, os.str());
}

double explicit_stability_bound(const RadialProfile& profile) {
  return 0.5 * profile.spacing() * profile.spacing() * profile.min_psi();
}

namespace {

using Vec = std::vector<double>;

struct StepFailure {
  SingularityKind kind;
  double location;
};

// end values (phi, psi) at the first and last grid point
struct EndValues {
  double phi_lo, psi_lo, phi_hi, psi_hi;
};

class Boundary {
 public:
  Boundary(const RadialProfile& initial, const BaseGeometry& base, const FlowControls& c)
      : kind_(c.bc_kind), model_(c.boundary_model), rho_lo_(initial.rho_min()), rho_hi_(initial.rho_max()) {
    const int n = initial.size();
    init_ = {initial.phi()[0], initial.psi()[0], initial.phi()[n - 1], initial.psi()[n - 1]};
    const auto ric = ricci_coefficients(initial, base);
    rate_ = {-ric.r_base[0], -ric.r_fiber[0], -ric.r_base[n - 1], -ric.r_fiber[n - 1]};
    if (kind_ == BoundaryKind::SelfSimilar && !model_)
      fail(ErrorKind::InvalidArgument, "SelfSimilar boundary requires a boundary model");
  }

  EndValues at(double t) const {
    switch (kind_) {
      case BoundaryKind::FrozenModel: return init_;
      case BoundaryKind::DriftingModel:
        return {init_.phi_lo + t * rate_.phi_lo, init_.psi_lo + t * rate_.psi_lo, init_.phi_hi + t * rate_.phi_hi,
                init_.psi_hi + t * rate_.psi_hi};
      case BoundaryKind::SelfSimilar: {
        if (t == 0.0) return init_;
        const auto lo = model_(rho_lo_, t);
        const auto hi = model_(rho_hi_, t);
        return {lo[0], lo[1], hi[0], hi[1]};
      }
    }
    return init_;
  }

  const EndValues& initial() const { return init_; }

 private:
  BoundaryKind kind_;
  BoundaryModel model_;
  double rho_lo_, rho_hi_;
  EndValues init_{};
  EndValues rate_{};
};

class System {
 public:
  virtual ~System() = default;
  virtual int size() const = 0;
  virtual int bandwidth() const = 0;
  virtual std::optional<StepFailure> rhs(const Vec& x, double t, Vec& f) = 0;
  // J = I - scale dF/dx at (x, t); rhs(x, t) must have been evaluated last
  virtual void jacobian(double scale, BandMatrix& j) = 0;
  virtual double stable_dt(const Vec& x, double t) = 0;
  virtual void check(const Vec& x, double t) = 0;
};

class Floors {
 public:
  Floors(const RadialProfile& initial, const FlowControls& c)
      : phi_floor_(c.floor_fraction * initial.min_phi()),
        psi_floor_(c.floor_fraction * initial.min_psi()),
        gradient_limit_(c.gradient_limit) {}

  void check(const Vec& rho, const Vec& phi, const Vec& psi, double t) const {
    const auto ip = std::min_element(psi.begin(), psi.end()) - psi.begin();
    const auto ih = std::min_element(phi.begin(), phi.end()) - phi.begin();
    for (std::size_t i = 0; i < phi.size(); ++i)
      if (!std::isfinite(phi[i]) || !std::isfinite(psi[i]))
        throw SingularityError(t, rho[i], SingularityKind::GradientBlowup);
    if (psi[ip] < psi_floor_) throw SingularityError(t, rho[ip], SingularityKind::PsiCollapse);
    if (phi[ih] < phi_floor_) throw SingularityError(t, rho[ih], SingularityKind::PhiCollapse);
    for (std::size_t i = 0; i + 1 < psi.size(); ++i)
      if (std::abs(std::log(psi[i + 1] / psi[i])) > gradient_limit_)
        throw SingularityError(t, rho[i], SingularityKind::GradientBlowup);
  }

 private:
  double phi_floor_, psi_floor_, gradient_limit_;
};

std::optional<StepFailure> positivity(const Vec& rho, const Vec& phi, const Vec& psi) {
  for (std::size_t i = 0; i < phi.size(); ++i) {
    if (!(psi[i] > 0.0) || !std::isfinite(psi[i])) return StepFailure{SingularityKind::PsiCollapse, rho[i]};
    if (!(phi[i] > 0.0) || !std::isfinite(phi[i])) return StepFailure{SingularityKind::PhiCollapse, rho[i]};
  }
  return std::nullopt;
}

// Coefficient form. psi is diffusive and takes its end values from the boundary
// model; the phi equation is first order in rho, so phi evolves by its own equation at
// every node including the ends (Dirichlet data there would over-determine it and
// break closedness next to the boundary). Unknowns phi_0, (phi_i, psi_i) for interior i, phi_{n-1}.
class CoefficientSystem : public System {
 public:
  CoefficientSystem(const RadialProfile& initial, const BaseGeometry& base, const FlowControls& c)
      : base_(base), rho_(initial.rho()), h_(initial.spacing()), n_(initial.size()), bc_(initial, base, c),
        floors_(initial, c), phi_(n_), psi_(n_), q_(n_) {}

  int size() const override { return 2 * n_ - 2; }
  int bandwidth() const override { return 5; }

  int phi_slot(int i) const { return i == 0 ? 0 : 2 * i - 1; }
  int psi_slot(int i) const { return 2 * i; }  // interior i only

  Vec pack(const RadialProfile& p) const {
    Vec x(size());
    for (int i = 0; i < n_; ++i) x[phi_slot(i)] = p.phi()[i];
    for (int i = 1; i < n_ - 1; ++i) x[psi_slot(i)] = p.psi()[i];
    return x;
  }

  void unpack(const Vec& x, double t) {
    const auto e = bc_.at(t);
    psi_[0] = e.psi_lo;
    psi_[n_ - 1] = e.psi_hi;
    for (int i = 0; i < n_; ++i) phi_[i] = x[phi_slot(i)];
    for (int i = 1; i < n_ - 1; ++i) psi_[i] = x[psi_slot(i)];
  }

  RadialProfile profile(const Vec& x, double t) {
    unpack(x, t);
    return RadialProfile(rho_, phi_, psi_);
  }

  std::optional<StepFailure> rhs(const Vec& x, double t, Vec& f) override {
    unpack(x, t);
    if (auto bad = positivity(rho_, phi_, psi_)) return bad;
    const int m = base_.n - 1;
    for (int i = 0; i < n_; ++i) q_[i] = m * std::log(phi_[i]) + std::log(psi_[i]);
    f.resize(size());
    for (int i = 0; i < n_; ++i)
      f[phi_slot(i)] = base_.mu * fd::apply_stencil(fd::d1_stencil(i, n_, h_), q_) - base_.lambda;
    for (int i = 1; i < n_ - 1; ++i) f[psi_slot(i)] = fd::apply_stencil(fd::d2_stencil(i, n_, h_), q_);
    return std::nullopt;
  }

  void jacobian(double scale, BandMatrix& j) override {
    j.set_identity_scaled(1.0);
    const int m = base_.n - 1;
    // d q_node / d (unknowns at node)
    auto add = [&](int row, const fd::Stencil& s, double factor) {
      for (int k = 0; k < s.count; ++k) {
        const int node = s.start + k;
        j.at(row, phi_slot(node)) -= scale * factor * s.w[k] * m / phi_[node];
        if (node >= 1 && node <= n_ - 2) j.at(row, psi_slot(node)) -= scale * factor * s.w[k] / psi_[node];
      }
    };
    for (int i = 0; i < n_; ++i)
      if (base_.mu != 0) add(phi_slot(i), fd::d1_stencil(i, n_, h_), base_.mu);
    for (int i = 1; i < n_ - 1; ++i) add(psi_slot(i), fd::d2_stencil(i, n_, h_), 1.0);
  }

  double stable_dt(const Vec& x, double t) override {
    unpack(x, t);
    return 0.5 * h_ * h_ * *std::min_element(psi_.begin(), psi_.end());
  }

  void check(const Vec& x, double t) override {
    unpack(x, t);
    floors_.check(rho_, phi_, psi_, t);
  }

 private:
  BaseGeometry base_;
  Vec rho_;
  double h_;
  int n_;
  Boundary bc_;
  Floors floors_;
  Vec phi_, psi_, q_;
};

// Potential form: interior unknowns u_i. The end values of u are eliminated so that
// psi_ref + u'' (one-sided stencil) equals the boundary model's psi, the same end data
// the coefficient form uses; phi at the ends then follows from u'.
class PotentialSystem : public System {
 public:
  PotentialSystem(const RadialProfile& initial, const BaseGeometry& base, const FlowControls& c)
      : base_(base), rho_(initial.rho()), h_(initial.spacing()), n_(initial.size()), bc_(initial, base, c),
        floors_(initial, c), phi0_(initial.phi()), psi0_(initial.psi()), u_(n_), phi_(n_), psi_(n_),
        lo_(fd::d2_stencil(0, n_, h_)), hi_(fd::d2_stencil(n_ - 1, n_, h_)) {
    const auto ric = ricci_coefficients(initial, base);
    rb_ = ric.r_base;
    rf_ = ric.r_fiber;
  }

  int size() const override { return n_ - 2; }
  int bandwidth() const override { return 3; }

  // weight of the end node inside its own one-sided stencil, and d u_end / d u_node
  double end_weight(const fd::Stencil& s, int end) const { return s.w[end - s.start]; }
  double end_sensitivity(int end, int node) const {
    const auto& s = end == 0 ? lo_ : hi_;
    if (node < s.start || node >= s.start + s.count || node == end) return 0.0;
    return -s.w[node - s.start] / end_weight(s, end);
  }

  void unpack(const Vec& x, double t) {
    for (int i = 1; i < n_ - 1; ++i) u_[i] = x[i - 1];
    const auto e = bc_.at(t);
    auto solve_end = [&](const fd::Stencil& s, int end, double target) {
      double rest = 0.0;
      for (int k = 0; k < s.count; ++k)
        if (s.start + k != end) rest += s.w[k] * u_[s.start + k];
      u_[end] = (target - rest) / end_weight(s, end);
    };
    solve_end(lo_, 0, e.psi_lo - (psi0_[0] - t * rf_[0]));
    solve_end(hi_, n_ - 1, e.psi_hi - (psi0_[n_ - 1] - t * rf_[n_ - 1]));
    for (int i = 0; i < n_; ++i) {
      phi_[i] = phi0_[i] - t * rb_[i] + base_.mu * fd::apply_stencil(fd::d1_stencil(i, n_, h_), u_);
      psi_[i] = psi0_[i] - t * rf_[i] + fd::apply_stencil(fd::d2_stencil(i, n_, h_), u_);
    }
  }

  PotentialFlowState state(const Vec& x, double t) {
    unpack(x, t);
    PotentialFlowState s{t, Vec(n_), Vec(n_), u_, RadialProfile(rho_, phi_, psi_)};
    for (int i = 0; i < n_; ++i) {
      s.phi_ref[i] = phi0_[i] - t * rb_[i];
      s.psi_ref[i] = psi0_[i] - t * rf_[i];
    }
    return s;
  }

  std::optional<StepFailure> rhs(const Vec& x, double t, Vec& f) override {
    unpack(x, t);
    if (auto bad = positivity(rho_, phi_, psi_)) return bad;
    const int m = base_.n - 1;
    f.resize(size());
    for (int i = 1; i < n_ - 1; ++i)
      f[i - 1] = m * std::log(phi_[i] / phi0_[i]) + std::log(psi_[i] / psi0_[i]);
    return std::nullopt;
  }

  void jacobian(double scale, BandMatrix& j) override {
    j.set_identity_scaled(1.0);
    const int m = base_.n - 1;
    auto add = [&](int i, int node, double w) {
      if (node >= 1 && node <= n_ - 2) {
        j.at(i - 1, node - 1) -= scale * w;
        return;
      }
      // end node: chain rule through its elimination
      for (int k = 1; k <= n_ - 2; ++k) {
        const double d = end_sensitivity(node, k);
        if (d != 0.0) j.at(i - 1, k - 1) -= scale * w * d;
      }
    };
    for (int i = 1; i < n_ - 1; ++i) {
      const auto s1 = fd::d1_stencil(i, n_, h_);
      const auto s2 = fd::d2_stencil(i, n_, h_);
      for (int k = 0; k < s1.count; ++k) add(i, s1.start + k, m * base_.mu * s1.w[k] / phi_[i]);
      for (int k = 0; k < s2.count; ++k) add(i, s2.start + k, s2.w[k] / psi_[i]);
    }
  }

  double stable_dt(const Vec& x, double t) override {
    unpack(x, t);
    return 0.5 * h_ * h_ * *std::min_element(psi_.begin(), psi_.end());
  }

  void check(const Vec& x, double t) override {
    unpack(x, t);
    floors_.check(rho_, phi_, psi_, t);
  }

 private:
  BaseGeometry base_;
  Vec rho_;
  double h_;
  int n_;
  Boundary bc_;
  Floors floors_;
  Vec phi0_, psi0_, rb_, rf_;
  Vec u_, phi_, psi_;
  fd::Stencil lo_, hi_;
};

std::vector<double> output_targets(double horizon, const std::vector<double>& requested) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) fail(ErrorKind::InvalidArgument, "horizon must be positive");
  std::vector<double> out;
  for (double t : requested) {
    if (t < 0.0 || t > horizon * (1 + 1e-12)) {
      std::ostringstream os;
      os << "output time " << t << " outside [0, " << horizon << "]";
      fail(ErrorKind::InvalidArgument, os.str());
    }
    if (t > 0.0) out.push_back(std::min(t, horizon));
  }
  out.push_back(horizon);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(),
                        [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, b); }),
            out.end());
  return out;
}

[[noreturn]] void raise_failure(const StepFailure& f, double t) { throw SingularityError(t, f.location, f.kind); }

// Integrates sys from t = 0 to the last target, calling record at each target.
template <class Record>
std::vector<double> integrate(System& sys, Vec x, const std::vector<double>& targets, const FlowControls& c,
                              double horizon, Record&& record) {
  std::vector<double> dt_hist;
  double t = 0.0;
  Vec f0, f1, k1, k2, k3, k4, xs, g, delta;
  std::size_t next = 0;
  const int max_halvings = 60;

  if (c.scheme == TimeScheme::ExplicitRK4) {
    const double bound0 = sys.stable_dt(x, 0.0);
    if (c.dt > 0.0 && c.dt > bound0 * (1 + 1e-12)) {
      std::ostringstream os;
      os << "dt=" << c.dt << " exceeds the explicit stability bound " << bound0;
      fail(ErrorKind::StabilityViolation, os.str());
    }
    while (next < targets.size()) {
      const double bound = sys.stable_dt(x, t);
      double dt = c.dt > 0.0 ? std::min(c.dt, bound) : 0.8 * bound;
      const double remaining = targets[next] - t;
      if (dt >= remaining * (1 - 1e-12)) dt = remaining;
      bool ok = false;
      std::optional<StepFailure> failure;
      for (int attempt = 0; attempt < max_halvings && !ok; ++attempt) {
        const std::size_t n = x.size();
        xs.resize(n);
        if ((failure = sys.rhs(x, t, k1))) break;
        for (std::size_t i = 0; i < n; ++i) xs[i] = x[i] + 0.5 * dt * k1[i];
        if ((failure = sys.rhs(xs, t + 0.5 * dt, k2))) {
          dt *= 0.5;
          continue;
        }
        for (std::size_t i = 0; i < n; ++i) xs[i] = x[i] + 0.5 * dt * k2[i];
        if ((failure = sys.rhs(xs, t + 0.5 * dt, k3))) {
          dt *= 0.5;
          continue;
        }
        for (std::size_t i = 0; i < n; ++i) xs[i] = x[i] + dt * k3[i];
        if ((failure = sys.rhs(xs, t + dt, k4))) {
          dt *= 0.5;
          continue;
        }
        for (std::size_t i = 0; i < n; ++i) xs[i] = x[i] + dt / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        ok = true;
      }
      if (!ok) raise_failure(failure.value_or(StepFailure{SingularityKind::GradientBlowup, 0.0}), t);
      const bool hit = dt == targets[next] - t;
      t = hit ? targets[next] : t + dt;
      x.swap(xs);
      dt_hist.push_back(dt);
      sys.check(x, t);
      if (hit) record(t, x), ++next;
    }
    return dt_hist;
  }

  // trapezoid rule with a damped Newton inner solve on the banded Jacobian
  const double dt_nominal = c.dt > 0.0 ? c.dt : std::min(0.02, horizon / 200.0);
  double dt_cur = dt_nominal / 64.0;
  BandMatrix jac(sys.size(), sys.bandwidth(), sys.bandwidth());
  while (next < targets.size()) {
    if (auto bad = sys.rhs(x, t, f0)) raise_failure(*bad, t);
    bool ok = false;
    std::optional<StepFailure> failure;
    double dt = 0.0;
    for (int attempt = 0; attempt < max_halvings && !ok; ++attempt, dt_cur *= 0.5) {
      dt = dt_cur;
      const double remaining = targets[next] - t;
      if (dt >= remaining * (1 - 1e-12)) dt = remaining;
      const std::size_t n = x.size();
      xs = x;
      for (std::size_t i = 0; i < n; ++i) xs[i] += dt * f0[i];
      if (sys.rhs(xs, t + dt, f1)) {
        xs = x;
        if ((failure = sys.rhs(xs, t + dt, f1))) continue;
      }
      for (int it = 0; it < c.max_inner_iterations; ++it) {
        g.resize(n);
        double res = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          g[i] = xs[i] - x[i] - 0.5 * dt * (f0[i] + f1[i]);
          res = std::max(res, std::abs(g[i]) / std::max(1.0, std::abs(xs[i])));
        }
        if (res <= c.inner_tolerance) {
          ok = true;
          break;
        }
        sys.jacobian(0.5 * dt, jac);
        delta = g;
        for (double& v : delta) v = -v;
        if (!jac.solve(delta)) break;
        double damping = 1.0;
        bool moved = false;
        for (int d = 0; d < 8; ++d, damping *= 0.5) {
          Vec trial = xs;
          for (std::size_t i = 0; i < n; ++i) trial[i] += damping * delta[i];
          if (!(failure = sys.rhs(trial, t + dt, f1))) {
            xs.swap(trial);
            moved = true;
            break;
          }
        }
        if (!moved) break;
      }
      if (ok) break;
    }
    if (!ok) {
      if (failure) raise_failure(*failure, t);
      std::ostringstream os;
      os << "trapezoid inner solve failed at t=" << t;
      fail(ErrorKind::NoConvergence, os.str());
    }
    const bool hit = dt == targets[next] - t;
    t = hit ? targets[next] : t + dt;
    x.swap(xs);
    dt_hist.push_back(dt);
    sys.check(x, t);
    if (hit) record(t, x), ++next;
    dt_cur = std::min(2.0 * dt_cur, dt_nominal);
  }
  return dt_hist;
}

}  // namespace

FlowTrajectory evolve(const RadialProfile& initial, const BaseGeometry& base, double horizon,
                      const FlowControls& controls) {
  base.validate();
  const auto targets = output_targets(horizon, controls.output_times);
  CoefficientSystem sys(initial, base, controls);
  FlowTrajectory traj;
  traj.base = base;
  traj.scheme = controls.scheme;
  traj.bc_kind = controls.bc_kind;
  traj.times.push_back(0.0);
  traj.profiles.push_back(initial);
  traj.dt_history = integrate(sys, sys.pack(initial), targets, controls, horizon, [&](double t, const Vec& x) {
    traj.times.push_back(t);
    traj.profiles.push_back(sys.profile(x, t));
  });
  return traj;
}

PotentialTrajectory evolve_potential(const RadialProfile& initial, const BaseGeometry& base, double horizon,
                                     const FlowControls& controls) {
  base.validate();
  const auto targets = output_targets(horizon, controls.output_times);
  PotentialSystem sys(initial, base, controls);
  PotentialTrajectory traj;
  traj.base = base;
  traj.scheme = controls.scheme;
  traj.bc_kind = controls.bc_kind;
  const Vec x0(sys.size(), 0.0);
  traj.states.push_back(sys.state(x0, 0.0));
  traj.dt_history = integrate(sys, x0, targets, controls, horizon,
                              [&](double t, const Vec& x) { traj.states.push_back(sys.state(x, t)); });
  return traj;
}

double flow_equation_residual(const RadialProfile& profile, const std::vector<double>& phi_dot,
                              const std::vector<double>& psi_dot, const BaseGeometry& base) {
  base.validate();
  if (phi_dot.size() != static_cast<std::size_t>(profile.size()) ||
      psi_dot.size() != static_cast<std::size_t>(profile.size()))
    fail(ErrorKind::InvalidArgument, "time derivatives do not match the profile grid");
  const auto q = log_volume_density(profile, base);
  const auto dq = fd::d1(q, profile.spacing());
  const auto ddq = fd::d2(q, profile.spacing());
  double worst = 0.0;
  for (int i = fd::kUntrustedMargin; i < profile.size() - fd::kUntrustedMargin; ++i) {
    worst = std::max(worst, std::abs(phi_dot[i] - (base.mu * dq[i] - base.lambda)));
    worst = std::max(worst, std::abs(psi_dot[i] - ddq[i]));
  }
  return worst;
}

}  // namespace krf
