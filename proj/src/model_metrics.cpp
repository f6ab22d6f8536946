#include "krflow/model_metrics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/interpolators/quintic_hermite.hpp>
#include <cmath>
#include <numeric>
#include <sstream>

#include "krflow/errors.hpp"
#include "krflow/finite_difference.hpp"

namespace krf {

namespace {

// natural cubic spline on arbitrary increasing knots
struct NaturalSpline {
  std::vector<double> x, y, m;

  NaturalSpline(std::vector<double> xs, std::vector<double> ys) : x(std::move(xs)), y(std::move(ys)) {
    const std::size_t n = x.size();
    m.assign(n, 0.0);
    std::vector<double> diag(n, 1.0), upper(n, 0.0), rhs(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double h0 = x[i] - x[i - 1], h1 = x[i + 1] - x[i];
      const double lower = h0 / 6.0;
      diag[i] = (h0 + h1) / 3.0;
      upper[i] = h1 / 6.0;
      rhs[i] = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
      // eliminate the sub-diagonal against the previous row
      const double f = lower / diag[i - 1];
      diag[i] -= f * upper[i - 1];
      rhs[i] -= f * rhs[i - 1];
    }
    for (std::size_t i = n - 2; i >= 1; --i) m[i] = (rhs[i] - upper[i] * m[i + 1]) / diag[i];
  }

  std::array<double, 3> eval(double xv) const {
    auto it = std::upper_bound(x.begin(), x.end(), xv);
    std::size_t i = std::clamp<std::size_t>(static_cast<std::size_t>(it - x.begin()), 1, x.size() - 1) - 1;
    const double h = x[i + 1] - x[i];
    const double a = (x[i + 1] - xv) / h, b = (xv - x[i]) / h;
    const double v = a * y[i] + b * y[i + 1] + ((a * a * a - a) * m[i] + (b * b * b - b) * m[i + 1]) * h * h / 6.0;
    const double d = (y[i + 1] - y[i]) / h + ((1.0 - 3.0 * a * a) * m[i] + (3.0 * b * b - 1.0) * m[i + 1]) * h / 6.0;
    const double dd = a * m[i] + b * m[i + 1];
    return {v, d, dd};
  }
};

}  // namespace

struct BFunction::Impl {
  // boost 1.74's double_prime is mis-scaled, so the first derivative gets its own interpolant
  std::optional<boost::math::interpolators::cardinal_quintic_hermite<std::vector<double>>> quintic;
  std::optional<boost::math::interpolators::cardinal_quintic_hermite<std::vector<double>>> quintic_d;
  std::optional<NaturalSpline> spline;
  std::vector<double> knots;
  std::vector<double> knot_values;

  std::array<double, 3> eval(double x) const {
    if (quintic) return {(*quintic)(x), (*quintic_d)(x), quintic_d->prime(x)};
    return spline->eval(x);
  }
};

BFunction::BFunction(double x0, double hx, std::vector<double> value, std::vector<double> dvalue,
                     std::vector<double> ddvalue, std::vector<double> dddvalue, double b0) {
  if (value.size() < 4 || dvalue.size() != value.size() || ddvalue.size() != value.size() ||
      dddvalue.size() != value.size())
    fail(ErrorKind::InvalidArgument, "B samples need at least 4 points with matching derivatives");
  if (!(b0 > 0.0)) fail(ErrorKind::InvalidArgument, "B(0) must be positive");
  auto impl = std::make_shared<Impl>();
  const std::size_t n = value.size();
  impl->knots.resize(n);
  for (std::size_t i = 0; i < n; ++i) impl->knots[i] = x0 + i * hx;
  impl->knot_values = value;
  impl->quintic.emplace(std::move(value), std::vector<double>(dvalue), std::vector<double>(ddvalue), x0, hx);
  impl->quintic_d.emplace(std::move(dvalue), std::move(ddvalue), std::move(dddvalue), x0, hx);
  x_min_ = x0;
  x_max_ = x0 + (n - 1) * hx;
  b0_ = b0;
  impl_ = impl;
}

BFunction BFunction::from_table(const std::vector<double>& s, const std::vector<double>& b) {
  if (s.size() != b.size()) fail(ErrorKind::InvalidArgument, "s and B columns differ in length");
  std::optional<double> b0;
  std::vector<std::pair<double, double>> rows;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] < 0.0) fail(ErrorKind::InvalidArgument, "B table has negative s");
    if (s[i] == 0.0)
      b0 = b[i];
    else
      rows.emplace_back(std::log(4.0 / s[i]), b[i]);
  }
  if (!b0) fail(ErrorKind::InvalidArgument, "B table needs an s = 0 row giving B(0)");
  if (!(*b0 > 0.0)) fail(ErrorKind::InvalidArgument, "B(0) must be positive");
  if (rows.size() < 4) fail(ErrorKind::InvalidArgument, "B table needs at least 4 rows with s > 0");
  std::sort(rows.begin(), rows.end());
  std::vector<double> x, y;
  for (const auto& r : rows) {
    if (!x.empty() && r.first <= x.back()) fail(ErrorKind::InvalidArgument, "duplicate s in B table");
    x.push_back(r.first);
    y.push_back(r.second);
  }
  BFunction out;
  auto impl = std::make_shared<Impl>();
  impl->knots = x;
  impl->knot_values = y;
  impl->spline.emplace(x, y);
  out.x_min_ = x.front();
  out.x_max_ = x.back();
  out.b0_ = *b0;
  out.impl_ = impl;
  return out;
}

std::array<double, 3> BFunction::tilde(double x) const {
  if (x < x_min_ - 1e-12 * std::max(1.0, std::abs(x_min_))) {
    std::ostringstream os;
    os << "B needed at s=" << 4.0 * std::exp(-x) << " beyond table maximum " << 4.0 * std::exp(-x_min_);
    fail(ErrorKind::InterpolationRangeExceeded, os.str());
  }
  if (x <= x_max_) return impl_->eval(std::max(x, x_min_));
  // linear in s between the last sample and s = 0
  const double se = 4.0 * std::exp(-x_max_);
  const double beta = (impl_->eval(x_max_)[0] - b0_) / se;
  const double sv = 4.0 * std::exp(-x);
  return {b0_ + beta * sv, -beta * sv, beta * sv};
}

double BFunction::operator()(double s) const {
  if (s < 0.0) fail(ErrorKind::InterpolationRangeExceeded, "B evaluated at negative s");
  if (s == 0.0) return b0_;
  return tilde(std::log(4.0 / s))[0];
}

std::vector<std::array<double, 2>> BFunction::table() const {
  std::vector<std::array<double, 2>> rows;
  rows.push_back({0.0, b0_});
  for (std::size_t i = impl_->knots.size(); i-- > 0;)
    rows.push_back({4.0 * std::exp(-impl_->knots[i]), impl_->knot_values[i]});
  return rows;
}

const char* to_string(RegimeKind kind) {
  switch (kind) {
    case RegimeKind::Cylindrical: return "Cylindrical";
    case RegimeKind::Bulging: return "Bulging";
    case RegimeKind::Conical: return "Conical";
    case RegimeKind::FIK: return "FIK";
  }
  return "Unknown";
}

RegimeKind regime_from_string(const std::string& name) {
  for (auto k : {RegimeKind::Cylindrical, RegimeKind::Bulging, RegimeKind::Conical, RegimeKind::FIK})
    if (name == to_string(k)) return k;
  fail(ErrorKind::ConfigInvalid, "unknown regime '" + name + "'");
}

double RegimeSpec::require(const std::optional<double>& field, const char* name) const {
  if (!field) fail(ErrorKind::InvalidArgument, std::string(to_string(kind)) + " regime requires field " + name);
  return *field;
}

RadialProfile make_cylindrical(double c, double offset, const BaseGeometry& base, const std::vector<double>& grid) {
  base.validate();
  if (base.mu != 0) fail(ErrorKind::InvalidArgument, "cylindrical model requires mu = 0");
  if (!(c > 0.0)) fail(ErrorKind::InvalidArgument, "cylinder coefficient c must be positive");
  if (!(offset > 0.0)) fail(ErrorKind::NonKaehler, "cylinder base offset must be positive");
  return RadialProfile(grid, std::vector<double>(grid.size(), offset), std::vector<double>(grid.size(), 2.0 * c),
                       1e-12);
}

RadialProfile make_bulging(double N, const BaseGeometry& base, const std::vector<double>& grid) {
  base.validate();
  if (base.mu != 1) fail(ErrorKind::InvalidArgument, "bulging model requires mu = 1");
  if (!(N > 0.0)) fail(ErrorKind::InvalidArgument, "bulging exponent N must be positive");
  if (grid.empty() || !(grid.front() > 0.0)) fail(ErrorKind::GridNotPositive, "bulging model needs rho > 0");
  const double cphi = (N + 1) * (N + 1) / (2.0 * N);
  const double cpsi = (N + 1) * (N + 1) / (2.0 * N * N);
  std::vector<double> phi(grid.size()), psi(grid.size());
  double scale = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    phi[i] = cphi * std::pow(grid[i], 1.0 / N);
    psi[i] = cpsi * std::pow(grid[i], (1.0 - N) / N);
    scale = std::max(scale, std::abs((1.0 - N) / N * psi[i] / grid[i]));
  }
  const double h = grid.size() > 1 ? (grid.back() - grid.front()) / (grid.size() - 1) : 0.0;
  return RadialProfile(grid, std::move(phi), std::move(psi), 10.0 * h * h * scale + 1e-12);
}

RadialProfile make_conical(double k_log, const BaseGeometry& base, const std::vector<double>& grid) {
  base.validate();
  if (base.mu != 1) fail(ErrorKind::InvalidArgument, "conical model requires mu = 1");
  std::vector<double> phi(grid.size()), psi(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    psi[i] = std::exp(grid[i]);
    phi[i] = psi[i] + k_log;
  }
  if (!grid.empty() && !(phi.front() > 0.0)) {
    std::ostringstream os;
    os << "k_log=" << k_log << " <= -e^{rho_min}";
    fail(ErrorKind::NonKaehler, os.str());
  }
  const double h = grid.size() > 1 ? (grid.back() - grid.front()) / (grid.size() - 1) : 0.0;
  const double scale = grid.empty() ? 0.0 : std::exp(grid.back());
  return RadialProfile(grid, std::move(phi), std::move(psi), 10.0 * h * h * scale + 1e-12);
}

static void check_fik_base(double p, double t0, const BaseGeometry& base) {
  base.validate();
  if (base.mu != 1) fail(ErrorKind::IncompatibleBase, "FIK family requires mu = 1");
  if (!(p > 0.0) || !(t0 > 0.0)) fail(ErrorKind::InvalidArgument, "FIK family needs p > 0 and t0 > 0");
  const double want = base.n / p;
  if (std::abs(base.lambda - want) > 1e-9 * std::max(1.0, std::abs(want))) {
    std::ostringstream os;
    os << "FIK chart requires lambda = n/p = " << want << ", got " << base.lambda;
    fail(ErrorKind::IncompatibleBase, os.str());
  }
}

FikSlice fik_family_at(double p, double t0, const BFunction& B, const BaseGeometry& base,
                       const std::vector<double>& grid, double t) {
  check_fik_base(p, t0, base);
  const double tau = t + t0;
  if (!(tau > 0.0)) fail(ErrorKind::InvalidArgument, "t + t0 must be positive");
  const std::size_t n = grid.size();
  std::vector<double> phi(n), psi(n), phi_dot(n), psi_dot(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto bt = B.tilde(grid[i] - std::log(tau));
    const double e = std::exp(grid[i]) / p;
    phi[i] = e * bt[0];
    psi[i] = e * (bt[0] + bt[1]);
    phi_dot[i] = -e * bt[1] / tau;
    psi_dot[i] = -e * (bt[1] + bt[2]) / tau;
  }
  return {RadialProfile(grid, std::move(phi), std::move(psi)), std::move(phi_dot), std::move(psi_dot)};
}

RadialProfile make_fik(double p, double t0, const BFunction& B, const BaseGeometry& base,
                       const std::vector<double>& grid) {
  return fik_family_at(p, t0, B, base, grid, 0.0).profile;
}

RadialProfile make_model(const RegimeSpec& spec, const BaseGeometry& base, const std::vector<double>& grid) {
  switch (spec.kind) {
    case RegimeKind::Cylindrical:
      return make_cylindrical(spec.require(spec.c, "c"), spec.require(spec.offset, "offset"), base, grid);
    case RegimeKind::Bulging: return make_bulging(spec.require(spec.N, "N"), base, grid);
    case RegimeKind::Conical: return make_conical(spec.require(spec.k_log, "k_log"), base, grid);
    case RegimeKind::FIK:
      if (!spec.B) fail(ErrorKind::InvalidArgument, "FIK regime requires a B function");
      return make_fik(spec.require(spec.p, "p"), spec.require(spec.t0, "t0"), *spec.B, base, grid);
  }
  fail(ErrorKind::InvalidArgument, "unknown regime");
}

RegimeFit asymptotic_form_residual(const RadialProfile& profile, const RegimeSpec& spec, double window_lo,
                                   double window_hi) {
  const auto [i0, i1] = window_indices(profile, window_lo, window_hi);
  const int m = i1 - i0 + 1;
  if (m < fd::kMinPoints) fail(ErrorKind::WindowTooSmall, "regime window holds fewer than 5 grid points");
  const auto& rho = profile.rho();
  const auto& phi = profile.phi();
  const auto& psi = profile.psi();
  std::vector<double> mphi(m), mpsi(m);
  RegimeFit fit;

  auto log_mean = [&](auto&& f) {
    double acc = 0.0;
    for (int k = 0; k < m; ++k) acc += f(i0 + k);
    return acc / m;
  };

  switch (spec.kind) {
    case RegimeKind::Cylindrical: {
      const double a = std::exp(log_mean([&](int i) { return std::log(phi[i]); }));
      const double c = 0.5 * std::exp(log_mean([&](int i) { return std::log(psi[i]); }));
      std::fill(mphi.begin(), mphi.end(), a);
      std::fill(mpsi.begin(), mpsi.end(), 2.0 * c);
      fit.parameters["a"] = a;
      fit.parameters["c"] = c;
      break;
    }
    case RegimeKind::Bulging: {
      const double N = spec.require(spec.N, "N");
      if (!(rho[i0] > 0.0)) fail(ErrorKind::GridNotPositive, "bulging regime window needs rho > 0");
      const double cphi = (N + 1) * (N + 1) / (2.0 * N);
      const double cpsi = (N + 1) * (N + 1) / (2.0 * N * N);
      for (int k = 0; k < m; ++k) {
        mphi[k] = cphi * std::pow(rho[i0 + k], 1.0 / N);
        mpsi[k] = cpsi * std::pow(rho[i0 + k], (1.0 - N) / N);
      }
      double acc = 0.0;
      for (int k = 0; k < m; ++k) acc += std::log(phi[i0 + k] / mphi[k]) + std::log(psi[i0 + k] / mpsi[k]);
      const double A = std::exp(acc / (2.0 * m));
      for (int k = 0; k < m; ++k) {
        mphi[k] *= A;
        mpsi[k] *= A;
      }
      fit.parameters["scale"] = A;
      fit.parameters["leading_coefficient"] = A * cphi;
      break;
    }
    case RegimeKind::Conical: {
      const double k_log = spec.k_log.value_or(0.0);
      const double A = std::exp(log_mean([&](int i) { return std::log(psi[i]) - rho[i]; }));
      double kappa = 0.0;
      for (int k = 0; k < m; ++k) {
        mpsi[k] = A * std::exp(rho[i0 + k]);
        mphi[k] = mpsi[k] + k_log;
        kappa += phi[i0 + k] - mpsi[k];
      }
      fit.parameters["cone_coefficient"] = A;
      fit.parameters["constant"] = kappa / m;
      break;
    }
    case RegimeKind::FIK: {
      if (spec.B) {
        const double p = spec.require(spec.p, "p");
        const double t0 = spec.require(spec.t0, "t0");
        for (int k = 0; k < m; ++k) {
          const auto bt = spec.B->tilde(rho[i0 + k] - std::log(t0));
          const double e = std::exp(rho[i0 + k]) / p;
          mphi[k] = e * bt[0];
          mpsi[k] = e * (bt[0] + bt[1]);
        }
        double acc = 0.0;
        for (int k = 0; k < m; ++k) acc += std::log(phi[i0 + k] / mphi[k]) + std::log(psi[i0 + k] / mpsi[k]);
        const double A = std::exp(acc / (2.0 * m));
        for (int k = 0; k < m; ++k) {
          mphi[k] *= A;
          mpsi[k] *= A;
        }
        fit.parameters["scale"] = A;
        fit.parameters["cone_coefficient"] = A * spec.B->b0() / p;
      } else {
        // without B only the cone and its constant slot are known
        const double A = std::exp(log_mean([&](int i) { return std::log(psi[i]) - rho[i]; }));
        double kappa = 0.0;
        for (int k = 0; k < m; ++k) kappa += phi[i0 + k] - A * std::exp(rho[i0 + k]);
        kappa /= m;
        for (int k = 0; k < m; ++k) {
          mpsi[k] = A * std::exp(rho[i0 + k]);
          mphi[k] = mpsi[k] + kappa;
        }
        fit.parameters["cone_coefficient"] = A;
        fit.parameters["constant"] = kappa;
      }
      break;
    }
  }

  std::vector<double> diff(m);
  for (int k = 0; k < m; ++k) {
    const int i = i0 + k;
    fit.value_residual = std::max(
        {fit.value_residual, std::abs(phi[i] - mphi[k]) / mphi[k], std::abs(psi[i] - mpsi[k]) / mpsi[k]});
    diff[k] = phi[i] - mphi[k];
  }
  const auto ddiff = fd::d1(diff, profile.spacing());
  for (int k = 0; k < m; ++k) fit.slope_residual = std::max(fit.slope_residual, std::abs(ddiff[k]) / mpsi[k]);
  fit.residual = std::max(fit.value_residual, fit.slope_residual);
  return fit;
}

OuterExpansionFit fit_outer_expansion(const RadialProfile& profile, double window_lo, double window_hi, int order) {
  if (order < 0) fail(ErrorKind::InvalidArgument, "outer expansion order must be nonnegative");
  const auto [i0, i1] = window_indices(profile, window_lo, window_hi);
  const int m = i1 - i0 + 1;
  const int cols = order + 2;
  if (m < cols + 3) fail(ErrorKind::WindowTooSmall, "outer expansion window too small for requested order");
  const double wmax = std::exp(-profile.rho()[i0]);
  Eigen::MatrixXd a(m, cols);
  Eigen::VectorXd y(m);
  for (int k = 0; k < m; ++k) {
    const int i = i0 + k;
    const double w = std::exp(-profile.rho()[i]);
    y(k) = profile.phi()[i] * w;
    double v = 1.0;
    for (int j = 0; j < cols; ++j) {
      a(k, j) = v;
      v *= w / wmax;
    }
  }
  const Eigen::VectorXd sol = a.colPivHouseholderQr().solve(y);
  OuterExpansionFit out;
  double scale = 1.0;
  std::vector<double> coeff(cols);
  for (int j = 0; j < cols; ++j) {
    coeff[j] = sol(j) / scale;
    scale *= wmax;
  }
  out.cone_coefficient = coeff[0];
  out.constant = coeff[1];
  out.b.assign(coeff.begin() + 2, coeff.end());
  const Eigen::VectorXd r = a * sol - y;
  for (int k = 0; k < m; ++k) out.max_residual = std::max(out.max_residual, std::abs(r(k)) / std::abs(y(k)));
  return out;
}

}  // namespace krf
