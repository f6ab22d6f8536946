#include <cmath>

#include "helpers.hpp"
#include "krflow/ansatz.hpp"
#include "krflow/decay_monitor.hpp"
#include "krflow/model_metrics.hpp"

using namespace krf;
using krf::test::base;
using krf::test::kind_of;

namespace {

RadialProfile scaled(const RadialProfile& p, double c) {
  auto phi = p.phi(), psi = p.psi();
  for (auto& v : phi) v *= c;
  for (auto& v : psi) v *= c;
  return RadialProfile(p.rho(), phi, psi);
}

FlowTrajectory two_slices(const RadialProfile& a, const RadialProfile& b, const BaseGeometry& g) {
  FlowTrajectory t;
  t.base = g;
  t.times = {0.0, 1.0};
  t.profiles = {a, b};
  return t;
}

FlowControls implicit() {
  FlowControls c;
  c.scheme = TimeScheme::ImplicitTrapezoid;
  return c;
}

const DecayQuantity kRm{DecayQuantityKind::RmNorm, 0};
const DecayQuantity kRic{DecayQuantityKind::RicciNorm, 0};

}  // namespace

TEST_CASE("quantity names round-trip") {
  for (const char* n : {"RicciNorm", "ScalarCurv", "RmNorm", "CovDerivRm(1)", "CovDerivRm(2)"})
    CHECK(DecayQuantity::parse(n).name() == n);
  CHECK(kind_of([] { DecayQuantity::parse("CovDerivRm(x)"); }) == ErrorKind::ConfigInvalid);
  CHECK(decay_quantity_margin(DecayQuantity::parse("CovDerivRm(2)")) > decay_quantity_margin(kRm));
}

TEST_CASE("bulging |Rm| decays like d^{-2/3}") {
  const auto b = base(2, 1.0);
  const auto p = make_bulging(2.0, b, fd::uniform_grid(100.0, 20000.0, 2048));
  const auto w = default_fit_window(p, kRm);
  const auto r = fit_decay_profile(p, p, b, kRm, 0.0, w[0], w[1]);
  CHECK(r.exponent == doctest::Approx(-2.0 / 3.0).epsilon(0.05));
  CHECK(r.r2 >= 0.99);
  CHECK(r.samples.size() >= 8);
}

TEST_CASE("conical Ricci decays quadratically") {
  const auto b = base(2, 3.0);
  const auto p = make_conical(1.0, b, fd::uniform_grid(2.0, 14.0, 1024));
  const auto w = default_fit_window(p, kRic);
  CHECK(fit_decay_profile(p, p, b, kRic, 0.0, w[0], w[1]).exponent == doctest::Approx(-2.0).epsilon(0.05));
}

TEST_CASE("flat cone is reported flat") {
  const auto b = base(2, 2.0);
  const auto p = make_conical(0.0, b, fd::uniform_grid(0.0, 8.0, 257));
  const auto w = default_fit_window(p, kRm);
  CHECK(fit_decay_profile(p, p, b, kRm, 0.0, w[0], w[1]).flat);
  const auto pres = decay_preservation_check(two_slices(p, p, b), kRm, {0.0, 1.0}, w[0], w[1]);
  CHECK(pres.pass);
  CHECK(decay_csv(pres.reports).find(",flat,") != std::string::npos);
}

TEST_CASE("exponent fits are scale-equivariant") {
  const auto b = base(2, 3.0);
  const auto p = make_conical(1.0, b, fd::uniform_grid(2.0, 12.0, 512));
  const auto w = default_fit_window(p, kRm);
  const auto ref = fit_decay_profile(p, p, b, kRm, 0.0, w[0], w[1]);
  // values scale by 1/7, distances fixed
  const auto v = fit_decay_profile(scaled(p, 7.0), p, b, kRm, 0.0, w[0], w[1]);
  CHECK(v.exponent == doctest::Approx(ref.exponent).epsilon(1e-12));
  // distances scale by 3, values fixed
  const auto d = fit_decay_profile(p, scaled(p, 9.0), b, kRm, 0.0, 3 * w[0], 3 * w[1]);
  CHECK(d.exponent == doctest::Approx(ref.exponent).epsilon(1e-12));
}

TEST_CASE("decay preservation along a flow, and its failure on a fake trajectory") {
  const auto b = base(2, 3.0);
  const auto p = make_conical(1.0, b, fd::uniform_grid(2.0, 12.0, 512));
  const auto w = default_fit_window(p, kRic);
  auto c = implicit();
  c.output_times = {0.5};
  const auto traj = evolve(p, b, 1.0, c);
  CHECK(decay_preservation_check(traj, kRic, {0.0, 1.0}, w[0], w[1]).pass);

  // d_0 and d_t exponents agree
  const auto e0 = fit_decay_exponent(traj, kRic, 1.0, w[0], w[1], DistanceReference::InitialMetric);
  const auto w1 = default_fit_window(traj.profiles.back(), kRic);
  const auto et = fit_decay_exponent(traj, kRic, 1.0, w1[0], w1[1], DistanceReference::CurrentMetric);
  CHECK(std::abs(e0.exponent - et.exponent) <= 0.02);

  // O(1) bump in the far field
  auto phi = p.phi(), psi = p.psi();
  const auto& g = p.rho();
  for (size_t i = 0; i < g.size(); ++i) {
    const double x = g[i] - 10.0, bump = std::exp(-x * x);
    phi[i] += 0.5 * std::exp(g[i]) * bump;
    psi[i] += 0.5 * std::exp(g[i]) * bump * (1 - 2 * x);
  }
  const auto fake = two_slices(p, RadialProfile(g, phi, psi), b);
  CHECK_FALSE(decay_preservation_check(fake, kRm, {0.0, 1.0}, w[0], w[1]).pass);
  CHECK(kind_of([&] { fit_decay_exponent(fake, kRm, 2.0, w[0], w[1]); }) == ErrorKind::HorizonExceeded);
}

TEST_CASE("covariant derivative ladder on conical data") {
  const auto b = base(2, 3.0);
  const auto p = make_conical(1.0, b, fd::uniform_grid(2.0, 14.0, 2048));
  auto exponent = [&](const DecayQuantity& q) {
    const auto w = default_fit_window(p, q);
    return fit_decay_profile(p, p, b, q, 0.0, w[0], w[1]).exponent;
  };
  const double rm = exponent(kRm);
  for (int k : {1, 2}) CHECK(exponent({DecayQuantityKind::CovDerivRm, k}) <= rm - k * (1 - 0.1));
}

TEST_CASE("decay fitting errors") {
  const auto b = base(2, 3.0);
  const auto p = make_conical(1.0, b, fd::uniform_grid(2.0, 8.0, 64));
  const auto q = make_conical(1.0, b, fd::uniform_grid(2.0, 8.0, 65));
  CHECK(kind_of([&] { fit_decay_profile(p, q, b, kRm, 0.0, 1.0, 2.0); }) == ErrorKind::LatticeMismatch);
  CHECK(kind_of([&] { fit_decay_profile(p, p, b, kRm, 0.0, 1.0, 1e6); }) == ErrorKind::OutOfRange);
  const double d = radial_distance(p, 2.0, 8.0);
  CHECK(kind_of([&] { fit_decay_profile(p, p, b, kRm, 0.0, d - 1e-3, d); }) == ErrorKind::WindowTooSmall);
}

TEST_CASE("plateau check") {
  SUBCASE("flat cone") {
    const auto b = base(2, 2.0);
    const auto p = make_conical(0.0, b, fd::uniform_grid(0.0, 8.0, 129));
    PlateauOptions o;
    o.ball_lo = 2.0;
    o.ball_hi = 4.0;
    const auto r = bilipschitz_plateau_check(p, b, {1.0, 2.0}, o, implicit());
    CHECK(r.verdict == PlateauVerdict::Pass);
    for (const auto& row : r.rows) {
      CHECK(row.c1 == doctest::Approx(1.0).epsilon(1e-8));
      CHECK(row.rm_sup <= 1e-6);
    }
  }
  SUBCASE("static cylinder") {
    const auto b = base(2, 0.0, 0);
    const auto p = make_cylindrical(1.0, 1.0, b, fd::uniform_grid(0.0, 6.0, 65));
    PlateauOptions o;
    o.ball_lo = 2.0;
    o.ball_hi = 4.0;
    CHECK(bilipschitz_plateau_check(p, b, {1.0, 2.0}, o, implicit()).verdict == PlateauVerdict::Pass);
  }
  SUBCASE("violated hypothesis is not applicable") {
    const auto b = base(2, 3.0);
    const auto p = make_conical(0.0, b, fd::uniform_grid(3.0, 10.0, 129));
    PlateauOptions o;
    o.ball_lo = 4.0;
    o.ball_hi = 6.0;
    o.c1_max = 1.0 + 1e-9;
    CHECK(bilipschitz_plateau_check(p, b, {0.5, 1.0}, o, implicit()).verdict == PlateauVerdict::NotApplicable);
    o.ball_lo = 3.0;
    CHECK(kind_of([&] { bilipschitz_plateau_check(p, b, {0.5, 1.0}, o, implicit()); }) ==
          ErrorKind::WindowOutsideGrid);
  }
}
