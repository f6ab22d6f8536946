#include <cmath>

#include "helpers.hpp"
#include "krflow/ansatz.hpp"
#include "krflow/model_metrics.hpp"
#include "krflow/flow_solver.hpp"

using namespace krf;
using krf::test::base;
using krf::test::kind_of;

namespace {

FlowControls controls(TimeScheme s, std::vector<double> out = {}) {
  FlowControls c;
  c.scheme = s;
  c.output_times = std::move(out);
  return c;
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// flat cone with a bump, as in the convergence study
RadialProfile bumped_cone(int points) {
  return krf::test::sampled(
      0.0, 6.0, points, [](double r) { return std::exp(r) + 0.05 * std::exp(-(r - 3) * (r - 3) / 0.25); },
      [](double r) {
        const double b = 0.05 * std::exp(-(r - 3) * (r - 3) / 0.25);
        return std::exp(r) - b * 2 * (r - 3) / 0.25;
      });
}

}  // namespace

TEST_CASE("cylinder: fiber static, base linear") {
  const auto b = base(2, 1.0, 0);
  const auto init = make_cylindrical(1.0, 1.5, b, fd::uniform_grid(0.0, 6.0, 129));
  for (auto s : {TimeScheme::ExplicitRK4, TimeScheme::ImplicitTrapezoid}) {
    const auto traj = evolve(init, b, 1.0, controls(s, {0.5}));
    REQUIRE(traj.times.size() == 3);
    for (size_t k = 0; k < traj.times.size(); ++k)
      for (int i = 0; i < init.size(); ++i) {
        CHECK(std::abs(traj.profiles[k].psi()[i] - 2.0) <= 1e-8);
        CHECK(std::abs(traj.profiles[k].phi()[i] - (1.5 - traj.times[k])) <= 1e-8);
      }
  }
}

TEST_CASE("flat cone is stationary and the initial slice is stored bitwise") {
  const auto b = base(2, 2.0);
  const auto init = make_conical(0.0, b, fd::uniform_grid(0.0, 6.0, 129));
  const auto traj = evolve(init, b, 1.0, controls(TimeScheme::ImplicitTrapezoid, {0.25, 0.5}));
  CHECK(traj.times.front() == 0.0);
  CHECK(identical(traj.profiles.front(), init));
  for (const auto& p : traj.profiles) {
    for (int i = 0; i < p.size(); ++i) CHECK(std::abs(p.phi()[i] / init.phi()[i] - 1) <= 1e-8);
  }
  CHECK(identical(traj.at(0.5), traj.profiles[2]));
  CHECK(kind_of([&] { traj.at(0.7); }) == ErrorKind::OutOfRange);
}

TEST_CASE("closedness is preserved along the flow") {
  const auto b = base(2, 2.0);
  const auto init = bumped_cone(257);
  const auto traj = evolve(init, b, 0.25, controls(TimeScheme::ImplicitTrapezoid, {0.1}));
  const double d0 = closedness_defect(init, 1);
  for (const auto& p : traj.profiles) CHECK(closedness_defect(p, 1) <= 10 * d0 + 1e-10);
}

TEST_CASE("second-order convergence under halving dt and dx") {
  const auto b = base(2, 2.0);
  const double dt0 = 0.9 * explicit_stability_bound(bumped_cone(513));
  std::vector<std::vector<double>> psi;
  const int points[] = {129, 257, 513};
  for (int k = 0; k < 3; ++k) {
    auto c = controls(TimeScheme::ExplicitRK4);
    c.dt = dt0 / (1 << k);
    const auto traj = evolve(bumped_cone(points[k]), b, 0.1, c);
    std::vector<double> v;
    for (int i = 0; i < 129; ++i) v.push_back(traj.profiles.back().psi()[i << k]);
    psi.push_back(v);
  }
  const double e1 = sup_diff(psi[0], psi[1]);
  const double e2 = sup_diff(psi[1], psi[2]);
  CHECK(e1 / e2 >= 4.0);
}

TEST_CASE("explicit scheme rejects an unstable step") {
  const auto b = base(2, 2.0);
  const auto init = make_conical(0.0, b, fd::uniform_grid(0.0, 6.0, 257));
  auto c = controls(TimeScheme::ExplicitRK4);
  c.dt = 10 * explicit_stability_bound(init);
  CHECK(kind_of([&] { evolve(init, b, 0.1, c); }) == ErrorKind::StabilityViolation);
}

TEST_CASE("base collapse fires a singularity at a step-independent time") {
  const auto b = base(2, 40.0, 0);
  const auto init = make_cylindrical(1.0, 1.5, b, fd::uniform_grid(0.0, 6.0, 65));
  std::vector<double> when;
  for (double dt : {1e-3, 5e-4}) {
    auto c = controls(TimeScheme::ImplicitTrapezoid);
    c.dt = dt;
    try {
      evolve(init, b, 1.0, c);
      FAIL("expected a singularity");
    } catch (const SingularityError& e) {
      CHECK(e.kind() == ErrorKind::Singularity);
      CHECK(e.singularity() == SingularityKind::PhiCollapse);
      when.push_back(e.time());
    }
  }
  REQUIRE(when.size() == 2);
  CHECK(when[0] == doctest::Approx(1.5 / 40).epsilon(0.05));
  CHECK(std::abs(when[1] / when[0] - 1) <= 0.05);
}

TEST_CASE("potential form: static data keeps u at zero") {
  SUBCASE("flat cone") {
    const auto b = base(2, 2.0);
    const auto init = make_conical(0.0, b, fd::uniform_grid(0.0, 6.0, 129));
    const auto tr = evolve_potential(init, b, 1.0, controls(TimeScheme::ImplicitTrapezoid));
    for (const auto& s : tr.states)
      for (double u : s.u) CHECK(std::abs(u) <= 1e-8);
  }
  SUBCASE("cylinder with lambda = 0") {
    const auto b = base(2, 0.0, 0);
    const auto init = make_cylindrical(1.0, 1.0, b, fd::uniform_grid(0.0, 6.0, 129));
    const auto tr = evolve_potential(init, b, 1.0, controls(TimeScheme::ImplicitTrapezoid));
    for (const auto& s : tr.states)
      for (double u : s.u) CHECK(std::abs(u) <= 1e-10);
  }
}

TEST_CASE("potential and coefficient forms agree") {
  const auto b = base(2, 3.0);
  const auto init = make_conical(1.0, b, fd::uniform_grid(2.0, 8.0, 1024));
  auto c = controls(TimeScheme::ImplicitTrapezoid, {0.5});
  c.dt = 0.005;
  const auto coeff = evolve(init, b, 0.5, c);
  const auto pot = evolve_potential(init, b, 0.5, c);
  const auto& m = pot.states.back().metric;
  const auto& p = coeff.profiles.back();
  double d = 0.0;
  for (int i = 0; i < p.size(); ++i)
    d = std::max({d, std::abs(m.phi()[i] - p.phi()[i]) / p.phi()[i], std::abs(m.psi()[i] - p.psi()[i]) / p.psi()[i]});
  CHECK(d <= 1e-5);
}

TEST_CASE("flow equation residual of an exact solution") {
  const auto b = base(2, 1.0, 0);
  const auto p = make_cylindrical(1.0, 2.0, b, fd::uniform_grid(0.0, 4.0, 41));
  std::vector<double> phi_dot(41, -1.0), psi_dot(41, 0.0);
  CHECK(flow_equation_residual(p, phi_dot, psi_dot, b) <= 1e-12);
  phi_dot[20] = 0.0;
  CHECK(flow_equation_residual(p, phi_dot, psi_dot, b) == doctest::Approx(1.0));
}

TEST_CASE("enum names round-trip") {
  for (auto s : {TimeScheme::ExplicitRK4, TimeScheme::ImplicitTrapezoid}) CHECK(scheme_from_string(to_string(s)) == s);
  for (auto k : {BoundaryKind::FrozenModel, BoundaryKind::DriftingModel, BoundaryKind::SelfSimilar})
    CHECK(boundary_from_string(to_string(k)) == k);
  CHECK(kind_of([] { scheme_from_string("Euler"); }) == ErrorKind::ConfigInvalid);
}
