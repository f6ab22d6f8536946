// One [PASS]/[FAIL] line per acceptance criterion. Exit status 0 only when every line passes.
//
//   krflow_acceptance [--only 7]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "krflow/errors.hpp"
#include "krflow/experiment.hpp"
#include "krflow/finite_difference.hpp"
#include "krflow/flow_solver.hpp"
#include "krflow/formal_expansion.hpp"
#include "krflow/io.hpp"

using namespace krf;

namespace {

struct Check {
  std::string what;
  bool pass = false;
};

struct Outcome {
  std::vector<Check> checks;
  std::string detail;

  void add(const std::string& what, bool ok) { checks.push_back({what, ok}); }
  // measured against a pinned bound
  void bound(const std::string& what, double measured, double tol) {
    add(what + "=" + io::format_double(measured) + " (<= " + io::format_double(tol) + ")", measured <= tol);
  }
  void from(const RunReport& r) {
    for (const auto& v : r.verdicts)
      add(v.name + "=" + io::format_double(v.measured) + " (expected " + io::format_double(v.expected) +
              ", tol " + io::format_double(v.tolerance) + ")",
          v.pass);
  }
  void runtime(double seconds, double limit) {
    add("runtime=" + io::format_double(std::round(seconds * 100) / 100) + "s (< " + io::format_double(limit) + "s)",
        seconds < limit);
  }
};

Rational q(long a, long b = 1) { return Rational(a, b); }

ExpansionParams params(Rational n, Rational lambda) { return {std::move(n), std::move(lambda)}; }

RunReport run(Preset p, Task task = Task::Run, const std::function<void(ExperimentConfig&)>& tweak = {}) {
  auto c = preset_config(p);
  c.preset = p;
  if (tweak) tweak(c);
  return run_experiment(c, task);
}

template <class F>
double timed(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome flat_cone() {
  Outcome o;
  o.from(run(Preset::FlatCone));
  return o;
}

Outcome cylinder_split() {
  Outcome o;
  RunReport r;
  o.runtime(timed([&] { r = run(Preset::CylinderSplit); }), 5.0);
  o.from(r);
  return o;
}

// goldens from tests/oracles/series_oracle.py
Outcome soliton_recursion() {
  Outcome o;
  struct Row {
    Rational n, lambda, a2;
  };
  const Row rows[] = {{2, 3, q(-1, 6)}, {3, 5, q(-2, 3)}, {2, q(7, 2), q(-3, 8)}, {4, 1, q(-15, 2)}};
  bool a1 = true, a2 = true;
  for (const auto& r : rows) {
    const auto e = soliton_expand(params(r.n, r.lambda), 4);
    a1 = a1 && e.at(1) == -q(1, 2) * (r.n - 1) * (r.lambda - r.n);
    a2 = a2 && e.at(2) == r.a2;
  }
  o.add("a1 exact on 4 (n, lambda)", a1);
  o.add("a2 equals substitution oracle", a2);
  bool flat = true;
  for (int n = 2; n <= 4; ++n)
    for (const auto& c : soliton_expand(params(n, n), 8).coeffs) flat = flat && c.is_zero();
  o.add("lambda = n series zero", flat);
  return o;
}

Outcome gradient_identity() {
  Outcome o;
  int cases = 0, zero = 0;
  for (int K = 1; K <= 6; ++K)
    for (auto [n, l] : {std::pair{2, 3}, {3, 1}, {3, 5}, {4, 7}}) {
      const auto e = soliton_expand(params(n, l), K);
      ++cases;
      zero += gradient_identity_residual(e, gradient_potential(e)).is_zero();
    }
  o.add("identity residual zero in " + std::to_string(zero) + "/" + std::to_string(cases) + " truncations K<=6",
        zero == cases);
  return o;
}

Outcome residual_order() {
  Outcome o;
  for (const auto& v : run(Preset::ConicalSoliton).verdicts)
    if (v.name.rfind("residual_slope", 0) == 0)
      o.add(v.name + "=" + io::format_double(v.measured) + " (expected " + io::format_double(v.expected) +
                ", rel tol " + io::format_double(v.tolerance) + ")",
            v.pass);
  return o;
}

Outcome flow_blowdown() {
  Outcome o;
  bool erased = true, w1 = true, idem = true;
  for (auto [n, l] : {std::pair{2, 3}, {3, 1}, {2, 2}}) {
    const auto P = params(n, l);
    const auto plain = blowdown(flow_expand(P, 5, {}));
    const auto loaded = blowdown(flow_expand(P, 5, {{0, q(1, 3)}, {2, q(-7, 2)}, {4, q(11)}}));
    erased = erased && plain == loaded;
    w1 = w1 && plain.coeffs.at(1) == Poly::monomial(-q(1, 2) * (P.n - 1) * (P.lambda - P.n), 2);
    idem = idem && blowdown(plain) == plain;
  }
  o.add("free constants erased", erased);
  o.add("w^1 slot = -1/2 (n-1)(lambda-n) t^2", w1);
  o.add("idempotent", idem);
  return o;
}

Outcome numeric_blowdown() {
  Outcome o;
  RunReport r;
  const double secs = timed([&] {
    r = run(Preset::ConicalSoliton, Task::Blowdown, [](ExperimentConfig& c) {
      c.grid = {2.0, 14.0, 2048};
      c.analysis.scales = {4.0};  // s^2 = 16
      c.analysis.rescaled_times = {1.0};
      c.flow.bc_kind = BoundaryKind::SelfSimilar;
    });
  });
  o.from(r);
  o.runtime(secs, 120.0);
  return o;
}

Outcome product_limit() {
  Outcome o;
  double secs = 0.0;
  // lambda = 0 is where the stated law and the 1 - lambda t / C1 law coincide
  for (double lambda : {0.0, -1.0}) {
    RunReport r;
    secs += timed([&] { r = run(Preset::BulgingBlowdown, Task::Run, [&](ExperimentConfig& c) { c.base.lambda = lambda; }); });
    for (auto& v : r.verdicts) v.name = "lambda=" + io::format_double(lambda) + " " + v.name;
    o.from(r);
  }
  o.runtime(secs, 180.0);
  return o;
}

const Verdict& find(const RunReport& r, const std::string& name) {
  for (const auto& v : r.verdicts)
    if (v.name == name) return v;
  fail(ErrorKind::InvalidArgument, "no verdict " + name);
}

Outcome bulging_invariance() {
  Outcome o;
  const auto r = run(Preset::BulgingPreserve);
  const auto& v = find(r, "leading_coefficient_drift");
  o.bound("leading_coefficient_drift", v.measured, 0.01);
  return o;
}

Outcome conical_preservation() {
  Outcome o;
  o.from(run(Preset::ConicalPreserve));
  return o;
}

Outcome decay_preservation() {
  Outcome o;
  const auto bulging = run(Preset::BulgingPreserve);
  const auto& e = find(bulging, "exponent");
  o.bound("bulging |Rm| exponent " + io::format_double(e.measured) + ", rel err", std::abs(e.measured / e.expected - 1),
          0.05);
  o.bound("bulging RmNorm_drift", find(bulging, "RmNorm_drift").measured, 0.05);
  const auto conical = run(Preset::DecayAppendix);
  const auto& ce = find(conical, "exponent");
  o.bound("conical Ricci exponent " + io::format_double(ce.measured) + ", rel err",
          std::abs(ce.measured / ce.expected - 1), 0.05);
  o.bound("conical RicciNorm_drift", find(conical, "RicciNorm_drift").measured, 0.05);
  const auto& ladder = find(conical, "derivative_ladder");
  o.add("derivative_ladder=" + io::format_double(ladder.measured) + " (>= 0.95)", ladder.pass);
  return o;
}

Outcome plateau() {
  Outcome o;
  o.from(run(Preset::BilipschitzPlateau));
  return o;
}

Outcome fik() {
  Outcome o;
  o.from(run(Preset::FikSelfSimilar));
  return o;
}

RadialProfile sample(double lo, double hi, int points, const std::function<double(double)>& phi,
                     const std::function<double(double)>& psi) {
  const auto g = fd::uniform_grid(lo, hi, points);
  std::vector<double> p(g.size()), s(g.size());
  for (size_t i = 0; i < g.size(); ++i) p[i] = phi(g[i]), s[i] = psi(g[i]);
  return RadialProfile(g, p, s);
}

double bump(double r) { return 0.05 * std::exp(-(r - 3) * (r - 3) / 0.25); }

// Self-convergence of psi at the shared nodes of N, 2N-1, 4N-3 point grids with dt halved alongside h.
double convergence_ratio(const std::function<RadialProfile(int)>& make, const BaseGeometry& b, double horizon) {
  const int points[] = {129, 257, 513};
  const double dt0 = 0.9 * explicit_stability_bound(make(points[2]));
  std::vector<std::vector<double>> psi;
  for (int k = 0; k < 3; ++k) {
    FlowControls c;
    c.scheme = TimeScheme::ExplicitRK4;
    c.dt = dt0 / (1 << k);
    const auto traj = evolve(make(points[k]), b, horizon, c);
    std::vector<double> v;
    for (int i = 0; i < points[0]; ++i) v.push_back(traj.profiles.back().psi()[i << k]);
    psi.push_back(v);
  }
  double e1 = 0.0, e2 = 0.0;
  for (int i = 0; i < points[0]; ++i) {
    e1 = std::max(e1, std::abs(psi[0][i] - psi[1][i]));
    e2 = std::max(e2, std::abs(psi[1][i] - psi[2][i]));
  }
  return e1 / e2;
}

Outcome convergence() {
  Outcome o;
  BaseGeometry cone;
  cone.n = 2;
  cone.lambda = 2.0;
  const double rc = convergence_ratio(
      [](int n) {
        return sample(0.0, 6.0, n, [](double r) { return std::exp(r) + bump(r); },
                      [](double r) { return std::exp(r) - bump(r) * 2 * (r - 3) / 0.25; });
      },
      cone, 0.1);
  o.add("perturbed flat cone ratio=" + io::format_double(rc) + " (>= 4)", rc >= 4.0);
  BaseGeometry cyl;
  cyl.n = 2;
  cyl.lambda = 1.0;
  cyl.mu = 0;
  const double ry = convergence_ratio(
      [](int n) { return sample(0.0, 6.0, n, [](double) { return 1.5; }, [](double r) { return 2.0 + bump(r); }); },
      cyl, 0.1);
  o.add("perturbed cylinder ratio=" + io::format_double(ry) + " (>= 4)", ry >= 4.0);
  return o;
}

struct Criterion {
  int id;
  const char* title;
  Outcome (*run)();
};

const Criterion kCriteria[] = {
    {1, "flat-cone oracle", flat_cone},
    {2, "cylinder splitting", cylinder_split},
    {3, "soliton recursion exactness", soliton_recursion},
    {4, "gradient-soliton identity", gradient_identity},
    {5, "soliton residual decay order", residual_order},
    {6, "flow-expansion blowdown", flow_blowdown},
    {7, "numeric vs formal conical blowdown", numeric_blowdown},
    {8, "bulging product limit", product_limit},
    {9, "finite-time bulging invariance", bulging_invariance},
    {10, "conical asymptotics preservation", conical_preservation},
    {11, "decay preservation", decay_preservation},
    {12, "biLipschitz plateau", plateau},
    {13, "FIK self-similarity", fik},
    {14, "solver convergence order", convergence},
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  if (argc == 3 && std::strcmp(argv[1], "--only") == 0) only = std::atoi(argv[2]);
  int failed = 0;
  for (const auto& c : kCriteria) {
    if (only && c.id != only) continue;
    Outcome o;
    std::string error;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      error = e.what();
    }
    bool pass = error.empty() && !o.checks.empty();
    std::string detail;
    for (const auto& k : o.checks) {
      pass = pass && k.pass;
      detail += (detail.empty() ? "" : "; ") + std::string(k.pass ? "" : "!") + k.what;
    }
    if (!error.empty()) detail += (detail.empty() ? "" : "; ") + std::string("error: ") + error;
    std::printf("[%s] %2d %s: %s\n", pass ? "PASS" : "FAIL", c.id, c.title, detail.c_str());
    std::fflush(stdout);
    failed += !pass;
  }
  return failed ? 1 : 0;
}
