#include <cmath>

#include "helpers.hpp"
#include "krflow/ansatz.hpp"
#include "krflow/model_metrics.hpp"

using namespace krf;
using krf::test::base;

namespace {

double rm_sq(double phi, double psi, double dpsi, double ddpsi, const BaseGeometry& b) {
  const double r = curvature_components(phi, psi, dpsi, ddpsi, b).norm();
  return r * r;
}

}  // namespace

// Goldens from tests/oracles/curvature_oracle.py, which differentiates the full Kaehler
// potential on the total space with no use of the reduced formulas.
TEST_CASE("curvature components against the brute-force potential oracle") {
  SUBCASE("bulging N=2, lambda=2, rho=3") {
    const double r = 3.0;
    CHECK(rm_sq(2.25 * std::sqrt(r), 1.125 / std::sqrt(r), -0.5625 * std::pow(r, -1.5), 0.84375 * std::pow(r, -2.5),
                base(2, 2.0)) == doctest::Approx(0.21947873799725652).epsilon(1e-13));
  }
  SUBCASE("P = e^rho + rho, lambda=3, rho=1.5") {
    const double e = std::exp(1.5);
    CHECK(rm_sq(e + 1, e, e, e, base(2, 3.0)) == doctest::Approx(0.066422853033848231).epsilon(1e-13));
  }
  SUBCASE("flat cone") {
    const double e = std::exp(1.0);
    CHECK(rm_sq(e, e, e, e, base(2, 2.0)) < 1e-28);
  }
  SUBCASE("mu=0, a=2, P = rho^2 + e^-rho, lambda=1, rho=0.4") {
    const double em = std::exp(-0.4);
    CHECK(rm_sq(2.0, 2 + em, -em, em, base(2, 1.0, 0)) == doctest::Approx(0.25495729210041254).epsilon(1e-13));
  }
  SUBCASE("P = e^rho + 3 rho + e^-rho, lambda=-1, rho=2") {
    const double ep = std::exp(2.0), em = std::exp(-2.0);
    CHECK(rm_sq(ep + 3 - em, ep + em, ep - em, ep + em, base(2, -1.0)) ==
          doctest::Approx(0.060020696434036112).epsilon(1e-13));
  }
}

TEST_CASE("scalar curvature against the oracle") {
  SUBCASE("conical P = e^rho, lambda=3: R = 2 e^-rho") {
    const auto b = base(2, 3.0);
    const auto p = make_conical(0.0, b, fd::uniform_grid(0.0, 3.0, 601));
    const auto R = scalar_curvature(p, b);
    const int i = p.locate(1.5);
    CHECK(p.rho()[i] == doctest::Approx(1.5));
    CHECK(R[i] == doctest::Approx(0.44626032029685966).epsilon(1e-8));
  }
  SUBCASE("bulging N=2, lambda=2, rho=3") {
    const auto b = base(2, 2.0);
    const auto p = make_bulging(2.0, b, fd::uniform_grid(2.0, 4.0, 401));
    const auto R = scalar_curvature(p, b);
    CHECK(R[p.locate(3.0 + 1e-9)] == doctest::Approx(1.0264004785593347).epsilon(1e-8));
  }
}

TEST_CASE("flat cone has vanishing curvature") {
  const auto b = base(2, 2.0);
  const auto p = make_conical(0.0, b, fd::uniform_grid(0.0, 6.0, 257));
  const auto ric = ricci_coefficients(p, b);
  const auto rm = curvature_norm_samples(p, b);
  const auto R = scalar_curvature(p, b);
  for (int i = ric.untrusted_margin; i + ric.untrusted_margin < p.size(); ++i) {
    CHECK(std::abs(ric.r_base[i]) < 1e-6);
    CHECK(std::abs(ric.r_fiber[i]) < 1e-6);
    CHECK(std::abs(R[i]) < 1e-6);
    CHECK(rm[i] < 1e-6);
  }
}

TEST_CASE("Ricci coefficients of the lambda=3 cone") {
  // Q = 2 rho so r_base = lambda - 2 and r_fiber = 0
  const auto b = base(2, 3.0);
  const auto p = make_conical(0.0, b, fd::uniform_grid(0.0, 6.0, 257));
  const auto ric = ricci_coefficients(p, b);
  const auto rn = ricci_norm(p, b);
  for (int i = 2; i + 2 < p.size(); ++i) {
    CHECK(ric.r_base[i] == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::abs(ric.r_fiber[i]) < 1e-8);
    CHECK(rn[i] > 0.0);
  }
}

TEST_CASE("profile from a potential is closed to rounding") {
  const auto b = base(3, 1.0);
  auto g = fd::uniform_grid(0.0, 3.0, 121);
  std::vector<double> P(g.size());
  for (size_t i = 0; i < g.size(); ++i) P[i] = std::exp(g[i]) + 0.5 * g[i] * g[i];
  const auto p = profile_from_potential(g, P, b, 0.5);
  CHECK(closedness_defect(p, 1) < 1e-12);
  CHECK(p.phi()[60] == doctest::Approx(0.5 + std::exp(1.5) + 1.5).epsilon(1e-7));
}

TEST_CASE("radial distance uses (1/2) sqrt(psi) d rho") {
  const auto b = base(2, 2.0);
  const auto p = make_conical(0.0, b, fd::uniform_grid(0.0, 6.0, 601));
  // cone radius e^{rho/2}
  CHECK(radial_distance(p, 1.0, 5.0) == doctest::Approx(std::exp(2.5) - std::exp(0.5)).epsilon(1e-8));
  const auto d = distance_from_start(p);
  CHECK(d.front() == 0.0);
  CHECK(d.back() == doctest::Approx(std::exp(3.0) - 1.0).epsilon(1e-8));
  CHECK(kRadialLengthFactor == 0.5);
  CHECK(kScalarCurvatureFactor == 2.0);
}

TEST_CASE("curvature norm is interpolated at arbitrary rho") {
  const auto b = base(2, 3.0);
  const auto p = make_conical(1.0, b, fd::uniform_grid(0.0, 4.0, 401));
  const double e = std::exp(1.5);
  const double exact = curvature_components(e + 1, e, e, e, b).norm();
  CHECK(curvature_norm_at(p, b, 1.5) == doctest::Approx(exact).epsilon(1e-6));
  CHECK(std::sqrt(0.066422853033848231) == doctest::Approx(exact).epsilon(1e-13));
}
