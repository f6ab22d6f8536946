#include <cmath>

#include "helpers.hpp"
#include "krflow/base_geometry.hpp"

using namespace krf;
using krf::test::kind_of;

TEST_CASE("uniform grid hits both ends") {
  auto g = fd::uniform_grid(-1.0, 3.0, 9);
  REQUIRE(g.size() == 9);
  CHECK(g.front() == -1.0);
  CHECK(g.back() == 3.0);
  CHECK(g[4] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("interior stencils differentiate quartics exactly") {
  const double h = 0.1;
  auto g = fd::uniform_grid(0.0, 2.0, 21);
  std::vector<double> f(g.size());
  for (size_t i = 0; i < g.size(); ++i) f[i] = 1 + g[i] - 2 * g[i] * g[i] + 0.5 * std::pow(g[i], 3) + std::pow(g[i], 4);
  const auto d1 = fd::d1(f, h);
  const auto d2 = fd::d2(f, h);
  for (int i = 2; i + 2 < static_cast<int>(g.size()); ++i) {
    const double x = g[i];
    CHECK(d1[i] == doctest::Approx(1 - 4 * x + 1.5 * x * x + 4 * x * x * x).epsilon(1e-11));
    CHECK(d2[i] == doctest::Approx(-4 + 3 * x + 12 * x * x).epsilon(1e-10));
  }
}

TEST_CASE("boundary stencils are exact on quadratics") {
  const double h = 0.25;
  auto g = fd::uniform_grid(0.0, 2.0, 9);
  std::vector<double> f(g.size());
  for (size_t i = 0; i < g.size(); ++i) f[i] = 3 - g[i] + 2 * g[i] * g[i];
  const auto d1 = fd::d1(f, h);
  const auto d2 = fd::d2(f, h);
  for (int i : {0, 1, 7, 8}) {
    CHECK(d1[i] == doctest::Approx(-1 + 4 * g[i]).epsilon(1e-12));
    CHECK(d2[i] == doctest::Approx(4.0).epsilon(1e-12));
  }
  CHECK(fd::apply_stencil(fd::d1_stencil(4, 9, h), f) == doctest::Approx(d1[4]));
}

TEST_CASE("cubic interpolation reproduces cubics") {
  auto g = fd::uniform_grid(0.0, 1.0, 11);
  std::vector<double> f(g.size());
  for (size_t i = 0; i < g.size(); ++i) f[i] = g[i] * g[i] * g[i] - g[i];
  for (double x : {0.03, 0.5, 0.77, 0.99})
    CHECK(fd::interpolate_cubic(0.0, 0.1, f, x) == doctest::Approx(x * x * x - x).epsilon(1e-13));
}

TEST_CASE("profile constructor rejects malformed data") {
  auto g = fd::uniform_grid(0.0, 1.0, 6);
  std::vector<double> one(6, 1.0);
  CHECK(kind_of([&] { RadialProfile(g, std::vector<double>(5, 1.0), one); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { RadialProfile({0, 1, 2, 3}, {1, 1, 1, 1}, {1, 1, 1, 1}); }) == ErrorKind::GridTooCoarse);
  CHECK(kind_of([&] { RadialProfile({0, 1, 2, 4, 5}, {1, 1, 1, 1, 1}, {1, 1, 1, 1, 1}); }) ==
        ErrorKind::GridNotUniform);
  CHECK(kind_of([&] { RadialProfile({4, 3, 2, 1, 0}, {1, 1, 1, 1, 1}, {1, 1, 1, 1, 1}); }) ==
        ErrorKind::GridNotUniform);
  auto bad = one;
  bad[3] = 0.0;
  CHECK(kind_of([&] { RadialProfile(g, bad, one); }) == ErrorKind::NonKaehler);
  bad[3] = NAN;
  CHECK(kind_of([&] { RadialProfile(g, one, bad); }) == ErrorKind::NonKaehler);
}

TEST_CASE("base geometry validation") {
  BaseGeometry b;
  CHECK_NOTHROW(b.validate());
  b.mu = 2;
  CHECK(kind_of([&] { b.validate(); }) == ErrorKind::InvalidArgument);
  b = BaseGeometry{};
  b.n = 1;
  CHECK(kind_of([&] { b.validate(); }) == ErrorKind::InvalidArgument);
  b.mu = 0;
  CHECK_NOTHROW(b.validate());
  b = BaseGeometry{};
  b.orbifold_k = 0;
  CHECK(kind_of([&] { b.validate(); }) == ErrorKind::InvalidArgument);
  b = BaseGeometry{};
  b.lambda = INFINITY;
  CHECK(kind_of([&] { b.validate(); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("window indices and locate") {
  auto p = krf::test::sampled(0.0, 4.0, 41, [](double r) { return std::exp(r); }, [](double r) { return std::exp(r); });
  auto [i0, i1] = window_indices(p, 1.0, 2.0);
  CHECK(p.rho()[i0] == doctest::Approx(1.0));
  CHECK(p.rho()[i1] == doctest::Approx(2.0));
  CHECK(p.locate(1.05) == 10);
  CHECK(kind_of([&] { window_indices(p, -1.0, 2.0); }) == ErrorKind::OutOfRange);
  CHECK(closedness_defect(p, 1) < 1e-3);
  CHECK(identical(p, p));
}
