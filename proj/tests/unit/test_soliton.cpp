#include <cmath>

#include "helpers.hpp"
#include "krflow/soliton.hpp"

using namespace krf;
using krf::test::base;

TEST_CASE("reduced soliton system is solved by the flat cone when lambda = n") {
  const auto rhs = soliton_rhs(base(2, 2.0), 5.0, 5.0);
  CHECK(rhs[0] == 5.0);
  CHECK(rhs[1] == doctest::Approx(5.0).epsilon(1e-15));
  const auto sol = soliton_profile_solve(base(2, 2.0), 1.0, fd::uniform_grid(2.0, 12.0, 201));
  REQUIRE(sol.profile);
  for (int i = 0; i < sol.profile->size(); ++i) {
    const double e = std::exp(sol.profile->rho()[i]);
    CHECK(sol.profile->phi()[i] == doctest::Approx(e).epsilon(1e-8));
    CHECK(sol.profile->psi()[i] == doctest::Approx(e).epsilon(1e-8));
  }
  REQUIRE(sol.B);
  CHECK(sol.B->tilde(0.0)[0] == doctest::Approx(sol.B->b0()).epsilon(1e-8));
}

TEST_CASE("numerical soliton matches the series") {
  const auto b = base(2, 3.0);
  const auto sol = soliton_profile_solve(b, 1.0, fd::uniform_grid(2.0, 14.0, 2048));
  CHECK(sol.residual <= 1e-8);
  const auto fit = fit_outer_expansion(*sol.profile, 5.0, 12.0, 3);
  CHECK(fit.cone_coefficient == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(fit.constant == doctest::Approx(-1.0).epsilon(1e-8));
  // phi carries -a1 in the w slot, a1 = -1/2
  CHECK(fit.b[0] == doctest::Approx(0.5).epsilon(0.01));
  REQUIRE(sol.B);
  CHECK(sol.fik_p == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("self-similar boundary and slices") {
  const auto b = base(2, 3.0);
  const auto grid = fd::uniform_grid(2.0, 12.0, 1001);
  const auto sol = soliton_profile_solve(b, 1.0, grid);
  const auto bc = sol.self_similar_boundary();
  const auto at1 = bc(5.0, 1.0);
  const auto direct = sol.evaluate(5.0);
  CHECK(at1[0] == doctest::Approx(direct[0]).epsilon(1e-12));
  CHECK(at1[1] == doctest::Approx(direct[1]).epsilon(1e-12));
  // (rho, t) -> t phi_1(rho - log t)
  const auto at2 = bc(5.0 + std::log(2.0), 2.0);
  CHECK(at2[0] == doctest::Approx(2 * direct[0]).epsilon(1e-10));
  const auto slice = sol.self_similar_slice(grid, 1.7);
  CHECK(flow_equation_residual(slice.profile, slice.phi_dot, slice.psi_dot, b) <= 1e-6);
}

TEST_CASE("core names round-trip") {
  for (auto c : {SolitonCore::Tip, SolitonCore::Divisor}) CHECK(core_from_string(to_string(c)) == c);
}
