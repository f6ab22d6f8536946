#include "stiff_ode.hpp"

#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <utility>

namespace krf::detail {

namespace {

namespace odeint = boost::numeric::odeint;
using vec = boost::numeric::ublas::vector<double>;
using mat = boost::numeric::ublas::matrix<double>;

// state (phi, psi)
struct Rhs {
  double lambda;
  int m;
  void operator()(const vec& x, vec& dxdt, double) const {
    dxdt(0) = x(1);
    dxdt(1) = x(1) * (lambda + x(0) - x(1) - m * x(1) / x(0));
  }
};

struct Jac {
  double lambda;
  int m;
  void operator()(const vec& x, mat& j, double, vec& dfdt) const {
    const double phi = x(0), psi = x(1);
    j(0, 0) = 0.0;
    j(0, 1) = 1.0;
    j(1, 0) = psi * (1.0 + m * psi / (phi * phi));
    j(1, 1) = lambda + phi - 2.0 * psi - 2.0 * m * psi / phi;
    dfdt(0) = 0.0;
    dfdt(1) = 0.0;
  }
};

struct Stop {};

}  // namespace

SolitonOdeRun integrate_soliton_ode(double lambda, int m, double phi0, double psi0, double spacing,
                                    double phi_stop, double atol, double rtol, long max_steps) {
  SolitonOdeRun run;
  run.phi.push_back(phi0);
  run.psi.push_back(psi0);
  run.v.push_back(psi0 - phi0);
  vec s(2);
  s(0) = phi0;
  s(1) = psi0;
  // Steps land on every sample point; dense output was not accurate enough for the outer fits.
  // x = 400 is far beyond where any admissible solution reaches phi_stop.
  std::vector<double> times;
  const long count = static_cast<long>(400.0 / spacing);
  for (long k = 0; k <= count; ++k) times.push_back(spacing * k);
  auto observer = [&](const vec& xs, double x) {
    if (x == 0.0) return;
    if (!(xs(0) > 0.0) || !(xs(1) > 0.0) || !std::isfinite(xs(0)) || !std::isfinite(xs(1))) {
      run.left_cone = true;
      run.stop_x = x;
      throw Stop{};
    }
    run.phi.push_back(xs(0));
    run.psi.push_back(xs(1));
    run.v.push_back(xs(1) - xs(0));
    if (xs(0) > phi_stop) {
      run.stop_x = x;
      throw Stop{};
    }
  };
  try {
    odeint::integrate_times(odeint::make_controlled(atol, rtol, odeint::rosenbrock4<double>()),
                            std::make_pair(Rhs{lambda, m}, Jac{lambda, m}), s, times.begin(), times.end(),
                            1e-3 * spacing, observer, odeint::max_step_checker(static_cast<int>(max_steps)));
  } catch (const Stop&) {
    return run;
  } catch (const odeint::no_progress_error&) {
  } catch (const odeint::step_adjustment_error&) {
  }
  run.step_cap = true;
  return run;
}

}  // namespace krf::detail
