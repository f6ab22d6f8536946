#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include <doctest.h>

#include "krflow/errors.hpp"
#include "krflow/finite_difference.hpp"
#include "krflow/radial_profile.hpp"

namespace krf::test {

inline BaseGeometry base(int n, double lambda, int mu = 1) {
  BaseGeometry b;
  b.n = n;
  b.lambda = lambda;
  b.mu = mu;
  return b;
}

// profile from closed-form coefficient functions
inline RadialProfile sampled(double lo, double hi, int points, const std::function<double(double)>& phi,
                             const std::function<double(double)>& psi) {
  auto g = fd::uniform_grid(lo, hi, points);
  std::vector<double> p(g.size()), q(g.size());
  for (size_t i = 0; i < g.size(); ++i) p[i] = phi(g[i]), q[i] = psi(g[i]);
  return RadialProfile(g, p, q);
}

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected krf::Error");
  return ErrorKind::InvalidArgument;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace krf::test
