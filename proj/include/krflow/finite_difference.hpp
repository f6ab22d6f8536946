#pragma once

#include <array>
#include <vector>

namespace krf::fd {

// Points within this many samples of either end use reduced-order stencils.
constexpr int kUntrustedMargin = 2;
constexpr int kMinPoints = 5;

struct Stencil {
  int start = 0;
  int count = 0;
  std::array<double, 5> w{};
};

// Fourth-order central in the interior, second-order central at i = 1, N-2,
// second-order one-sided at the two end points.
Stencil d1_stencil(int i, int n, double h);
Stencil d2_stencil(int i, int n, double h);

std::vector<double> d1(const std::vector<double>& f, double h);
std::vector<double> d2(const std::vector<double>& f, double h);

double apply_stencil(const Stencil& s, const std::vector<double>& f);

std::vector<double> uniform_grid(double lo, double hi, int points);

// Four-point Lagrange interpolation on a uniform grid starting at x0.
double interpolate_cubic(double x0, double h, const std::vector<double>& f, double x);

}  // namespace krf::fd
