#include "krflow/finite_difference.hpp"

#include <algorithm>
#include <cmath>

#include "krflow/errors.hpp"

namespace krf::fd {

Stencil d1_stencil(int i, int n, double h) {
  Stencil s;
  if (i >= 2 && i <= n - 3) {
    const double c = 1.0 / (12.0 * h);
    s.start = i - 2;
    s.count = 5;
    s.w = {c, -8.0 * c, 0.0, 8.0 * c, -c};
  } else if (i == 0) {
    const double c = 1.0 / (2.0 * h);
    s.start = 0;
    s.count = 3;
    s.w = {-3.0 * c, 4.0 * c, -c};
  } else if (i == n - 1) {
    const double c = 1.0 / (2.0 * h);
    s.start = n - 3;
    s.count = 3;
    s.w = {c, -4.0 * c, 3.0 * c};
  } else {
    const double c = 1.0 / (2.0 * h);
    s.start = i - 1;
    s.count = 3;
    s.w = {-c, 0.0, c};
  }
  return s;
}

Stencil d2_stencil(int i, int n, double h) {
  Stencil s;
  const double h2 = h * h;
  if (i >= 2 && i <= n - 3) {
    const double c = 1.0 / (12.0 * h2);
    s.start = i - 2;
    s.count = 5;
    s.w = {-c, 16.0 * c, -30.0 * c, 16.0 * c, -c};
  } else if (i == 0) {
    s.start = 0;
    s.count = 4;
    s.w = {2.0 / h2, -5.0 / h2, 4.0 / h2, -1.0 / h2};
  } else if (i == n - 1) {
    s.start = n - 4;
    s.count = 4;
    s.w = {-1.0 / h2, 4.0 / h2, -5.0 / h2, 2.0 / h2};
  } else {
    s.start = i - 1;
    s.count = 3;
    s.w = {1.0 / h2, -2.0 / h2, 1.0 / h2};
  }
  return s;
}

double apply_stencil(const Stencil& s, const std::vector<double>& f) {
  double acc = 0.0;
  for (int k = 0; k < s.count; ++k) acc += s.w[k] * f[s.start + k];
  return acc;
}

static void require_points(std::size_t n) {
  if (n < static_cast<std::size_t>(kMinPoints))
    fail(ErrorKind::GridTooCoarse, "need at least 5 grid points, got " + std::to_string(n));
}

std::vector<double> d1(const std::vector<double>& f, double h) {
  require_points(f.size());
  const int n = static_cast<int>(f.size());
  std::vector<double> out(f.size());
  for (int i = 0; i < n; ++i) out[i] = apply_stencil(d1_stencil(i, n, h), f);
  return out;
}

std::vector<double> d2(const std::vector<double>& f, double h) {
  require_points(f.size());
  const int n = static_cast<int>(f.size());
  std::vector<double> out(f.size());
  for (int i = 0; i < n; ++i) out[i] = apply_stencil(d2_stencil(i, n, h), f);
  return out;
}

std::vector<double> uniform_grid(double lo, double hi, int points) {
  if (points < kMinPoints) fail(ErrorKind::GridTooCoarse, "need at least 5 grid points");
  if (!(hi > lo)) fail(ErrorKind::InvalidArgument, "grid requires rho_max > rho_min");
  std::vector<double> x(points);
  const double h = (hi - lo) / (points - 1);
  for (int i = 0; i < points; ++i) x[i] = lo + i * h;
  x.back() = hi;
  return x;
}

double interpolate_cubic(double x0, double h, const std::vector<double>& f, double x) {
  const int n = static_cast<int>(f.size());
  const double s = (x - x0) / h;
  int i = static_cast<int>(std::floor(s)) - 1;
  i = std::clamp(i, 0, n - 4);
  const double t = s - i;
  // nodes at t = 0,1,2,3
  const double l0 = -(t - 1) * (t - 2) * (t - 3) / 6.0;
  const double l1 = t * (t - 2) * (t - 3) / 2.0;
  const double l2 = -t * (t - 1) * (t - 3) / 2.0;
  const double l3 = t * (t - 1) * (t - 2) / 6.0;
  return l0 * f[i] + l1 * f[i + 1] + l2 * f[i + 2] + l3 * f[i + 3];
}

}  // namespace krf::fd
