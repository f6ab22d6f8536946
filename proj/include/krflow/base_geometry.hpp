#pragma once

namespace krf {

// Divisor data entering the reduced equations. lambda is the Einstein constant
// of the divisor metric, mu the curvature of the bundle metric in units of omega_D.
struct BaseGeometry {
  int n = 2;
  double lambda = 0.0;
  int mu = 1;
  int orbifold_k = 1;

  void validate() const;
  int base_dim() const { return n - 1; }
  // holomorphic sectional curvature of a space-form base with Ric = lambda omega_D
  double base_curvature() const { return lambda / n; }
};

}  // namespace krf
