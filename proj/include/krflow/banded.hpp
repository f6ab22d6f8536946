#pragma once

#include <vector>

namespace krf {

// Square band matrix in LAPACK general-band storage, factored with dgbtrf.
class BandMatrix {
 public:
  BandMatrix(int n, int kl, int ku);

  int size() const { return n_; }
  void set_zero();
  void set_identity_scaled(double diag);
  // requires |i - j| inside the band
  double& at(int i, int j) { return ab_[(kl_ + ku_ + i - j) + j * ldab_]; }
  bool in_band(int i, int j) const { return j - i <= ku_ && i - j <= kl_; }

  // Solves A x = b in place (A is overwritten by its LU factors). Returns false if singular.
  bool solve(std::vector<double>& b);

 private:
  int n_, kl_, ku_, ldab_;
  std::vector<double> ab_;
  std::vector<int> ipiv_;
};

}  // namespace krf
