#include "krflow/banded.hpp"

#include <algorithm>

extern "C" {
void dgbtrf_(const int* m, const int* n, const int* kl, const int* ku, double* ab, const int* ldab, int* ipiv,
             int* info);
void dgbtrs_(const char* trans, const int* n, const int* kl, const int* ku, const int* nrhs, const double* ab,
             const int* ldab, const int* ipiv, double* b, const int* ldb, int* info);
}

namespace krf {

BandMatrix::BandMatrix(int n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), ldab_(2 * kl + ku + 1), ab_(static_cast<std::size_t>(ldab_) * n, 0.0), ipiv_(n) {}

void BandMatrix::set_zero() { std::fill(ab_.begin(), ab_.end(), 0.0); }

void BandMatrix::set_identity_scaled(double diag) {
  set_zero();
  for (int i = 0; i < n_; ++i) at(i, i) = diag;
}

bool BandMatrix::solve(std::vector<double>& b) {
  int info = 0;
  dgbtrf_(&n_, &n_, &kl_, &ku_, ab_.data(), &ldab_, ipiv_.data(), &info);
  if (info != 0) return false;
  const char trans = 'N';
  const int nrhs = 1;
  dgbtrs_(&trans, &n_, &kl_, &ku_, &nrhs, ab_.data(), &ldab_, ipiv_.data(), b.data(), &n_, &info);
  return info == 0;
}

}  // namespace krf
