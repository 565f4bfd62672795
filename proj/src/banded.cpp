#include "kdvlab/banded.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cassert>

#include "kdvlab/errors.hpp"

namespace kdv {

BandedLU::BandedLU(int n, int lower, int upper)
    : n_(n),
      kl_(lower),
      ku_(upper),
      ldab_(2 * lower + upper + 1),
      ab_(static_cast<std::size_t>(ldab_) * static_cast<std::size_t>(n), 0.0),
      ipiv_(static_cast<std::size_t>(n), 0) {}

void BandedLU::clear() {
  std::fill(ab_.begin(), ab_.end(), 0.0);
  factored_ = false;
}

void BandedLU::set(int row, int col, double value) {
  assert(row - col <= kl_ && col - row <= ku_);
  // LAPACK: AB(kl + ku + i - j, j) = A(i, j), 0-based, column-major.
  ab_[static_cast<std::size_t>(col) * ldab_ + static_cast<std::size_t>(kl_ + ku_ + row - col)] = value;
  factored_ = false;
}

void BandedLU::add(int row, int col, double value) {
  assert(row - col <= kl_ && col - row <= ku_);
  ab_[static_cast<std::size_t>(col) * ldab_ + static_cast<std::size_t>(kl_ + ku_ + row - col)] += value;
  factored_ = false;
}

bool BandedLU::factor() {
  const lapack_int info =
      LAPACKE_dgbtrf(LAPACK_COL_MAJOR, n_, n_, kl_, ku_, ab_.data(), ldab_, ipiv_.data());
  if (info < 0) throw NumericalError("dgbtrf: invalid argument");
  factored_ = (info == 0);
  return factored_;
}

void BandedLU::solve(std::span<double> rhs) const {
  assert(factored_);
  assert(static_cast<int>(rhs.size()) == n_);
  const lapack_int info = LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', n_, kl_, ku_, 1, ab_.data(), ldab_,
                                         ipiv_.data(), rhs.data(), n_);
  if (info != 0) throw NumericalError("dgbtrs failed");
}

}  // namespace kdv
