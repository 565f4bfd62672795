#pragma once

#include <span>
#include <vector>

namespace kdv {

/// LU factorization with partial pivoting of an n x n band matrix
/// (LAPACK dgbtrf/dgbtrs). Entries are set before factor().
class BandedLU {
 public:
  BandedLU(int n, int lower, int upper);

  void clear();
  /// 0-based (row, col); must lie inside the band.
  void set(int row, int col, double value);
  void add(int row, int col, double value);

  /// Returns false if the matrix is exactly singular.
  bool factor();
  /// Overwrites rhs with the solution; requires a successful factor().
  void solve(std::span<double> rhs) const;

  int size() const noexcept { return n_; }

 private:
  int n_;
  int kl_;
  int ku_;
  int ldab_;
  std::vector<double> ab_;  // column-major LAPACK band layout
  std::vector<int> ipiv_;
  bool factored_ = false;
};

}  // namespace kdv
