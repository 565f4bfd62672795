#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kdvlab/grid.hpp"

namespace kdv {

/// Discretizations of A y = -y_x - y_xxx with y(0) = y(L) = 0, y_x(L) = 0.
///
/// Both schemes use the central first difference. The third derivative is
///  - DissipativeBiased: (y_{i+2} - 3y_{i+1} + 3y_i - y_{i-1}) / h^3, first order,
///    leading error -(h/2) d^4/dx^4;
///  - CentralSecondOrder: (y_{i+2} - 2y_{i+1} + 2y_{i-1} - y_{i-2}) / (2h^3).
///
/// Ghost values: y_0 = y_{n+1} = 0 always. The biased scheme closes the right
/// end with the third-order one-sided Neumann rule y_{n+2} = 3y_n - y_{n-1}/2.
/// The central scheme uses y_{-1} = -y_1 on the left, which reproduces the
/// boundary flux -(y_1/h)^2/2 ~ -y_x(0)^2/2, and y_{n+2} = y_n on the right.
/// Both closures keep <A_h y, y> <= 0.
enum class Scheme { DissipativeBiased, CentralSecondOrder };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& name);

class OperatorMatrix {
 public:
  static constexpr int kBandwidth = 2;

  OperatorMatrix(Grid grid, Scheme scheme);

  const Grid& grid() const noexcept { return grid_; }
  Scheme scheme() const noexcept { return scheme_; }
  int size() const noexcept { return grid_.size(); }

  /// 0-based entry; zero outside the band.
  double entry(int row, int col) const;
  void apply(std::span<const double> y, std::span<double> out) const;
  Eigen::MatrixXd dense() const;

 private:
  Grid grid_;
  Scheme scheme_;
  // bands_[k][i] = A(i, i + k - 2)
  std::array<std::vector<double>, 5> bands_;
};

OperatorMatrix assemble_operator(const Grid& g, Scheme scheme = Scheme::DissipativeBiased);

GridFunction apply(const OperatorMatrix& op, const GridFunction& y);

/// <A_h y, y> / <y, y> in the discrete L2 pairing.
double rayleigh_quotient(const OperatorMatrix& op, const GridFunction& y);

/// Largest <A_h y, y> over `trials` seeded random unit vectors.
double dissipativity_report(const OperatorMatrix& op, int trials, std::uint64_t seed);

/// Largest eigenvalue of the symmetric part (A + A^T)/2, i.e. the exact
/// supremum of the Rayleigh quotient. Dense; intended for n of a few thousand.
double numerical_abscissa(const OperatorMatrix& op);

}  // namespace kdv
