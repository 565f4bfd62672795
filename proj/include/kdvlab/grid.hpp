#pragma once

#include <functional>
#include <span>
#include <vector>

namespace kdv {

/// Uniform mesh on [0, L] with n interior nodes x_i = i*h, h = L/(n+1).
/// Boundary nodes x_0 = 0 and x_{n+1} = L are never stored.
class Grid {
 public:
  Grid(double length, int n);

  double length() const noexcept { return length_; }
  int size() const noexcept { return n_; }
  double spacing() const noexcept { return h_; }
  /// Node i in 1..n.
  double node(int i) const noexcept { return h_ * i; }

  bool operator==(const Grid& other) const noexcept {
    return n_ == other.n_ && length_ == other.length_;
  }

 private:
  double length_;
  int n_;
  double h_;
};

Grid make_grid(double length, int n);

/// Real field sampled at interior nodes; zero at x = 0 and x = L by convention.
struct GridFunction {
  Grid grid;
  std::vector<double> values;

  GridFunction(Grid g, std::vector<double> v);
  explicit GridFunction(Grid g);  // zero field

  int size() const noexcept { return grid.size(); }
  double operator[](int i) const { return values[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return values[static_cast<std::size_t>(i)]; }
};

GridFunction sample(const std::function<double(double)>& f, const Grid& g);

double inner_product(const GridFunction& u, const GridFunction& v);
double l2_norm(const GridFunction& u);
/// Forward-difference seminorm including the jumps (u_1 - 0)/h and (0 - u_n)/h.
double h1_seminorm(const GridFunction& u);
double h1_norm(const GridFunction& u);

// Raw-span variants used inside the solvers.
double inner_product(std::span<const double> u, std::span<const double> v, double h);
double l2_norm(std::span<const double> u, double h);
double h1_seminorm(std::span<const double> u, double h);

GridFunction operator+(const GridFunction& u, const GridFunction& v);
GridFunction operator-(const GridFunction& u, const GridFunction& v);
GridFunction operator*(double c, const GridFunction& u);

void require_same_grid(const GridFunction& u, const GridFunction& v);

}  // namespace kdv
