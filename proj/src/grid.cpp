#include "kdvlab/grid.hpp"

#include <cmath>
#include <sstream>

#include "kdvlab/errors.hpp"

namespace kdv {

Grid::Grid(double length, int n) : length_(length), n_(n), h_(0.0) {
  if (!(length > 0.0) || !std::isfinite(length)) {
    std::ostringstream msg;
    msg << "grid length must be positive and finite, got " << length;
    throw ConfigError(msg.str());
  }
  if (n < 8) {
    std::ostringstream msg;
    msg << "grid needs at least 8 interior nodes, got " << n;
    throw ConfigError(msg.str());
  }
  h_ = length / (n + 1);
}

Grid make_grid(double length, int n) { return Grid(length, n); }

GridFunction::GridFunction(Grid g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (static_cast<int>(values.size()) != grid.size()) {
    std::ostringstream msg;
    msg << "field has " << values.size() << " values but grid has " << grid.size() << " nodes";
    throw GridMismatch(msg.str());
  }
  for (double x : values) {
    if (!std::isfinite(x)) throw SamplingError("field contains a non-finite value");
  }
}

GridFunction::GridFunction(Grid g) : grid(g), values(static_cast<std::size_t>(g.size()), 0.0) {}

GridFunction sample(const std::function<double(double)>& f, const Grid& g) {
  std::vector<double> v(static_cast<std::size_t>(g.size()));
  for (int i = 1; i <= g.size(); ++i) {
    const double x = g.node(i);
    const double fx = f(x);
    if (!std::isfinite(fx)) {
      std::ostringstream msg;
      msg << "sampled function is not finite at x = " << x;
      throw SamplingError(msg.str());
    }
    v[static_cast<std::size_t>(i - 1)] = fx;
  }
  return GridFunction(g, std::move(v));
}

void require_same_grid(const GridFunction& u, const GridFunction& v) {
  if (!(u.grid == v.grid)) throw GridMismatch("fields live on different grids");
}

double inner_product(std::span<const double> u, std::span<const double> v, double h) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return h * s;
}

double l2_norm(std::span<const double> u, double h) { return std::sqrt(inner_product(u, u, h)); }

double h1_seminorm(std::span<const double> u, double h) {
  if (u.empty()) return 0.0;
  double s = u.front() * u.front() + u.back() * u.back();
  for (std::size_t i = 0; i + 1 < u.size(); ++i) {
    const double d = u[i + 1] - u[i];
    s += d * d;
  }
  return std::sqrt(s / h);
}

double inner_product(const GridFunction& u, const GridFunction& v) {
  require_same_grid(u, v);
  return inner_product(u.values, v.values, u.grid.spacing());
}

double l2_norm(const GridFunction& u) { return l2_norm(u.values, u.grid.spacing()); }

double h1_seminorm(const GridFunction& u) { return h1_seminorm(u.values, u.grid.spacing()); }

double h1_norm(const GridFunction& u) {
  const double a = l2_norm(u);
  const double b = h1_seminorm(u);
  return std::sqrt(a * a + b * b);
}

GridFunction operator+(const GridFunction& u, const GridFunction& v) {
  require_same_grid(u, v);
  GridFunction w(u.grid);
  for (int i = 0; i < u.size(); ++i) w[i] = u[i] + v[i];
  return w;
}

GridFunction operator-(const GridFunction& u, const GridFunction& v) {
  require_same_grid(u, v);
  GridFunction w(u.grid);
  for (int i = 0; i < u.size(); ++i) w[i] = u[i] - v[i];
  return w;
}

GridFunction operator*(double c, const GridFunction& u) {
  GridFunction w(u.grid);
  for (int i = 0; i < u.size(); ++i) w[i] = c * u[i];
  return w;
}

}  // namespace kdv
