#include "kdvlab/linear_operator.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <utility>

#include "kdvlab/errors.hpp"

namespace kdv {

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::DissipativeBiased:
      return "dissipative_biased";
    case Scheme::CentralSecondOrder:
      return "central_second_order";
  }
  return "unknown";
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "dissipative_biased") return Scheme::DissipativeBiased;
  if (name == "central_second_order") return Scheme::CentralSecondOrder;
  throw ConfigError("unknown scheme '" + name + "'");
}

namespace {

struct Tap {
  int offset;
  double weight;
};

}  // namespace

OperatorMatrix::OperatorMatrix(Grid grid, Scheme scheme) : grid_(grid), scheme_(scheme) {
  const int n = grid_.size();
  const double h = grid_.spacing();
  const double h3 = h * h * h;
  for (auto& b : bands_) b.assign(static_cast<std::size_t>(n), 0.0);

  std::vector<Tap> taps;
  // -D0
  taps.push_back({+1, -1.0 / (2.0 * h)});
  taps.push_back({-1, +1.0 / (2.0 * h)});
  // -D3
  if (scheme_ == Scheme::DissipativeBiased) {
    taps.push_back({+2, -1.0 / h3});
    taps.push_back({+1, +3.0 / h3});
    taps.push_back({0, -3.0 / h3});
    taps.push_back({-1, +1.0 / h3});
  } else {
    taps.push_back({+2, -0.5 / h3});
    taps.push_back({+1, +1.0 / h3});
    taps.push_back({-1, -1.0 / h3});
    taps.push_back({-2, +0.5 / h3});
  }

  // Node numbering 1..n for unknowns; 0, n+1 are Dirichlet; -1, n+2 ghosts.
  auto add = [&](int row, int node, double w) {
    auto put = [&](int col, double c) {
      bands_[static_cast<std::size_t>(col - row + 2)][static_cast<std::size_t>(row)] += c;
    };
    if (node >= 1 && node <= n) {
      put(node - 1, w);
    } else if (node == 0 || node == n + 1) {
      // y = 0
    } else if (node == -1) {
      put(0, -w);  // y_{-1} = -y_1
    } else if (node == n + 2) {
      if (scheme_ == Scheme::DissipativeBiased) {
        put(n - 1, 3.0 * w);
        put(n - 2, -0.5 * w);
      } else {
        put(n - 1, w);  // y_{n+2} = y_n
      }
    }
  };

  for (int row = 0; row < n; ++row) {
    for (const Tap& t : taps) add(row, row + 1 + t.offset, t.weight);
  }
}

double OperatorMatrix::entry(int row, int col) const {
  const int k = col - row;
  if (k < -2 || k > 2 || row < 0 || row >= size() || col < 0 || col >= size()) return 0.0;
  return bands_[static_cast<std::size_t>(k + 2)][static_cast<std::size_t>(row)];
}

void OperatorMatrix::apply(std::span<const double> y, std::span<double> out) const {
  const int n = size();
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    const int lo = std::max(0, i - 2);
    const int hi = std::min(n - 1, i + 2);
    for (int j = lo; j <= hi; ++j) {
      s += bands_[static_cast<std::size_t>(j - i + 2)][static_cast<std::size_t>(i)] *
           y[static_cast<std::size_t>(j)];
    }
    out[static_cast<std::size_t>(i)] = s;
  }
}

Eigen::MatrixXd OperatorMatrix::dense() const {
  const int n = size();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = std::max(0, i - 2); j <= std::min(n - 1, i + 2); ++j) m(i, j) = entry(i, j);
  }
  return m;
}

OperatorMatrix assemble_operator(const Grid& g, Scheme scheme) { return OperatorMatrix(g, scheme); }

GridFunction apply(const OperatorMatrix& op, const GridFunction& y) {
  if (!(op.grid() == y.grid)) throw GridMismatch("operator and field live on different grids");
  GridFunction out(y.grid);
  op.apply(y.values, out.values);
  return out;
}

double rayleigh_quotient(const OperatorMatrix& op, const GridFunction& y) {
  const GridFunction ay = apply(op, y);
  return inner_product(ay, y) / inner_product(y, y);
}

double dissipativity_report(const OperatorMatrix& op, int trials, std::uint64_t seed) {
  if (trials < 1) throw ConfigError("dissipativity_report needs at least one trial");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int n = op.size();
  const double h = op.grid().spacing();
  std::vector<double> y(static_cast<std::size_t>(n));
  std::vector<double> ay(static_cast<std::size_t>(n));
  double worst = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    for (double& v : y) v = normal(rng);
    const double norm = l2_norm(y, h);
    for (double& v : y) v /= norm;
    op.apply(y, ay);
    worst = std::max(worst, inner_product(ay, y, h));
  }
  return worst;
}

double numerical_abscissa(const OperatorMatrix& op) {
  const Eigen::MatrixXd a = op.dense();
  const Eigen::MatrixXd sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("symmetric eigensolve failed");
  return solver.eigenvalues().maxCoeff();
}

}  // namespace kdv
