#include "kdvlab/spectral.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "kdvlab/banded.hpp"
#include "kdvlab/errors.hpp"

namespace kdv {

using std::numbers::pi;

std::string to_string(SpectrumMethod m) {
  return m == SpectrumMethod::Matrix ? "matrix" : "determinant";
}

CriticalLengthTable critical_lengths(int max_index) {
  if (max_index < 1) throw ConfigError("critical_lengths needs max_index >= 1");
  std::vector<CriticalLength> all;
  for (int j = 1; j <= max_index; ++j) {
    for (int l = j; l <= max_index; ++l) {
      const double q = static_cast<double>(j * j + l * l + j * l) / 3.0;
      all.push_back({j, l, 2.0 * pi * std::sqrt(q)});
    }
  }
  std::stable_sort(all.begin(), all.end(),
                   [](const CriticalLength& a, const CriticalLength& b) { return a.value < b.value; });
  CriticalLengthTable table;
  table.max_index = max_index;
  for (const auto& e : all) {
    if (!table.entries.empty() && e.value - table.entries.back().value <= 1e-12) continue;
    table.entries.push_back(e);
  }
  return table;
}

bool is_critical(double length, int max_index, double tol) {
  if (!(length > 0.0) || !(tol > 0.0)) throw ConfigError("is_critical needs L > 0 and tol > 0");
  const auto table = critical_lengths(max_index);
  return std::any_of(table.entries.begin(), table.entries.end(),
                     [&](const CriticalLength& e) { return std::abs(length - e.value) <= tol; });
}

std::array<cplx, 3> cubic_roots(cplx lambda) {
  // Cardano for mu^3 + p mu + q with p = 1, q = lambda, then Newton polish.
  const cplx q = lambda;
  const cplx disc = std::sqrt(q * q / 4.0 + cplx(1.0 / 27.0));
  cplx u3 = -q / 2.0 + disc;
  const cplx alt = -q / 2.0 - disc;
  if (std::abs(alt) > std::abs(u3)) u3 = alt;
  const cplx u = std::pow(u3, 1.0 / 3.0);
  const cplx omega(-0.5, std::sqrt(3.0) / 2.0);
  std::array<cplx, 3> mu;
  cplx uk = u;
  for (auto& m : mu) {
    m = uk - 1.0 / (3.0 * uk);
    uk *= omega;
  }
  for (auto& m : mu) {
    for (int it = 0; it < 3; ++it) {
      const cplx d = 3.0 * m * m + 1.0;
      if (std::abs(d) < 1e-12) break;
      m -= (m * m * m + m + lambda) / d;
    }
  }
  return mu;
}

namespace {

using Column = std::array<cplx, 3>;

Column basis(cplx mu, double L, double scale) {
  const cplx e = std::exp(mu * L) * scale;
  return {cplx(scale), e, mu * e};
}

// d/dmu of basis(mu) at fixed scale: the x e^{mu x} solution.
Column basis_derivative(cplx mu, double L, double scale) {
  const cplx e = std::exp(mu * L) * scale;
  return {cplx(0.0), L * e, (1.0 + mu * L) * e};
}

cplx det3(const Column& a, const Column& b, const Column& c) {
  return a[0] * (b[1] * c[2] - b[2] * c[1]) - b[0] * (a[1] * c[2] - a[2] * c[1]) +
         c[0] * (a[1] * b[2] - a[2] * b[1]);
}

double column_norm(const Column& c) {
  return std::sqrt(std::norm(c[0]) + std::norm(c[1]) + std::norm(c[2]));
}

constexpr double kCollision = 1e-9;

struct BoundaryMatrix {
  Column c1, c2, c3;
  cplx vandermonde;
};

// scaled = false gives the entire function det/V with no exponential scaling.
BoundaryMatrix boundary_matrix(cplx lambda, double L, bool scaled) {
  auto mu = cubic_roots(lambda);
  // Put the closest pair first.
  const double d01 = std::abs(mu[0] - mu[1]);
  const double d02 = std::abs(mu[0] - mu[2]);
  const double d12 = std::abs(mu[1] - mu[2]);
  if (d02 < d01 && d02 <= d12) std::swap(mu[1], mu[2]);
  else if (d12 < d01 && d12 < d02) std::swap(mu[0], mu[2]);

  auto scale = [&](cplx m) { return scaled ? std::exp(-std::max(m.real(), 0.0) * L) : 1.0; };
  BoundaryMatrix bm;
  if (std::abs(mu[1] - mu[0]) < kCollision) {
    const cplx m = 0.5 * (mu[0] + mu[1]);
    const double s = scale(m);
    bm.c1 = basis(m, L, s);
    bm.c2 = basis_derivative(m, L, s);
    bm.c3 = basis(mu[2], L, scale(mu[2]));
    bm.vandermonde = (mu[2] - m) * (mu[2] - m);
  } else {
    bm.c1 = basis(mu[0], L, scale(mu[0]));
    bm.c2 = basis(mu[1], L, scale(mu[1]));
    bm.c3 = basis(mu[2], L, scale(mu[2]));
    bm.vandermonde = (mu[1] - mu[0]) * (mu[2] - mu[0]) * (mu[2] - mu[1]);
  }
  return bm;
}

cplx unscaled_characteristic(cplx lambda, double L) {
  const auto bm = boundary_matrix(lambda, L, false);
  return det3(bm.c1, bm.c2, bm.c3) / bm.vandermonde;
}

}  // namespace

cplx characteristic_function(cplx lambda, double length) {
  const auto bm = boundary_matrix(lambda, length, true);
  return det3(bm.c1, bm.c2, bm.c3) / bm.vandermonde;
}

double normalized_characteristic(cplx lambda, double length) {
  const auto bm = boundary_matrix(lambda, length, true);
  const double denom = column_norm(bm.c1) * column_norm(bm.c2) * column_norm(bm.c3);
  return std::abs(det3(bm.c1, bm.c2, bm.c3)) / denom;
}

namespace {

std::optional<cplx> newton_root(cplx z, double L) {
  for (int it = 0; it < 60; ++it) {
    const cplx f = unscaled_characteristic(z, L);
    if (!std::isfinite(f.real()) || !std::isfinite(f.imag())) return std::nullopt;
    const double delta = 1e-6 * std::max(1.0, std::abs(z));
    const cplx df =
        (unscaled_characteristic(z + delta, L) - unscaled_characteristic(z - delta, L)) / (2.0 * delta);
    if (std::abs(df) == 0.0) return std::nullopt;
    const cplx step = f / df;
    z -= step;
    if (std::abs(step) <= 1e-14 * std::max(1.0, std::abs(z))) return z;
    if (std::abs(z) > 1e6) return std::nullopt;
  }
  return std::nullopt;
}

bool contains_zero_spectrum(double L, const Region& r) {
  const double k = L / (2.0 * pi);
  return r.contains(cplx(0.0, 0.0)) && std::abs(k - std::round(k)) <= 1e-9 && std::round(k) >= 1.0;
}

void sort_pairs(std::vector<EigenPair>& pairs) {
  std::sort(pairs.begin(), pairs.end(), [](const EigenPair& a, const EigenPair& b) {
    if (a.lambda.real() != b.lambda.real()) return a.lambda.real() > b.lambda.real();
    return a.lambda.imag() > b.lambda.imag();
  });
}

}  // namespace

SpectrumResult find_eigenvalues_determinant(double length, const Region& region, int grid_density) {
  if (grid_density < 8) throw ConfigError("grid_density must be >= 8");
  if (!(region.re_max > region.re_min) || !(region.im_max > region.im_min)) {
    throw ConfigError("search region must have positive extent");
  }
  const double step = 1.0 / grid_density;
  const int nx = std::max(8, static_cast<int>(std::ceil((region.re_max - region.re_min) / step)));
  const int ny = std::max(8, static_cast<int>(std::ceil((region.im_max - region.im_min) / step)));
  const double dx = (region.re_max - region.re_min) / nx;
  const double dy = (region.im_max - region.im_min) / ny;

  auto node = [&](int i, int j) { return cplx(region.re_min + i * dx, region.im_min + j * dy); };
  std::vector<cplx> values(static_cast<std::size_t>((nx + 1) * (ny + 1)));
  auto at = [&](int i, int j) -> cplx& { return values[static_cast<std::size_t>(j * (nx + 1) + i)]; };
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) at(i, j) = characteristic_function(node(i, j), length);
  }

  std::vector<cplx> seeds;
  // Winding number of F around each cell.
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const std::array<cplx, 5> loop{at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1), at(i, j)};
      double turn = 0.0;
      bool degenerate = false;
      for (int k = 0; k < 4; ++k) {
        if (std::abs(loop[k]) == 0.0 || std::abs(loop[k + 1]) == 0.0) degenerate = true;
        else turn += std::arg(loop[k + 1] / loop[k]);
      }
      if (degenerate || std::abs(turn) > pi) seeds.push_back(node(i, j) + cplx(0.5 * dx, 0.5 * dy));
    }
  }
  // Discrete local minima of |F|.
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      const double v = std::abs(at(i, j));
      bool minimum = true;
      for (int dj = -1; dj <= 1 && minimum; ++dj) {
        for (int di = -1; di <= 1; ++di) {
          if (di == 0 && dj == 0) continue;
          const int ii = i + di;
          const int jj = j + dj;
          if (ii < 0 || jj < 0 || ii > nx || jj > ny) continue;
          if (std::abs(at(ii, jj)) < v) {
            minimum = false;
            break;
          }
        }
      }
      if (minimum) seeds.push_back(node(i, j));
    }
  }

  SpectrumResult result;
  result.method = SpectrumMethod::Determinant;
  result.length = length;
  for (const cplx& seed : seeds) {
    const auto root = newton_root(seed, length);
    if (!root || !region.contains(*root, 1e-9)) continue;
    if (std::abs(characteristic_function(*root, length)) > 1e-10) continue;
    const bool duplicate = std::any_of(result.pairs.begin(), result.pairs.end(), [&](const EigenPair& p) {
      return std::abs(p.lambda - *root) <= 1e-8;
    });
    if (!duplicate) result.pairs.push_back({*root, std::nullopt});
  }
  if (result.pairs.empty() && contains_zero_spectrum(length, region)) {
    std::ostringstream msg;
    msg << "determinant search found no roots at L = " << length << " although 0 is an eigenvalue";
    throw SearchFailure(msg.str());
  }
  sort_pairs(result.pairs);
  result.growth_bound = result.pairs.empty() ? -std::numeric_limits<double>::infinity()
                                             : result.pairs.front().lambda.real();
  return result;
}

SpectrumResult matrix_spectrum(const OperatorMatrix& op, bool with_vectors) {
  const int n = op.size();
  if (n > 4096) throw ConfigError("matrix_spectrum is limited to n <= 4096");
  const double h = op.grid().spacing();
  Eigen::MatrixXd a = op.dense();  // column-major
  std::vector<double> wr(static_cast<std::size_t>(n));
  std::vector<double> wi(static_cast<std::size_t>(n));
  std::vector<double> vr(with_vectors ? static_cast<std::size_t>(n) * n : 1);
  double dummy = 0.0;
  const lapack_int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', with_vectors ? 'V' : 'N', n, a.data(), n,
                                        wr.data(), wi.data(), &dummy, 1, vr.data(), with_vectors ? n : 1);
  if (info != 0) {
    std::ostringstream msg;
    msg << "dgeev failed with info = " << info;
    throw NumericalError(msg.str());
  }

  SpectrumResult result;
  result.method = SpectrumMethod::Matrix;
  result.length = op.grid().length();
  result.pairs.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    EigenPair p{cplx(wr[static_cast<std::size_t>(k)], wi[static_cast<std::size_t>(k)]), std::nullopt};
    if (with_vectors) {
      std::vector<cplx> v(static_cast<std::size_t>(n));
      const double* col = vr.data() + static_cast<std::size_t>(k) * n;
      if (wi[static_cast<std::size_t>(k)] == 0.0) {
        for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = col[i];
      } else {
        // Conjugate pair stored as (re, im) in columns k, k+1.
        const bool first = (k + 1 < n) && wi[static_cast<std::size_t>(k)] > 0.0;
        const double* re = first ? col : col - n;
        const double* im = first ? col + n : col;
        const double sign = first ? 1.0 : -1.0;
        for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = cplx(re[i], sign * im[i]);
      }
      double s = 0.0;
      for (const auto& x : v) s += std::norm(x);
      const double norm = std::sqrt(h * s);
      for (auto& x : v) x /= norm;
      p.vector = std::move(v);
    }
    result.pairs.push_back(std::move(p));
  }
  sort_pairs(result.pairs);
  result.growth_bound = result.pairs.front().lambda.real();
  return result;
}

cplx nearest_to_zero(const SpectrumResult& s) {
  if (s.pairs.empty()) throw NumericalError("empty spectrum");
  const auto it = std::min_element(s.pairs.begin(), s.pairs.end(), [](const EigenPair& a, const EigenPair& b) {
    return std::abs(a.lambda) < std::abs(b.lambda);
  });
  return it->lambda;
}

double spectral_gap(const SpectrumResult& s, double kernel_tol) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& p : s.pairs) {
    if (std::abs(p.lambda) > kernel_tol) best = std::max(best, p.lambda.real());
  }
  return -best;
}

double kernel_similarity(const std::vector<cplx>& v, const Grid& g) {
  cplx dot = 0.0;
  double vv = 0.0;
  double ww = 0.0;
  for (int i = 1; i <= g.size(); ++i) {
    const double w = 1.0 - std::cos(g.node(i));
    const cplx x = v[static_cast<std::size_t>(i - 1)];
    dot += x * w;
    vv += std::norm(x);
    ww += w * w;
  }
  return std::abs(dot) / std::sqrt(vv * ww);
}

GridFunction kernel_vector(const OperatorMatrix& op) {
  const Grid& g = op.grid();
  const double h = g.spacing();
  const cplx lambda0 = nearest_to_zero(matrix_spectrum(op, false));
  if (std::abs(lambda0) > 10.0 * h) {
    std::ostringstream msg;
    msg << "no kernel at L = " << g.length() << ": nearest eigenvalue " << lambda0 << " exceeds 10h";
    throw NoKernel(msg.str());
  }

  // Inverse iteration on the banded matrix, shifted to the located eigenvalue.
  const int n = g.size();
  BandedLU lu(n, OperatorMatrix::kBandwidth, OperatorMatrix::kBandwidth);
  for (int i = 0; i < n; ++i) {
    for (int j = std::max(0, i - 2); j <= std::min(n - 1, i + 2); ++j) lu.set(i, j, op.entry(i, j));
    lu.add(i, i, -lambda0.real());
  }
  if (!lu.factor()) {
    // Exactly singular: perturb the shift slightly.
    for (int i = 0; i < n; ++i) lu.add(i, i, -1e-14);
    if (!lu.factor()) throw NumericalError("kernel inverse iteration: singular shift");
  }
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) v[static_cast<std::size_t>(i - 1)] = 1.0 - std::cos(g.node(i)) + 0.1;
  for (int it = 0; it < 6; ++it) {
    lu.solve(v);
    const double norm = l2_norm(v, h);
    for (double& x : v) x /= norm;
  }
  GridFunction out(g, std::move(v));
  const GridFunction reference = sample([](double x) { return 1.0 - std::cos(x); }, g);
  if (inner_product(out, reference) < 0.0) out = -1.0 * out;
  return out;
}

GridFunction kernel_vector(const Grid& g) { return kernel_vector(assemble_operator(g)); }

}  // namespace kdv
