#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "kdvlab/grid.hpp"
#include "kdvlab/linear_operator.hpp"

namespace kdv {

using cplx = std::complex<double>;

struct EigenPair {
  cplx lambda;
  /// Unit discrete-L2 eigenvector (matrix method only).
  std::optional<std::vector<cplx>> vector;
};

enum class SpectrumMethod { Matrix, Determinant };
std::string to_string(SpectrumMethod m);

struct SpectrumResult {
  SpectrumMethod method = SpectrumMethod::Matrix;
  double length = 0.0;
  std::vector<EigenPair> pairs;  // descending real part
  double growth_bound = 0.0;     // max Re lambda
};

struct CriticalLength {
  int j;
  int l;
  double value;  // 2*pi*sqrt((j^2 + l^2 + j*l)/3)
};

struct CriticalLengthTable {
  int max_index = 0;
  std::vector<CriticalLength> entries;  // strictly increasing values
};

CriticalLengthTable critical_lengths(int max_index);
bool is_critical(double length, int max_index, double tol);

/// Roots of mu^3 + mu + lambda = 0.
std::array<cplx, 3> cubic_roots(cplx lambda);

/// Boundary determinant built from the fundamental solutions e^{mu_j x}:
/// rows (v(0), v(L), v'(L)), column j scaled by exp(-max(Re mu_j, 0) L),
/// divided by the Vandermonde product of the mu_j so that the value does not
/// depend on root ordering. Colliding roots (|mu_i - mu_j| < 1e-9) use the
/// confluent basis {e^{mu x}, x e^{mu x}}. Vanishes exactly on the point spectrum.
cplx characteristic_function(cplx lambda, double length);

/// |det| / prod(column norms) of the scaled boundary matrix; in [0, 1].
double normalized_characteristic(cplx lambda, double length);

struct Region {
  double re_min;
  double re_max;
  double im_min;
  double im_max;

  bool contains(cplx z, double slack = 0.0) const {
    return z.real() >= re_min - slack && z.real() <= re_max + slack && z.imag() >= im_min - slack &&
           z.imag() <= im_max + slack;
  }
};

/// Zeros of the characteristic function inside `region`, seeded from an
/// argument-principle / local-minimum scan with spacing 1/grid_density and
/// polished by Newton.
SpectrumResult find_eigenvalues_determinant(double length, const Region& region, int grid_density);

/// Dense eigen-decomposition of A_h (LAPACK dgeev). n <= 4096.
SpectrumResult matrix_spectrum(const OperatorMatrix& op, bool with_vectors = true);

/// Unit null direction of A_h, sign-fixed against 1 - cos x. Throws NoKernel
/// when the eigenvalue nearest 0 exceeds 10 h in modulus.
GridFunction kernel_vector(const OperatorMatrix& op);
GridFunction kernel_vector(const Grid& g);

/// Eigenvalue of A_h nearest to 0.
cplx nearest_to_zero(const SpectrumResult& s);

/// -max Re over eigenvalues with |lambda| > kernel_tol.
double spectral_gap(const SpectrumResult& s, double kernel_tol);

/// |<v, 1 - cos x>| / (|v| |1 - cos x|) for a (possibly complex) nodal vector.
double kernel_similarity(const std::vector<cplx>& v, const Grid& g);

}  // namespace kdv
