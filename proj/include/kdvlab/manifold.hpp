#pragma once

#include <span>
#include <string>
#include <vector>

#include "kdvlab/grid.hpp"

namespace kdv {

struct SimulationTrace;

/// Closed-form fields on [0, 2*pi] with hand-differentiated derivatives.
///  phi(x) = (1 - cos x) / sqrt(3 pi)   -- unit null direction of A
///  a(x)   = 2/(27 pi) - 11/(108 pi) cos x - (1/3) sin x
///           + x sin x / (6 pi) + cos 2x / (36 pi)   -- quadratic manifold profile
class ClosedFormProfile {
 public:
  enum class Name { Phi, A };

  static ClosedFormProfile phi() { return ClosedFormProfile(Name::Phi); }
  static ClosedFormProfile a() { return ClosedFormProfile(Name::A); }

  Name name() const noexcept { return name_; }
  double value(double x) const;
  double first(double x) const;
  double second(double x) const;
  double third(double x) const;

 private:
  explicit ClosedFormProfile(Name n) : name_(n) {}
  Name name_;
};

inline constexpr double kReducedCoefficient = -1.0 / 18.0;

/// Throws WrongLength unless |L - 2 pi| <= 1e-9.
void require_critical_length(const Grid& g);

GridFunction phi_profile(const Grid& g);
GridFunction a_profile(const Grid& g);

/// max |a' + a''' + phi phi'| over `samples` equispaced points of [0, 2 pi].
double a_pde_residual(int samples);

/// Trapezoid value of the integral of a * phi * phi_x over [0, 2 pi].
double coefficient_quadrature(const Grid& g);

/// p = <y, phi>.
double project_p(const GridFunction& y);

struct ManifoldResidual {
  double p;
  double residual;  // |(y - p phi) - p^2 a|
};
ManifoldResidual manifold_residual(const GridFunction& y);

/// Solution of dp/dt = -p^3/18: p0 / sqrt(1 + p0^2 t / 9).
double reduced_closed_form(double p0, double t);

struct DecayFit {
  double window_start = 0.0;
  double window_end = 0.0;
  int samples = 0;
  double c_fit = 0.0;
  double target = kReducedCoefficient;
  double relative_error = 0.0;
  /// max relative gap between p(t) and p(t_a)/sqrt(1 + p(t_a)^2 (t - t_a)/9)
  double closed_form_deviation = 0.0;
  bool cubic_law_consistent = false;  // closed_form_deviation <= 5%
};

inline constexpr double kClosedFormTolerance = 0.05;

/// Least-squares slope s of p^-2 against t on [t_a, t_b]; c_fit = -s/2.
DecayFit fit_decay(std::span<const double> times, std::span<const double> p, double t_a, double t_b);
DecayFit fit_decay(const SimulationTrace& trace, double t_a, double t_b);

struct ResidualSample {
  double target_p;
  double t;
  double p;
  double scaled_residual;  // |y* - p^2 a| / p^2
};

/// For each target, the record (after `transient`) whose p is closest to it.
std::vector<ResidualSample> residual_table(const SimulationTrace& trace, std::span<const double> targets,
                                           double transient);

struct ManifoldEntry {
  double delta = 0.0;
  DecayFit fit;
  std::vector<ResidualSample> residuals;
};

struct ManifoldReport {
  double quadrature_constant = 0.0;  // integral of a phi phi_x
  double phi_norm_squared = 0.0;
  double a_phi_integral = 0.0;
  double phi_sq_phix_integral = 0.0;
  std::vector<ManifoldEntry> entries;
};

}  // namespace kdv
