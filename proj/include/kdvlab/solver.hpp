#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kdvlab/banded.hpp"
#include "kdvlab/grid.hpp"
#include "kdvlab/linear_operator.hpp"

namespace kdv {

/// Gate on the nonlinearity. epsilon = 0 disables it (Phi == 1).
struct CutoffSpec {
  double epsilon = 0.0;
};

/// Phi_eps(x) = Phi(x / eps) with Phi(s) = psi(1-s) / (psi(1-s) + psi(s-1/2)),
/// psi(r) = exp(-1/r) for r > 0 and 0 otherwise.
double cutoff_value(double x, double epsilon);
double cutoff_derivative(double x, double epsilon);

enum class Mode { Nonlinear, Linearized };
std::string to_string(Mode m);
Mode mode_from_string(const std::string& name);

enum class InitialKind { PhiScaled, KernelScaled, SineSquared, FromFile, RandomSmooth };
std::string to_string(InitialKind k);
InitialKind initial_kind_from_string(const std::string& name);

struct InitialCondition {
  InitialKind kind = InitialKind::PhiScaled;
  double amplitude = 0.0;
  std::string path;  // FromFile only
};

struct NewtonParams {
  double tol = 1e-12;
  int max_iter = 50;
};

struct SimulationConfig {
  double length = 0.0;
  int n = 0;
  double dt = 0.0;
  double t_end = 0.0;
  Mode mode = Mode::Nonlinear;
  CutoffSpec cutoff;
  InitialCondition initial;
  int snapshot_stride = 1;
  NewtonParams newton;
  Scheme scheme = Scheme::DissipativeBiased;
  std::uint64_t seed = 0;
  /// Keep the full field at every recorded time.
  bool keep_fields = false;

  /// Throws ConfigError naming the offending key.
  void validate() const;
};

/// -(1/3) (y * D0 y + D0 (y^2)) with central D0 and zero boundary values;
/// <N(y), y> = 0 exactly in exact arithmetic.
GridFunction nonlinear_term(const GridFunction& y);

struct StepResult {
  int iterations = 0;
  double residual = 0.0;  // discrete L2 norm of the final Newton correction
};

/// Implicit midpoint for (y+ - y)/dt = A_h m + [nonlinear] Phi_eps(|m|) N(m),
/// m = (y + y+)/2, solved by Newton with banded LU (plus a Sherman-Morrison
/// correction for the rank-one derivative of the cutoff).
class MidpointStepper {
 public:
  MidpointStepper(const OperatorMatrix& op, double dt, Mode mode, CutoffSpec cutoff, NewtonParams newton);

  /// Advances y in place. Throws StepFailure.
  StepResult step(std::vector<double>& y);

 private:
  void assemble_jacobian(std::span<const double> m, double gate);

  const OperatorMatrix& op_;
  double dt_;
  Mode mode_;
  CutoffSpec cutoff_;
  NewtonParams newton_;
  BandedLU lu_;
  bool linear_factored_ = false;
  std::vector<double> next_, mid_, rhs_, work_, nl_, rank_;
};

GridFunction step_implicit_midpoint(const GridFunction& y, double dt, const OperatorMatrix& op,
                                    CutoffSpec cutoff, Mode mode, NewtonParams newton);

struct TraceRecord {
  double t;
  double l2_norm;
  double h1_norm;
  double p;                  // NaN unless L = 2 pi
  double manifold_residual;  // NaN unless L = 2 pi
  double boundary_dissipation;
};

struct SimulationTrace {
  SimulationConfig config;
  std::vector<TraceRecord> records;
  std::vector<GridFunction> fields;  // parallel to records when keep_fields
  std::int64_t steps = 0;
  /// max over steps of |y+|/|y| - 1
  double max_step_growth = -1.0;
  int max_newton_iterations = 0;
};

GridFunction initial_field(const SimulationConfig& config);

/// Fixed-step march; y0 overrides config.initial when given.
SimulationTrace simulate(const SimulationConfig& config, std::optional<GridFunction> y0 = std::nullopt);

struct KatoResult {
  double lhs;  // time trapezoid of |y|_{H1}^2 over [0, T]
  double rhs;  // (4T + L)/3 |y0|^2
  bool pass;   // lhs <= 1.05 rhs
};

inline constexpr double kKatoSlack = 1.05;

KatoResult kato_check(const SimulationTrace& trace, double horizon);

}  // namespace kdv
