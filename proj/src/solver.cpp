#include "kdvlab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "kdvlab/errors.hpp"
#include "kdvlab/manifold.hpp"
#include "kdvlab/spectral.hpp"

namespace kdv {

using std::numbers::pi;

namespace {

double psi(double r) { return r > 0.0 ? std::exp(-1.0 / r) : 0.0; }
double dpsi(double r) { return r > 0.0 ? std::exp(-1.0 / r) / (r * r) : 0.0; }

double bump(double s) {
  if (s <= 0.5) return 1.0;
  if (s >= 1.0) return 0.0;
  const double a = psi(1.0 - s);
  const double b = psi(s - 0.5);
  return a / (a + b);
}

double bump_derivative(double s) {
  if (s <= 0.5 || s >= 1.0) return 0.0;
  const double a = psi(1.0 - s);
  const double b = psi(s - 0.5);
  const double da = -dpsi(1.0 - s);
  const double db = dpsi(s - 0.5);
  return (da * b - a * db) / ((a + b) * (a + b));
}

}  // namespace

double cutoff_value(double x, double epsilon) {
  if (epsilon == 0.0) return 1.0;
  return bump(x / epsilon);
}

double cutoff_derivative(double x, double epsilon) {
  if (epsilon == 0.0) return 0.0;
  return bump_derivative(x / epsilon) / epsilon;
}

std::string to_string(Mode m) { return m == Mode::Nonlinear ? "nonlinear" : "linearized"; }

Mode mode_from_string(const std::string& name) {
  if (name == "nonlinear") return Mode::Nonlinear;
  if (name == "linearized") return Mode::Linearized;
  throw ConfigError("mode: unknown value '" + name + "'");
}

std::string to_string(InitialKind k) {
  switch (k) {
    case InitialKind::PhiScaled:
      return "phi_scaled";
    case InitialKind::KernelScaled:
      return "kernel_scaled";
    case InitialKind::SineSquared:
      return "sine_squared";
    case InitialKind::FromFile:
      return "from_file";
    case InitialKind::RandomSmooth:
      return "random_smooth";
  }
  return "unknown";
}

InitialKind initial_kind_from_string(const std::string& name) {
  if (name == "phi_scaled") return InitialKind::PhiScaled;
  if (name == "kernel_scaled") return InitialKind::KernelScaled;
  if (name == "sine_squared") return InitialKind::SineSquared;
  if (name == "from_file") return InitialKind::FromFile;
  if (name == "random_smooth") return InitialKind::RandomSmooth;
  throw ConfigError("initial.kind: unknown value '" + name + "'");
}

void SimulationConfig::validate() const {
  auto fail = [](const std::string& key, const std::string& why) { throw ConfigError(key + ": " + why); };
  if (!(length > 0.0) || !std::isfinite(length)) fail("length", "must be positive and finite");
  if (n < 8) fail("n", "must be at least 8");
  if (!(dt > 0.0) || dt > 0.5) fail("dt", "must lie in (0, 0.5]");
  if (!(t_end >= dt) || !std::isfinite(t_end)) fail("t_end", "must be finite and >= dt");
  if (!(cutoff.epsilon >= 0.0) || !std::isfinite(cutoff.epsilon)) {
    fail("cutoff_epsilon", "must be finite and >= 0");
  }
  if (snapshot_stride < 1) fail("snapshot_stride", "must be >= 1");
  if (!(newton.tol > 0.0)) fail("newton_tol", "must be positive");
  if (newton.max_iter < 1) fail("newton_max_iter", "must be >= 1");
  if (!std::isfinite(initial.amplitude)) fail("initial.amplitude", "must be finite");
  if (initial.kind == InitialKind::FromFile && initial.path.empty()) {
    fail("initial.path", "required when initial.kind is from_file");
  }
  if (initial.kind == InitialKind::PhiScaled && std::abs(length - 2.0 * pi) > 1e-9) {
    fail("initial.kind", "phi_scaled needs length = 2*pi");
  }
}

GridFunction nonlinear_term(const GridFunction& y) {
  const int n = y.size();
  const double h = y.grid.spacing();
  GridFunction out(y.grid);
  auto at = [&](int i) { return (i < 0 || i >= n) ? 0.0 : y[i]; };
  for (int i = 0; i < n; ++i) {
    const double d0y = (at(i + 1) - at(i - 1)) / (2.0 * h);
    const double d0y2 = (at(i + 1) * at(i + 1) - at(i - 1) * at(i - 1)) / (2.0 * h);
    out[i] = -(y[i] * d0y + d0y2) / 3.0;
  }
  return out;
}

namespace {

void nonlinear_term(std::span<const double> y, double h, std::span<double> out) {
  const std::size_t n = y.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double left = i > 0 ? y[i - 1] : 0.0;
    const double right = i + 1 < n ? y[i + 1] : 0.0;
    out[i] = -(y[i] * (right - left) + (right * right - left * left)) / (6.0 * h);
  }
}

}  // namespace

MidpointStepper::MidpointStepper(const OperatorMatrix& op, double dt, Mode mode, CutoffSpec cutoff,
                                 NewtonParams newton)
    : op_(op),
      dt_(dt),
      mode_(mode),
      cutoff_(cutoff),
      newton_(newton),
      lu_(op.size(), OperatorMatrix::kBandwidth, OperatorMatrix::kBandwidth) {
  const auto n = static_cast<std::size_t>(op.size());
  for (auto* v : {&next_, &mid_, &rhs_, &work_, &nl_, &rank_}) v->assign(n, 0.0);
}

// B = I - (dt/2) (A + gate * dN(m)); the cutoff's rank-one part is handled separately.
void MidpointStepper::assemble_jacobian(std::span<const double> m, double gate) {
  const int n = op_.size();
  const double h = op_.grid().spacing();
  const double c = 0.5 * dt_;
  lu_.clear();
  for (int i = 0; i < n; ++i) {
    for (int j = std::max(0, i - 2); j <= std::min(n - 1, i + 2); ++j) lu_.set(i, j, -c * op_.entry(i, j));
    lu_.add(i, i, 1.0);
  }
  if (gate == 0.0) return;
  auto at = [&](int i) { return (i < 0 || i >= n) ? 0.0 : m[static_cast<std::size_t>(i)]; };
  // dN_i/dm = -(1/(6h)) [ (m_{i+1} - m_{i-1}) e_i + (m_i + 2 m_{i+1}) e_{i+1} - (m_i + 2 m_{i-1}) e_{i-1} ]
  const double k = -gate / (6.0 * h);
  for (int i = 0; i < n; ++i) {
    lu_.add(i, i, -c * k * (at(i + 1) - at(i - 1)));
    if (i + 1 < n) lu_.add(i, i + 1, -c * k * (at(i) + 2.0 * at(i + 1)));
    if (i - 1 >= 0) lu_.add(i, i - 1, c * k * (at(i) + 2.0 * at(i - 1)));
  }
}

StepResult MidpointStepper::step(std::vector<double>& y) {
  const int n = op_.size();
  const double h = op_.grid().spacing();
  const bool nonlinear = mode_ == Mode::Nonlinear;
  std::copy(y.begin(), y.end(), next_.begin());

  StepResult result;
  for (int it = 1; it <= newton_.max_iter; ++it) {
    for (int i = 0; i < n; ++i) mid_[i] = 0.5 * (y[i] + next_[i]);
    op_.apply(mid_, work_);
    double gate = 0.0;
    double gate_slope = 0.0;
    double mid_norm = 0.0;
    if (nonlinear) {
      mid_norm = l2_norm(mid_, h);
      gate = cutoff_value(mid_norm, cutoff_.epsilon);
      gate_slope = cutoff_derivative(mid_norm, cutoff_.epsilon);
      nonlinear_term(mid_, h, nl_);
    }
    for (int i = 0; i < n; ++i) {
      double f = work_[i];
      if (gate != 0.0) f += gate * nl_[i];
      rhs_[i] = next_[i] - y[i] - dt_ * f;
    }

    if (!nonlinear) {
      if (!linear_factored_) {
        assemble_jacobian(mid_, 0.0);
        if (!lu_.factor()) throw StepFailure("midpoint step: singular Jacobian", 0.0, it);
        linear_factored_ = true;
      }
    } else {
      assemble_jacobian(mid_, gate);
      if (!lu_.factor()) throw StepFailure("midpoint step: singular Jacobian", 0.0, it);
    }
    lu_.solve(rhs_);

    // J = B - u w^T with u = (dt/2) Phi'(|m|) N(m), w = h m / |m|.
    if (gate_slope != 0.0 && mid_norm > 0.0) {
      for (int i = 0; i < n; ++i) rank_[i] = 0.5 * dt_ * gate_slope * nl_[i];
      lu_.solve(rank_);
      double wx = 0.0;
      double wq = 0.0;
      for (int i = 0; i < n; ++i) {
        const double w = h * mid_[i] / mid_norm;
        wx += w * rhs_[i];
        wq += w * rank_[i];
      }
      const double coef = wx / (1.0 - wq);
      for (int i = 0; i < n; ++i) rhs_[i] += coef * rank_[i];
    }

    for (int i = 0; i < n; ++i) next_[i] -= rhs_[i];
    result.iterations = it;
    result.residual = l2_norm(rhs_, h);
    if (!std::isfinite(result.residual)) break;
    if (result.residual <= newton_.tol) {
      std::copy(next_.begin(), next_.end(), y.begin());
      return result;
    }
  }
  std::ostringstream msg;
  msg << "Newton did not converge in " << result.iterations << " iterations (residual " << result.residual
      << ")";
  throw StepFailure(msg.str(), result.residual, result.iterations);
}

GridFunction step_implicit_midpoint(const GridFunction& y, double dt, const OperatorMatrix& op,
                                    CutoffSpec cutoff, Mode mode, NewtonParams newton) {
  if (!(op.grid() == y.grid)) throw GridMismatch("operator and field live on different grids");
  if (!(newton.tol > 0.0) || newton.max_iter < 1) throw ConfigError("Newton parameters must be positive");
  MidpointStepper stepper(op, dt, mode, cutoff, newton);
  std::vector<double> v = y.values;
  stepper.step(v);
  return GridFunction(y.grid, std::move(v));
}

namespace {

GridFunction read_field_file(const std::string& path, const Grid& g) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open initial field file '" + path + "'");
  std::vector<double> v;
  std::string token;
  while (in >> token) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw ConfigError("initial.path: '" + path + "' contains a non-numeric token '" + token + "'");
    }
  }
  if (static_cast<int>(v.size()) != g.size()) {
    std::ostringstream msg;
    msg << "initial.path: '" << path << "' holds " << v.size() << " values, expected n = " << g.size();
    throw ConfigError(msg.str());
  }
  return GridFunction(g, std::move(v));
}

GridFunction normalized(GridFunction f) {
  const double norm = l2_norm(f);
  return (1.0 / norm) * f;
}

}  // namespace

GridFunction initial_field(const SimulationConfig& config) {
  const Grid g(config.length, config.n);
  const double delta = config.initial.amplitude;
  const double L = config.length;
  switch (config.initial.kind) {
    case InitialKind::PhiScaled:
      return delta * phi_profile(g);
    case InitialKind::KernelScaled:
      return delta * kernel_vector(assemble_operator(g, config.scheme));
    case InitialKind::SineSquared:
      return delta * normalized(sample(
                         [&](double x) {
                           const double s = std::sin(pi * x / L);
                           return s * s;
                         },
                         g));
    case InitialKind::FromFile:
      return read_field_file(config.initial.path, g);
    case InitialKind::RandomSmooth: {
      // Sum of the first 8 Dirichlet sine modes with N(0, 1/k^2) weights.
      std::mt19937_64 rng(config.seed);
      std::normal_distribution<double> normal(0.0, 1.0);
      std::vector<double> c(8);
      for (std::size_t k = 0; k < c.size(); ++k) c[k] = normal(rng) / static_cast<double>(k + 1);
      return delta * normalized(sample(
                         [&](double x) {
                           double s = 0.0;
                           for (std::size_t k = 0; k < c.size(); ++k) {
                             s += c[k] * std::sin(static_cast<double>(k + 1) * pi * x / L);
                           }
                           return s;
                         },
                         g));
    }
  }
  throw ConfigError("initial.kind: unsupported");
}

SimulationTrace simulate(const SimulationConfig& config, std::optional<GridFunction> y0) {
  config.validate();
  const Grid g(config.length, config.n);
  const OperatorMatrix op(g, config.scheme);
  GridFunction state = y0 ? std::move(*y0) : initial_field(config);
  if (!(state.grid == g)) throw ConfigError("initial field does not match the configured grid");

  const bool critical = std::abs(config.length - 2.0 * pi) <= 1e-9;
  std::optional<GridFunction> phi;
  std::optional<GridFunction> a;
  if (critical) {
    phi = phi_profile(g);
    a = a_profile(g);
  }
  const double h = g.spacing();
  const double nan = std::numeric_limits<double>::quiet_NaN();

  SimulationTrace trace;
  trace.config = config;
  auto record = [&](double t) {
    TraceRecord r{t, l2_norm(state), h1_norm(state), nan, nan, (state[0] / h) * (state[0] / h)};
    if (critical) {
      const double p = inner_product(state, *phi);
      double s = 0.0;
      for (int i = 0; i < g.size(); ++i) {
        const double d = state[i] - p * (*phi)[i] - p * p * (*a)[i];
        s += d * d;
      }
      r.p = p;
      r.manifold_residual = std::sqrt(h * s);
    }
    trace.records.push_back(r);
    if (config.keep_fields) trace.fields.push_back(state);
  };

  const auto steps = static_cast<std::int64_t>(std::llround(config.t_end / config.dt));
  MidpointStepper stepper(op, config.dt, config.mode, config.cutoff, config.newton);
  record(0.0);
  double norm = l2_norm(state);
  for (std::int64_t k = 1; k <= steps; ++k) {
    const StepResult sr = stepper.step(state.values);
    trace.max_newton_iterations = std::max(trace.max_newton_iterations, sr.iterations);
    const double next_norm = l2_norm(state);
    if (norm > 0.0) trace.max_step_growth = std::max(trace.max_step_growth, next_norm / norm - 1.0);
    norm = next_norm;
    if (k % config.snapshot_stride == 0 || k == steps) record(static_cast<double>(k) * config.dt);
  }
  trace.steps = steps;
  return trace;
}

KatoResult kato_check(const SimulationTrace& trace, double horizon) {
  if (trace.config.mode != Mode::Linearized) throw ConfigError("kato_check needs a linearized trace");
  if (trace.records.empty() || trace.records.back().t < horizon - 1e-9) {
    throw ConfigError("kato_check: trace is shorter than the horizon");
  }
  double lhs = 0.0;
  for (std::size_t k = 1; k < trace.records.size(); ++k) {
    const auto& r0 = trace.records[k - 1];
    const auto& r1 = trace.records[k];
    if (r1.t > horizon + 1e-9) break;
    lhs += 0.5 * (r1.t - r0.t) * (r0.h1_norm * r0.h1_norm + r1.h1_norm * r1.h1_norm);
  }
  const double y0 = trace.records.front().l2_norm;
  const double rhs = (4.0 * horizon + trace.config.length) / 3.0 * y0 * y0;
  return {lhs, rhs, lhs <= kKatoSlack * rhs};
}

}  // namespace kdv
