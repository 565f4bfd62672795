#include "kdvlab/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "kdvlab/errors.hpp"
#include "kdvlab/solver.hpp"

namespace kdv {

using std::numbers::pi;

namespace {

const double kPhiScale = 1.0 / std::sqrt(3.0 * pi);
const double kC1 = 2.0 / (27.0 * pi);
const double kC2 = -11.0 / (108.0 * pi);
const double kXSin = 1.0 / (6.0 * pi);
const double kCos2 = 1.0 / (36.0 * pi);

}  // namespace

double ClosedFormProfile::value(double x) const {
  if (name_ == Name::Phi) return kPhiScale * (1.0 - std::cos(x));
  return kC1 + kC2 * std::cos(x) - std::sin(x) / 3.0 + kXSin * x * std::sin(x) + kCos2 * std::cos(2.0 * x);
}

double ClosedFormProfile::first(double x) const {
  if (name_ == Name::Phi) return kPhiScale * std::sin(x);
  return -kC2 * std::sin(x) - std::cos(x) / 3.0 + kXSin * (std::sin(x) + x * std::cos(x)) -
         2.0 * kCos2 * std::sin(2.0 * x);
}

double ClosedFormProfile::second(double x) const {
  if (name_ == Name::Phi) return kPhiScale * std::cos(x);
  return -kC2 * std::cos(x) + std::sin(x) / 3.0 + kXSin * (2.0 * std::cos(x) - x * std::sin(x)) -
         4.0 * kCos2 * std::cos(2.0 * x);
}

double ClosedFormProfile::third(double x) const {
  if (name_ == Name::Phi) return -kPhiScale * std::sin(x);
  return kC2 * std::sin(x) + std::cos(x) / 3.0 + kXSin * (-3.0 * std::sin(x) - x * std::cos(x)) +
         8.0 * kCos2 * std::sin(2.0 * x);
}

void require_critical_length(const Grid& g) {
  if (std::abs(g.length() - 2.0 * pi) > 1e-9) {
    std::ostringstream msg;
    msg << "closed-form profiles need L = 2*pi, got L = " << g.length();
    throw WrongLength(msg.str());
  }
}

GridFunction phi_profile(const Grid& g) {
  require_critical_length(g);
  const auto f = ClosedFormProfile::phi();
  return sample([&](double x) { return f.value(x); }, g);
}

GridFunction a_profile(const Grid& g) {
  require_critical_length(g);
  const auto f = ClosedFormProfile::a();
  return sample([&](double x) { return f.value(x); }, g);
}

double a_pde_residual(int samples) {
  if (samples < 100) throw ConfigError("a_pde_residual needs at least 100 samples");
  const auto a = ClosedFormProfile::a();
  const auto phi = ClosedFormProfile::phi();
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double x = 2.0 * pi * k / (samples - 1);
    worst = std::max(worst, std::abs(a.first(x) + a.third(x) + phi.value(x) * phi.first(x)));
  }
  return worst;
}

double coefficient_quadrature(const Grid& g) {
  require_critical_length(g);
  const auto a = ClosedFormProfile::a();
  const auto phi = ClosedFormProfile::phi();
  double s = 0.0;
  for (int i = 1; i <= g.size(); ++i) {
    const double x = g.node(i);
    s += a.value(x) * phi.value(x) * phi.first(x);
  }
  return g.spacing() * s;
}

double project_p(const GridFunction& y) { return inner_product(y, phi_profile(y.grid)); }

ManifoldResidual manifold_residual(const GridFunction& y) {
  const GridFunction phi = phi_profile(y.grid);
  const GridFunction a = a_profile(y.grid);
  const double p = inner_product(y, phi);
  double s = 0.0;
  for (int i = 0; i < y.size(); ++i) {
    const double r = y[i] - p * phi[i] - p * p * a[i];
    s += r * r;
  }
  return {p, std::sqrt(y.grid.spacing() * s)};
}

double reduced_closed_form(double p0, double t) {
  const double arg = 1.0 + p0 * p0 * t / 9.0;
  if (!(arg > 0.0)) throw ConfigError("reduced_closed_form: 1 + p0^2 t / 9 must be positive");
  return p0 / std::sqrt(arg);
}

DecayFit fit_decay(std::span<const double> times, std::span<const double> p, double t_a, double t_b) {
  if (times.size() != p.size()) throw ConfigError("fit_decay: times and p differ in length");
  if (!(t_b > t_a)) throw ConfigError("fit_decay: empty window");
  std::vector<double> ts;
  std::vector<double> ps;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] < t_a || times[k] > t_b) continue;
    if (!(p[k] > 0.0)) throw ConfigError("fit_decay: p must stay positive on the window");
    ts.push_back(times[k]);
    ps.push_back(p[k]);
  }
  if (ts.size() < 10) throw ConfigError("fit_decay: fewer than 10 samples in the window");

  const double m = static_cast<double>(ts.size());
  double st = 0.0;
  double sy = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    st += ts[k];
    sy += 1.0 / (ps[k] * ps[k]);
  }
  const double tbar = st / m;
  const double ybar = sy / m;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const double dt = ts[k] - tbar;
    sxx += dt * dt;
    sxy += dt * (1.0 / (ps[k] * ps[k]) - ybar);
  }
  const double slope = sxy / sxx;

  DecayFit fit;
  fit.window_start = ts.front();
  fit.window_end = ts.back();
  fit.samples = static_cast<int>(ts.size());
  fit.c_fit = -slope / 2.0;
  fit.relative_error = std::abs(fit.c_fit - fit.target) / std::abs(fit.target);
  const double pa = ps.front();
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const double ref = reduced_closed_form(pa, ts[k] - ts.front());
    fit.closed_form_deviation = std::max(fit.closed_form_deviation, std::abs(ps[k] - ref) / ref);
  }
  fit.cubic_law_consistent = fit.closed_form_deviation <= kClosedFormTolerance;
  return fit;
}

DecayFit fit_decay(const SimulationTrace& trace, double t_a, double t_b) {
  std::vector<double> ts;
  std::vector<double> ps;
  ts.reserve(trace.records.size());
  ps.reserve(trace.records.size());
  for (const auto& r : trace.records) {
    ts.push_back(r.t);
    ps.push_back(r.p);
  }
  if (ts.empty() || t_a < ts.front() || t_b > ts.back() + 1e-9) {
    throw ConfigError("fit_decay: window lies outside the trace");
  }
  return fit_decay(ts, ps, t_a, t_b);
}

std::vector<ResidualSample> residual_table(const SimulationTrace& trace, std::span<const double> targets,
                                           double transient) {
  std::vector<ResidualSample> out;
  for (double target : targets) {
    const TraceRecord* best = nullptr;
    for (const auto& r : trace.records) {
      if (r.t < transient || !std::isfinite(r.p)) continue;
      if (!best || std::abs(r.p - target) < std::abs(best->p - target)) best = &r;
    }
    if (!best) throw ConfigError("residual_table: no usable records after the transient");
    out.push_back({target, best->t, best->p, best->manifold_residual / (best->p * best->p)});
  }
  return out;
}

}  // namespace kdv
