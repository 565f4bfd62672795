#include "kdvlab/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <future>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>

#include "kdvlab/errors.hpp"
#include "kdvlab/io.hpp"
#include "kdvlab/manifold.hpp"
#include "kdvlab/solver.hpp"
#include "kdvlab/spectral.hpp"

namespace kdv {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(flag + ": '" + item + "' is not a number");
    }
  }
  if (out.empty()) throw ConfigError(flag + ": empty list");
  return out;
}

struct CriticalOptions {
  int max_index = 1;
  std::string json_path;
};

int cmd_critical(const CriticalOptions& o, std::ostream& out) {
  const auto start = Clock::now();
  const auto table = critical_lengths(o.max_index);
  out << std::setprecision(15);
  for (const auto& e : table.entries) out << e.value << '\n';
  if (!o.json_path.empty()) {
    write_report_json(make_run_report("critical-lengths", {{"max_index", o.max_index}}, to_json(table),
                                      seconds_since(start)),
                      o.json_path);
  }
  return kExitOk;
}

struct SpectrumOptions {
  double length = 0.0;
  int n = 0;
  std::string method = "matrix";
  std::string scheme = "dissipative_biased";
  double re_min = -1.0;
  double re_max = 0.1;
  double im_min = -5.0;
  double im_max = 5.0;
  int density = 16;
  std::string json_path;
};

int cmd_spectrum(const SpectrumOptions& o, std::ostream& out) {
  const auto start = Clock::now();
  json config = {{"length", o.length}, {"method", o.method}};
  json payload;
  if (o.method == "matrix") {
    const Grid g(o.length, o.n);
    const auto op = assemble_operator(g, scheme_from_string(o.scheme));
    const SpectrumResult s = matrix_spectrum(op, false);
    const cplx lambda0 = nearest_to_zero(s);
    const double h = g.spacing();
    payload = to_json(s);
    payload["n"] = o.n;
    payload["h"] = h;
    payload["scheme"] = o.scheme;
    payload["nearest_to_zero"] = {{"re", lambda0.real()}, {"im", lambda0.imag()}};
    payload["spectral_gap"] = spectral_gap(s, 10.0 * h);
    try {
      const GridFunction k = kernel_vector(op);
      payload["kernel_similarity"] = kernel_similarity(std::vector<cplx>(k.values.begin(), k.values.end()), g);
    } catch (const NoKernel&) {
      payload["kernel_similarity"] = nullptr;
    }
    config["n"] = o.n;
    config["scheme"] = o.scheme;
    out << std::setprecision(12) << "growth_bound " << s.growth_bound << "\nnearest_to_zero " << lambda0.real()
        << (lambda0.imag() < 0 ? " - " : " + ") << std::abs(lambda0.imag()) << "i\n";
  } else if (o.method == "determinant") {
    const Region region{o.re_min, o.re_max, o.im_min, o.im_max};
    const SpectrumResult s = find_eigenvalues_determinant(o.length, region, o.density);
    payload = to_json(s);
    for (std::size_t k = 0; k < s.pairs.size(); ++k) {
      payload["eigenvalues"][k]["abs_f"] = std::abs(characteristic_function(s.pairs[k].lambda, o.length));
    }
    payload["spectral_gap"] = spectral_gap(s, 1e-8);
    config["region"] = {o.re_min, o.re_max, o.im_min, o.im_max};
    config["density"] = o.density;
    out << std::setprecision(12);
    for (const auto& p : s.pairs) out << p.lambda.real() << ' ' << p.lambda.imag() << '\n';
  } else {
    throw ConfigError("--method: expected matrix or determinant, got '" + o.method + "'");
  }
  write_report_json(make_run_report("spectrum", config, payload, seconds_since(start)), o.json_path);
  return kExitOk;
}

struct SimulateOptions {
  std::string config_path;
  std::string csv_path;
  std::string report_path;
};

int cmd_simulate(const SimulateOptions& o, std::ostream& out) {
  const auto start = Clock::now();
  const SimulationConfig config = load_config(o.config_path);
  const SimulationTrace trace = simulate(config);
  write_trace_csv(trace, o.csv_path);
  if (!o.report_path.empty()) {
    write_report_json(
        make_run_report("simulate", config_to_json(config), trace_summary(trace), seconds_since(start)),
        o.report_path);
  }
  const auto& last = trace.records.back();
  out << std::setprecision(12) << "t " << last.t << " l2_norm " << last.l2_norm << " p " << last.p << '\n';
  return kExitOk;
}

struct ManifoldOptions {
  std::string deltas;
  std::string config_path;
  std::string report_path;
  double window_start = -1.0;
  double window_end = -1.0;
  std::string residual_p = "0.1,0.05";
  double transient = 50.0;
  int jobs = 1;
};

int cmd_manifold(const ManifoldOptions& o, std::ostream& out) {
  const auto start = Clock::now();
  const SimulationConfig base = load_config(o.config_path);
  const auto deltas = parse_list(o.deltas, "--deltas");
  const auto targets = parse_list(o.residual_p, "--residual-p");
  const double ta = o.window_start >= 0.0 ? o.window_start : 0.5 * base.t_end;
  const double tb = o.window_end >= 0.0 ? o.window_end : base.t_end;
  if (o.jobs < 1) throw ConfigError("--jobs: must be >= 1");

  const Grid g(base.length, base.n);
  ManifoldReport report;
  report.quadrature_constant = coefficient_quadrature(g);
  const GridFunction phi = phi_profile(g);
  const GridFunction a = a_profile(g);
  report.phi_norm_squared = inner_product(phi, phi);
  report.a_phi_integral = inner_product(a, phi);
  {
    double s = 0.0;
    const auto f = ClosedFormProfile::phi();
    for (int i = 1; i <= g.size(); ++i) s += f.value(g.node(i)) * f.value(g.node(i)) * f.first(g.node(i));
    report.phi_sq_phix_integral = g.spacing() * s;
  }

  auto run_one = [&](double delta) {
    SimulationConfig c = base;
    c.initial.amplitude = delta;
    const SimulationTrace trace = simulate(c);
    ManifoldEntry e;
    e.delta = delta;
    e.fit = fit_decay(trace, ta, tb);
    e.residuals = residual_table(trace, targets, o.transient);
    return e;
  };
  report.entries.resize(deltas.size());
  for (std::size_t begin = 0; begin < deltas.size(); begin += static_cast<std::size_t>(o.jobs)) {
    std::vector<std::future<ManifoldEntry>> batch;
    const std::size_t end = std::min(deltas.size(), begin + static_cast<std::size_t>(o.jobs));
    for (std::size_t k = begin; k < end; ++k) batch.push_back(std::async(std::launch::async, run_one, deltas[k]));
    for (std::size_t k = begin; k < end; ++k) report.entries[k] = batch[k - begin].get();
  }

  json config = config_to_json(base);
  config["deltas"] = deltas;
  config["window"] = {ta, tb};
  config["residual_p"] = targets;
  config["transient"] = o.transient;
  write_report_json(make_run_report("manifold-check", config, to_json(report), seconds_since(start)),
                    o.report_path);
  out << std::setprecision(8);
  for (const auto& e : report.entries) {
    out << "delta " << e.delta << " c_fit " << e.fit.c_fit << " rel_err " << e.fit.relative_error << '\n';
  }
  return kExitOk;
}

struct KatoOptions {
  std::string config_path;
  std::string report_path;
};

int cmd_kato(const KatoOptions& o, std::ostream& out) {
  const auto start = Clock::now();
  const SimulationConfig config = load_config(o.config_path);
  if (config.mode != Mode::Linearized) throw ConfigError("mode: kato-check needs mode = linearized");
  const SimulationTrace trace = simulate(config);
  const KatoResult k = kato_check(trace, config.t_end);
  write_report_json(make_run_report("kato-check", config_to_json(config), to_json(k), seconds_since(start)),
                    o.report_path);
  out << std::setprecision(12) << "lhs " << k.lhs << " rhs " << k.rhs << (k.pass ? " pass" : " FAIL") << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"kdvlab: KdV stability laboratory on a bounded interval"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  CriticalOptions crit;
  auto* c = app.add_subcommand("critical-lengths", "List critical lengths 2*pi*sqrt((j^2+l^2+jl)/3)");
  c->add_option("--max-index", crit.max_index, "Largest j, l")->required();
  c->add_option("--json", crit.json_path, "Write a JSON report");

  SpectrumOptions spec;
  auto* s = app.add_subcommand("spectrum", "Spectrum of the linear operator");
  s->add_option("--length", spec.length, "Interval length L")->required();
  s->add_option("--n", spec.n, "Interior nodes (matrix method)");
  s->add_option("--method", spec.method, "matrix | determinant")->required();
  s->add_option("--scheme", spec.scheme, "dissipative_biased | central_second_order");
  s->add_option("--re-min", spec.re_min);
  s->add_option("--re-max", spec.re_max);
  s->add_option("--im-min", spec.im_min);
  s->add_option("--im-max", spec.im_max);
  s->add_option("--density", spec.density, "Search grid points per unit length");
  s->add_option("--json", spec.json_path, "JSON report path")->required();

  SimulateOptions sim;
  auto* m = app.add_subcommand("simulate", "Run one simulation");
  m->add_option("--config", sim.config_path)->required();
  m->add_option("--trace-csv", sim.csv_path)->required();
  m->add_option("--report-json", sim.report_path);

  ManifoldOptions man;
  auto* mc = app.add_subcommand("manifold-check", "Fit the reduced decay law over several amplitudes");
  mc->add_option("--deltas", man.deltas, "Comma-separated amplitudes")->required();
  mc->add_option("--config", man.config_path)->required();
  mc->add_option("--report-json", man.report_path)->required();
  mc->add_option("--window-start", man.window_start, "Default t_end/2");
  mc->add_option("--window-end", man.window_end, "Default t_end");
  mc->add_option("--residual-p", man.residual_p, "p values for the residual table");
  mc->add_option("--transient", man.transient, "Skip records before this time in the residual table");
  mc->add_option("--jobs", man.jobs, "Parallel simulations");

  KatoOptions kato;
  auto* k = app.add_subcommand("kato-check", "Check the L2(0,T;H1) smoothing bound");
  k->add_option("--config", kato.config_path)->required();
  k->add_option("--report-json", kato.report_path)->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (c->parsed()) return cmd_critical(crit, out);
    if (s->parsed()) {
      if (spec.method == "matrix" && spec.n == 0) throw ConfigError("--n: required for the matrix method");
      return cmd_spectrum(spec, out);
    }
    if (m->parsed()) return cmd_simulate(sim, out);
    if (mc->parsed()) return cmd_manifold(man, out);
    if (k->parsed()) return cmd_kato(kato, out);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "solver error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitConfig;
}

}  // namespace kdv
