#include "kdvlab/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "kdvlab/errors.hpp"

namespace kdv {

namespace {

template <typename T>
T get_as(const json& obj, const std::string& key, const std::string& path) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(path + ": wrong type or missing value");
  }
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& prefix) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) throw ConfigError(prefix + key + ": unknown key");
  }
}

void require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.contains(key)) throw ConfigError(path + ": required key is missing");
}

// JSON has no NaN; emit null instead.
json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

SimulationConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config: top level must be a JSON object");
  reject_unknown(doc,
                 {"length", "n", "dt", "t_end", "mode", "cutoff_epsilon", "scheme", "snapshot_stride", "newton_tol",
                  "newton_max_iter", "initial", "seed", "keep_fields"},
                 "");
  for (const char* key : {"length", "n", "dt", "t_end", "mode", "initial"}) require(doc, key, key);

  SimulationConfig c;
  c.length = get_as<double>(doc, "length", "length");
  c.n = get_as<int>(doc, "n", "n");
  c.dt = get_as<double>(doc, "dt", "dt");
  c.t_end = get_as<double>(doc, "t_end", "t_end");
  c.mode = mode_from_string(get_as<std::string>(doc, "mode", "mode"));
  if (doc.contains("cutoff_epsilon")) c.cutoff.epsilon = get_as<double>(doc, "cutoff_epsilon", "cutoff_epsilon");
  if (doc.contains("scheme")) {
    try {
      c.scheme = scheme_from_string(get_as<std::string>(doc, "scheme", "scheme"));
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("scheme: ") + e.what());
    }
  }
  if (doc.contains("snapshot_stride")) c.snapshot_stride = get_as<int>(doc, "snapshot_stride", "snapshot_stride");
  if (doc.contains("newton_tol")) c.newton.tol = get_as<double>(doc, "newton_tol", "newton_tol");
  if (doc.contains("newton_max_iter")) c.newton.max_iter = get_as<int>(doc, "newton_max_iter", "newton_max_iter");
  if (doc.contains("seed")) c.seed = get_as<std::uint64_t>(doc, "seed", "seed");
  if (doc.contains("keep_fields")) c.keep_fields = get_as<bool>(doc, "keep_fields", "keep_fields");

  const json& init = doc.at("initial");
  if (!init.is_object()) throw ConfigError("initial: must be an object");
  reject_unknown(init, {"kind", "amplitude", "path"}, "initial.");
  require(init, "kind", "initial.kind");
  c.initial.kind = initial_kind_from_string(get_as<std::string>(init, "kind", "initial.kind"));
  if (init.contains("amplitude")) c.initial.amplitude = get_as<double>(init, "amplitude", "initial.amplitude");
  if (init.contains("path")) c.initial.path = get_as<std::string>(init, "path", "initial.path");
  if (c.initial.kind != InitialKind::FromFile && !init.contains("amplitude")) {
    throw ConfigError("initial.amplitude: required key is missing");
  }
  c.validate();
  return c;
}

SimulationConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config: '" + path + "' is not valid JSON (" + e.what() + ")");
  }
  return parse_config(doc);
}

json config_to_json(const SimulationConfig& c) {
  json init = {{"kind", to_string(c.initial.kind)}, {"amplitude", c.initial.amplitude}};
  if (!c.initial.path.empty()) init["path"] = c.initial.path;
  return {{"length", c.length},
          {"n", c.n},
          {"dt", c.dt},
          {"t_end", c.t_end},
          {"mode", to_string(c.mode)},
          {"cutoff_epsilon", c.cutoff.epsilon},
          {"scheme", to_string(c.scheme)},
          {"snapshot_stride", c.snapshot_stride},
          {"newton_tol", c.newton.tol},
          {"newton_max_iter", c.newton.max_iter},
          {"seed", c.seed},
          {"initial", init}};
}

void write_trace_csv(const SimulationTrace& trace, std::ostream& out) {
  out << kTraceHeader << '\n';
  for (const auto& r : trace.records) {
    out << format_double(r.t) << ',' << format_double(r.l2_norm) << ',' << format_double(r.h1_norm) << ','
        << format_double(r.p) << ',' << format_double(r.manifold_residual) << ','
        << format_double(r.boundary_dissipation) << '\n';
  }
}

void write_trace_csv(const SimulationTrace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_trace_csv(trace, out);
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::vector<TraceRecord> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) throw IoError("trace CSV: unexpected header");
  std::vector<TraceRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::array<double, 6> v{};
    std::stringstream ss(line);
    std::string cell;
    for (double& x : v) {
      if (!std::getline(ss, cell, ',')) throw IoError("trace CSV: short row '" + line + "'");
      x = std::strtod(cell.c_str(), nullptr);
    }
    records.push_back({v[0], v[1], v[2], v[3], v[4], v[5]});
  }
  return records;
}

std::vector<TraceRecord> read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_trace_csv(in);
}

json to_json(const CriticalLengthTable& table) {
  json entries = json::array();
  for (const auto& e : table.entries) entries.push_back({{"j", e.j}, {"l", e.l}, {"value", e.value}});
  return {{"max_index", table.max_index}, {"entries", entries}};
}

json to_json(const SpectrumResult& s) {
  json eig = json::array();
  for (const auto& p : s.pairs) eig.push_back({{"re", p.lambda.real()}, {"im", p.lambda.imag()}});
  return {{"method", to_string(s.method)},
          {"length", s.length},
          {"growth_bound", number(s.growth_bound)},
          {"eigenvalues", eig}};
}

json to_json(const DecayFit& f) {
  return {{"window_start", f.window_start},
          {"window_end", f.window_end},
          {"samples", f.samples},
          {"c_fit", f.c_fit},
          {"target", f.target},
          {"relative_error", f.relative_error},
          {"closed_form_deviation", f.closed_form_deviation},
          {"cubic_law_consistent", f.cubic_law_consistent}};
}

json to_json(const ManifoldReport& r) {
  json entries = json::array();
  for (const auto& e : r.entries) {
    json table = json::array();
    for (const auto& s : e.residuals) {
      table.push_back({{"target_p", s.target_p}, {"t", s.t}, {"p", s.p}, {"scaled_residual", s.scaled_residual}});
    }
    entries.push_back({{"delta", e.delta}, {"fit", to_json(e.fit)}, {"residual_table", table}});
  }
  return {{"quadrature_constant", r.quadrature_constant},
          {"target", kReducedCoefficient},
          {"phi_norm_squared", r.phi_norm_squared},
          {"a_phi_integral", r.a_phi_integral},
          {"phi_sq_phix_integral", r.phi_sq_phix_integral},
          {"entries", entries}};
}

json to_json(const KatoResult& k) {
  return {{"lhs", k.lhs}, {"rhs", k.rhs}, {"slack", kKatoSlack}, {"pass", k.pass}};
}

json trace_summary(const SimulationTrace& trace) {
  json s = {{"steps", trace.steps},
            {"records", trace.records.size()},
            {"max_step_growth", trace.max_step_growth},
            {"max_newton_iterations", trace.max_newton_iterations}};
  if (!trace.records.empty()) {
    const auto& first = trace.records.front();
    const auto& last = trace.records.back();
    s["initial"] = {{"t", first.t}, {"l2_norm", first.l2_norm}, {"p", number(first.p)}};
    s["final"] = {{"t", last.t},
                  {"l2_norm", last.l2_norm},
                  {"h1_norm", last.h1_norm},
                  {"p", number(last.p)},
                  {"manifold_residual", number(last.manifold_residual)}};
  }
  return s;
}

json make_run_report(const std::string& command, const json& config, const json& payload, double seconds) {
  return {{"tool", kToolName},
          {"version", kToolVersion},
          {"command", command},
          {"config", config},
          {"payload", payload},
          {"wall_clock_seconds", seconds}};
}

void write_report_json(const json& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << report.dump(2) << '\n';
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace kdv
