#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "kdvlab/manifold.hpp"
#include "kdvlab/solver.hpp"
#include "kdvlab/spectral.hpp"

namespace kdv {

using json = nlohmann::json;

inline constexpr const char* kToolName = "kdvlab";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kTraceHeader = "t,l2_norm,h1_norm,p,manifold_residual,boundary_dissipation";

/// Parses the JSON config schema. Unknown keys are rejected; every error
/// message starts with the offending key.
SimulationConfig parse_config(const json& doc);
SimulationConfig load_config(const std::string& path);
json config_to_json(const SimulationConfig& config);

void write_trace_csv(const SimulationTrace& trace, std::ostream& out);
void write_trace_csv(const SimulationTrace& trace, const std::string& path);
std::vector<TraceRecord> read_trace_csv(std::istream& in);
std::vector<TraceRecord> read_trace_csv(const std::string& path);

json to_json(const CriticalLengthTable& table);
json to_json(const SpectrumResult& spectrum);
json to_json(const DecayFit& fit);
json to_json(const ManifoldReport& report);
json to_json(const KatoResult& kato);
json trace_summary(const SimulationTrace& trace);

/// {tool, version, command, config, payload, wall_clock_seconds}
json make_run_report(const std::string& command, const json& config, const json& payload, double seconds);
void write_report_json(const json& report, const std::string& path);

}  // namespace kdv
