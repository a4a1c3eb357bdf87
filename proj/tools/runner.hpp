// runner.hpp: scenario configuration, orchestration and artifact export for
// the crq command-line tool.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "crq/lattice.hpp"

namespace crq::runner {

enum class Scenario {
    bands,
    evolve_exact,
    evolve_kernel,
    evolve_dde,
    analytic,
    staircase,
    spectrum,
    crosscheck,
    figures
};

const char* scenario_name(Scenario s) noexcept;
Scenario parse_scenario(const std::string& name);

/// Fully resolved run description. dt == 0 selects the solver default.
struct ScenarioConfig {
    Scenario scenario = Scenario::bands;
    LatticeParams params;
    double t_max = 0.0;
    double dt = 0.0;
    std::string output_dir;
    int output_stride = 1;
    std::uint64_t seed = 0;

    std::string basis = "mode";          // evolve_exact: "mode" or "site"
    std::vector<double> snapshot_times;  // evolve_exact
    bool dump_vectors = false;           // spectrum
    double snapshot_every = 5.0;         // figures, site maps

    nlohmann::json to_json() const;
};

/// Parses a real that may be written as a number or as an expression such
/// as "pi/2", "-pi/4", "3T-", "2.5*T+" or "T-/2". Loop times need `rates`;
/// pass nullptr where they are not yet defined.
double parse_real(const nlohmann::json& value, const std::string& key,
                  const FeedbackRates* rates = nullptr);

/// Builds a config from a JSON document. A document with a "config" member
/// is treated as a manifest and its resolved config is used. Lattice keys
/// may sit at the top level or inside "params". Throws ConfigError naming
/// the offending key.
ScenarioConfig parse_config(const nlohmann::json& doc);

/// `overlay` members replace those of `base` (params are merged key by key).
nlohmann::json merge_config(nlohmann::json base, const nlohmann::json& overlay);

struct RunReport {
    std::vector<std::string> files;  // relative to output_dir, in write order
    nlohmann::json summary;
};

/// Runs the scenario and writes its artifacts plus manifest.json.
RunReport run(const ScenarioConfig& config);

/// Output directory precedence: explicit value, then $CRQ_OUT_DIR, then
/// "crq_out".
std::string default_output_dir(const std::string& explicit_dir);

/// Command-line entry point; returns the process exit status
/// (0 ok, 1 run failure, 2 configuration error, 3 I/O error).
int cli_main(int argc, const char* const* argv);

inline constexpr const char* kVersion = "0.1.0";

} // namespace crq::runner
