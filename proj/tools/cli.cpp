#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"

#include "crq/error.hpp"
#include "runner.hpp"

using nlohmann::json;

namespace crq::runner {

namespace {

// Plain decimal strings become JSON numbers; anything else ("pi/2", "3T-")
// is left for parse_real.
json flag_value(const std::string& text)
{
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() && *end == '\0') return v;
    return text;
}

json read_document(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot read config file '" + path + "'");
    try {
        return json::parse(is);
    } catch (const json::parse_error& e) {
        throw ConfigError("config", e.what());
    }
}

} // namespace

int cli_main(int argc, const char* const* argv)
{
    CLI::App app{"Emitter dynamics on a chiral sawtooth ring"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(0, 1);

    std::string config_path, out_dir;
    struct Flag {
        const char* name;
        const char* key;
        const char* help;
        std::optional<std::string> value;
    };
    Flag flags[] = {
        {"--n", "N", "cells per sublattice", {}},
        {"--j", "J", "A-A hopping", {}},
        {"--rho", "rho", "A-B hopping", {}},
        {"--phi", "phi", "plaquette flux, e.g. pi/2", {}},
        {"--alpha", "alpha", "emitter coupling", {}},
        {"--omega-e", "omega_e", "emitter detuning", {}},
        {"--t-max", "t_max", "final time, e.g. 600 or 3T-", {}},
        {"--dt", "dt", "solver step", {}},
        {"--stride", "output_stride", "output every n-th sample", {}},
        {"--seed", "seed", "seed for randomized checks", {}},
    };
    app.add_option("--config", config_path, "JSON config or manifest");
    app.add_option("--out", out_dir, "output directory (default $CRQ_OUT_DIR or crq_out)");
    for (Flag& f : flags) app.add_option(f.name, f.value, f.help);

    for (int i = 0; i <= static_cast<int>(Scenario::figures); ++i) {
        app.add_subcommand(scenario_name(static_cast<Scenario>(i)))->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        json doc = json::object();
        if (!config_path.empty()) {
            doc = read_document(config_path);
            if (doc.contains("config") && doc["config"].is_object()) doc = doc["config"];
        }
        json overlay = json::object();
        if (const auto subs = app.get_subcommands(); !subs.empty()) overlay["scenario"] = subs.front()->get_name();
        const bool nested = doc.contains("params") && doc["params"].is_object();
        for (const Flag& f : flags) {
            if (!f.value) continue;
            const std::string key = f.key;
            const bool lattice = key != "t_max" && key != "dt" && key != "output_stride" && key != "seed";
            if (lattice && nested) overlay["params"][key] = flag_value(*f.value);
            else overlay[key] = flag_value(*f.value);
        }
        if (!out_dir.empty()) overlay["output_dir"] = out_dir;
        if (doc.contains("stride") && overlay.contains("output_stride")) doc.erase("stride");

        const ScenarioConfig config = parse_config(merge_config(doc, overlay));
        const RunReport report = run(config);
        const json line = {{"scenario", scenario_name(config.scenario)},
                           {"output_dir", default_output_dir(config.output_dir)},
                           {"files", report.files},
                           {"summary", report.summary}};
        std::cout << line.dump() << '\n';
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "crq: " << e.what() << '\n';
        return 2;
    } catch (const IoError& e) {
        std::cerr << "crq: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "crq: " << e.what() << '\n';
        return 1;
    }
}

} // namespace crq::runner
