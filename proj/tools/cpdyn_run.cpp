// Command-line front end for scenario runs.
//
// Exit status: 0 success, 2 config or file error, 3 solver error.

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "cpdyn/scenario.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Classical dynamics of N-level quantum systems on CP^{N-1} with a harmonic bath"};

    std::string config_path;
    std::string scenario_name;
    std::vector<double> gammas;
    std::optional<double> t_final;
    std::optional<double> sample_dt;
    bool oracle = false;
    std::optional<long> explicit_bath;
    std::optional<std::string> out_dir;
    bool plot_script = false;
    bool list = false;

    auto* config_opt = app.add_option("--config", config_path, "Scenario file");
    auto* scenario_opt = app.add_option("--scenario", scenario_name, "Bundled scenario name");
    config_opt->excludes(scenario_opt);
    app.add_option("--gamma", gammas, "Damping constants to sweep (replaces the configured sweep)")->delimiter(',');
    app.add_option("--t-final", t_final, "Final time");
    app.add_option("--sample-dt", sample_dt, "Sampling interval");
    app.add_flag("--oracle", oracle, "Also write the Schroedinger reference for isolated runs");
    app.add_option("--explicit-bath", explicit_bath, "Use an explicit bath with this many oscillators per coordinate");
    app.add_option("--out", out_dir, "Output directory");
    app.add_flag("--plot-script", plot_script, "Write a gnuplot script for the outputs");
    app.add_flag("--list", list, "List bundled scenarios and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    if (list) {
        for (const auto& n : cpdyn::bundled_scenario_names()) fmt::print("{}\n", n);
        return 0;
    }

    cpdyn::ScenarioConfig cfg;
    try {
        if (!config_path.empty())
            cfg = cpdyn::load_scenario(config_path);
        else if (!scenario_name.empty())
            cfg = cpdyn::parse_scenario(cpdyn::bundled_scenario(scenario_name));
        else
            throw cpdyn::ConfigParse("one of --config or --scenario is required");

        if (!gammas.empty()) cfg.sweep_gamma = gammas;
        if (t_final) {
            if (!(*t_final > 0)) throw cpdyn::ConfigParse("--t-final must be positive");
            cfg.t_final = *t_final;
        }
        if (sample_dt) {
            if (!(*sample_dt > 0)) throw cpdyn::ConfigParse("--sample-dt must be positive");
            cfg.sample_dt = *sample_dt;
        }
        if (oracle) cfg.oracle = true;
        if (explicit_bath) {
            if (*explicit_bath < 1) throw cpdyn::ConfigParse("--explicit-bath needs a positive oscillator count");
            cfg.bath = cpdyn::BathModel::Explicit;
            cfg.oscillators = *explicit_bath;
        }
        if (out_dir) cfg.output_dir = *out_dir;
    } catch (const cpdyn::Error& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kExitConfig;
    }

    try {
        const auto runs = cpdyn::run_scenario(cfg);
        for (const auto& r : runs) {
            fmt::print("{}\n", r.csv.string());
            if (r.oracle_csv) fmt::print("{}\n", r.oracle_csv->string());
        }
        if (plot_script) fmt::print("{}\n", cpdyn::emit_plot_script(cfg, runs).string());
    } catch (const cpdyn::ConfigParse& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kExitConfig;
    } catch (const cpdyn::FileIO& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kExitConfig;
    } catch (const cpdyn::InvalidSpec& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kExitConfig;
    } catch (const cpdyn::DimensionMismatch& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kExitConfig;
    } catch (const cpdyn::Error& e) {
        fmt::print(stderr, "solver error: {}\n", e.what());
        return kExitSolver;
    }
    return 0;
}
