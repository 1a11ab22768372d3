#pragma once

// Scenario files, sweeps and CSV / gnuplot output.
//
// Config format (INI sections, `key = value`, `#` or `;` comment lines):
//
//   [scenario]     name, kind = two_qubit | fmo | custom
//   [hamiltonian]  coefficients = c1 c2 c3 c4 c5   (two_qubit)
//                  matrix_file = PATH              (custom)
//   [initial]      amplitudes = re,im re,im ...    (normalized on load)
//                  pivot = auto | INDEX
//   [bath]         model = none | markovian | explicit
//                  gamma = G | G_0 ... G_{N-2}
//                  oscillators = N_OSC, cutoff = auto | W   (explicit only)
//   [time]         t_final, sample_dt
//   [integrator]   method = dopri54 | rk4, abs_tol, rel_tol, dt_initial,
//                  dt_max, rechart_threshold
//   [sweep]        gamma = G G ...                 (one run per value)
//   [output]       dir, oracle = true | false

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cpdyn/hamiltonian.hpp"
#include "cpdyn/ode.hpp"
#include "cpdyn/projective.hpp"

namespace cpdyn {

enum class ScenarioKind { TwoQubit, Fmo, Custom };
enum class BathModel { None, Markovian, Explicit };

struct ScenarioConfig {
    std::string name = "scenario";
    ScenarioKind kind = ScenarioKind::TwoQubit;

    TwoQubitCoefficients<double> coefficients{0, 1, 1, 0, 0};
    std::string matrix_file;

    /// Unnormalized as written; empty selects the kind's default.
    std::vector<Complex<double>> amplitudes;
    std::optional<Index> pivot;

    BathModel bath = BathModel::None;
    /// Scalar (broadcast) or one value per coordinate.
    std::vector<double> gamma{0.0};
    Index oscillators = 400;
    /// Explicit-bath cutoff; unset means 50 times the spectral width.
    std::optional<double> cutoff;

    double t_final = 0;
    double sample_dt = 0;
    IntegratorConfig<double> integrator;

    std::vector<double> sweep_gamma;

    std::filesystem::path output_dir = ".";
    bool oracle = false;
};

/// Explicit cutoff multiple over the spectral width.
inline constexpr double kExplicitCutoffFactor = 50.0;

ScenarioConfig parse_scenario(const std::string& text);
ScenarioConfig load_scenario(const std::filesystem::path& path);
std::string serialize_scenario(const ScenarioConfig& cfg);

std::vector<std::string> bundled_scenario_names();
/// Text of a bundled scenario; ConfigParse for unknown names.
std::string bundled_scenario(const std::string& name);

/// Resolved inputs of a single run.
HermitianOperator<double> scenario_hamiltonian(const ScenarioConfig& cfg);
AmplitudeVector<double> scenario_initial_amplitudes(const ScenarioConfig& cfg);
ProjectiveState<double> scenario_initial_state(const ScenarioConfig& cfg);
/// Broadcasts a scalar gamma; InvalidSpec when the length matches neither 1 nor N-1.
RVector<double> scenario_gammas(const ScenarioConfig& cfg, Index n_levels);

struct RunOutput {
    double gamma = 0;
    Index dim = 0;
    std::filesystem::path csv;
    std::optional<std::filesystem::path> oracle_csv;
};

/// CSV columns: t, pop_0..pop_{N-1}, energy, and z, concurrence when N = 4.
std::string csv_header(Index n_levels);

/// One run with the gamma value(s) already in `cfg`; file names carry `gamma_tag`.
RunOutput run_single(const ScenarioConfig& cfg, const std::string& gamma_tag);

/// Runs the sweep when one is configured, otherwise a single run.
std::vector<RunOutput> run_scenario(const ScenarioConfig& cfg);

/// One scalar-gamma run per value; EmptySweep for an empty list.
std::vector<RunOutput> sweep(const ScenarioConfig& cfg, const std::vector<double>& gammas);

/// Writes a gnuplot script plotting the given runs and returns its path.
std::filesystem::path emit_plot_script(const ScenarioConfig& cfg, const std::vector<RunOutput>& runs);

std::string format_gamma(double g);

} // namespace cpdyn
