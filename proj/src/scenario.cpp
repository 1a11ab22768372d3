#include "cpdyn/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include "cpdyn/dynamics.hpp"
#include "cpdyn/explicit_bath.hpp"
#include "cpdyn/observables.hpp"
#include "cpdyn/quantum_oracle.hpp"

namespace cpdyn {

namespace {

namespace pt = boost::property_tree;
namespace fs = std::filesystem;

double to_double(const std::string& s, const std::string& key) {
    double v = 0;
    const char* b = s.data();
    const char* e = b + s.size();
    while (b < e && *b == ' ') ++b;
    const auto [end, ec] = std::from_chars(b, e, v);
    if (ec != std::errc{} || end != e || b == e) throw ConfigParse(fmt::format("{}: not a number: '{}'", key, s));
    return v;
}

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string tok; in >> tok;) out.push_back(tok);
    return out;
}

std::vector<double> to_doubles(const std::string& s, const std::string& key) {
    std::vector<double> out;
    for (const auto& tok : split_ws(s)) out.push_back(to_double(tok, key));
    if (out.empty()) throw ConfigParse(key + ": empty list");
    return out;
}

Complex<double> to_complex(const std::string& tok, const std::string& key) {
    const auto comma = tok.find(',');
    if (comma == std::string::npos) return {to_double(tok, key), 0.0};
    return {to_double(tok.substr(0, comma), key), to_double(tok.substr(comma + 1), key)};
}

bool to_bool(const std::string& s, const std::string& key) {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigParse(fmt::format("{}: expected true or false, got '{}'", key, s));
}

std::optional<std::string> get(const pt::ptree& tree, const std::string& key) {
    if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(key, '.'))) return *v;
    return std::nullopt;
}

std::string require(const pt::ptree& tree, const std::string& key) {
    auto v = get(tree, key);
    if (!v) throw ConfigParse("missing required field " + key);
    return *v;
}

std::string num(double v) { return fmt::format("{:.17g}", v); }

const char* kind_name(ScenarioKind k) {
    switch (k) {
    case ScenarioKind::TwoQubit: return "two_qubit";
    case ScenarioKind::Fmo: return "fmo";
    case ScenarioKind::Custom: return "custom";
    }
    return "";
}

const char* bath_name(BathModel b) {
    switch (b) {
    case BathModel::None: return "none";
    case BathModel::Markovian: return "markovian";
    case BathModel::Explicit: return "explicit";
    }
    return "";
}

// clang-format off
const std::map<std::string, std::string, std::less<>> kBundled = {
{"two_qubit_c4c5_0", R"(# Two qubits without entangling terms, gamma sweep.
[scenario]
name = two_qubit_c4c5_0
kind = two_qubit

[hamiltonian]
coefficients = 0 1 1 0 0

[initial]
amplitudes = 0.63245553203367588,0 0.63245553203367588,0 0,0 0.44721359549995793,0
pivot = 3

[bath]
model = markovian
gamma = 0

[time]
t_final = 400
sample_dt = 0.05

[integrator]
# Tighter than the library default: isolated energy drift over t = 400 scales with the tolerance.
abs_tol = 1e-11
rel_tol = 1e-11

[sweep]
gamma = 0 0.01 0.1 1

[output]
dir = out/two_qubit_c4c5_0
oracle = true
)"},
{"two_qubit_c4c5_1", R"(# Two qubits with entangling terms, gamma sweep.
[scenario]
name = two_qubit_c4c5_1
kind = two_qubit

[hamiltonian]
coefficients = 0 1 1 1 1

[initial]
amplitudes = 0.63245553203367588,0 0.63245553203367588,0 0,0 0.44721359549995793,0
pivot = 3

[bath]
model = markovian
gamma = 0

[time]
t_final = 400
sample_dt = 0.05

[integrator]
# Tighter than the library default: isolated energy drift over t = 400 scales with the tolerance.
abs_tol = 1e-11
rel_tol = 1e-11

[sweep]
gamma = 0 0.01 0.1 1

[output]
dir = out/two_qubit_c4c5_1
oracle = true
)"},
{"fmo_isolated", R"(# FMO complex, exciton on site 1, no bath. Time in ps.
[scenario]
name = fmo_isolated
kind = fmo

[initial]
amplitudes = 1,0 0,0 0,0 0,0 0,0 0,0 0,0
pivot = auto

[bath]
model = none

[time]
t_final = 1
sample_dt = 0.001

[output]
dir = out/fmo_isolated
oracle = true
)"},
{"fmo_damped", R"(# FMO complex with Markovian damping; gamma in 1/ps.
[scenario]
name = fmo_damped
kind = fmo

[initial]
amplitudes = 1,0 0,0 0,0 0,0 0,0 0,0 0,0
pivot = auto

[bath]
model = markovian
gamma = 0

[time]
t_final = 10
sample_dt = 0.01

[sweep]
gamma = 0 0.01 0.1 1

[output]
dir = out/fmo_damped
oracle = true
)"},
};
// clang-format on

fs::path ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw FileIO(fmt::format("cannot create output directory {}: {}", dir.string(), ec.message()));
    return dir;
}

std::string csv_row(double t, const CVector<double>& a, double energy) {
    const RVector<double> pops = populations_from_amplitudes(a);
    std::string row = num(t);
    for (Index i = 0; i < pops.size(); ++i) row += "," + num(pops[i]);
    row += "," + num(energy);
    if (a.size() == 4) row += "," + num(quaternionic_z(a)) + "," + num(concurrence(a));
    row += '\n';
    return row;
}

void write_file(const fs::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FileIO("cannot write " + path.string());
    out << body;
    if (!out) throw FileIO("failed writing " + path.string());
}

} // namespace

ScenarioConfig parse_scenario(const std::string& text) {
    pt::ptree tree;
    try {
        std::istringstream in(text);
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigParse(fmt::format("line {}: {}", e.line(), e.message()));
    }

    ScenarioConfig cfg;
    if (auto v = get(tree, "scenario.name")) cfg.name = *v;
    const std::string kind = require(tree, "scenario.kind");
    if (kind == "two_qubit")
        cfg.kind = ScenarioKind::TwoQubit;
    else if (kind == "fmo")
        cfg.kind = ScenarioKind::Fmo;
    else if (kind == "custom")
        cfg.kind = ScenarioKind::Custom;
    else
        throw ConfigParse("scenario.kind: unknown kind '" + kind + "'");

    if (auto v = get(tree, "hamiltonian.coefficients")) {
        const auto c = to_doubles(*v, "hamiltonian.coefficients");
        if (c.size() != 5) throw ConfigParse("hamiltonian.coefficients: expected five values");
        cfg.coefficients = {c[0], c[1], c[2], c[3], c[4]};
    }
    if (auto v = get(tree, "hamiltonian.matrix_file")) cfg.matrix_file = *v;
    if (cfg.kind == ScenarioKind::Custom && cfg.matrix_file.empty())
        throw ConfigParse("missing required field hamiltonian.matrix_file");

    if (auto v = get(tree, "initial.amplitudes"))
        for (const auto& tok : split_ws(*v)) cfg.amplitudes.push_back(to_complex(tok, "initial.amplitudes"));
    if (auto v = get(tree, "initial.pivot"); v && *v != "auto") {
        const double p = to_double(*v, "initial.pivot");
        if (p < 0 || p != std::floor(p)) throw ConfigParse("initial.pivot: expected a non-negative index");
        cfg.pivot = static_cast<Index>(p);
    }

    if (auto v = get(tree, "bath.model")) {
        if (*v == "none")
            cfg.bath = BathModel::None;
        else if (*v == "markovian")
            cfg.bath = BathModel::Markovian;
        else if (*v == "explicit")
            cfg.bath = BathModel::Explicit;
        else
            throw ConfigParse("bath.model: unknown model '" + *v + "'");
    }
    if (auto v = get(tree, "bath.gamma")) cfg.gamma = to_doubles(*v, "bath.gamma");
    if (auto v = get(tree, "bath.oscillators")) {
        const double n = to_double(*v, "bath.oscillators");
        if (n < 1 || n != std::floor(n)) throw ConfigParse("bath.oscillators: expected a positive integer");
        cfg.oscillators = static_cast<Index>(n);
    }
    if (auto v = get(tree, "bath.cutoff"); v && *v != "auto") cfg.cutoff = to_double(*v, "bath.cutoff");

    cfg.t_final = to_double(require(tree, "time.t_final"), "time.t_final");
    cfg.sample_dt = to_double(require(tree, "time.sample_dt"), "time.sample_dt");
    if (!(cfg.t_final > 0)) throw ConfigParse("time.t_final: must be positive");
    if (!(cfg.sample_dt > 0)) throw ConfigParse("time.sample_dt: must be positive");

    auto& ic = cfg.integrator;
    if (auto v = get(tree, "integrator.method")) {
        if (*v == "dopri54")
            ic.method = Method::DormandPrince54;
        else if (*v == "rk4")
            ic.method = Method::RungeKutta4;
        else
            throw ConfigParse("integrator.method: unknown method '" + *v + "'");
    }
    if (auto v = get(tree, "integrator.abs_tol")) ic.abs_tol = to_double(*v, "integrator.abs_tol");
    if (auto v = get(tree, "integrator.rel_tol")) ic.rel_tol = to_double(*v, "integrator.rel_tol");
    if (auto v = get(tree, "integrator.dt_initial")) ic.dt_initial = to_double(*v, "integrator.dt_initial");
    if (auto v = get(tree, "integrator.dt_max")) ic.dt_max = to_double(*v, "integrator.dt_max");
    if (auto v = get(tree, "integrator.rechart_threshold"))
        ic.rechart_threshold = to_double(*v, "integrator.rechart_threshold");
    try {
        ic.validate();
    } catch (const InvalidSpec& e) {
        throw ConfigParse(std::string("integrator: ") + e.what());
    }

    if (auto v = get(tree, "sweep.gamma")) cfg.sweep_gamma = to_doubles(*v, "sweep.gamma");
    if (auto v = get(tree, "output.dir")) cfg.output_dir = *v;
    if (auto v = get(tree, "output.oracle")) cfg.oracle = to_bool(*v, "output.oracle");
    return cfg;
}

ScenarioConfig load_scenario(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw FileIO("cannot open scenario file " + path.string());
    std::stringstream text;
    text << in.rdbuf();
    ScenarioConfig cfg = parse_scenario(text.str());
    // Matrix paths in a file are relative to that file.
    if (!cfg.matrix_file.empty() && fs::path(cfg.matrix_file).is_relative())
        cfg.matrix_file = (path.parent_path() / cfg.matrix_file).string();
    return cfg;
}

std::string serialize_scenario(const ScenarioConfig& cfg) {
    std::string s;
    s += fmt::format("[scenario]\nname = {}\nkind = {}\n", cfg.name, kind_name(cfg.kind));
    const auto& c = cfg.coefficients;
    s += fmt::format("\n[hamiltonian]\ncoefficients = {} {} {} {} {}\n", num(c.c1), num(c.c2), num(c.c3), num(c.c4), num(c.c5));
    if (!cfg.matrix_file.empty()) s += "matrix_file = " + cfg.matrix_file + "\n";
    s += "\n[initial]\n";
    if (!cfg.amplitudes.empty()) {
        std::vector<std::string> toks;
        for (const auto& z : cfg.amplitudes) toks.push_back(num(z.real()) + "," + num(z.imag()));
        s += fmt::format("amplitudes = {}\n", fmt::join(toks, " "));
    }
    s += "pivot = " + (cfg.pivot ? std::to_string(*cfg.pivot) : std::string("auto")) + "\n";

    std::vector<std::string> g;
    for (double v : cfg.gamma) g.push_back(num(v));
    s += fmt::format("\n[bath]\nmodel = {}\ngamma = {}\noscillators = {}\ncutoff = {}\n", bath_name(cfg.bath),
                     fmt::join(g, " "), cfg.oscillators, cfg.cutoff ? num(*cfg.cutoff) : std::string("auto"));
    s += fmt::format("\n[time]\nt_final = {}\nsample_dt = {}\n", num(cfg.t_final), num(cfg.sample_dt));

    const auto& ic = cfg.integrator;
    s += fmt::format("\n[integrator]\nmethod = {}\nabs_tol = {}\nrel_tol = {}\ndt_initial = {}\n",
                     ic.method == Method::RungeKutta4 ? "rk4" : "dopri54", num(ic.abs_tol), num(ic.rel_tol),
                     num(ic.dt_initial));
    if (std::isfinite(ic.dt_max)) s += "dt_max = " + num(ic.dt_max) + "\n";
    s += "rechart_threshold = " + num(ic.rechart_threshold) + "\n";

    if (!cfg.sweep_gamma.empty()) {
        std::vector<std::string> sw;
        for (double v : cfg.sweep_gamma) sw.push_back(num(v));
        s += fmt::format("\n[sweep]\ngamma = {}\n", fmt::join(sw, " "));
    }
    s += fmt::format("\n[output]\ndir = {}\noracle = {}\n", cfg.output_dir.string(), cfg.oracle ? "true" : "false");
    return s;
}

std::vector<std::string> bundled_scenario_names() {
    std::vector<std::string> names;
    for (const auto& [k, v] : kBundled) names.push_back(k);
    return names;
}

std::string bundled_scenario(const std::string& name) {
    const auto it = kBundled.find(name);
    if (it == kBundled.end())
        throw ConfigParse(fmt::format("unknown scenario '{}' (bundled: {})", name, fmt::join(bundled_scenario_names(), ", ")));
    return it->second;
}

HermitianOperator<double> scenario_hamiltonian(const ScenarioConfig& cfg) {
    switch (cfg.kind) {
    case ScenarioKind::TwoQubit: return two_qubit_hamiltonian(cfg.coefficients);
    case ScenarioKind::Fmo: return fmo_hamiltonian<double>();
    case ScenarioKind::Custom: return load_matrix_file(cfg.matrix_file);
    }
    throw InvalidSpec("unknown scenario kind");
}

AmplitudeVector<double> scenario_initial_amplitudes(const ScenarioConfig& cfg) {
    CVector<double> a;
    if (!cfg.amplitudes.empty()) {
        a = Eigen::Map<const CVector<double>>(cfg.amplitudes.data(), static_cast<Index>(cfg.amplitudes.size()));
    } else if (cfg.kind == ScenarioKind::TwoQubit) {
        a.resize(4);
        a << std::sqrt(0.4), std::sqrt(0.4), 0.0, std::sqrt(0.2);
    } else if (cfg.kind == ScenarioKind::Fmo) {
        a = CVector<double>::Zero(7);
        a[0] = 1.0;
    } else {
        throw ConfigParse("missing required field initial.amplitudes");
    }
    return AmplitudeVector<double>::normalized(a);
}

ProjectiveState<double> scenario_initial_state(const ScenarioConfig& cfg) {
    const AmplitudeVector<double> a = scenario_initial_amplitudes(cfg);
    Index pivot = 0;
    if (cfg.pivot) {
        pivot = *cfg.pivot;
        if (pivot >= a.dim()) throw InvalidSpec("initial.pivot is out of range");
    } else {
        a.amps().cwiseAbs2().maxCoeff(&pivot);
    }
    return to_projective(a, pivot);
}

RVector<double> scenario_gammas(const ScenarioConfig& cfg, Index n_levels) {
    const Index m = n_levels - 1;
    if (cfg.gamma.size() == 1) return RVector<double>::Constant(m, cfg.gamma.front());
    if (static_cast<Index>(cfg.gamma.size()) != m)
        throw InvalidSpec(fmt::format("gamma has {} values; expected 1 or {}", cfg.gamma.size(), m));
    return Eigen::Map<const RVector<double>>(cfg.gamma.data(), m);
}

std::string csv_header(Index n_levels) {
    std::string h = "t";
    for (Index i = 0; i < n_levels; ++i) h += fmt::format(",pop_{}", i);
    h += ",energy";
    if (n_levels == 4) h += ",z,concurrence";
    return h + "\n";
}

std::string format_gamma(double g) { return fmt::format("{:g}", g); }

RunOutput run_single(const ScenarioConfig& cfg, const std::string& gamma_tag) {
    const HermitianOperator<double> h = scenario_hamiltonian(cfg);
    const AmplitudeVector<double> a0 = scenario_initial_amplitudes(cfg);
    if (a0.dim() != h.dim()) throw DimensionMismatch("initial amplitudes do not match the Hamiltonian dimension");
    const ProjectiveState<double> s0 = scenario_initial_state(cfg);
    const RVector<double> gammas = scenario_gammas(cfg, h.dim());
    const MarkovianBathSpec<double> bath(gammas);

    RunOutput out;
    out.gamma = gammas.size() ? gammas[0] : 0.0;
    out.dim = h.dim();
    const fs::path dir = ensure_dir(cfg.output_dir);
    const std::string stem = cfg.name + "_gamma" + gamma_tag;

    Trajectory<double> traj;
    if (cfg.bath == BathModel::Explicit) {
        const double cutoff = cfg.cutoff ? *cfg.cutoff : kExplicitCutoffFactor * spectral_width(h);
        const auto spec = markovian_equivalent_bath(bath, cutoff, cfg.oscillators);
        traj = integrate_full(h, s0, spec, shifted_equilibrium(spec, s0), cfg.t_final, cfg.sample_dt, cfg.integrator).system;
    } else {
        std::optional<MarkovianBathSpec<double>> b;
        if (cfg.bath == BathModel::Markovian) b = bath;
        traj = integrate(h, s0, b, cfg.t_final, cfg.sample_dt, cfg.integrator);
    }

    std::string body = csv_header(h.dim());
    for (std::size_t i = 0; i < traj.size(); ++i) body += csv_row(traj.times[i], traj.amplitudes[i].amps(), traj.energy[i]);
    out.csv = dir / (stem + ".csv");
    write_file(out.csv, body);

    const bool isolated = cfg.bath == BathModel::None || bath.is_zero();
    if (cfg.oracle && isolated) {
        const auto q = integrate_schrodinger(h, a0, cfg.t_final, cfg.sample_dt);
        std::string ob = csv_header(h.dim());
        for (std::size_t i = 0; i < q.times.size(); ++i) {
            const CVector<double>& a = q.amplitudes[i];
            const double e = (a.adjoint() * h.matrix() * a)(0, 0).real() / a.squaredNorm();
            ob += csv_row(q.times[i], a, e);
        }
        out.oracle_csv = dir / (stem + "_oracle.csv");
        write_file(*out.oracle_csv, ob);
    }
    return out;
}

std::vector<RunOutput> sweep(const ScenarioConfig& cfg, const std::vector<double>& gammas) {
    if (gammas.empty()) throw EmptySweep("gamma sweep has no values");
    std::vector<RunOutput> runs;
    for (double g : gammas) {
        ScenarioConfig one = cfg;
        one.gamma = {g};
        if (one.bath == BathModel::None && g != 0.0) one.bath = BathModel::Markovian;
        runs.push_back(run_single(one, format_gamma(g)));
    }
    return runs;
}

std::vector<RunOutput> run_scenario(const ScenarioConfig& cfg) {
    if (!cfg.sweep_gamma.empty()) return sweep(cfg, cfg.sweep_gamma);
    std::vector<std::string> tags;
    for (double g : cfg.gamma) tags.push_back(format_gamma(g));
    return {run_single(cfg, fmt::format("{}", fmt::join(tags, "-")))};
}

fs::path emit_plot_script(const ScenarioConfig& cfg, const std::vector<RunOutput>& runs) {
    if (runs.empty()) throw EmptySweep("no runs to plot");
    const Index n = runs.front().dim;
    const bool two_qubit = n == 4;
    const std::size_t panels = runs.size() + (two_qubit ? 2 : 0);
    const std::size_t cols = std::min<std::size_t>(panels, 2);
    const std::size_t rows = (panels + cols - 1) / cols;

    // File names are relative to the script's directory.
    std::string s;
    s += "set datafile separator ','\n";
    s += "set terminal pngcairo size " + std::to_string(640 * cols) + "," + std::to_string(420 * rows) + "\n";
    s += fmt::format("set output '{}.png'\n", cfg.name);
    s += fmt::format("set multiplot layout {},{}\n", rows, cols);
    s += "set xlabel 't'\nset key outside right\n";
    for (const auto& r : runs) {
        const std::string f = r.csv.filename().string();
        s += fmt::format("set title 'populations, gamma = {}'\nset ylabel 'population'\n", format_gamma(r.gamma));
        s += "plot ";
        for (Index i = 0; i < n; ++i)
            s += fmt::format("{}'{}' using 1:{} with lines title 'pop_{}'", i ? ", " : "", f, i + 2, i);
        if (r.oracle_csv)
            for (Index i = 0; i < n; ++i)
                s += fmt::format(", '{}' using 1:{} with lines dashtype 2 lc 'black' notitle", r.oracle_csv->filename().string(), i + 2);
        s += "\n";
    }
    if (two_qubit) {
        const std::pair<const char*, Index> channels[] = {{"z", n + 3}, {"concurrence", n + 4}};
        for (const auto& [label, col] : channels) {
            s += fmt::format("set title '{}'\nset ylabel '{}'\nplot ", label, label);
            for (std::size_t k = 0; k < runs.size(); ++k)
                s += fmt::format("{}'{}' using 1:{} with lines title 'gamma = {}'", k ? ", " : "",
                                 runs[k].csv.filename().string(), col, format_gamma(runs[k].gamma));
            s += "\n";
        }
    }
    s += "unset multiplot\n";

    const fs::path path = ensure_dir(cfg.output_dir) / (cfg.name + ".gp");
    write_file(path, s);
    return path;
}

} // namespace cpdyn
