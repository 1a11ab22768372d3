// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "cpdyn/dynamics.hpp"
#include "cpdyn/explicit_bath.hpp"
#include "cpdyn/observables.hpp"
#include "cpdyn/quantum_oracle.hpp"
#include "cpdyn/scenario.hpp"
#include "support.hpp"
#include "two_qubit_reference.hpp"

using namespace cpdyn;
using namespace cpdyn::testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(const std::string& id, bool ok, const std::string& detail) {
    if (!ok) ++failures;
    fmt::print("[{}] {}: {}\n", ok ? "PASS" : "FAIL", id, detail);
    std::fflush(stdout);
}

ScenarioConfig bundled(const std::string& name) { return parse_scenario(bundled_scenario(name)); }

double max_population_error(const Trajectory<double>& traj, const AmplitudeTrajectory<double>& ref) {
    double err = 0;
    for (std::size_t i = 0; i < traj.size(); ++i)
        err = std::max(err, max_abs(populations(traj.states[i]) - populations_from_amplitudes(ref.amplitudes[i])));
    return err;
}

double max_population_gap(const Trajectory<double>& a, const Trajectory<double>& b) {
    double err = 0;
    for (std::size_t i = 0; i < a.size(); ++i) err = std::max(err, max_abs(populations(a.states[i]) - populations(b.states[i])));
    return err;
}

double energy_drift(const std::vector<double>& e) {
    double d = 0;
    for (double v : e) d = std::max(d, std::abs(v - e.front()));
    return d / std::max(1.0, std::abs(e.front()));
}

Trajectory<double> run(const ScenarioConfig& cfg, double gamma, double t_final, double sample_dt) {
    const auto h = scenario_hamiltonian(cfg);
    std::optional<MarkovianBathSpec<double>> bath;
    if (gamma > 0) bath = MarkovianBathSpec<double>::uniform(h.dim() - 1, gamma);
    return integrate(h, scenario_initial_state(cfg), bath, t_final, sample_dt, cfg.integrator);
}

/// d p_i / dt from the chart velocity: p = w / W with w = |xh|^2.
RVector<double> population_rates(const ProjectiveState<double>& s, const CVector<double>& xdot) {
    const CVector<double> xh = homogeneous(s);
    const Index n = s.dim();
    CVector<double> vh = CVector<double>::Zero(n);
    for (Index j = 0; j < n - 1; ++j) vh[non_pivot_index(s.pivot(), j)] = xdot[j];
    const RVector<double> w = xh.cwiseAbs2();
    RVector<double> wdot(n);
    for (Index i = 0; i < n; ++i) wdot[i] = 2 * (std::conj(xh[i]) * vh[i]).real();
    const double sw = w.sum(), swdot = wdot.sum();
    return (wdot * sw - w * swdot) / (sw * sw);
}

/// Largest peak-to-peak population swing over the final quarter of the run.
double final_quarter_swing(const Trajectory<double>& traj) {
    const std::size_t start = traj.size() * 3 / 4;
    const Index n = traj.states.front().dim();
    RVector<double> lo = RVector<double>::Constant(n, 2.0), hi = RVector<double>::Constant(n, -1.0);
    for (std::size_t i = start; i < traj.size(); ++i) {
        const RVector<double> p = populations(traj.states[i]);
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    return (hi - lo).maxCoeff();
}

// Absolute slack on "non-increasing in gamma" comparisons of quantities that
// have relaxed to roundoff level.
constexpr double kMonotoneFloor = 1e-6;

bool non_increasing(const std::vector<double>& v) {
    for (std::size_t k = 1; k < v.size(); ++k)
        if (v[k] > v[k - 1] + kMonotoneFloor) return false;
    return true;
}

std::string list(const std::vector<double>& v) {
    std::string s;
    for (double x : v) s += (s.empty() ? "" : ", ") + fmt::format("{:.3g}", x);
    return "{" + s + "}";
}

void criterion_1() {
    const auto t0 = Clock::now();
    std::vector<double> errs;
    for (const char* name : {"two_qubit_c4c5_0", "two_qubit_c4c5_1"}) {
        const auto cfg = bundled(name);
        const auto h = scenario_hamiltonian(cfg);
        const auto traj = run(cfg, 0.0, 20.0, 0.01);
        errs.push_back(max_population_error(traj, integrate_schrodinger(h, scenario_initial_amplitudes(cfg), 20.0, 0.01)));
    }
    const double dt = seconds_since(t0);
    const double err = *std::max_element(errs.begin(), errs.end());
    report("1 two-qubit quantum-classical correspondence", err < 1e-8 && dt < 5,
           fmt::format("max |pop - oracle| over [0, 20] = {:.3g} (C4=C5=0: {:.3g}, C4=C5=1: {:.3g}) < 1e-8; runtime {:.2f} s < 5 s",
                       err, errs[0], errs[1], dt));
}

void criterion_2() {
    const auto t0 = Clock::now();
    const auto cfg = bundled("fmo_isolated");
    const auto h = scenario_hamiltonian(cfg);
    const auto traj = run(cfg, 0.0, 1.0, 0.001);
    const double err = max_population_error(traj, integrate_schrodinger(h, scenario_initial_amplitudes(cfg), 1.0, 0.001));
    const double dt = seconds_since(t0);
    report("2 FMO correspondence", err < 1e-7 && dt < 10,
           fmt::format("max |pop - oracle| over 1 ps = {:.3g} < 1e-7; runtime {:.2f} s < 10 s", err, dt));
}

struct ExplicitSetup {
    HermitianOperator<double> h;
    ProjectiveState<double> s0;
    MarkovianBathSpec<double> bath;
    double cutoff;
};

ExplicitSetup explicit_setup() {
    const auto cfg = bundled("two_qubit_c4c5_0");
    auto h = scenario_hamiltonian(cfg);
    const double cutoff = kExplicitCutoffFactor * spectral_width(h);
    return {h, scenario_initial_state(cfg), MarkovianBathSpec<double>::uniform(3, 0.1), cutoff};
}

// The window stays below the recurrence time 2 pi / dw = 2 pi n / (10 w_c) of the n = 400 bath.
constexpr double kExplicitWindow = 1.0;
constexpr double kExplicitSample = 0.001;

FullTrajectory<double> explicit_run(const ExplicitSetup& e, Index n) {
    const auto spec = markovian_equivalent_bath(e.bath, e.cutoff, n);
    return integrate_full(e.h, e.s0, spec, shifted_equilibrium(spec, e.s0), kExplicitWindow, kExplicitSample);
}

void criterion_3() {
    std::vector<double> drifts;
    for (const char* name : {"two_qubit_c4c5_0", "two_qubit_c4c5_1"}) drifts.push_back(energy_drift(run(bundled(name), 0.0, 400.0, 0.05).energy));
    drifts.push_back(energy_drift(run(bundled("fmo_isolated"), 0.0, 10.0, 0.01).energy));
    const double iso = *std::max_element(drifts.begin(), drifts.end());
    const double explicit_total_drift = energy_drift(explicit_run(explicit_setup(), 400).total_energy);
    const bool ok = iso < 1e-8 && explicit_total_drift < 1e-6;
    report("3 energy conservation", ok,
           fmt::format("isolated max |dH_S| / max(1, |H_S(0)|) = {:.3g} < 1e-8 (two-qubit 400 units, FMO 10 ps); "
                       "explicit-bath relative |dH_T| = {:.3g} < 1e-6",
                       iso, explicit_total_drift));
}

void criterion_4() {
    const auto t0 = Clock::now();
    const auto e = explicit_setup();
    const auto markov = integrate(e.h, e.s0, std::optional(e.bath), kExplicitWindow, kExplicitSample);
    std::vector<double> errs;
    for (Index n : {100, 200, 400}) errs.push_back(max_population_gap(explicit_run(e, n).system, markov));
    const double dt = seconds_since(t0);
    const bool monotone = errs[1] < errs[0] && errs[2] < errs[1];
    report("4 Markovian reduction", errs[2] < 2e-2 && monotone && dt < 120,
           fmt::format("gamma = 0.1, w_c = 50 x gap = {:.4g}, t in [0, {}]: max |pop_explicit - pop_markov| for n = 100, 200, 400 "
                       "= {} (n = 400 < 2e-2, decreasing: {}); runtime {:.2f} s < 120 s",
                       e.cutoff, kExplicitWindow, list(errs), monotone ? "yes" : "no", dt));
}

void criterion_5() {
    double err = 0;
    for (int k = 0; k < 1000; ++k) {
        const CVector<double> a = random_amplitudes(4);
        const auto s = to_projective(AmplitudeVector<double>(a), 3);
        err = std::max({err, std::abs(quaternionic_z_pivot3(s) - quaternionic_z(a)), std::abs(concurrence_pivot3(s) - concurrence(a))});
    }
    report("5 observable closed forms", err < 1e-13,
           fmt::format("max |closed form - amplitude definition| over 1000 random states = {:.3g} < 1e-13", err));
}

void criterion_6() {
    double fd_err = 0;
    int pairs = 0;
    for (Index n : {2, 3, 4, 7}) {
        for (int k = 0; k < 100; ++k, ++pairs) {
            const HermitianOperator<double> h(random_hermitian(n));
            const auto s = random_state(n);
            const CVector<double> g = grad_classical_hamiltonian(h, s);
            const CVector<double> fd =
                finite_difference_gradient([&](const ProjectiveState<double>& t) { return classical_hamiltonian(h, t); }, s, 1e-6);
            fd_err = std::max(fd_err, (g - fd).cwiseAbs().maxCoeff() / g.cwiseAbs().maxCoeff());
        }
    }
    double hand_err = 0;
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int k = 0; k < 1000; ++k) {
        const TwoQubitCoefficients<double> c{u(rng()), u(rng()), u(rng()), u(rng()), u(rng())};
        const auto s = to_projective(AmplitudeVector<double>(random_amplitudes(4)), 3);
        const auto ref = two_qubit_reference(c, s);
        const double scale = std::max(1.0, ref.gradient.cwiseAbs().maxCoeff());
        hand_err = std::max(hand_err, (grad_classical_hamiltonian(two_qubit_hamiltonian(c), s) - ref.gradient).cwiseAbs().maxCoeff() / scale);
    }
    report("6 gradient correctness", fd_err < 1e-6 && hand_err < 1e-13,
           fmt::format("finite-difference relative error over {} pairs (N = 2, 3, 4, 7) = {:.3g} < 1e-6; "
                       "generic vs hand-written two-qubit gradient = {:.3g} < 1e-13",
                       pairs, fd_err, hand_err));
}

void criterion_7() {
    bool ok_a = true, ok_b = true;
    std::string detail_a, detail_b;
    double bc_gap = 0;
    for (const char* name : {"two_qubit_c4c5_0", "two_qubit_c4c5_1"}) {
        const auto cfg = bundled(name);
        std::vector<double> swing, conc, z_mean;
        Trajectory<double> last;
        for (double g : cfg.sweep_gamma) {
            last = run(cfg, g, cfg.t_final, cfg.sample_dt);
            swing.push_back(final_quarter_swing(last));
            conc.push_back(concurrence(last.states.back()));
            std::vector<double> z;
            for (const auto& st : last.states) z.push_back(quaternionic_z(st));
            z_mean.push_back(time_average(z, last.times));
        }
        // Sign reversal of <z>_t under damping is reported only.
        fmt::print("[INFO] time-averaged z for {} over gamma sweep: {}\n", name, list(z_mean));
        ok_a = ok_a && non_increasing(swing);
        ok_b = ok_b && non_increasing(conc) && conc.back() < 0.05;
        detail_a += fmt::format(" {}: {}", name, list(swing));
        detail_b += fmt::format(" {}: {}", name, list(conc));
        if (cfg.coefficients.c4 == 1.0) {
            const RVector<double> p = populations(last.states.back());
            bc_gap = std::abs(p[1] - p[2]);
        }
    }
    const auto sweep_text = list(bundled("two_qubit_c4c5_0").sweep_gamma);
    report("7a oscillation amplitude non-increasing in gamma", ok_a,
           fmt::format("final-quarter population swing for gamma = {}:{}", sweep_text, detail_a));
    report("7b final concurrence non-increasing and < 0.05 at the top gamma", ok_b,
           fmt::format("final concurrence for gamma = {}:{}", sweep_text, detail_b));

    const auto fmo = bundled("fmo_damped");
    const auto h = scenario_hamiltonian(fmo);
    std::vector<double> rates;
    for (double g : fmo.sweep_gamma) {
        if (g == 0) continue;
        const auto bath = MarkovianBathSpec<double>::uniform(h.dim() - 1, g);
        const auto traj = integrate(h, scenario_initial_state(fmo), std::optional(bath), fmo.t_final, fmo.sample_dt, fmo.integrator);
        double worst = 0;
        for (std::size_t i = 0; i < traj.size(); ++i) {
            if (traj.times[i] <= 5.0) continue;
            const auto& s = traj.states[i];
            worst = std::max(worst, max_abs(population_rates(s, dissipative_velocity(h, s, bath))));
        }
        rates.push_back(worst);
    }
    const bool ok_c = std::all_of(rates.begin(), rates.end(), [](double r) { return r < 1e-3; });
    std::vector<double> damped;
    for (double g : fmo.sweep_gamma)
        if (g != 0) damped.push_back(g);
    report("7c FMO stabilization beyond 5 ps", ok_c,
           fmt::format("max |dp/dt| over (5, {}] ps for gamma = {} 1/ps: {} (each < 1e-3 1/ps)", fmo.t_final, list(damped), list(rates)));

    report("7d entangling case converges b and c", bc_gap < 0.02,
           fmt::format("C4=C5=1, gamma = {}: |pop_b - pop_c| at t = {} is {:.3g} < 0.02", bundled("two_qubit_c4c5_1").sweep_gamma.back(),
                       bundled("two_qubit_c4c5_1").t_final, bc_gap));
}

void criterion_8() {
    double pop_drift = 0;
    for (const auto& name : bundled_scenario_names()) {
        const auto cfg = bundled(name);
        std::vector<double> gammas = cfg.sweep_gamma.empty() ? std::vector<double>{0.0} : cfg.sweep_gamma;
        for (double g : gammas) {
            const auto traj = run(cfg, g, cfg.t_final, cfg.sample_dt);
            for (std::size_t i = 0; i < traj.size(); ++i) {
                pop_drift = std::max(pop_drift, std::abs(traj.amplitudes[i].amps().squaredNorm() - 1.0));
                pop_drift = std::max(pop_drift, std::abs(populations(traj.states[i]).sum() - 1.0));
            }
        }
    }

    double chart_err = 0;
    const auto h4 = two_qubit_hamiltonian<double>({0, 1, 1, 1, 1});
    for (int k = 0; k < 1000; ++k) {
        const Index n = k % 2 ? 4 : 7;
        const auto s = random_state(n);
        const HermitianOperator<double> h = n == 4 ? h4 : fmo_hamiltonian<double>();
        const RVector<double> p = populations(s);
        for (Index q = 0; q < n; ++q) {
            if (p[q] < 1e-4) continue;
            const auto t = rechart(s, q);
            chart_err = std::max(chart_err, max_abs(populations(t) - p));
            chart_err = std::max(chart_err, std::abs(classical_hamiltonian(h, t) - classical_hamiltonian(h, s)) /
                                                std::max(1.0, std::abs(classical_hamiltonian(h, s))));
            if (n == 4) {
                chart_err = std::max(chart_err, std::abs(quaternionic_z(t) - quaternionic_z(s)));
                chart_err = std::max(chart_err, std::abs(concurrence(t) - concurrence(s)));
            }
        }
    }

    const auto cfg = bundled("two_qubit_c4c5_1");
    const auto h = scenario_hamiltonian(cfg);
    const auto s0 = scenario_initial_state(cfg);
    const auto base = integrate<double>(h, s0, std::nullopt, 20.0, 0.05);
    const auto shifted = integrate<double>(h.shifted(3.7), s0, std::nullopt, 20.0, 0.05);
    const double shift_err = max_population_gap(base, shifted);

    const auto zero = integrate<double>(h, s0, MarkovianBathSpec<double>::uniform(3, 0.0), 20.0, 0.05);
    double zero_err = 0;
    for (std::size_t i = 0; i < base.size(); ++i)
        zero_err = std::max(zero_err, (base.states[i].coords() - zero.states[i].coords()).cwiseAbs().maxCoeff());

    const bool ok = pop_drift < 1e-10 && chart_err < 1e-12 && shift_err < 1e-8 && zero_err <= 1e-12;
    report("8 invariant suites", ok,
           fmt::format("population-sum drift over bundled scenarios = {:.3g} < 1e-10; rechart invariance = {:.3g} < 1e-12; "
                       "trace-shift population gap = {:.3g} < 1e-8; gamma = 0 vs isolated = {:.3g} <= 1e-12",
                       pop_drift, chart_err, shift_err, zero_err));
}

} // namespace

int main() {
    const std::vector<std::function<void()>> checks = {criterion_1, criterion_2, criterion_3, criterion_4,
                                                       criterion_5, criterion_6, criterion_7, criterion_8};
    for (const auto& c : checks) {
        try {
            c();
        } catch (const std::exception& e) {
            report("error", false, e.what());
        }
    }
    fmt::print("{} failing\n", failures);
    return failures == 0 ? 0 : 1;
}
