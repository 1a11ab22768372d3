#pragma once

// Explicit Runge-Kutta drivers over Eigen column vectors (real or complex).
//
// The adaptive driver is the Dormand-Prince 5(4) pair with FSAL and a
// standard I-controller. Both drivers land exactly on each requested
// sample time, and an after-step hook may replace the state between steps
// (chart switching).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cpdyn/errors.hpp"

namespace cpdyn {

enum class Method { DormandPrince54, RungeKutta4 };

template <typename Real = double>
struct IntegratorConfig {
    Method method = Method::DormandPrince54;
    Real abs_tol = 1e-10;
    Real rel_tol = 1e-10;
    /// First trial step (adaptive) or the fixed step (RK4).
    Real dt_initial = 1e-3;
    Real dt_max = std::numeric_limits<Real>::infinity();
    /// Switch charts once the normalization factor exceeds this.
    Real rechart_threshold = 1e6;
    /// Residual target and refinement budget for the damping linear solve.
    Real implicit_tol = 1e-12;
    int implicit_max_iter = 4;
    std::size_t max_steps = 100'000'000;

    void validate() const {
        if (!(abs_tol > 0) || !(rel_tol > 0)) throw InvalidSpec("integrator tolerances must be positive");
        if (!(dt_initial > 0) || !(dt_max > 0)) throw InvalidSpec("integrator step sizes must be positive");
        if (!(rechart_threshold > 1)) throw InvalidSpec("rechart threshold must exceed 1");
        if (!(implicit_tol > 0) || implicit_max_iter < 0) throw InvalidSpec("invalid damping-solve settings");
    }
};

/// Statistics of one driver call.
struct StepCounts {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t evaluations = 0;
};

namespace detail {

template <typename Real, typename Vector>
Real scaled_error(const Vector& err, const Vector& y0, const Vector& y1, Real atol, Real rtol) {
    const auto a0 = y0.cwiseAbs();
    const auto a1 = y1.cwiseAbs();
    Real sum = 0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
        const Real sc = atol + rtol * std::max<Real>(a0[i], a1[i]);
        const Real e = std::abs(err[i]) / sc;
        sum += e * e;
    }
    const Real r = std::sqrt(sum / Real(std::max<Eigen::Index>(1, err.size())));
    return std::isfinite(double(r)) ? r : std::numeric_limits<Real>::infinity();
}

} // namespace detail

/// Integrates y' = rhs(t, y) from times.front() through every entry of `times`
/// (strictly increasing), calling on_sample(t, y) at each, including the first.
/// after_step(t, y) runs after every accepted step and returns true if it
/// modified y.
template <typename Real, typename Vector, typename Rhs, typename OnSample, typename AfterStep>
StepCounts integrate_on_grid(Rhs&& rhs, Vector y, const std::vector<Real>& times, const IntegratorConfig<Real>& cfg,
                             OnSample&& on_sample, AfterStep&& after_step) {
    cfg.validate();
    StepCounts counts;
    if (times.empty()) return counts;
    Real t = times.front();
    on_sample(t, y);

    if (cfg.method == Method::RungeKutta4) {
        for (std::size_t s = 1; s < times.size(); ++s) {
            const Real span = times[s] - t;
            const auto nsub = std::max<long long>(1, static_cast<long long>(std::ceil(span / cfg.dt_initial - 1e-9)));
            const Real h = span / Real(nsub);
            for (long long i = 0; i < nsub; ++i) {
                const Vector k1 = rhs(t, y);
                const Vector k2 = rhs(t + h / 2, Vector(y + (h / 2) * k1));
                const Vector k3 = rhs(t + h / 2, Vector(y + (h / 2) * k2));
                const Vector k4 = rhs(t + h, Vector(y + h * k3));
                y += (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
                t = (i + 1 == nsub) ? times[s] : t + h;
                counts.evaluations += 4;
                ++counts.accepted;
                after_step(t, y);
            }
            on_sample(t, y);
        }
        return counts;
    }

    // Dormand-Prince 5(4) tableau.
    constexpr Real c2 = Real(1) / 5, c3 = Real(3) / 10, c4 = Real(4) / 5, c5 = Real(8) / 9;
    constexpr Real a21 = Real(1) / 5;
    constexpr Real a31 = Real(3) / 40, a32 = Real(9) / 40;
    constexpr Real a41 = Real(44) / 45, a42 = Real(-56) / 15, a43 = Real(32) / 9;
    constexpr Real a51 = Real(19372) / 6561, a52 = Real(-25360) / 2187, a53 = Real(64448) / 6561,
                   a54 = Real(-212) / 729;
    constexpr Real a61 = Real(9017) / 3168, a62 = Real(-355) / 33, a63 = Real(46732) / 5247, a64 = Real(49) / 176,
                   a65 = Real(-5103) / 18656;
    constexpr Real b1 = Real(35) / 384, b3 = Real(500) / 1113, b4 = Real(125) / 192, b5 = Real(-2187) / 6784,
                   b6 = Real(11) / 84;
    constexpr Real e1 = Real(71) / 57600, e3 = Real(-71) / 16695, e4 = Real(71) / 1920, e5 = Real(-17253) / 339200,
                   e6 = Real(22) / 525, e7 = Real(-1) / 40;

    Real h = std::min(cfg.dt_initial, cfg.dt_max);
    Vector k1 = rhs(t, y);
    ++counts.evaluations;
    bool rejected_last = false;

    for (std::size_t s = 1; s < times.size(); ++s) {
        const Real target = times[s];
        while (t < target) {
            if (counts.accepted + counts.rejected >= cfg.max_steps)
                throw StepSizeUnderflow("step budget exhausted at t = " + std::to_string(double(t)));
            const Real h_min = Real(64) * std::numeric_limits<Real>::epsilon() * std::max<Real>(Real(1), std::abs(t));
            if (h < h_min) throw StepSizeUnderflow("step size underflow at t = " + std::to_string(double(t)));

            const Real remaining = target - t;
            const bool lands = h >= remaining * (1 - Real(1e-12));
            const Real hs = lands ? remaining : h;

            const Vector k2 = rhs(t + c2 * hs, Vector(y + hs * (a21 * k1)));
            const Vector k3 = rhs(t + c3 * hs, Vector(y + hs * (a31 * k1 + a32 * k2)));
            const Vector k4 = rhs(t + c4 * hs, Vector(y + hs * (a41 * k1 + a42 * k2 + a43 * k3)));
            const Vector k5 = rhs(t + c5 * hs, Vector(y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
            const Vector k6 = rhs(t + hs, Vector(y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
            Vector y_new = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            const Vector k7 = rhs(t + hs, y_new);
            counts.evaluations += 6;

            const Vector err_vec = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            const Real err = detail::scaled_error<Real>(err_vec, y, y_new, cfg.abs_tol, cfg.rel_tol);

            if (err <= 1) {
                ++counts.accepted;
                t = lands ? target : t + hs;
                y = std::move(y_new);
                k1 = k7;
                Real fac = err > 0 ? Real(0.9) * std::pow(err, Real(-0.2)) : Real(5);
                fac = std::clamp<Real>(fac, Real(0.2), rejected_last ? Real(1) : Real(5));
                h = std::min(cfg.dt_max, lands ? std::max(h, hs * fac) : hs * fac);
                rejected_last = false;
                if (after_step(t, y)) {
                    k1 = rhs(t, y);
                    ++counts.evaluations;
                }
            } else {
                ++counts.rejected;
                const Real fac = std::isfinite(double(err)) ? std::max<Real>(Real(0.2), Real(0.9) * std::pow(err, Real(-0.2)))
                                                            : Real(0.1);
                h = hs * fac;
                rejected_last = true;
            }
        }
        on_sample(t, y);
    }
    return counts;
}

/// Uniform grid 0, dt, 2dt, ..., t_final (the last point is t_final exactly).
template <typename Real>
std::vector<Real> uniform_grid(Real t_final, Real sample_dt) {
    if (!(t_final > 0)) throw InvalidSpec("t_final must be positive");
    if (!(sample_dt > 0)) throw InvalidSpec("sample_dt must be positive");
    const auto n = static_cast<std::size_t>(std::ceil(t_final / sample_dt - 1e-9));
    std::vector<Real> g(n + 1);
    for (std::size_t i = 0; i <= n; ++i) g[i] = std::min(t_final, Real(i) * sample_dt);
    g.back() = t_final;
    return g;
}

} // namespace cpdyn
