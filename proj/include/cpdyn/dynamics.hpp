#pragma once

// Hamilton's equations on CP^{N-1}, isolated and with Markovian (noise-averaged)
// damping, plus the trajectory driver.

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cpdyn/errors.hpp"
#include "cpdyn/hamiltonian.hpp"
#include "cpdyn/ode.hpp"
#include "cpdyn/projective.hpp"

namespace cpdyn {

/// Per-coordinate damping constants gamma_j >= 0 (inverse time).
template <typename Real = double>
class MarkovianBathSpec {
public:
    explicit MarkovianBathSpec(RVector<Real> gammas) : gammas_(std::move(gammas)) {
        if (!gammas_.allFinite() || (gammas_.array() < Real(0)).any())
            throw InvalidSpec("damping constants must be finite and non-negative");
    }

    static MarkovianBathSpec uniform(Index n_coords, Real gamma) {
        return MarkovianBathSpec(RVector<Real>::Constant(n_coords, gamma));
    }

    const RVector<Real>& gammas() const noexcept { return gammas_; }
    bool is_zero() const { return (gammas_.array() == Real(0)).all(); }

private:
    RVector<Real> gammas_;
};

template <typename Real = double>
struct Trajectory {
    std::vector<Real> times;
    std::vector<ProjectiveState<Real>> states;
    std::vector<AmplitudeVector<Real>> amplitudes;
    /// H_S in the Hamiltonian's own unit.
    std::vector<Real> energy;
    StepCounts counts;
    std::size_t recharts = 0;

    std::size_t size() const noexcept { return times.size(); }
};

namespace detail {

/// Dense -i N (I + x x^dagger).
template <typename Real>
CMatrix<Real> inverse_symplectic_matrix(const ProjectiveState<Real>& s) {
    const auto& x = s.coords();
    const Index m = x.size();
    CMatrix<Real> omega = CMatrix<Real>::Identity(m, m) + x * x.adjoint();
    return Complex<Real>(0, -normalization_factor(s)) * omega;
}

template <typename Real>
CVector<Real> isolated_velocity_raw(const CMatrix<Real>& generator, const ProjectiveState<Real>& s) {
    return apply_inverse_symplectic(s, classical_energy(generator, s).gradient);
}

/// d|x^k|^2/dt = 2 Re(conj(x^k) xdot^k).
template <typename Real>
RVector<Real> modulus_rates(const CVector<Real>& x, const CVector<Real>& xdot) {
    return Real(2) * (x.conjugate().array() * xdot.array()).real().matrix();
}

template <typename Real>
CVector<Real> dissipative_velocity_raw(const CMatrix<Real>& generator, const ProjectiveState<Real>& s,
                                       const RVector<Real>& gammas, Real tol, int max_refine) {
    const auto& x = s.coords();
    if (gammas.size() != x.size()) throw DimensionMismatch("damping constants must match the number of coordinates");
    const CVector<Real> a = isolated_velocity_raw(generator, s);
    if ((gammas.array() == Real(0)).all()) return a;

    // xdot = A + B u with B = Omega diag(2 x^k gamma_k), u_k = 2 Re(conj(x^k) xdot^k).
    const Index m = x.size();
    const CVector<Real> weights = (Real(2) * x.array() * gammas.array().template cast<Complex<Real>>()).matrix();
    const CMatrix<Real> b_map = inverse_symplectic_matrix(s) * weights.asDiagonal();
    const RVector<Real> rhs = modulus_rates(x, a);
    // M_kj = 2 Re(conj(x^k) B_kj) with conj(x^k) B_kj = -i N 2 gamma_j (delta_kj |x^k|^2 + |x^k|^2 |x^j|^2),
    // evaluated in this factored form so the real part carries no cancellation error.
    const RVector<Real> mod2 = x.cwiseAbs2();
    const Complex<Real> minus_i_n(Real(0), -normalization_factor(s));
    RMatrix<Real> system = RMatrix<Real>::Identity(m, m);
    for (Index k = 0; k < m; ++k)
        for (Index j = 0; j < m; ++j) {
            const Real metric = (k == j ? mod2[k] : Real(0)) + mod2[k] * mod2[j];
            system(k, j) -= Real(2) * (minus_i_n * (Real(2) * gammas[j] * metric)).real();
        }

    if (!system.allFinite() || !rhs.allFinite())
        return CVector<Real>::Constant(m, Complex<Real>(std::numeric_limits<Real>::quiet_NaN()));
    const Eigen::PartialPivLU<RMatrix<Real>> lu(system);
    const Real rcond = lu.rcond();
    if (!(rcond > Real(1e-12)))
        throw SingularDamping("damping system is numerically singular (rcond = " + std::to_string(double(rcond)) + ")");
    RVector<Real> u = lu.solve(rhs);
    const Real scale = std::max<Real>(Real(1), rhs.cwiseAbs().maxCoeff());
    for (int it = 0; it < max_refine; ++it) {
        const RVector<Real> r = rhs - system * u;
        if (r.cwiseAbs().maxCoeff() <= tol * scale) break;
        u += lu.solve(r);
    }
    return a + b_map * u.template cast<Complex<Real>>();
}

} // namespace detail

/// Hamilton's equations xdot = {x, H_S} with time measured in the units
/// implied by the Hamiltonian (rad/ps for wavenumber operators).
template <typename Real>
CVector<Real> isolated_velocity(const HermitianOperator<Real>& h, const ProjectiveState<Real>& s) {
    detail::check_dims(h.matrix(), s);
    return detail::isolated_velocity_raw(h.angular_frequency_matrix(), s);
}

/// Noise-averaged Markovian velocity. Solves
///   xdot^j = sum_k -i N (delta^{jk} + x^j conj(x^k)) (G_k + 2 x^k gamma_k d|x^k|^2/dt)
/// exactly as a real linear system in the rates d|x^k|^2/dt.
template <typename Real>
CVector<Real> dissipative_velocity(const HermitianOperator<Real>& h, const ProjectiveState<Real>& s,
                                   const MarkovianBathSpec<Real>& bath, Real tol = Real(1e-12), int max_refine = 4) {
    detail::check_dims(h.matrix(), s);
    return detail::dissipative_velocity_raw(h.angular_frequency_matrix(), s, bath.gammas(), tol, max_refine);
}

/// Max-norm residual of the implicit Markovian equation at a candidate velocity.
template <typename Real>
Real damping_residual(const HermitianOperator<Real>& h, const ProjectiveState<Real>& s,
                      const MarkovianBathSpec<Real>& bath, const CVector<Real>& xdot) {
    const auto& x = s.coords();
    const CVector<Real> g = classical_energy(h.angular_frequency_matrix(), s).gradient;
    const RVector<Real> u = detail::modulus_rates(x, xdot);
    const CVector<Real> force =
        g + (Real(2) * x.array() * (bath.gammas().array() * u.array()).template cast<Complex<Real>>()).matrix();
    const CVector<Real> diff = xdot - apply_inverse_symplectic(s, force);
    return diff.cwiseAbs().maxCoeff() / std::max<Real>(Real(1), xdot.cwiseAbs().maxCoeff());
}

/// Integrates from `initial` to t_final, sampling every sample_dt.
///
/// Whenever the normalization factor exceeds cfg.rechart_threshold after a
/// step, the state moves to the largest-amplitude chart. The damping term
/// couples to the moduli |x^j|^2 of the current chart, so for damped runs the
/// threshold is part of the model; isolated flows are chart-independent.
template <typename Real>
Trajectory<Real> integrate(const HermitianOperator<Real>& h, const ProjectiveState<Real>& initial,
                           const std::optional<MarkovianBathSpec<Real>>& bath, Real t_final, Real sample_dt,
                           const IntegratorConfig<Real>& cfg = {}) {
    detail::check_dims(h.matrix(), initial);
    if (bath && bath->gammas().size() != initial.dim() - 1)
        throw DimensionMismatch("damping constants must match the number of coordinates");
    const std::vector<Real> grid = uniform_grid(t_final, sample_dt);
    const CMatrix<Real> generator = h.angular_frequency_matrix();
    const bool damped = bath && !bath->is_zero();
    Index pivot = initial.pivot();

    Trajectory<Real> traj;
    traj.times.reserve(grid.size());
    auto rhs = [&](Real, const CVector<Real>& y) -> CVector<Real> {
        // A non-finite trial stage makes the driver reject and shrink the step.
        if (!y.allFinite()) return CVector<Real>::Constant(y.size(), Complex<Real>(std::numeric_limits<Real>::quiet_NaN()));
        const ProjectiveState<Real> s(y, pivot);
        if (damped) return detail::dissipative_velocity_raw(generator, s, bath->gammas(), cfg.implicit_tol, cfg.implicit_max_iter);
        return detail::isolated_velocity_raw(generator, s);
    };
    auto on_sample = [&](Real t, const CVector<Real>& y) {
        ProjectiveState<Real> s(y, pivot);
        traj.times.push_back(t);
        traj.amplitudes.push_back(from_projective(s));
        traj.energy.push_back(classical_hamiltonian(h, s));
        traj.states.push_back(std::move(s));
    };
    auto after_step = [&](Real, CVector<Real>& y) {
        if (Real(1) + y.squaredNorm() <= cfg.rechart_threshold) return false;
        const ProjectiveState<Real> s(y, pivot);
        const ProjectiveState<Real> moved = rechart(s, best_pivot(s));
        y = moved.coords();
        pivot = moved.pivot();
        ++traj.recharts;
        return true;
    };
    traj.counts = integrate_on_grid<Real>(rhs, initial.coords(), grid, cfg, on_sample, after_step);
    return traj;
}

} // namespace cpdyn
