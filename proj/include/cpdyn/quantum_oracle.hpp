#pragma once

// Reference Schroedinger propagation i da/dt = H a (hbar = 1).

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "cpdyn/errors.hpp"
#include "cpdyn/hamiltonian.hpp"
#include "cpdyn/ode.hpp"
#include "cpdyn/projective.hpp"

namespace cpdyn {

enum class OracleMethod { Auto, Eigendecomposition, RungeKutta };

/// Dimensions up to this use exact eigendecomposition under OracleMethod::Auto.
inline constexpr Index kOracleEigenMaxDim = 64;

template <typename Real = double>
struct AmplitudeTrajectory {
    std::vector<Real> times;
    /// Raw propagated amplitudes (the Runge-Kutta path may drift off unit norm).
    std::vector<CVector<Real>> amplitudes;
};

/// Tolerances for the Runge-Kutta path; tighter than the classical default so
/// the reference stays more accurate than the flow it checks.
template <typename Real = double>
IntegratorConfig<Real> oracle_config() {
    IntegratorConfig<Real> cfg;
    cfg.abs_tol = Real(1e-13);
    cfg.rel_tol = Real(1e-13);
    return cfg;
}

template <typename Real>
AmplitudeTrajectory<Real> integrate_schrodinger(const HermitianOperator<Real>& h, const AmplitudeVector<Real>& initial,
                                                Real t_final, Real sample_dt,
                                                const IntegratorConfig<Real>& cfg = oracle_config<Real>(),
                                                OracleMethod method = OracleMethod::Auto) {
    if (h.dim() != initial.dim()) throw DimensionMismatch("Hamiltonian dimension does not match the state");
    const std::vector<Real> grid = uniform_grid(t_final, sample_dt);
    const CMatrix<Real> gen = h.angular_frequency_matrix();
    if (method == OracleMethod::Auto)
        method = h.dim() <= kOracleEigenMaxDim ? OracleMethod::Eigendecomposition : OracleMethod::RungeKutta;

    AmplitudeTrajectory<Real> out;
    out.times = grid;
    out.amplitudes.reserve(grid.size());
    if (method == OracleMethod::Eigendecomposition) {
        const Eigen::SelfAdjointEigenSolver<CMatrix<Real>> eig(gen);
        if (eig.info() != Eigen::Success) throw Error("eigendecomposition failed");
        const CMatrix<Real>& v = eig.eigenvectors();
        const CVector<Real> c0 = v.adjoint() * initial.amps();
        for (Real t : grid) {
            CVector<Real> phases(c0.size());
            for (Index k = 0; k < c0.size(); ++k) phases[k] = std::polar(Real(1), -eig.eigenvalues()[k] * t) * c0[k];
            out.amplitudes.push_back(v * phases);
        }
        return out;
    }

    const Complex<Real> minus_i(0, -1);
    auto rhs = [&](Real, const CVector<Real>& a) -> CVector<Real> { return minus_i * (gen * a); };
    integrate_on_grid<Real>(rhs, initial.amps(), grid, cfg,
                            [&](Real, const CVector<Real>& a) { out.amplitudes.push_back(a); },
                            [](Real, CVector<Real>&) { return false; });
    return out;
}

} // namespace cpdyn
