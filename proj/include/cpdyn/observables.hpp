#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "cpdyn/errors.hpp"
#include "cpdyn/projective.hpp"

namespace cpdyn {

/// |a^i|^2 read off the chart: |x^j|^2 / N off-pivot, 1 / N at the pivot.
template <typename Real>
RVector<Real> populations(const ProjectiveState<Real>& s) {
    const RVector<Real> w = homogeneous(s).cwiseAbs2();
    return w / w.sum();
}

template <typename Real>
RVector<Real> populations_from_amplitudes(const CVector<Real>& a) {
    return a.cwiseAbs2();
}

template <typename Real>
RVector<Real> populations_from_amplitudes(const AmplitudeVector<Real>& a) {
    return populations_from_amplitudes(a.amps());
}

namespace detail {
template <typename Real>
void require_two_qubits(const ProjectiveState<Real>& s) {
    if (s.dim() != 4) throw DimensionMismatch("two-qubit observables need a CP^3 state");
}
} // namespace detail

/// z = |a|^2 + |b|^2 - |c|^2 - |d|^2 in the basis |00>, |10>, |01>, |11>.
template <typename Real>
Real quaternionic_z(const CVector<Real>& a) {
    if (a.size() != 4) throw DimensionMismatch("two-qubit observables need four amplitudes");
    return std::norm(a[0]) + std::norm(a[1]) - std::norm(a[2]) - std::norm(a[3]);
}

template <typename Real>
Real quaternionic_z(const ProjectiveState<Real>& s) {
    detail::require_two_qubits(s);
    return quaternionic_z<Real>(from_projective(s).amps());
}

/// Pure-state concurrence 2|ad - bc|.
template <typename Real>
Real concurrence(const CVector<Real>& a) {
    if (a.size() != 4) throw DimensionMismatch("two-qubit observables need four amplitudes");
    return Real(2) * std::abs(a[0] * a[3] - a[1] * a[2]);
}

template <typename Real>
Real concurrence(const ProjectiveState<Real>& s) {
    detail::require_two_qubits(s);
    return concurrence<Real>(from_projective(s).amps());
}

// Closed forms in the chart with divisor d (pivot 3). Kept as cross-checks.
template <typename Real>
Real quaternionic_z_pivot3(const ProjectiveState<Real>& s) {
    detail::require_two_qubits(s);
    if (s.pivot() != 3) throw DimensionMismatch("closed form needs pivot 3");
    const auto& x = s.coords();
    return (std::norm(x[0]) + std::norm(x[1]) - std::norm(x[2]) - Real(1)) / normalization_factor(s);
}

template <typename Real>
Real concurrence_pivot3(const ProjectiveState<Real>& s) {
    detail::require_two_qubits(s);
    if (s.pivot() != 3) throw DimensionMismatch("closed form needs pivot 3");
    const auto& x = s.coords();
    return Real(2) * std::abs(x[0] - x[1] * x[2]) / normalization_factor(s);
}

/// Trapezoidal mean of `series` over [times.front(), times.back()].
template <typename Real>
Real time_average(std::span<const Real> series, std::span<const Real> times) {
    if (series.size() != times.size()) throw DimensionMismatch("series and time grid differ in length");
    if (series.size() < 2) throw TooFewSamples("time average needs at least two samples");
    Real integral = 0;
    for (std::size_t i = 1; i < series.size(); ++i)
        integral += Real(0.5) * (series[i] + series[i - 1]) * (times[i] - times[i - 1]);
    const Real span = times.back() - times.front();
    if (!(span > 0)) throw TooFewSamples("time window has zero length");
    return integral / span;
}

template <typename Real>
Real time_average(const std::vector<Real>& series, const std::vector<Real>& times) {
    return time_average<Real>(std::span<const Real>(series), std::span<const Real>(times));
}

} // namespace cpdyn
