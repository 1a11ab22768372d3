#pragma once

#include <cmath>
#include <random>

#include "cpdyn/hamiltonian.hpp"
#include "cpdyn/projective.hpp"

namespace cpdyn::testing {

using C = Complex<double>;

inline std::mt19937_64& rng() {
    static std::mt19937_64 gen(20241016);
    return gen;
}

inline C random_complex() {
    std::normal_distribution<double> n(0.0, 1.0);
    return {n(rng()), n(rng())};
}

inline CVector<double> random_amplitudes(Index n) {
    CVector<double> a(n);
    for (Index i = 0; i < n; ++i) a[i] = random_complex();
    return a / a.norm();
}

inline CMatrix<double> random_hermitian(Index n) {
    CMatrix<double> m(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) m(i, j) = random_complex();
    return (m + m.adjoint()) / 2.0;
}

/// Random state in a chart whose pivot amplitude is not tiny.
inline ProjectiveState<double> random_state(Index n) {
    const CVector<double> a = random_amplitudes(n);
    Index pivot = 0;
    a.cwiseAbs().maxCoeff(&pivot);
    return to_projective(AmplitudeVector<double>(a), pivot);
}

inline double max_abs(const RVector<double>& v) { return v.cwiseAbs().maxCoeff(); }

} // namespace cpdyn::testing
