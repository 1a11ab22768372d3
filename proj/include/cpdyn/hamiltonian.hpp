#pragma once

#include <cassert>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "cpdyn/errors.hpp"
#include "cpdyn/projective.hpp"

namespace cpdyn {

enum class EnergyUnit { Dimensionless, Wavenumber };

/// Speed of light in cm/ps.
inline constexpr double kSpeedOfLightCmPerPs = 2.99792458e-2;
/// 1 cm^-1 expressed as an angular frequency in rad/ps (2 pi c).
inline constexpr double kWavenumberToRadPerPs = 2.0 * std::numbers::pi * kSpeedOfLightCmPerPs;

inline const char* unit_name(EnergyUnit u) {
    return u == EnergyUnit::Wavenumber ? "cm-1" : "dimensionless";
}

/// Conversion factor from `u` to angular frequency (hbar = 1).
inline double angular_frequency_scale(EnergyUnit u) {
    return u == EnergyUnit::Wavenumber ? kWavenumberToRadPerPs : 1.0;
}

template <typename Real = double>
class HermitianOperator {
public:
    static constexpr double kHermiticityTolerance = 1e-12;

    explicit HermitianOperator(CMatrix<Real> m, EnergyUnit unit = EnergyUnit::Dimensionless)
        : matrix_(std::move(m)), unit_(unit) {
        if (matrix_.rows() != matrix_.cols()) throw DimensionMismatch("Hamiltonian must be square");
        if (matrix_.rows() < 2) throw DimensionMismatch("Hamiltonian needs at least two levels");
        if (!matrix_.allFinite()) throw InvalidSpec("Hamiltonian has non-finite entries");
        const Real asym = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
        if (asym >= Real(kHermiticityTolerance)) throw InvalidSpec("Hamiltonian is not Hermitian");
    }

    const CMatrix<Real>& matrix() const noexcept { return matrix_; }
    EnergyUnit unit() const noexcept { return unit_; }
    Index dim() const noexcept { return matrix_.rows(); }

    /// The generator of time evolution in rad per time unit.
    CMatrix<Real> angular_frequency_matrix() const { return matrix_ * Real(angular_frequency_scale(unit_)); }

    HermitianOperator shifted(Real c) const {
        CMatrix<Real> m = matrix_;
        m.diagonal().array() += c;
        return HermitianOperator(std::move(m), unit_);
    }

    HermitianOperator negated() const { return HermitianOperator(CMatrix<Real>(-matrix_), unit_); }

private:
    CMatrix<Real> matrix_;
    EnergyUnit unit_;
};

/// Coefficients of sz(x)I, sx(x)I, sy(x)I, sy(x)sy and sx(x)sy.
template <typename Real = double>
struct TwoQubitCoefficients {
    Real c1{0}, c2{0}, c3{0}, c4{0}, c5{0};
};

namespace pauli {
template <typename Real>
CMatrix<Real> identity() { return CMatrix<Real>::Identity(2, 2); }
template <typename Real>
CMatrix<Real> x() {
    CMatrix<Real> m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}
template <typename Real>
CMatrix<Real> y() {
    const Complex<Real> i(0, 1);
    CMatrix<Real> m(2, 2);
    m << Complex<Real>(0), -i, i, Complex<Real>(0);
    return m;
}
template <typename Real>
CMatrix<Real> z() {
    CMatrix<Real> m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}
} // namespace pauli

/// Two-qubit Hamiltonian in the basis |00>, |10>, |01>, |11>.
///
/// With index = 2*hi + lo, A (x) B acts with A on the high bit. Since the basis
/// lists |00>,|10>,|01>,|11>, the high bit is the second label, so sz (x) I is
/// diag(+1, +1, -1, -1) and H_S = C1 (|x0|^2 + |x1|^2 - |x2|^2 - 1) / N + ...
template <typename Real>
HermitianOperator<Real> two_qubit_hamiltonian(const TwoQubitCoefficients<Real>& c) {
    using Eigen::kroneckerProduct;
    const auto I = pauli::identity<Real>();
    const auto X = pauli::x<Real>();
    const auto Y = pauli::y<Real>();
    const auto Z = pauli::z<Real>();
    CMatrix<Real> h = c.c1 * CMatrix<Real>(kroneckerProduct(Z, I)) + c.c2 * CMatrix<Real>(kroneckerProduct(X, I)) +
                      c.c3 * CMatrix<Real>(kroneckerProduct(Y, I)) + c.c4 * CMatrix<Real>(kroneckerProduct(Y, Y)) +
                      c.c5 * CMatrix<Real>(kroneckerProduct(X, Y));
    return HermitianOperator<Real>(std::move(h));
}

/// Seven-site FMO exciton Hamiltonian (site energies and couplings, cm^-1).
template <typename Real = double>
HermitianOperator<Real> fmo_hamiltonian() {
    RMatrix<Real> m(7, 7);
    // clang-format off
    m << 12410,  -87.7,    5.5,   -5.9,    6.7,  -13.7,   -9.9,
         -87.7,  12530,   30.8,    8.2,    0.7,   11.8,    4.3,
           5.5,   30.8,  12210,  -53.5,   -2.2,   -9.6,    6.0,
          -5.9,    8.2,  -53.5,  12320,  -70.7,  -17.0,  -63.3,
           6.7,    0.7,   -2.2,  -70.7,  12480,   81.1,   -1.3,
         -13.7,   11.8,   -9.6,  -17.0,   81.1,  12630,   39.7,
          -9.9,    4.3,    6.0,  -63.3,   -1.3,   39.7,  12440;
    // clang-format on
    return HermitianOperator<Real>(m.template cast<Complex<Real>>(), EnergyUnit::Wavenumber);
}

/// H_S = D / N together with dH_S / d conj(x^k); D = xh^dagger H xh is shared.
template <typename Real>
struct ClassicalEnergy {
    Real value;
    CVector<Real> gradient;
};

namespace detail {
template <typename Real>
void check_dims(const CMatrix<Real>& h, const ProjectiveState<Real>& s) {
    if (h.rows() != s.dim()) throw DimensionMismatch("Hamiltonian dimension does not match the state");
}
} // namespace detail

template <typename Real>
ClassicalEnergy<Real> classical_energy(const CMatrix<Real>& h, const ProjectiveState<Real>& s) {
    detail::check_dims(h, s);
    const CVector<Real> xh = homogeneous(s);
    const CVector<Real> hx = h * xh;
    const Complex<Real> d = xh.dot(hx);
    const Real nf = normalization_factor(s);
    assert(!std::isfinite(std::abs(d)) || std::abs(d.imag()) <= 1e-12 * std::max<Real>(Real(1), h.cwiseAbs().maxCoeff() * nf * Real(s.dim())));
    const Real dre = d.real();

    const Index m = s.dim() - 1;
    CVector<Real> g(m);
    const Real inv_n2 = Real(1) / (nf * nf);
    for (Index k = 0; k < m; ++k)
        g[k] = (hx[non_pivot_index(s.pivot(), k)] * nf - dre * s.coords()[k]) * inv_n2;
    return {dre / nf, std::move(g)};
}

template <typename Real>
Real classical_hamiltonian(const HermitianOperator<Real>& h, const ProjectiveState<Real>& s) {
    detail::check_dims(h.matrix(), s);
    const CVector<Real> xh = homogeneous(s);
    const Complex<Real> d = xh.dot(h.matrix() * xh);
    const Real nf = normalization_factor(s);
    assert(!std::isfinite(std::abs(d)) || std::abs(d.imag()) <= 1e-12 * std::max<Real>(Real(1), h.matrix().cwiseAbs().maxCoeff() * nf * Real(s.dim())));
    return d.real() / nf;
}

template <typename Real>
CVector<Real> grad_classical_hamiltonian(const HermitianOperator<Real>& h, const ProjectiveState<Real>& s) {
    return classical_energy(h.matrix(), s).gradient;
}

/// Loads a whitespace-separated matrix; entries are `re` or `re,im`.
/// A `# unit: cm-1` header line tags the result as wavenumbers.
HermitianOperator<double> load_matrix_file(const std::string& path);

void save_matrix_file(const HermitianOperator<double>& h, const std::string& path);

} // namespace cpdyn
