#pragma once

// Affine charts on complex projective space CP^{N-1}.
//
// A pure state a = (a^0, ..., a^{N-1}) is represented in the chart with
// divisor a^p by the N-1 coordinates x^j = a^{s(j)} / a^p, where s enumerates
// the non-pivot indices in increasing order.

#include <cmath>
#include <complex>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "cpdyn/errors.hpp"

namespace cpdyn {

using Index = Eigen::Index;

template <typename Real>
using Complex = std::complex<Real>;

template <typename Real>
using CVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

template <typename Real>
using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real>
using RVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

template <typename Real>
using RMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

/// Smallest admissible |a^pivot| for chart conversions.
inline constexpr double kDefaultPivotFloor = 1e-12;

/// Full-space index of the j-th chart coordinate.
constexpr Index non_pivot_index(Index pivot, Index j) noexcept { return j < pivot ? j : j + 1; }

/// Unit-norm amplitude vector of an N-level pure state.
template <typename Real = double>
class AmplitudeVector {
public:
    static constexpr double kNormTolerance = 1e-12;

    explicit AmplitudeVector(CVector<Real> amps) : amps_(std::move(amps)) {
        if (amps_.size() < 2) throw DimensionMismatch("amplitude vector needs at least two levels");
        if (!amps_.allFinite()) throw InvalidSpec("amplitude vector has non-finite entries");
        const Real norm2 = amps_.squaredNorm();
        if (std::abs(norm2 - Real(1)) > Real(kNormTolerance))
            throw InvalidSpec("amplitude vector is not normalized (|a|^2 = " + std::to_string(double(norm2)) + ")");
    }

    /// Rescales any non-zero vector to unit norm.
    static AmplitudeVector normalized(const CVector<Real>& v) {
        const Real n = v.norm();
        if (!(n > Real(0)) || !std::isfinite(double(n))) throw InvalidSpec("cannot normalize a zero or non-finite vector");
        return AmplitudeVector(CVector<Real>(v / n));
    }

    const CVector<Real>& amps() const noexcept { return amps_; }
    Index dim() const noexcept { return amps_.size(); }
    const Complex<Real>& operator[](Index i) const { return amps_[i]; }

private:
    CVector<Real> amps_;
};

/// Point of CP^{N-1} in the affine chart whose divisor is amplitude `pivot`.
template <typename Real = double>
class ProjectiveState {
public:
    ProjectiveState(CVector<Real> coords, Index pivot) : coords_(std::move(coords)), pivot_(pivot) {
        if (coords_.size() < 1) throw DimensionMismatch("projective state needs at least one coordinate");
        if (pivot_ < 0 || pivot_ >= dim()) throw DimensionMismatch("pivot index out of range");
        if (!coords_.allFinite()) throw InvalidSpec("projective coordinates must be finite");
    }

    /// Reference state of the chart (all coordinates zero).
    static ProjectiveState origin(Index dim, Index pivot) {
        return ProjectiveState(CVector<Real>::Zero(dim - 1), pivot);
    }

    const CVector<Real>& coords() const noexcept { return coords_; }
    Index pivot() const noexcept { return pivot_; }
    Index dim() const noexcept { return coords_.size() + 1; }

private:
    CVector<Real> coords_;
    Index pivot_;
};

/// 1 + sum_j |x^j|^2.
template <typename Real>
Real normalization_factor(const ProjectiveState<Real>& s) {
    return Real(1) + s.coords().squaredNorm();
}

template <typename Real>
Real kahler_potential(const ProjectiveState<Real>& s) {
    return std::log(normalization_factor(s));
}

/// Unnormalized amplitudes: 1 in the pivot slot, coordinates elsewhere.
template <typename Real>
CVector<Real> homogeneous(const ProjectiveState<Real>& s) {
    const Index n = s.dim();
    CVector<Real> xh(n);
    for (Index j = 0; j < n - 1; ++j) xh[non_pivot_index(s.pivot(), j)] = s.coords()[j];
    xh[s.pivot()] = Complex<Real>(1);
    return xh;
}

template <typename Real>
ProjectiveState<Real> to_projective(const AmplitudeVector<Real>& a, Index pivot, Real floor = Real(kDefaultPivotFloor)) {
    const Index n = a.dim();
    if (pivot < 0 || pivot >= n) throw DimensionMismatch("pivot index out of range");
    const Complex<Real> divisor = a[pivot];
    if (std::abs(divisor) < floor) throw PivotTooSmall("|a[" + std::to_string(pivot) + "]| is below the pivot floor");
    CVector<Real> x(n - 1);
    for (Index j = 0; j < n - 1; ++j) x[j] = a[non_pivot_index(pivot, j)] / divisor;
    return ProjectiveState<Real>(std::move(x), pivot);
}

/// Amplitudes with the pivot entry real and positive.
template <typename Real>
AmplitudeVector<Real> from_projective(const ProjectiveState<Real>& s) {
    const CVector<Real> xh = homogeneous(s);
    // Dividing by the actual norm keeps |a| = 1 to roundoff even for large coordinates.
    return AmplitudeVector<Real>(CVector<Real>(xh / xh.norm()));
}

/// v^j = sum_k -i N (delta^{jk} + x^j conj(x^k)) g_k.
template <typename Real, typename Derived>
CVector<Real> apply_inverse_symplectic(const ProjectiveState<Real>& s, const Eigen::MatrixBase<Derived>& gradient) {
    const auto& x = s.coords();
    if (gradient.size() != x.size()) throw DimensionMismatch("gradient length must equal the number of coordinates");
    const Real nf = normalization_factor(s);
    const Complex<Real> xg = x.dot(gradient.derived()); // sum_k conj(x^k) g_k
    const Complex<Real> minus_i_n(Real(0), -nf);
    return minus_i_n * (gradient.derived() + x * xg);
}

/// Same point of CP^{N-1} in the chart with divisor `new_pivot`.
template <typename Real>
ProjectiveState<Real> rechart(const ProjectiveState<Real>& s, Index new_pivot, Real floor = Real(kDefaultPivotFloor)) {
    const Index n = s.dim();
    if (new_pivot < 0 || new_pivot >= n) throw DimensionMismatch("pivot index out of range");
    if (new_pivot == s.pivot()) return s;
    const CVector<Real> xh = homogeneous(s);
    const Complex<Real> divisor = xh[new_pivot];
    if (std::abs(divisor) < floor * std::sqrt(normalization_factor(s)))
        throw PivotTooSmall("amplitude at the requested pivot is below the pivot floor");
    CVector<Real> x(n - 1);
    for (Index j = 0; j < n - 1; ++j) x[j] = xh[non_pivot_index(new_pivot, j)] / divisor;
    return ProjectiveState<Real>(std::move(x), new_pivot);
}

/// Index of the largest-modulus amplitude (best-conditioned chart).
template <typename Real>
Index best_pivot(const ProjectiveState<Real>& s) {
    Index idx = 0;
    homogeneous(s).cwiseAbs2().maxCoeff(&idx);
    return idx;
}

} // namespace cpdyn
