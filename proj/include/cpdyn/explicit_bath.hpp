#pragma once

// System on CP^{N-1} coupled to explicit harmonic oscillators.
//
// Each chart coordinate j owns an independent set of oscillators that couple
// to |x^j|^2 through
//   H_I = sum_j [ -|x^j|^2 sum_i c_i q_i + |x^j|^4 sum_i c_i^2 / (2 m_i w_i^2) ],
// the second term being the counterterm. The reduced (Langevin) description
// uses the damping kernel and noise evaluated below.

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "cpdyn/dynamics.hpp"
#include "cpdyn/errors.hpp"
#include "cpdyn/hamiltonian.hpp"
#include "cpdyn/ode.hpp"
#include "cpdyn/projective.hpp"

namespace cpdyn {

template <typename Real = double>
struct Oscillator {
    Real mass{1};
    Real frequency{1};
    Real coupling{0};

    /// c^2 / (m w^2), the oscillator's weight in the damping kernel.
    Real kernel_weight() const { return coupling * coupling / (mass * frequency * frequency); }
};

/// Oscillator sets, one per chart coordinate.
template <typename Real = double>
class ExplicitBathSpec {
public:
    explicit ExplicitBathSpec(std::vector<std::vector<Oscillator<Real>>> per_coordinate)
        : baths_(std::move(per_coordinate)) {
        for (const auto& set : baths_)
            for (const auto& o : set)
                if (!(o.mass > 0) || !(o.frequency > 0) || !std::isfinite(double(o.coupling)) ||
                    !std::isfinite(double(o.mass)) || !std::isfinite(double(o.frequency)))
                    throw InvalidSpec("oscillators need positive finite mass and frequency and a finite coupling");
    }

    /// The same oscillator set attached to each of `n_coords` coordinates.
    static ExplicitBathSpec replicated(Index n_coords, const std::vector<Oscillator<Real>>& set) {
        return ExplicitBathSpec(std::vector<std::vector<Oscillator<Real>>>(static_cast<std::size_t>(n_coords), set));
    }

    Index coordinates() const noexcept { return static_cast<Index>(baths_.size()); }
    const std::vector<Oscillator<Real>>& oscillators(Index j) const { return baths_.at(static_cast<std::size_t>(j)); }
    Index total_oscillators() const {
        Index n = 0;
        for (const auto& set : baths_) n += static_cast<Index>(set.size());
        return n;
    }

    /// Sum of c_i^2 / (m_i w_i^2) for coordinate j (the counterterm strength).
    Real counterterm_weight(Index j) const {
        Real s = 0;
        for (const auto& o : oscillators(j)) s += o.kernel_weight();
        return s;
    }

private:
    std::vector<std::vector<Oscillator<Real>>> baths_;
};

/// Oscillator positions and momenta, indexed [coordinate][oscillator].
template <typename Real = double>
struct BathState {
    std::vector<RVector<Real>> q;
    std::vector<RVector<Real>> p;
};

/// Discretizes J(w) = (2/pi) gamma w exp(-w/w_c) on a midpoint grid of n unit-mass
/// oscillators up to 10 w_c, with c_i^2 = (2/pi) gamma w_i^2 exp(-w_i/w_c) dw.
/// The resulting kernel integrates to gamma over t in [0, inf).
template <typename Real>
std::vector<Oscillator<Real>> discretize_ohmic_bath(Real gamma, Real cutoff, Index n) {
    if (n < 1) throw InvalidSpec("bath needs at least one oscillator");
    if (!(cutoff > 0)) throw InvalidSpec("cutoff frequency must be positive");
    if (!(gamma >= 0) || !std::isfinite(double(gamma))) throw InvalidSpec("damping constant must be non-negative");
    const Real w_max = Real(10) * cutoff;
    const Real dw = w_max / Real(n);
    std::vector<Oscillator<Real>> out(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        const Real w = (Real(i) + Real(0.5)) * dw;
        const Real c2 = Real(2) / std::numbers::pi_v<Real> * gamma * w * w * std::exp(-w / cutoff) * dw;
        out[static_cast<std::size_t>(i)] = Oscillator<Real>{Real(1), w, std::sqrt(c2)};
    }
    return out;
}

/// gamma_j(t) = sum_i c_i^2 / (m_i w_i^2) cos(w_i t).
template <typename Real>
Real damping_kernel(const ExplicitBathSpec<Real>& spec, Index j, Real t) {
    Real s = 0;
    for (const auto& o : spec.oscillators(j)) s += o.kernel_weight() * std::cos(o.frequency * t);
    return s;
}

/// xi_j(t) = sum_i c_i [ (q_i(0) - x0_sq c_i / (m_i w_i^2)) cos(w_i t) + p_i(0) / (m_i w_i) sin(w_i t) ].
template <typename Real>
Real noise(const ExplicitBathSpec<Real>& spec, Index j, const BathState<Real>& initial, Real x0_sq, Real t) {
    const auto& osc = spec.oscillators(j);
    const auto& q = initial.q.at(static_cast<std::size_t>(j));
    const auto& p = initial.p.at(static_cast<std::size_t>(j));
    Real s = 0;
    for (std::size_t i = 0; i < osc.size(); ++i) {
        const auto& o = osc[i];
        const auto ii = static_cast<Index>(i);
        const Real shift = x0_sq * o.coupling / (o.mass * o.frequency * o.frequency);
        s += o.coupling * ((q[ii] - shift) * std::cos(o.frequency * t) + p[ii] / (o.mass * o.frequency) * std::sin(o.frequency * t));
    }
    return s;
}

/// Oscillators displaced to the equilibrium set by |x^j|^2 and at rest; the noise vanishes identically.
template <typename Real>
BathState<Real> shifted_equilibrium(const ExplicitBathSpec<Real>& spec, const ProjectiveState<Real>& s) {
    if (spec.coordinates() != s.dim() - 1) throw DimensionMismatch("bath spec must have one oscillator set per coordinate");
    BathState<Real> b;
    for (Index j = 0; j < spec.coordinates(); ++j) {
        const auto& osc = spec.oscillators(j);
        const Real x2 = std::norm(s.coords()[j]);
        RVector<Real> q(static_cast<Index>(osc.size()));
        for (std::size_t i = 0; i < osc.size(); ++i)
            q[static_cast<Index>(i)] = x2 * osc[i].coupling / (osc[i].mass * osc[i].frequency * osc[i].frequency);
        b.q.push_back(std::move(q));
        b.p.push_back(RVector<Real>::Zero(static_cast<Index>(osc.size())));
    }
    return b;
}

template <typename Real>
Real bath_energy(const ExplicitBathSpec<Real>& spec, const BathState<Real>& b) {
    Real e = 0;
    for (Index j = 0; j < spec.coordinates(); ++j) {
        const auto& osc = spec.oscillators(j);
        for (std::size_t i = 0; i < osc.size(); ++i) {
            const auto& o = osc[i];
            const Real q = b.q[std::size_t(j)][Index(i)], p = b.p[std::size_t(j)][Index(i)];
            e += p * p / (2 * o.mass) + o.mass * o.frequency * o.frequency * q * q / 2;
        }
    }
    return e;
}

/// H_I including the counterterm.
template <typename Real>
Real interaction_energy(const ExplicitBathSpec<Real>& spec, const ProjectiveState<Real>& s, const BathState<Real>& b,
                        bool counterterm = true) {
    Real e = 0;
    for (Index j = 0; j < spec.coordinates(); ++j) {
        const Real x2 = std::norm(s.coords()[j]);
        const auto& osc = spec.oscillators(j);
        Real cq = 0;
        for (std::size_t i = 0; i < osc.size(); ++i) cq += osc[i].coupling * b.q[std::size_t(j)][Index(i)];
        e += -x2 * cq;
        if (counterterm) e += x2 * x2 * spec.counterterm_weight(j) / 2;
    }
    return e;
}

template <typename Real = double>
struct FullTrajectory {
    Trajectory<Real> system;
    /// H_B and H_T = H_S + H_B + H_I, both as angular frequencies.
    std::vector<Real> bath_energy;
    std::vector<Real> total_energy;
    BathState<Real> final_bath;
};

struct FullOptions {
    /// Dropping the counterterm is only meant for mutation checks.
    bool counterterm = true;
};

/// Integrates the coupled system + oscillator equations
///   xdot^j = sum_k -i N (delta^{jk} + x^j conj(x^k)) (dH_S/dconj(x^k) + dH_I/dconj(x^k)),
///   dH_I/dconj(x^j) = -x^j sum_i c_i q_i + x^j |x^j|^2 sum_i c_i^2 / (m_i w_i^2),
///   qdot_i = p_i / m_i,  pdot_i = -m_i w_i^2 q_i + c_i |x^j|^2.
/// The coupling is defined in the initial chart, so no chart switching occurs.
template <typename Real>
FullTrajectory<Real> integrate_full(const HermitianOperator<Real>& h, const ProjectiveState<Real>& initial,
                                    const ExplicitBathSpec<Real>& spec, const BathState<Real>& bath0, Real t_final,
                                    Real sample_dt, const IntegratorConfig<Real>& cfg = {}, FullOptions opts = {}) {
    detail::check_dims(h.matrix(), initial);
    const Index m = initial.dim() - 1;
    if (spec.coordinates() != m) throw DimensionMismatch("bath spec must have one oscillator set per coordinate");
    if (Index(bath0.q.size()) != m || Index(bath0.p.size()) != m)
        throw DimensionMismatch("bath state must have one oscillator set per coordinate");

    // Flattened oscillator tables.
    std::vector<Index> offset(std::size_t(m) + 1, 0);
    for (Index j = 0; j < m; ++j) {
        const auto n = Index(spec.oscillators(j).size());
        if (bath0.q[std::size_t(j)].size() != n || bath0.p[std::size_t(j)].size() != n)
            throw DimensionMismatch("bath state does not match the oscillator count");
        offset[std::size_t(j) + 1] = offset[std::size_t(j)] + n;
    }
    const Index nosc = offset.back();
    RVector<Real> mass(nosc), freq2(nosc), coupling(nosc);
    RVector<Real> counter(m);
    for (Index j = 0; j < m; ++j) {
        const auto& osc = spec.oscillators(j);
        for (std::size_t i = 0; i < osc.size(); ++i) {
            const Index k = offset[std::size_t(j)] + Index(i);
            mass[k] = osc[i].mass;
            freq2[k] = osc[i].frequency * osc[i].frequency;
            coupling[k] = osc[i].coupling;
        }
        counter[j] = opts.counterterm ? spec.counterterm_weight(j) : Real(0);
    }

    // Packed state: [Re x, Im x, q, p].
    const Index dim = 2 * m + 2 * nosc;
    RVector<Real> y0(dim);
    y0.head(m) = initial.coords().real();
    y0.segment(m, m) = initial.coords().imag();
    for (Index j = 0; j < m; ++j) {
        const Index n = offset[std::size_t(j) + 1] - offset[std::size_t(j)];
        y0.segment(2 * m + offset[std::size_t(j)], n) = bath0.q[std::size_t(j)];
        y0.segment(2 * m + nosc + offset[std::size_t(j)], n) = bath0.p[std::size_t(j)];
    }

    const CMatrix<Real> generator = h.angular_frequency_matrix();
    const Index pivot = initial.pivot();
    auto unpack = [&](const RVector<Real>& y) {
        CVector<Real> x(m);
        for (Index j = 0; j < m; ++j) x[j] = Complex<Real>(y[j], y[m + j]);
        return x;
    };

    auto rhs = [&](Real, const RVector<Real>& y) -> RVector<Real> {
        if (!y.allFinite()) return RVector<Real>::Constant(y.size(), std::numeric_limits<Real>::quiet_NaN());
        const ProjectiveState<Real> s(unpack(y), pivot);
        const auto& x = s.coords();
        const auto q = y.segment(2 * m, nosc);
        const auto p = y.segment(2 * m + nosc, nosc);
        CVector<Real> force = classical_energy(generator, s).gradient;
        RVector<Real> x2(m);
        for (Index j = 0; j < m; ++j) {
            x2[j] = std::norm(x[j]);
            const Index n = offset[std::size_t(j) + 1] - offset[std::size_t(j)];
            const Real cq = coupling.segment(offset[std::size_t(j)], n).dot(q.segment(offset[std::size_t(j)], n));
            force[j] += x[j] * (-cq + x2[j] * counter[j]);
        }
        const CVector<Real> xdot = apply_inverse_symplectic(s, force);
        RVector<Real> dy(y.size());
        dy.head(m) = xdot.real();
        dy.segment(m, m) = xdot.imag();
        dy.segment(2 * m, nosc) = p.cwiseQuotient(mass);
        for (Index j = 0; j < m; ++j) {
            const Index n = offset[std::size_t(j) + 1] - offset[std::size_t(j)];
            const Index o = offset[std::size_t(j)];
            dy.segment(2 * m + nosc + o, n) =
                -mass.segment(o, n).cwiseProduct(freq2.segment(o, n)).cwiseProduct(q.segment(o, n)) + coupling.segment(o, n) * x2[j];
        }
        return dy;
    };

    auto unpack_bath = [&](const RVector<Real>& y) {
        BathState<Real> b;
        for (Index j = 0; j < m; ++j) {
            const Index n = offset[std::size_t(j) + 1] - offset[std::size_t(j)];
            b.q.push_back(y.segment(2 * m + offset[std::size_t(j)], n));
            b.p.push_back(y.segment(2 * m + nosc + offset[std::size_t(j)], n));
        }
        return b;
    };

    FullTrajectory<Real> out;
    const Real scale = Real(angular_frequency_scale(h.unit()));
    auto on_sample = [&](Real t, const RVector<Real>& y) {
        ProjectiveState<Real> s(unpack(y), pivot);
        const BathState<Real> b = unpack_bath(y);
        const Real eb = bath_energy(spec, b);
        const Real es = classical_hamiltonian(h, s);
        out.system.times.push_back(t);
        out.system.amplitudes.push_back(from_projective(s));
        out.system.energy.push_back(es);
        out.bath_energy.push_back(eb);
        out.total_energy.push_back(es * scale + eb + interaction_energy(spec, s, b, opts.counterterm));
        out.system.states.push_back(std::move(s));
    };
    RVector<Real> y_last;
    out.system.counts = integrate_on_grid<Real>(
        rhs, y0, uniform_grid(t_final, sample_dt), cfg,
        [&](Real t, const RVector<Real>& y) {
            on_sample(t, y);
            y_last = y;
        },
        [](Real, RVector<Real>&) { return false; });
    out.final_bath = unpack_bath(y_last);
    return out;
}

/// Ohmic oscillator sets whose reduced dynamics approach the Markovian model with
/// constants `gammas`. The one-sided kernel integral must equal 2 gamma_j to
/// reproduce the friction force 2 x^j gamma_j d|x^j|^2/dt, hence the factor 2.
template <typename Real>
ExplicitBathSpec<Real> markovian_equivalent_bath(const MarkovianBathSpec<Real>& bath, Real cutoff, Index n_per_coordinate) {
    std::vector<std::vector<Oscillator<Real>>> sets;
    for (Index j = 0; j < bath.gammas().size(); ++j)
        sets.push_back(discretize_ohmic_bath(Real(2) * bath.gammas()[j], cutoff, n_per_coordinate));
    return ExplicitBathSpec<Real>(std::move(sets));
}

/// Largest eigenvalue gap of H as an angular frequency.
template <typename Real>
Real spectral_width(const HermitianOperator<Real>& h) {
    const Eigen::SelfAdjointEigenSolver<CMatrix<Real>> eig(h.angular_frequency_matrix(), Eigen::EigenvaluesOnly);
    return eig.eigenvalues().maxCoeff() - eig.eigenvalues().minCoeff();
}

} // namespace cpdyn
