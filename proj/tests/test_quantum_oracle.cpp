#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cpdyn/dynamics.hpp"
#include "cpdyn/observables.hpp"
#include "cpdyn/quantum_oracle.hpp"
#include "support.hpp"

using namespace cpdyn;
using namespace cpdyn::testing;

namespace {

HermitianOperator<double> pauli_op(const CMatrix<double>& m) { return HermitianOperator<double>(m); }

AmplitudeVector<double> up() {
    CVector<double> a(2);
    a << 1.0, 0.0;
    return AmplitudeVector<double>(a);
}

} // namespace

TEST_CASE("eigenstate only acquires a phase") {
    for (OracleMethod m : {OracleMethod::Eigendecomposition, OracleMethod::RungeKutta}) {
        const auto traj = integrate_schrodinger(pauli_op(pauli::z<double>()), up(), 5.0, 0.5, oracle_config<double>(), m);
        for (std::size_t i = 0; i < traj.times.size(); ++i) {
            CHECK(std::abs(traj.amplitudes[i][0] - std::polar(1.0, -traj.times[i])) < 1e-9);
            CHECK(std::abs(traj.amplitudes[i][1]) < 1e-12);
        }
    }
}

TEST_CASE("Rabi flopping under sigma_x") {
    for (OracleMethod m : {OracleMethod::Eigendecomposition, OracleMethod::RungeKutta}) {
        const auto traj = integrate_schrodinger(pauli_op(pauli::x<double>()), up(), 6.0, 0.25, oracle_config<double>(), m);
        for (std::size_t i = 0; i < traj.times.size(); ++i)
            CHECK(std::abs(std::norm(traj.amplitudes[i][0]) - std::pow(std::cos(traj.times[i]), 2)) < 1e-9);
    }
}

TEST_CASE("two-qubit reference agrees with the classical flow") {
    CVector<double> a(4);
    a << std::sqrt(0.4), std::sqrt(0.4), 0.0, std::sqrt(0.2);
    const AmplitudeVector<double> a0(a);
    const auto h = two_qubit_hamiltonian<double>({0, 1, 1, 0, 0});
    const auto q = integrate_schrodinger(h, a0, 20.0, 0.05);
    const auto c = integrate<double>(h, to_projective(a0, 3), std::nullopt, 20.0, 0.05);
    REQUIRE(q.times.size() == c.size());
    double err = 0;
    for (std::size_t i = 0; i < c.size(); ++i)
        err = std::max(err, max_abs(populations(c.states[i]) - populations_from_amplitudes(q.amplitudes[i])));
    CHECK(err < 1e-8);
}

TEST_CASE("norm, energy and method agreement on random instances") {
    for (Index n : {2, 3, 5, 7, 12}) {
        const HermitianOperator<double> h(random_hermitian(n));
        const AmplitudeVector<double> a0(random_amplitudes(n));
        const auto eig = integrate_schrodinger(h, a0, 10.0, 0.1, oracle_config<double>(), OracleMethod::Eigendecomposition);
        const auto rk = integrate_schrodinger(h, a0, 10.0, 0.1, oracle_config<double>(), OracleMethod::RungeKutta);
        const double e0 = (a0.amps().adjoint() * h.matrix() * a0.amps())(0, 0).real();
        for (std::size_t i = 0; i < eig.times.size(); ++i) {
            CHECK(std::abs(eig.amplitudes[i].squaredNorm() - 1.0) < 1e-12);
            CHECK(std::abs(rk.amplitudes[i].squaredNorm() - 1.0) < 1e-10);
            const double e = (eig.amplitudes[i].adjoint() * h.matrix() * eig.amplitudes[i])(0, 0).real();
            CHECK(std::abs(e - e0) < 1e-10);
            CHECK((eig.amplitudes[i] - rk.amplitudes[i]).cwiseAbs().maxCoeff() < 1e-8);
        }
    }
}

TEST_CASE("automatic method selection and errors") {
    const HermitianOperator<double> h(random_hermitian(3));
    const AmplitudeVector<double> a0(random_amplitudes(3));
    const auto a = integrate_schrodinger(h, a0, 1.0, 0.5);
    const auto b = integrate_schrodinger(h, a0, 1.0, 0.5, oracle_config<double>(), OracleMethod::Eigendecomposition);
    CHECK(a.amplitudes.back() == b.amplitudes.back());
    CHECK_THROWS_AS(integrate_schrodinger(h, up(), 1.0, 0.5), DimensionMismatch);
}

TEST_CASE("populations from amplitudes") {
    CVector<double> a(4);
    a << std::sqrt(0.4), std::sqrt(0.4), 0.0, std::sqrt(0.2);
    const RVector<double> p = populations_from_amplitudes(AmplitudeVector<double>(a));
    CHECK(std::abs(p[0] - 0.4) < 1e-15);
    CHECK(std::abs(p[1] - 0.4) < 1e-15);
    CHECK(p[2] == 0.0);
    CHECK(std::abs(p[3] - 0.2) < 1e-15);

    CVector<double> basis = CVector<double>::Zero(5);
    basis[2] = 1.0;
    const RVector<double> q = populations_from_amplitudes(AmplitudeVector<double>(basis));
    CHECK(q == RVector<double>::Unit(5, 2));

    CVector<double> half(2);
    half << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
    const RVector<double> r = populations_from_amplitudes(AmplitudeVector<double>(half));
    CHECK(std::abs(r[0] - 0.5) < 1e-15);
    CHECK(std::abs(r[1] - 0.5) < 1e-15);
}
