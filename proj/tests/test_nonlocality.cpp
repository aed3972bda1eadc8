#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "oracle.hpp"
#include "symbell/nonlocality.hpp"
#include "symbell/symspin.hpp"

using namespace symbell;

namespace {

double max_abs(const Eigen::Matrix4cd& m) { return m.cwiseAbs().maxCoeff(); }

SymmetricState random_state(int n, std::mt19937& rng) {
    return SymmetricState::from_matrix(n, oracle::random_density(n + 1, rng));
}

}  // namespace

TEST_CASE("two-qubit reduction agrees with the brute-force partial trace") {
    std::mt19937 rng(81001);
    for (int n = 2; n <= 6; ++n) {
        for (int trial = 0; trial < 20; ++trial) {
            const SymmetricState rho = random_state(n, rng);
            const Eigen::Matrix4cd direct = reduce_two_qubit(rho).rho();
            const Eigen::Matrix4cd brute =
                oracle::partial_trace_two(oracle::embed_full(rho), n);
            CHECK(max_abs(direct - brute) < 1e-10);
        }
    }
}

TEST_CASE("marginals of extremal Dicke states") {
    for (int n = 2; n <= 8; ++n) {
        const Eigen::Matrix4cd rho2 = reduce_two_qubit(dicke_state(n, 0)).rho();
        Eigen::Matrix4cd expected = Eigen::Matrix4cd::Zero();
        expected(0, 0) = 1.0;
        CHECK(max_abs(rho2 - expected) < 1e-14);
    }

    // |D^2_1> is the triplet Bell state (|01> + |10>)/sqrt(2).
    const Eigen::Matrix4cd bell = reduce_two_qubit(dicke_state(2, 1)).rho();
    Eigen::Matrix4cd expected = Eigen::Matrix4cd::Zero();
    expected(1, 1) = expected(1, 2) = expected(2, 1) = expected(2, 2) = 0.5;
    CHECK(max_abs(bell - expected) < 1e-14);

    // Half-excited four-qubit Dicke state against the brute-force route.
    const SymmetricState d42 = dicke_state(4, 2);
    CHECK(max_abs(reduce_two_qubit(d42).rho() -
                  oracle::partial_trace_two(oracle::embed_full(d42), 4)) < 1e-12);
}

TEST_CASE("reduction is trace preserving and linear") {
    std::mt19937 rng(81002);
    const SymmetricState a = random_state(5, rng);
    const SymmetricState b = random_state(5, rng);
    CHECK(std::abs(reduce_two_qubit(a).rho().trace().real() - 1.0) < 1e-12);

    const double w = 0.3;
    const SymmetricState mix =
        SymmetricState::from_matrix(5, w * a.rho() + (1.0 - w) * b.rho());
    const Eigen::Matrix4cd lhs = reduce_two_qubit(mix).rho();
    const Eigen::Matrix4cd rhs =
        w * reduce_two_qubit(a).rho() + (1.0 - w) * reduce_two_qubit(b).rho();
    CHECK(max_abs(lhs - rhs) < 1e-12);

    CHECK_THROWS_AS(reduce_two_qubit(dicke_state(1, 0)), InvalidArgument);
}

TEST_CASE("dichotomic observable geometry") {
    const Eigen::Matrix2cd mz = measurement_observable(0.0);
    CHECK(std::abs(mz(0, 0).real() - 1.0) < 1e-15);
    CHECK(std::abs(mz(1, 1).real() + 1.0) < 1e-15);
    const Eigen::Matrix2cd mx = measurement_observable(M_PI / 2.0);
    CHECK(std::abs(mx(0, 1).real() - 1.0) < 1e-15);

    std::mt19937 rng(81003);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    for (int i = 0; i < 25; ++i) {
        const Eigen::Matrix2cd m = measurement_observable(angle(rng));
        CHECK((m * m - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-14);
        CHECK((m - m.adjoint()).cwiseAbs().maxCoeff() < 1e-15);
    }
}

TEST_CASE("Bell operator structure") {
    const int n = 6;
    // Equal settings cancel the two-body bracket.
    const Eigen::Matrix4cd b = bell_operator(n, {0.9, 0.9});
    const Eigen::Matrix2cd m0 = measurement_observable(0.9);
    const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
    Eigen::Matrix4cd expected = 2.0 * n * Eigen::Matrix4cd::Identity();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            expected.block<2, 2>(2 * i, 2 * j) -= static_cast<double>(n) * (m0(i, j) * id);
            if (i == j) expected.block<2, 2>(2 * i, 2 * j) -= static_cast<double>(n) * m0;
        }
    CHECK(max_abs(b - expected) < 1e-12);
    CHECK(max_abs(b - b.adjoint()) < 1e-14);

    // Fully aligned product state at phi = theta = 0 sits exactly on the bound.
    Eigen::Matrix4cd up = Eigen::Matrix4cd::Zero();
    up(0, 0) = 1.0;
    CHECK(std::abs((bell_operator(n, {0.0, 0.0}) * up).trace().real()) < 1e-13);

    // Maximally mixed marginal gives 2N for any settings.
    const Eigen::Matrix4cd mixed = 0.25 * Eigen::Matrix4cd::Identity();
    CHECK((bell_operator(n, {1.1, 2.3}) * mixed).trace().real() ==
          doctest::Approx(2.0 * n).epsilon(1e-12));
}

TEST_CASE("Bell value matches the full-space correlator sum") {
    std::mt19937 rng(81004);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    for (int n = 2; n <= 6; ++n) {
        for (int trial = 0; trial < 10; ++trial) {
            const SymmetricState rho = random_state(n, rng);
            const Matrix rho_full = oracle::embed_full(rho);
            for (int a = 0; a < 4; ++a) {
                const double phi = angle(rng), theta = angle(rng);
                const double direct = bell_value(rho, {phi, theta});
                const double brute =
                    (oracle::bell_operator_full(n, phi, theta) * rho_full).trace().real();
                CHECK(std::abs(direct - brute) < 1e-9);
            }
        }
    }
}

TEST_CASE("Bell value is covariant under a collective z rotation") {
    std::mt19937 rng(81005);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    const int n = 7;
    const SpinOperators ops = collective_spin_ops(n);
    const Matrix u = oracle::unitary_exp(ops.sz, M_PI);  // exp(-i pi S_z)
    for (int trial = 0; trial < 10; ++trial) {
        const SymmetricState rho = random_state(n, rng);
        const SymmetricState rotated =
            SymmetricState::from_matrix(n, u * rho.rho() * u.adjoint());
        const double phi = angle(rng), theta = angle(rng);
        CHECK(bell_value(rho, {phi, theta}) ==
              doctest::Approx(bell_value(rotated, {-phi, -theta})).epsilon(1e-10));
    }
}

TEST_CASE("aligned product states never violate") {
    const SymmetricState product = dicke_state(8, 0);
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j)
            CHECK(bell_value(product, {i * M_PI / 5.0, j * M_PI / 5.0}) >= -1e-10);
}

TEST_CASE("optimizer on the maximally mixed state reports the trivial bound") {
    const int n = 5;
    const SymmetricState mixed =
        SymmetricState::from_matrix(n, Matrix::Identity(n + 1, n + 1) / (n + 1.0));
    const BellReport report = optimize_violation(mixed);
    CHECK(report.q_v == doctest::Approx(2.0 * n).epsilon(1e-10));
    CHECK(!report.is_nonlocal);
}

TEST_CASE("optimizer result dominates every sampled setting") {
    std::mt19937 rng(81006);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    const SymmetricState rho = random_state(6, rng);
    const BellReport report = optimize_violation(rho);
    CHECK(report.settings.phi >= 0.0);
    CHECK(report.settings.phi < 2.0 * M_PI);
    CHECK(report.settings.theta >= 0.0);
    CHECK(report.settings.theta < 2.0 * M_PI);
    CHECK(bell_value(rho, report.settings) == doctest::Approx(report.q_v).epsilon(1e-9));
    for (int i = 0; i < 50; ++i)
        CHECK(report.q_v <= bell_value(rho, {angle(rng), angle(rng)}) + 1e-12);
}

TEST_CASE("optimizer is deterministic") {
    std::mt19937 rng(81007);
    const SymmetricState rho = random_state(6, rng);
    const BellReport a = optimize_violation(rho);
    const BellReport b = optimize_violation(rho);
    CHECK(a.q_v == b.q_v);
    CHECK(a.settings.phi == b.settings.phi);
    CHECK(a.settings.theta == b.settings.theta);
}

TEST_CASE("fully polarized Dicke state sits at the degenerate-settings minimum") {
    const BellReport report = optimize_violation(dicke_state(8, 0));
    CHECK(std::abs(report.q_v) < 1e-9);
    CHECK(report.q_v >= -1e-10);
    CHECK(!report.is_nonlocal);
}

TEST_CASE("a violating ground state breaks the positive partial transpose") {
    // Ground state of the quadratic-plus-field model in the squeezed phase.
    // The violation window closes above h ~ 0.1 at this size, so stay inside it.
    const CollectiveOperator h = build_hamiltonian(HamiltonianSpec::lmg(8, 1.0, 0.05));
    Eigen::SelfAdjointEigenSolver<Matrix> es(h.mat);
    const SymmetricState ground = pure_state(8, es.eigenvectors().col(0));
    const BellReport report = optimize_violation(ground);
    REQUIRE(report.is_nonlocal);

    // Partial transpose on the second qubit.
    const Eigen::Matrix4cd rho2 = reduce_two_qubit(ground).rho();
    Eigen::Matrix4cd pt;
    for (int i0 = 0; i0 < 2; ++i0)
        for (int i1 = 0; i1 < 2; ++i1)
            for (int j0 = 0; j0 < 2; ++j0)
                for (int j1 = 0; j1 < 2; ++j1)
                    pt(2 * i0 + i1, 2 * j0 + j1) = rho2(2 * i0 + j1, 2 * j0 + i1);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> pt_es(pt, Eigen::EigenvaluesOnly);
    CHECK(pt_es.eigenvalues().minCoeff() < -1e-8);
}
