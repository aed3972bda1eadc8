#include "symbell/entanglement.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "symbell/symspin.hpp"

namespace symbell {

double concurrence(const TwoQubitState& state) {
    const Eigen::Matrix4cd& rho = state.rho();
    Eigen::Matrix4cd yy = Eigen::Matrix4cd::Zero();  // sigma_y x sigma_y
    yy(0, 3) = -1.0;
    yy(1, 2) = 1.0;
    yy(2, 1) = 1.0;
    yy(3, 0) = -1.0;
    const Eigen::Matrix4cd r = rho * yy * rho.conjugate() * yy;

    Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(r, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success)
        throw NumericalError("concurrence: eigendecomposition failed");
    std::array<double, 4> lambda{};
    for (int i = 0; i < 4; ++i) {
        const Complex ev = es.eigenvalues()(i);
        if (std::abs(ev.imag()) > 1e-8 || ev.real() < -1e-10)
            throw NumericalError("concurrence: eigenvalue of rho rho~ outside [0, inf): (" +
                                 std::to_string(ev.real()) + ", " + std::to_string(ev.imag()) +
                                 "i)");
        lambda[i] = std::sqrt(std::max(0.0, ev.real()));
    }
    std::sort(lambda.begin(), lambda.end(), std::greater<>());
    return std::max(0.0, lambda[0] - lambda[1] - lambda[2] - lambda[3]);
}

SpinSqueezing spin_squeezing(const SymmetricState& state) {
    const SpinOperators ops = collective_spin_ops(state.n_qubits());
    const Matrix& rho = state.rho();
    const double sx = expectation(ops.sx, rho).real();
    const double sy = expectation(ops.sy, rho).real();
    const double sz = expectation(ops.sz, rho).real();
    const double sz2 = expectation(ops.sz * ops.sz, rho).real();

    const double denom = sx * sx + sy * sy;
    SpinSqueezing xi;
    if (denom < 1e-12) return xi;  // transverse polarization vanishes
    xi.defined = true;
    xi.value = state.n_qubits() * (sz2 - sz * sz) / denom;
    return xi;
}

WitnessReport witnesses(const SymmetricState& state) {
    WitnessReport report;
    report.concurrence = concurrence(reduce_two_qubit(state));
    report.squeezing = spin_squeezing(state);
    report.entangled_by_concurrence = report.concurrence > 0.0;
    report.entangled_by_squeezing = report.squeezing.defined && report.squeezing.value < 1.0;
    return report;
}

}  // namespace symbell
