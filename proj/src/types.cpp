#include "symbell/types.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace symbell {

namespace {

void check_state_matrix(const Matrix& rho, int dim, double psd_tol, const char* kind) {
    if (rho.rows() != dim || rho.cols() != dim)
        throw InvalidArgument(std::string(kind) + ": expected a " + std::to_string(dim) + "x" +
                              std::to_string(dim) + " matrix, got " + std::to_string(rho.rows()) +
                              "x" + std::to_string(rho.cols()));
    const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    if (herm > 1e-10)
        throw NumericalError(std::string(kind) + ": matrix not Hermitian, max deviation " +
                             std::to_string(herm));
    const double trace_err = std::abs(rho.trace() - Complex(1.0, 0.0));
    if (trace_err > 1e-10)
        throw NumericalError(std::string(kind) + ": trace deviates from 1 by " +
                             std::to_string(trace_err));
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()),
                                             Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < -psd_tol)
        throw NumericalError(std::string(kind) + ": negative eigenvalue " +
                             std::to_string(min_eig));
}

}  // namespace

SymmetricState SymmetricState::from_matrix(int n_qubits, const Matrix& rho, double psd_tol) {
    if (n_qubits < 1) throw InvalidArgument("SymmetricState: n_qubits must be >= 1");
    check_state_matrix(rho, n_qubits + 1, psd_tol, "SymmetricState");
    return SymmetricState(n_qubits, 0.5 * (rho + rho.adjoint()));
}

TwoQubitState TwoQubitState::from_matrix(const Eigen::Matrix4cd& rho, double psd_tol) {
    Matrix m = rho;
    check_state_matrix(m, 4, psd_tol, "TwoQubitState");
    return TwoQubitState(0.5 * (rho + rho.adjoint()));
}

double trace_distance(const Matrix& a, const Matrix& b) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(a - b, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double trace_distance(const SymmetricState& a, const SymmetricState& b) {
    if (a.n_qubits() != b.n_qubits())
        throw InvalidArgument("trace_distance: states act on different qubit counts");
    return trace_distance(a.rho(), b.rho());
}

double purity(const SymmetricState& state) {
    return (state.rho() * state.rho()).trace().real();
}

Complex expectation(const Matrix& op, const Matrix& rho) {
    if (op.rows() != rho.rows() || op.cols() != rho.cols())
        throw InvalidArgument("expectation: dimension mismatch");
    return (op * rho).trace();
}

}  // namespace symbell
