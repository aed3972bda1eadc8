#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace symbell {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Base class for all errors thrown by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid argument or violated precondition (bad dimension, negative rate, ...).
struct InvalidArgument : Error {
    explicit InvalidArgument(const std::string& what) : Error(what) {}
};

/// Numerical failure: residual above tolerance, trace drift, imaginary residue.
struct NumericalError : Error {
    explicit NumericalError(const std::string& what) : Error(what) {}
};

/// The steady-state problem has a degenerate null space.
struct DegenerateSteadyState : Error {
    int multiplicity;
    explicit DegenerateSteadyState(int mult)
        : Error("steady state is not unique: null space dimension " + std::to_string(mult)),
          multiplicity(mult) {}
};

/// Operator acting on the symmetric (Dicke) block of n_qubits spins.
/// The matrix is (n_qubits+1) x (n_qubits+1); index k counts spin flips,
/// so k = 0 is the all-up state with S_z eigenvalue +n_qubits/2.
struct CollectiveOperator {
    int n_qubits = 0;
    Matrix mat;

    int dim() const { return n_qubits + 1; }
};

/// Density matrix on the symmetric block: Hermitian, unit trace,
/// positive semidefinite up to a small tolerance.
class SymmetricState {
  public:
    /// Validating constructor. Throws InvalidArgument on bad dimension and
    /// NumericalError when hermiticity / trace / positivity fail.
    static SymmetricState from_matrix(int n_qubits, const Matrix& rho, double psd_tol = 1e-10);

    int n_qubits() const { return n_qubits_; }
    int dim() const { return n_qubits_ + 1; }
    const Matrix& rho() const { return rho_; }

  private:
    SymmetricState(int n, Matrix rho) : n_qubits_(n), rho_(std::move(rho)) {}
    int n_qubits_ = 0;
    Matrix rho_;
};

/// Two-qubit reduced density matrix in the basis |00>, |01>, |10>, |11>.
class TwoQubitState {
  public:
    static TwoQubitState from_matrix(const Eigen::Matrix4cd& rho, double psd_tol = 1e-10);

    const Eigen::Matrix4cd& rho() const { return rho_; }

  private:
    explicit TwoQubitState(const Eigen::Matrix4cd& rho) : rho_(rho) {}
    Eigen::Matrix4cd rho_;
};

/// Trace distance (1/2)||rho - sigma||_1 between two states of equal dimension.
double trace_distance(const SymmetricState& a, const SymmetricState& b);
double trace_distance(const Matrix& a, const Matrix& b);

/// tr(rho^2).
double purity(const SymmetricState& state);

/// tr(op rho); the result of a Hermitian observable is real up to roundoff.
Complex expectation(const Matrix& op, const Matrix& rho);

}  // namespace symbell
