#include "symbell/symspin.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace symbell {

SpinOperators collective_spin_ops(int n_qubits) {
    if (n_qubits < 1)
        throw InvalidArgument("collective_spin_ops: n_qubits must be >= 1, got " +
                              std::to_string(n_qubits));
    const int d = n_qubits + 1;
    const double s = 0.5 * n_qubits;

    SpinOperators ops;
    ops.n_qubits = n_qubits;
    ops.sz = Matrix::Zero(d, d);
    ops.sm = Matrix::Zero(d, d);
    for (int k = 0; k < d; ++k) {
        const double m = s - k;  // S_z |D_k> = (N/2 - k)|D_k>
        ops.sz(k, k) = m;
        if (k + 1 < d) ops.sm(k + 1, k) = std::sqrt(s * (s + 1.0) - m * (m - 1.0));
    }
    ops.sp = ops.sm.adjoint();
    ops.sx = 0.5 * (ops.sp + ops.sm);
    ops.sy = Complex(0.0, -0.5) * (ops.sp - ops.sm);
    return ops;
}

HamiltonianSpec HamiltonianSpec::lmg(int n_qubits, double coupling, double field) {
    HamiltonianSpec spec;
    spec.kind = Kind::Lmg;
    spec.n_qubits = n_qubits;
    spec.coupling = coupling;
    spec.field = field;
    return spec;
}

HamiltonianSpec HamiltonianSpec::squared_z(int n_qubits, double omega) {
    HamiltonianSpec spec;
    spec.kind = Kind::SquaredZ;
    spec.n_qubits = n_qubits;
    spec.omega = omega;
    return spec;
}

CollectiveOperator build_hamiltonian(const HamiltonianSpec& spec) {
    const SpinOperators ops = collective_spin_ops(spec.n_qubits);
    const double n = spec.n_qubits;
    CollectiveOperator h;
    h.n_qubits = spec.n_qubits;
    switch (spec.kind) {
        case HamiltonianSpec::Kind::Lmg:
            h.mat = (spec.coupling / n) * (ops.sz * ops.sz) - spec.field * ops.sx;
            break;
        case HamiltonianSpec::Kind::SquaredZ: {
            const double shift = spec.omega * (n / 2.0) * (n / 2.0 + 1.0);
            h.mat = -spec.omega * (ops.sz * ops.sz) +
                    shift * Matrix::Identity(spec.n_qubits + 1, spec.n_qubits + 1);
            break;
        }
    }
    return h;
}

SymmetricState pure_state(int n_qubits, const Vector& amplitudes) {
    if (n_qubits < 1) throw InvalidArgument("pure_state: n_qubits must be >= 1");
    if (amplitudes.size() != n_qubits + 1)
        throw InvalidArgument("pure_state: amplitude vector has wrong length");
    const double norm = amplitudes.norm();
    if (norm < 1e-300) throw InvalidArgument("pure_state: zero amplitude vector");
    const Vector psi = amplitudes / norm;
    return SymmetricState::from_matrix(n_qubits, psi * psi.adjoint());
}

SymmetricState dicke_state(int n_qubits, int k) {
    if (n_qubits < 1) throw InvalidArgument("dicke_state: n_qubits must be >= 1");
    if (k < 0 || k > n_qubits)
        throw InvalidArgument("dicke_state: k = " + std::to_string(k) + " outside [0, " +
                              std::to_string(n_qubits) + "]");
    Vector psi = Vector::Zero(n_qubits + 1);
    psi(k) = 1.0;
    return pure_state(n_qubits, psi);
}

SymmetricState dicke_superposition(int n_qubits, int k1, int k2) {
    if (n_qubits < 1) throw InvalidArgument("dicke_superposition: n_qubits must be >= 1");
    if (k1 < 0 || k1 > n_qubits || k2 < 0 || k2 > n_qubits || k1 == k2)
        throw InvalidArgument("dicke_superposition: need distinct k1, k2 in [0, N]");
    Vector psi = Vector::Zero(n_qubits + 1);
    psi(k1) = 1.0;
    psi(k2) = 1.0;
    return pure_state(n_qubits, psi);
}

SymmetricState gaussian_dicke_state(int n_qubits, double sigma2) {
    if (n_qubits < 1) throw InvalidArgument("gaussian_dicke_state: n_qubits must be >= 1");
    if (!(sigma2 > 0.0))
        throw InvalidArgument("gaussian_dicke_state: sigma2 must be > 0, got " +
                              std::to_string(sigma2));
    const double center = 0.5 * n_qubits;
    Vector psi(n_qubits + 1);
    for (int k = 0; k <= n_qubits; ++k) {
        const double dk = k - center;
        psi(k) = std::exp(-dk * dk / (4.0 * sigma2));
    }
    return pure_state(n_qubits, psi);
}

SymmetricState gibbs_state(const CollectiveOperator& hamiltonian, double beta) {
    const Matrix& h = hamiltonian.mat;
    if (h.rows() != h.cols() || h.rows() != hamiltonian.dim())
        throw InvalidArgument("gibbs_state: Hamiltonian matrix has wrong shape");
    if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
        throw InvalidArgument("gibbs_state: Hamiltonian is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    const RealVector& e = es.eigenvalues();
    // Shift by the ground energy so large beta stays finite.
    RealVector w = (-beta * (e.array() - e.minCoeff())).exp();
    w /= w.sum();
    const Matrix rho =
        es.eigenvectors() * w.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
    return SymmetricState::from_matrix(hamiltonian.n_qubits, rho);
}

}  // namespace symbell
