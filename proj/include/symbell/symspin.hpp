#pragma once

#include "symbell/types.hpp"

namespace symbell {

/// Collective spin operators restricted to the maximum-spin (Dicke) block.
/// All matrices are (n_qubits+1) x (n_qubits+1).
struct SpinOperators {
    int n_qubits = 0;
    Matrix sx, sy, sz;
    Matrix sp, sm;  // raising / lowering, sp = sx + i sy
};

/// Build S_x, S_y, S_z, S_+, S_- for the spin-N/2 block.
/// Throws InvalidArgument for n_qubits < 1.
SpinOperators collective_spin_ops(int n_qubits);

struct HamiltonianSpec {
    enum class Kind { Lmg, SquaredZ };

    Kind kind = Kind::Lmg;
    int n_qubits = 0;
    double coupling = 1.0;  // J  (Lmg)
    double field = 0.0;     // h  (Lmg)
    double omega = 1.0;     // w  (SquaredZ)

    /// H = (J/N) S_z^2 - h S_x
    static HamiltonianSpec lmg(int n_qubits, double coupling, double field);
    /// H = -w S_z^2 + (w N/2)(N/2 + 1) I
    static HamiltonianSpec squared_z(int n_qubits, double omega);
};

CollectiveOperator build_hamiltonian(const HamiltonianSpec& spec);

/// Projector onto the Dicke state with k spins flipped, 0 <= k <= n_qubits.
SymmetricState dicke_state(int n_qubits, int k);

/// Pure state from an amplitude vector in the Dicke basis (normalized internally).
SymmetricState pure_state(int n_qubits, const Vector& amplitudes);

/// Equal superposition (|k1> + |k2>)/sqrt(2).
SymmetricState dicke_superposition(int n_qubits, int k1, int k2);

/// Pure Gaussian superposition of Dicke states centred at k = N/2:
/// psi_k proportional to exp(-(k - N/2)^2 / (4 sigma2)). Requires sigma2 > 0.
SymmetricState gaussian_dicke_state(int n_qubits, double sigma2);

/// exp(-beta H)/Z via eigendecomposition. beta = 0 gives the maximally mixed state.
SymmetricState gibbs_state(const CollectiveOperator& hamiltonian, double beta);

}  // namespace symbell
