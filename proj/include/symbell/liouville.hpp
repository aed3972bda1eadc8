#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "symbell/types.hpp"

namespace symbell {

/// One GKSL dissipation channel: jump operator J with rate >= 0.
struct Channel {
    Matrix jump;
    double rate = 0.0;
};

/// GKSL generator L[rho] = -i[H, rho] + sum_k rate_k (J rho J+ - (1/2){J+J, rho}).
/// The dense superoperator acts on vec(rho) with column-major stacking.
class Liouvillian {
  public:
    Liouvillian(CollectiveOperator hamiltonian, std::vector<Channel> channels);

    int n_qubits() const { return hamiltonian_.n_qubits; }
    int dim() const { return hamiltonian_.dim(); }
    const CollectiveOperator& hamiltonian() const { return hamiltonian_; }
    const std::vector<Channel>& channels() const { return channels_; }
    const Matrix& superoperator() const { return superop_; }

    /// Apply L to a density matrix directly (used for residual checks).
    Matrix apply(const Matrix& rho) const;

  private:
    CollectiveOperator hamiltonian_;
    std::vector<Channel> channels_;
    Matrix superop_;
};

/// Thermal (Davies) generator derived from H and a coupling operator.
struct DaviesSpec {
    double beta = 1.0;        // inverse temperature, must be > 0
    double base_rate = 0.01;  // gamma_0 in the Ohmic rate function
    /// System side of the coupling; defaults to S_y when unset.
    std::optional<Matrix> coupling;
    /// Bohr frequencies closer than secular_tol_rel * spectral range are merged.
    double secular_tol_rel = 1e-9;
};

/// One Bohr-frequency channel of the Davies construction.
struct BohrChannel {
    double omega = 0.0;  // energy difference, positive for emission
    double rate = 0.0;   // Ohmic rate with detailed balance
    Matrix jump;         // A(omega)
};

/// Jump operators and rates of the Davies generator, one entry per Bohr frequency.
std::vector<BohrChannel> davies_channels(const CollectiveOperator& hamiltonian,
                                         const DaviesSpec& spec);

/// Davies generator: secular jump operators per Bohr frequency with Ohmic
/// detailed-balance rates. Rejects beta <= 0.
Liouvillian davies_generator(const CollectiveOperator& hamiltonian, const DaviesSpec& spec);

/// Generator with explicitly given jump channels.
Liouvillian jump_dissipator(const CollectiveOperator& hamiltonian,
                            const std::vector<Channel>& channels);

/// Ladder operator in the energy eigenbasis of H:
/// J(zeta) = cos(zeta) S~_+ + sin(zeta) S~_-, where S~_± act like S_± on the
/// eigenvectors of H ordered by ascending eigenvalue (phase fixed by making the
/// largest-magnitude component of each eigenvector real positive).
CollectiveOperator rotated_ladder_jump(const CollectiveOperator& hamiltonian, double zeta);

/// Unmonitored measurement of an observable at rate kappa.
struct MeasurementSpec {
    double kappa = 0.0;  // measurement rate, must be >= 0
    /// Measured observable; defaults to S_z when unset.
    std::optional<Matrix> observable;
    /// Observable eigenvalues closer than degeneracy_tol_rel * spectral range
    /// share one eigenprojector.
    double degeneracy_tol_rel = 1e-9;
};

/// Eigenprojectors of the measured observable after degeneracy grouping.
std::vector<Matrix> measurement_projectors(int n_qubits, const MeasurementSpec& spec);

/// L[rho] = -i[H, rho] + kappa (sum_k P_k rho P_k - rho).
Liouvillian measurement_dephasing(const CollectiveOperator& hamiltonian,
                                  const MeasurementSpec& spec);

struct SteadyStateResult {
    SymmetricState state;
    double residual = 0.0;  // max-norm of L[rho]
};

/// Unique steady state as the null vector of the superoperator.
/// Throws DegenerateSteadyState when the null space has dimension > 1 and
/// NumericalError when the residual exceeds 1e-8.
SteadyStateResult steady_state(const Liouvillian& liou);

enum class EvolveMethod {
    EigenDecomposition,  // exp(Lt) through the spectral decomposition of L
    AdaptiveRungeKutta,  // embedded Runge-Kutta with relative tolerance 1e-9
};

struct EvolveResult {
    std::vector<SymmetricState> states;
    std::vector<double> trace_drift;  // |tr rho(t) - 1| before renormalization
};

/// Evolve rho0 to each time in `times` (all >= 0, ascending).
/// Every output is hermitized and trace-renormalized; trace drift beyond 1e-8
/// or an eigenvalue below -1e-8 raises NumericalError.
EvolveResult evolve(const Liouvillian& liou, const SymmetricState& rho0,
                    const std::vector<double>& times,
                    EvolveMethod method = EvolveMethod::EigenDecomposition);

/// Short-time convex-mixture approximation of measurement dephasing:
/// (1 - kappa t) rho0 + kappa t sum_k P_k rho0 P_k.
/// Preconditions: [H, rho0] = 0 within 1e-8 (max-norm) and kappa t <= 0.1.
SymmetricState short_time_mixture(const CollectiveOperator& hamiltonian,
                                  const SymmetricState& rho0, const MeasurementSpec& spec,
                                  double t);

}  // namespace symbell
