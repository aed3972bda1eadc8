#pragma once

#include "symbell/types.hpp"

namespace symbell {

/// Two-qubit marginal of a permutation-invariant N-qubit state, in the basis
/// |00>, |01>, |10>, |11>. Requires n_qubits >= 2.
TwoQubitState reduce_two_qubit(const SymmetricState& state);

/// Dichotomic single-qubit observable cos(angle) sigma_z + sin(angle) sigma_x.
Eigen::Matrix2cd measurement_observable(double angle);

/// Measurement angles of the two settings (same on every site).
struct MeasurementSettings {
    double phi = 0.0;    // setting 0
    double theta = 0.0;  // setting 1
};

/// Two-body Bell operator acting on the two-qubit marginal:
/// B2 = 2N 1x1 - N (M0 x 1 + 1 x M0)
///      + (N(N-1)/2) [M0 x M0 + M1 x M1 - M0 x M1 - M1 x M0].
/// The classical bound is tr[B2 rho2] >= 0 for local models.
Eigen::Matrix4cd bell_operator(int n_qubits, const MeasurementSettings& settings);

/// q_v = tr[B2 rho2]; negative values certify non-locality.
double bell_value(const SymmetricState& state, const MeasurementSettings& settings);
double bell_value(int n_qubits, const TwoQubitState& reduced,
                  const MeasurementSettings& settings);

struct BellReport {
    double q_v = 0.0;
    MeasurementSettings settings;  // minimizing angles, wrapped into [0, 2pi)
    bool is_nonlocal = false;      // q_v < 0
};

/// Minimize q_v over both angles: 64x64 grid scan on [0, 2pi)^2 followed by
/// Nelder-Mead refinement until the simplex diameter is below 1e-8.
/// Deterministic; grid ties are broken lexicographically in (phi, theta).
BellReport optimize_violation(const SymmetricState& state);
BellReport optimize_violation(int n_qubits, const TwoQubitState& reduced);

}  // namespace symbell
