#pragma once

#include "symbell/nonlocality.hpp"
#include "symbell/types.hpp"

namespace symbell {

/// Wootters concurrence of a two-qubit state:
/// C = max(0, l1 - l2 - l3 - l4) with l_i the descending square roots of the
/// eigenvalues of rho (sy x sy) rho* (sy x sy).
double concurrence(const TwoQubitState& state);

/// Spin-squeezing parameter xi^2 = N (Delta S_z)^2 / (<S_x>^2 + <S_y>^2).
/// `defined` is false when the transverse polarization vanishes
/// (denominator < 1e-12); `value` is meaningless in that case.
struct SpinSqueezing {
    double value = 0.0;
    bool defined = false;
};

SpinSqueezing spin_squeezing(const SymmetricState& state);

/// Both witnesses evaluated on one state.
struct WitnessReport {
    double concurrence = 0.0;
    SpinSqueezing squeezing;
    bool entangled_by_concurrence = false;  // concurrence > 0
    bool entangled_by_squeezing = false;    // defined and value < 1
};

WitnessReport witnesses(const SymmetricState& state);

}  // namespace symbell
