#include "symbell/liouville.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_odeiv2.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <mutex>
#include <unsupported/Eigen/KroneckerProduct>

#include "symbell/symspin.hpp"

namespace symbell {

namespace {

void check_hamiltonian(const CollectiveOperator& h, const char* where) {
    if (h.n_qubits < 1)
        throw InvalidArgument(std::string(where) + ": Hamiltonian has n_qubits < 1");
    if (h.mat.rows() != h.dim() || h.mat.cols() != h.dim())
        throw InvalidArgument(std::string(where) + ": Hamiltonian matrix has wrong shape");
    if ((h.mat - h.mat.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
        throw InvalidArgument(std::string(where) + ": Hamiltonian is not Hermitian");
}

/// Partition sorted eigenvalues into groups separated by gaps larger than tol.
/// Returns one (first, last] index range per group.
std::vector<std::pair<int, int>> group_sorted(const RealVector& vals, double tol) {
    std::vector<std::pair<int, int>> groups;
    int start = 0;
    for (int i = 1; i <= vals.size(); ++i) {
        if (i == vals.size() || vals(i) - vals(i - 1) > tol) {
            groups.emplace_back(start, i);
            start = i;
        }
    }
    return groups;
}

double grouping_tol(const RealVector& eigenvalues, double rel_tol) {
    const double range = eigenvalues.maxCoeff() - eigenvalues.minCoeff();
    const double scale = std::max(eigenvalues.cwiseAbs().maxCoeff(), 1.0);
    // Merge splittings at the roundoff level even when the spectral range vanishes.
    return std::max(rel_tol * range, 1e-12 * scale);
}

Matrix vec_to_matrix(const Vector& v, int d) {
    return Eigen::Map<const Matrix>(v.data(), d, d);
}

Vector matrix_to_vec(const Matrix& m) {
    return Eigen::Map<const Vector>(m.data(), m.size());
}

std::once_flag gsl_handler_flag;

struct RhsParams {
    const Liouvillian* liou;
    int dim;
};

int lindblad_rhs(double /*t*/, const double y[], double dydt[], void* params) {
    const auto* p = static_cast<const RhsParams*>(params);
    const int d2 = p->dim * p->dim;
    Eigen::Map<const Vector> rho_vec(reinterpret_cast<const Complex*>(y), d2);
    Eigen::Map<Vector> out(reinterpret_cast<Complex*>(dydt), d2);
    // One dense matrix-vector product beats the channel-by-channel form once
    // the generator carries many jump operators (a Davies generator has one
    // per Bohr frequency).
    out.noalias() = p->liou->superoperator() * rho_vec;
    return GSL_SUCCESS;
}

}  // namespace

Liouvillian::Liouvillian(CollectiveOperator hamiltonian, std::vector<Channel> channels)
    : hamiltonian_(std::move(hamiltonian)), channels_(std::move(channels)) {
    check_hamiltonian(hamiltonian_, "Liouvillian");
    const int d = hamiltonian_.dim();
    for (std::size_t k = 0; k < channels_.size(); ++k) {
        const Channel& ch = channels_[k];
        if (ch.jump.rows() != d || ch.jump.cols() != d)
            throw InvalidArgument("Liouvillian: channel " + std::to_string(k) +
                                  " has a jump operator of wrong dimension");
        if (!(ch.rate >= 0.0))
            throw InvalidArgument("Liouvillian: channel " + std::to_string(k) +
                                  " has negative rate " + std::to_string(ch.rate));
    }

    const Matrix id = Matrix::Identity(d, d);
    superop_ = Complex(0.0, -1.0) * (Eigen::kroneckerProduct(id, hamiltonian_.mat) -
                                     Eigen::kroneckerProduct(hamiltonian_.mat.transpose(), id));
    for (const Channel& ch : channels_) {
        const Matrix m = ch.jump.adjoint() * ch.jump;
        superop_ += ch.rate * (Eigen::kroneckerProduct(ch.jump.conjugate(), ch.jump) -
                               0.5 * Eigen::kroneckerProduct(id, m) -
                               0.5 * Eigen::kroneckerProduct(m.transpose(), id))
                        .eval();
    }
}

Matrix Liouvillian::apply(const Matrix& rho) const {
    const Matrix& h = hamiltonian_.mat;
    Matrix out = Complex(0.0, -1.0) * (h * rho - rho * h);
    for (const Channel& ch : channels_) {
        const Matrix jr = ch.jump * rho;
        const Matrix m = ch.jump.adjoint() * ch.jump;
        out += ch.rate * (jr * ch.jump.adjoint() - 0.5 * (m * rho + rho * m));
    }
    return out;
}

std::vector<BohrChannel> davies_channels(const CollectiveOperator& hamiltonian,
                                         const DaviesSpec& spec) {
    check_hamiltonian(hamiltonian, "davies_generator");
    if (!(spec.beta > 0.0))
        throw InvalidArgument("davies_generator: beta must be > 0 (the Ohmic rate at zero "
                              "frequency diverges otherwise), got " +
                              std::to_string(spec.beta));
    if (!(spec.base_rate >= 0.0))
        throw InvalidArgument("davies_generator: base_rate must be >= 0");

    const int d = hamiltonian.dim();
    Matrix coupling;
    if (spec.coupling) {
        coupling = *spec.coupling;
        if (coupling.rows() != d || coupling.cols() != d)
            throw InvalidArgument("davies_generator: coupling operator has wrong dimension");
        if ((coupling - coupling.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
            throw InvalidArgument("davies_generator: coupling operator is not Hermitian");
    } else {
        coupling = collective_spin_ops(hamiltonian.n_qubits).sy;
    }

    Eigen::SelfAdjointEigenSolver<Matrix> es(hamiltonian.mat);
    const RealVector& energy = es.eigenvalues();
    const Matrix& vecs = es.eigenvectors();
    const double tol = grouping_tol(energy, spec.secular_tol_rel);
    const auto groups = group_sorted(energy, tol);

    // Eigenprojectors and mean energies per degenerate group.
    std::vector<Matrix> projectors;
    std::vector<double> eps;
    projectors.reserve(groups.size());
    for (const auto& [first, last] : groups) {
        const auto block = vecs.middleCols(first, last - first);
        projectors.push_back(block * block.adjoint());
        eps.push_back(energy.segment(first, last - first).mean());
    }

    // Collect transition operators by Bohr frequency omega = eps_source - eps_target.
    struct Transition {
        double omega;
        Matrix op;
    };
    std::vector<Transition> transitions;
    const int n_groups = static_cast<int>(groups.size());
    for (int a = 0; a < n_groups; ++a) {
        for (int b = 0; b < n_groups; ++b) {
            Matrix op = projectors[a] * coupling * projectors[b];
            if (op.cwiseAbs().maxCoeff() < 1e-14) continue;
            transitions.push_back({eps[b] - eps[a], std::move(op)});
        }
    }
    std::sort(transitions.begin(), transitions.end(),
              [](const Transition& x, const Transition& y) { return x.omega < y.omega; });

    // Ohmic spectral density with detailed balance: gamma(-w) = exp(-beta w) gamma(w).
    const auto rate_of = [&](double omega) {
        const double x = spec.beta * omega;
        if (omega > tol) return spec.base_rate * omega * (1.0 + 1.0 / std::expm1(x));
        if (omega < -tol) return spec.base_rate * (-omega) * (1.0 / std::expm1(-x));
        return spec.base_rate / spec.beta;
    };

    std::vector<BohrChannel> channels;
    std::size_t start = 0;
    while (start < transitions.size()) {
        std::size_t stop = start + 1;
        while (stop < transitions.size() &&
               transitions[stop].omega - transitions[stop - 1].omega <= tol)
            ++stop;
        BohrChannel ch;
        double omega_sum = 0.0;
        ch.jump = Matrix::Zero(d, d);
        for (std::size_t i = start; i < stop; ++i) {
            omega_sum += transitions[i].omega;
            ch.jump += transitions[i].op;
        }
        ch.omega = omega_sum / static_cast<double>(stop - start);
        ch.rate = rate_of(ch.omega);
        channels.push_back(std::move(ch));
        start = stop;
    }
    return channels;
}

Liouvillian davies_generator(const CollectiveOperator& hamiltonian, const DaviesSpec& spec) {
    std::vector<Channel> channels;
    for (auto& bc : davies_channels(hamiltonian, spec))
        channels.push_back({std::move(bc.jump), bc.rate});
    return Liouvillian(hamiltonian, std::move(channels));
}

Liouvillian jump_dissipator(const CollectiveOperator& hamiltonian,
                            const std::vector<Channel>& channels) {
    return Liouvillian(hamiltonian, channels);
}

CollectiveOperator rotated_ladder_jump(const CollectiveOperator& hamiltonian, double zeta) {
    check_hamiltonian(hamiltonian, "rotated_ladder_jump");
    Eigen::SelfAdjointEigenSolver<Matrix> es(hamiltonian.mat);
    Matrix v = es.eigenvectors();  // columns ascending in eigenvalue
    // Fix each eigenvector's phase: largest-magnitude component real positive.
    for (int j = 0; j < v.cols(); ++j) {
        int imax = 0;
        double amax = -1.0;
        for (int i = 0; i < v.rows(); ++i) {
            const double a = std::abs(v(i, j));
            if (a > amax) {
                amax = a;
                imax = i;
            }
        }
        v.col(j) *= std::conj(v(imax, j)) / amax;
    }
    const SpinOperators ops = collective_spin_ops(hamiltonian.n_qubits);
    CollectiveOperator jump;
    jump.n_qubits = hamiltonian.n_qubits;
    // Ladder in the energy basis: acts like S_+/S_- on the eigenvectors of H.
    jump.mat = v * (std::cos(zeta) * ops.sp + std::sin(zeta) * ops.sm) * v.adjoint();
    return jump;
}

std::vector<Matrix> measurement_projectors(int n_qubits, const MeasurementSpec& spec) {
    if (n_qubits < 1) throw InvalidArgument("measurement_projectors: n_qubits must be >= 1");
    const int d = n_qubits + 1;
    Matrix obs;
    if (spec.observable) {
        obs = *spec.observable;
        if (obs.rows() != d || obs.cols() != d)
            throw InvalidArgument("measurement_dephasing: observable has wrong dimension");
        if ((obs - obs.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
            throw InvalidArgument("measurement_dephasing: observable is not Hermitian");
    } else {
        obs = collective_spin_ops(n_qubits).sz;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(obs);
    const double tol = grouping_tol(es.eigenvalues(), spec.degeneracy_tol_rel);
    std::vector<Matrix> projectors;
    for (const auto& [first, last] : group_sorted(es.eigenvalues(), tol)) {
        const auto block = es.eigenvectors().middleCols(first, last - first);
        projectors.push_back(block * block.adjoint());
    }
    return projectors;
}

Liouvillian measurement_dephasing(const CollectiveOperator& hamiltonian,
                                  const MeasurementSpec& spec) {
    check_hamiltonian(hamiltonian, "measurement_dephasing");
    if (!(spec.kappa >= 0.0))
        throw InvalidArgument("measurement_dephasing: kappa must be >= 0, got " +
                              std::to_string(spec.kappa));
    // sum_k P_k rho P_k - rho is the GKSL dissipator of the projector set.
    std::vector<Channel> channels;
    for (auto& p : measurement_projectors(hamiltonian.n_qubits, spec))
        channels.push_back({std::move(p), spec.kappa});
    return Liouvillian(hamiltonian, std::move(channels));
}

SteadyStateResult steady_state(const Liouvillian& liou) {
    const int d = liou.dim();
    Eigen::ComplexEigenSolver<Matrix> es(liou.superoperator());
    if (es.info() != Eigen::Success)
        throw NumericalError("steady_state: superoperator eigendecomposition failed");
    const RealVector moduli = es.eigenvalues().cwiseAbs();
    const double radius = moduli.maxCoeff();
    const double null_tol = 1e-10 * std::max(1.0, radius);

    int multiplicity = 0;
    Eigen::Index imin = 0;
    moduli.minCoeff(&imin);
    for (Eigen::Index i = 0; i < moduli.size(); ++i)
        if (moduli(i) < null_tol) ++multiplicity;
    if (multiplicity > 1) throw DegenerateSteadyState(multiplicity);
    if (moduli(imin) > null_tol)
        throw NumericalError("steady_state: no eigenvalue within " + std::to_string(null_tol) +
                             " of zero (smallest modulus " + std::to_string(moduli(imin)) + ")");

    Matrix rho = vec_to_matrix(es.eigenvectors().col(imin), d);
    // Remove the arbitrary global phase before hermitizing.
    const Complex tr = rho.trace();
    if (std::abs(tr) < 1e-10 * rho.cwiseAbs().maxCoeff() * d)
        throw NumericalError("steady_state: stationary vector is traceless");
    rho *= std::conj(tr) / std::abs(tr);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    rho /= rho.trace().real();

    const double residual = liou.apply(rho).cwiseAbs().maxCoeff();
    if (residual > 1e-8)
        throw NumericalError("steady_state: residual " + std::to_string(residual) +
                             " exceeds 1e-8");
    return {SymmetricState::from_matrix(liou.n_qubits(), rho), residual};
}

namespace {

SymmetricState postprocess_evolved(const Liouvillian& liou, Matrix rho, double* drift_out) {
    rho = 0.5 * (rho + rho.adjoint()).eval();
    const double tr = rho.trace().real();
    const double drift = std::abs(tr - 1.0);
    if (drift > 1e-8)
        throw NumericalError("evolve: trace drift " + std::to_string(drift) + " exceeds 1e-8");
    rho /= tr;
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < -1e-8)
        throw NumericalError("evolve: state eigenvalue " + std::to_string(min_eig) +
                             " below -1e-8");
    if (min_eig < 0.0) {
        // Negatives this small are integrator noise, and the state type
        // requires eigenvalues above -1e-10, so they are clipped out here.
        const Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(0.0);
        rho = es.eigenvectors() * clipped.cast<Complex>().asDiagonal() *
              es.eigenvectors().adjoint();
        rho = 0.5 * (rho + rho.adjoint()).eval();
        rho /= rho.trace().real();
    }
    *drift_out = drift;
    return SymmetricState::from_matrix(liou.n_qubits(), rho);
}

EvolveResult evolve_eigen(const Liouvillian& liou, const SymmetricState& rho0,
                          const std::vector<double>& times) {
    const int d = liou.dim();
    Eigen::ComplexEigenSolver<Matrix> es(liou.superoperator());
    if (es.info() != Eigen::Success)
        throw NumericalError("evolve: superoperator eigendecomposition failed");
    const Vector v0 = matrix_to_vec(rho0.rho());
    Eigen::PartialPivLU<Matrix> lu(es.eigenvectors());
    const Vector coeff = lu.solve(v0);
    // Reconstruction residual of the initial vector is a direct accuracy
    // probe for the eigenbasis solve. Generators whose jump operators sit
    // near a nilpotent limit produce residuals of order one here; healthy
    // generators with large rate dynamic range stay below ~1e-8.
    if ((es.eigenvectors() * coeff - v0).norm() > 1e-7 * std::max(1.0, v0.norm()))
        throw NumericalError(
            "evolve: superoperator eigenbasis is ill-conditioned; "
            "use EvolveMethod::AdaptiveRungeKutta");

    EvolveResult result;
    result.states.reserve(times.size());
    result.trace_drift.reserve(times.size());
    for (const double t : times) {
        const Vector w =
            (es.eigenvalues().array() * t).exp() * coeff.array();
        double drift = 0.0;
        result.states.push_back(
            postprocess_evolved(liou, vec_to_matrix(es.eigenvectors() * w, d), &drift));
        result.trace_drift.push_back(drift);
    }
    return result;
}

EvolveResult evolve_rk(const Liouvillian& liou, const SymmetricState& rho0,
                       const std::vector<double>& times) {
    std::call_once(gsl_handler_flag, [] { gsl_set_error_handler_off(); });
    const int d = liou.dim();
    RhsParams params{&liou, d};
    gsl_odeiv2_system sys{lindblad_rhs, nullptr, static_cast<std::size_t>(2 * d * d), &params};
    gsl_odeiv2_driver* driver = gsl_odeiv2_driver_alloc_y_new(
        &sys, gsl_odeiv2_step_rkf45, /*hstart=*/1e-6, /*epsabs=*/1e-12, /*epsrel=*/1e-9);
    if (driver == nullptr) throw NumericalError("evolve: failed to allocate ODE driver");

    Matrix rho = rho0.rho();
    double t = 0.0;
    EvolveResult result;
    result.states.reserve(times.size());
    result.trace_drift.reserve(times.size());
    for (const double target : times) {
        if (target > t) {
            const int status =
                gsl_odeiv2_driver_apply(driver, &t, target, reinterpret_cast<double*>(rho.data()));
            if (status != GSL_SUCCESS) {
                gsl_odeiv2_driver_free(driver);
                throw NumericalError("evolve: ODE integration failed with status " +
                                     std::to_string(status));
            }
        }
        double drift = 0.0;
        result.states.push_back(postprocess_evolved(liou, rho, &drift));
        result.trace_drift.push_back(drift);
    }
    gsl_odeiv2_driver_free(driver);
    return result;
}

}  // namespace

EvolveResult evolve(const Liouvillian& liou, const SymmetricState& rho0,
                    const std::vector<double>& times, EvolveMethod method) {
    if (rho0.n_qubits() != liou.n_qubits())
        throw InvalidArgument("evolve: state and generator act on different qubit counts");
    if (times.empty()) throw InvalidArgument("evolve: empty time list");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] >= 0.0)) throw InvalidArgument("evolve: times must be >= 0");
        if (i > 0 && times[i] < times[i - 1])
            throw InvalidArgument("evolve: times must be ascending");
    }
    return method == EvolveMethod::EigenDecomposition ? evolve_eigen(liou, rho0, times)
                                                      : evolve_rk(liou, rho0, times);
}

SymmetricState short_time_mixture(const CollectiveOperator& hamiltonian,
                                  const SymmetricState& rho0, const MeasurementSpec& spec,
                                  double t) {
    check_hamiltonian(hamiltonian, "short_time_mixture");
    if (rho0.n_qubits() != hamiltonian.n_qubits)
        throw InvalidArgument("short_time_mixture: state and Hamiltonian dimension mismatch");
    if (!(t >= 0.0)) throw InvalidArgument("short_time_mixture: t must be >= 0");
    if (!(spec.kappa >= 0.0)) throw InvalidArgument("short_time_mixture: kappa must be >= 0");

    const Matrix& h = hamiltonian.mat;
    const double comm = (h * rho0.rho() - rho0.rho() * h).cwiseAbs().maxCoeff();
    if (comm > 1e-8)
        throw InvalidArgument("short_time_mixture: [H, rho0] max-norm " + std::to_string(comm) +
                              " violates the commuting-initial-state precondition");
    const double p = spec.kappa * t;
    if (p > 0.1)
        throw InvalidArgument("short_time_mixture: kappa*t = " + std::to_string(p) +
                              " outside the short-time regime (<= 0.1)");

    Matrix dephased = Matrix::Zero(rho0.dim(), rho0.dim());
    for (const Matrix& proj : measurement_projectors(rho0.n_qubits(), spec))
        dephased += proj * rho0.rho() * proj;
    const Matrix mix = (1.0 - p) * rho0.rho() + p * dephased;
    return SymmetricState::from_matrix(rho0.n_qubits(), mix);
}

}  // namespace symbell
