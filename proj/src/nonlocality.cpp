#include "symbell/nonlocality.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>

namespace symbell {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Hamming weights of the two-bit indices 00, 01, 10, 11.
constexpr std::array<int, 4> kWeight{0, 1, 1, 2};

double wrap_angle(double a) {
    double w = std::fmod(a, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    return w;
}

}  // namespace

TwoQubitState reduce_two_qubit(const SymmetricState& state) {
    const int n = state.n_qubits();
    if (n < 2) throw InvalidArgument("reduce_two_qubit: need n_qubits >= 2");
    const Matrix& rho = state.rho();
    const double nn = static_cast<double>(n) * (n - 1);

    // Ratios C(N-2,k)/C(N,k+w) for Hamming weight w = 0, 1, 2.
    const auto ratio = [&](int k, int w) {
        switch (w) {
            case 0: return (n - k) * (n - k - 1.0) / nn;
            case 1: return (k + 1.0) * (n - k - 1.0) / nn;
            default: return (k + 1.0) * (k + 2.0) / nn;
        }
    };

    Eigen::Matrix4cd out = Eigen::Matrix4cd::Zero();
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            const int wi = kWeight[i], wj = kWeight[j];
            Complex sum = 0.0;
            for (int k = 0; k <= n - 2; ++k)
                sum += std::sqrt(ratio(k, wi) * ratio(k, wj)) * rho(k + wi, k + wj);
            out(i, j) = sum;
        }
    }
    return TwoQubitState::from_matrix(out);
}

Eigen::Matrix2cd measurement_observable(double angle) {
    Eigen::Matrix2cd m;
    const double c = std::cos(angle), s = std::sin(angle);
    m << c, s, s, -c;  // cos(a) sigma_z + sin(a) sigma_x
    return m;
}

Eigen::Matrix4cd bell_operator(int n_qubits, const MeasurementSettings& settings) {
    if (n_qubits < 2) throw InvalidArgument("bell_operator: need n_qubits >= 2");
    const double n = n_qubits;
    const Eigen::Matrix2cd m0 = measurement_observable(settings.phi);
    const Eigen::Matrix2cd m1 = measurement_observable(settings.theta);
    const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();

    const auto kron = [](const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
        Eigen::Matrix4cd k;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) k.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
        return k;
    };

    return 2.0 * n * Eigen::Matrix4cd::Identity() -
           n * (kron(m0, id) + kron(id, m0)) +
           0.5 * n * (n - 1.0) *
               (kron(m0, m0) + kron(m1, m1) - kron(m0, m1) - kron(m1, m0));
}

double bell_value(int n_qubits, const TwoQubitState& reduced,
                  const MeasurementSettings& settings) {
    const Complex val = (bell_operator(n_qubits, settings) * reduced.rho()).trace();
    if (std::abs(val.imag()) > 1e-10)
        throw NumericalError("bell_value: imaginary residue " + std::to_string(val.imag()));
    return val.real();
}

double bell_value(const SymmetricState& state, const MeasurementSettings& settings) {
    return bell_value(state.n_qubits(), reduce_two_qubit(state), settings);
}

namespace {

/// Deterministic Nelder-Mead on the periodic angle plane, started from the best
/// grid point; stops when the simplex diameter falls below `diameter_tol`.
std::pair<Eigen::Vector2d, double> nelder_mead(
    const std::function<double(const Eigen::Vector2d&)>& f, const Eigen::Vector2d& start,
    double step, double diameter_tol) {
    struct Vertex {
        Eigen::Vector2d x;
        double fx;
    };
    std::array<Vertex, 3> simplex{{{start, f(start)},
                                   {start + Eigen::Vector2d(step, 0.0), 0.0},
                                   {start + Eigen::Vector2d(0.0, step), 0.0}}};
    simplex[1].fx = f(simplex[1].x);
    simplex[2].fx = f(simplex[2].x);

    const auto diameter = [&] {
        double dmax = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j)
                dmax = std::max(dmax, (simplex[i].x - simplex[j].x).norm());
        return dmax;
    };

    for (int iter = 0; iter < 600 && diameter() >= diameter_tol; ++iter) {
        std::stable_sort(simplex.begin(), simplex.end(),
                         [](const Vertex& a, const Vertex& b) { return a.fx < b.fx; });
        const Eigen::Vector2d centroid = 0.5 * (simplex[0].x + simplex[1].x);
        const Eigen::Vector2d reflected = centroid + (centroid - simplex[2].x);
        const double fr = f(reflected);
        if (fr < simplex[0].fx) {
            const Eigen::Vector2d expanded = centroid + 2.0 * (centroid - simplex[2].x);
            const double fe = f(expanded);
            simplex[2] = fe < fr ? Vertex{expanded, fe} : Vertex{reflected, fr};
        } else if (fr < simplex[1].fx) {
            simplex[2] = {reflected, fr};
        } else {
            const Eigen::Vector2d contracted = centroid + 0.5 * (simplex[2].x - centroid);
            const double fc = f(contracted);
            if (fc < simplex[2].fx) {
                simplex[2] = {contracted, fc};
            } else {
                for (int i = 1; i < 3; ++i) {
                    simplex[i].x = simplex[0].x + 0.5 * (simplex[i].x - simplex[0].x);
                    simplex[i].fx = f(simplex[i].x);
                }
            }
        }
    }
    std::stable_sort(simplex.begin(), simplex.end(),
                     [](const Vertex& a, const Vertex& b) { return a.fx < b.fx; });
    return {simplex[0].x, simplex[0].fx};
}

}  // namespace

BellReport optimize_violation(int n_qubits, const TwoQubitState& reduced) {
    const auto value = [&](const Eigen::Vector2d& angles) {
        return bell_value(n_qubits, reduced, {angles(0), angles(1)});
    };

    constexpr int kGrid = 64;
    const double spacing = kTwoPi / kGrid;
    Eigen::Vector2d best(0.0, 0.0);
    double best_val = value(best);
    for (int i = 0; i < kGrid; ++i) {
        for (int j = 0; j < kGrid; ++j) {
            const Eigen::Vector2d x(i * spacing, j * spacing);
            const double v = value(x);
            // Strict improvement only: ties resolve to the lexicographically
            // smallest (phi, theta) because the scan is ordered.
            if (v < best_val) {
                best_val = v;
                best = x;
            }
        }
    }

    const auto [xmin, fmin] = nelder_mead(value, best, 0.5 * spacing, 1e-8);
    const double q_v = std::min(fmin, best_val);
    const Eigen::Vector2d x = fmin <= best_val ? xmin : best;

    BellReport report;
    report.q_v = q_v;
    report.settings = {wrap_angle(x(0)), wrap_angle(x(1))};
    report.is_nonlocal = q_v < 0.0;
    return report;
}

BellReport optimize_violation(const SymmetricState& state) {
    return optimize_violation(state.n_qubits(), reduce_two_qubit(state));
}

}  // namespace symbell
