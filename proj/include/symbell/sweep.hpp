#pragma once

// Configuration-driven experiment runner: declarative sweep specs resolved
// into deterministic per-row results, independent of worker-pool width.

#include <optional>
#include <string>
#include <vector>

#include "symbell/liouville.hpp"
#include "symbell/symspin.hpp"

namespace symbell::sweep {

enum class Experiment { SteadyPhaseDiagram, Trajectory, MeasurementAttack };

/// A named scalar range attached to a spec field ("h", "beta", "zeta", ...).
struct AxisSpec {
    std::string name;
    double min = 0.0;
    double max = 0.0;
    int count = 1;
    bool log_spacing = false;

    std::vector<double> values() const;
};

/// A grid that is either an explicit list or a (min, max, count) range.
struct GridSpec {
    std::vector<double> explicit_values;
    double min = 0.0;
    double max = 0.0;
    int count = 0;
    bool log_spacing = false;

    bool empty() const { return explicit_values.empty() && count == 0; }
    std::vector<double> values() const;
};

struct DissipatorSpec {
    enum class Kind { Davies, RotatedLadder, Jump, Measurement };
    Kind kind = Kind::Davies;
    double beta = 1.0;          // Davies
    double gamma0 = 0.01;       // Davies overall rate scale
    double zeta = 0.0;          // RotatedLadder mixing angle
    double gamma = 1.0;         // RotatedLadder / Jump rate
    double kappa = 1.0;         // Measurement rate
    std::string jump_operator;  // Jump: one of sx, sy, sz, sp, sm
    bool jump_scale_inv_sqrt_n = false;
};

struct InitialStateSpec {
    enum class Kind { Dicke, DickeSuperposition, Gaussian, Thermal, File };
    Kind kind = Kind::Dicke;
    int k = 0;
    int k1 = 0, k2 = 0;
    double sigma2 = 1.0;
    double beta = 1.0;
    std::string path;
};

struct AttackSpec {
    std::vector<double> kappas;
    GridSpec p_grid;  // p = kappa * t; preferred when all kappas > 0
    GridSpec times;   // explicit times; required for kappa = 0
};

struct SweepSpec {
    Experiment experiment = Experiment::SteadyPhaseDiagram;
    std::string label;
    int n_qubits = 2;
    HamiltonianSpec hamiltonian;
    DissipatorSpec dissipator;
    std::vector<AxisSpec> axes;
    GridSpec times;
    InitialStateSpec initial_state;
    AttackSpec attack;
    std::vector<std::string> formats{"csv", "json"};
    EvolveMethod method = EvolveMethod::EigenDecomposition;
};

/// Parse a JSON spec document. Unknown keys, bad enum tokens, axis names that
/// do not refer to declared fields, and empty grids are all InvalidArgument.
SweepSpec parse_spec(const std::string& json_text);

/// One output record. Optional fields stay empty on failed rows.
struct Row {
    std::vector<std::pair<std::string, double>> params;  // swept name -> value
    std::optional<double> t;
    std::optional<double> q_v;
    std::optional<double> phi_star;
    std::optional<double> theta_star;
    std::optional<double> concurrence;
    std::optional<double> xi2;
    bool xi2_defined = false;
    std::optional<double> residual;
    std::string status = "ok";
    std::optional<double> q_v_mixture;  // attack companion column
};

struct SweepResult {
    SweepSpec spec;
    std::vector<Row> rows;

    bool all_ok() const;
};

/// Run the experiment the spec declares. `threads` <= 1 means serial; the
/// output is identical for any worker count.
SweepResult run(const SweepSpec& spec, int threads = 1);

SweepResult run_steady_phase_diagram(const SweepSpec& spec, int threads = 1);
SweepResult run_trajectory(const SweepSpec& spec, int threads = 1);
SweepResult run_measurement_attack(const SweepSpec& spec, int threads = 1);

}  // namespace symbell::sweep
