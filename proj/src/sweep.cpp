#include "symbell/sweep.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "symbell/entanglement.hpp"
#include "symbell/nonlocality.hpp"

namespace symbell::sweep {

namespace {

using nlohmann::json;

std::vector<double> spaced(double lo, double hi, int count, bool log_spacing) {
    if (count < 1) throw InvalidArgument("grid count must be >= 1");
    std::vector<double> out;
    out.reserve(count);
    if (count == 1) {
        out.push_back(lo);
        return out;
    }
    if (log_spacing) {
        if (lo <= 0.0 || hi <= 0.0)
            throw InvalidArgument("log spacing requires positive endpoints");
        const double llo = std::log(lo), lhi = std::log(hi);
        for (int i = 0; i < count; ++i)
            out.push_back(std::exp(llo + (lhi - llo) * i / (count - 1)));
        return out;
    }
    for (int i = 0; i < count; ++i) out.push_back(lo + (hi - lo) * i / (count - 1));
    return out;
}

void require_keys(const json& j, const std::set<std::string>& allowed, const char* context) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw InvalidArgument(std::string("unknown key '") + it.key() + "' in " + context);
}

double get_num(const json& j, const char* key, const char* context) {
    if (!j.contains(key) || !j[key].is_number())
        throw InvalidArgument(std::string(context) + " requires numeric '" + key + "'");
    return j[key].get<double>();
}

double get_num_or(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) throw InvalidArgument(std::string("'") + key + "' must be numeric");
    return j[key].get<double>();
}

GridSpec parse_grid(const json& j, const char* context) {
    GridSpec grid;
    if (j.contains("values")) {
        require_keys(j, {"values"}, context);
        if (!j["values"].is_array() || j["values"].empty())
            throw InvalidArgument(std::string(context) + ": 'values' must be a nonempty array");
        for (const auto& v : j["values"]) {
            if (!v.is_number())
                throw InvalidArgument(std::string(context) + ": 'values' entries must be numeric");
            grid.explicit_values.push_back(v.get<double>());
        }
        return grid;
    }
    require_keys(j, {"min", "max", "count", "spacing"}, context);
    grid.min = get_num(j, "min", context);
    grid.max = get_num(j, "max", context);
    grid.count = static_cast<int>(get_num(j, "count", context));
    if (grid.count < 1) throw InvalidArgument(std::string(context) + ": count must be >= 1");
    if (j.contains("spacing")) {
        const std::string s = j["spacing"].get<std::string>();
        if (s == "log")
            grid.log_spacing = true;
        else if (s != "linear")
            throw InvalidArgument(std::string(context) + ": spacing must be linear or log");
    }
    return grid;
}

std::set<std::string> axis_names_for(const SweepSpec& spec) {
    std::set<std::string> names = spec.hamiltonian.kind == HamiltonianSpec::Kind::Lmg
                                      ? std::set<std::string>{"h", "coupling"}
                                      : std::set<std::string>{"omega"};
    switch (spec.dissipator.kind) {
        case DissipatorSpec::Kind::Davies: names.insert({"beta", "gamma0"}); break;
        case DissipatorSpec::Kind::RotatedLadder: names.insert({"zeta", "gamma"}); break;
        case DissipatorSpec::Kind::Jump: names.insert("gamma"); break;
        case DissipatorSpec::Kind::Measurement: names.insert("kappa"); break;
    }
    return names;
}

void apply_param(SweepSpec& spec, const std::string& name, double value) {
    if (name == "h")
        spec.hamiltonian.field = value;
    else if (name == "coupling")
        spec.hamiltonian.coupling = value;
    else if (name == "omega")
        spec.hamiltonian.omega = value;
    else if (name == "beta")
        spec.dissipator.beta = value;
    else if (name == "gamma0")
        spec.dissipator.gamma0 = value;
    else if (name == "zeta")
        spec.dissipator.zeta = value;
    else if (name == "gamma")
        spec.dissipator.gamma = value;
    else if (name == "kappa")
        spec.dissipator.kappa = value;
    else
        throw InvalidArgument("unknown sweep parameter '" + name + "'");
}

CollectiveOperator build_ham(const SweepSpec& spec) {
    HamiltonianSpec h = spec.hamiltonian;
    h.n_qubits = spec.n_qubits;
    return build_hamiltonian(h);
}

Matrix jump_matrix(const SweepSpec& spec) {
    const SpinOperators ops = collective_spin_ops(spec.n_qubits);
    const std::string& name = spec.dissipator.jump_operator;
    Matrix j;
    if (name == "sx")
        j = ops.sx;
    else if (name == "sy")
        j = ops.sy;
    else if (name == "sz")
        j = ops.sz;
    else if (name == "sp")
        j = ops.sp;
    else if (name == "sm")
        j = ops.sm;
    else
        throw InvalidArgument("unknown jump operator '" + name + "'");
    if (spec.dissipator.jump_scale_inv_sqrt_n) j /= std::sqrt(double(spec.n_qubits));
    return j;
}

/// Liouvillian for the declared dissipator at the spec's current parameters.
Liouvillian build_generator(const SweepSpec& spec, const CollectiveOperator& ham) {
    switch (spec.dissipator.kind) {
        case DissipatorSpec::Kind::Davies: {
            DaviesSpec d;
            d.beta = spec.dissipator.beta;
            d.base_rate = spec.dissipator.gamma0;
            return davies_generator(ham, d);
        }
        case DissipatorSpec::Kind::RotatedLadder: {
            const Matrix j = rotated_ladder_jump(ham, spec.dissipator.zeta).mat;
            return jump_dissipator(ham, {{j, spec.dissipator.gamma}});
        }
        case DissipatorSpec::Kind::Jump: {
            if (spec.dissipator.gamma == 0.0) return jump_dissipator(ham, {});
            return jump_dissipator(ham, {{jump_matrix(spec), spec.dissipator.gamma}});
        }
        case DissipatorSpec::Kind::Measurement: {
            MeasurementSpec m;
            m.kappa = spec.dissipator.kappa;
            return measurement_dephasing(ham, m);
        }
    }
    throw InvalidArgument("unhandled dissipator kind");
}

SymmetricState build_initial_state(const SweepSpec& spec, const CollectiveOperator& ham) {
    const InitialStateSpec& init = spec.initial_state;
    switch (init.kind) {
        case InitialStateSpec::Kind::Dicke:
            return dicke_state(spec.n_qubits, init.k);
        case InitialStateSpec::Kind::DickeSuperposition:
            return dicke_superposition(spec.n_qubits, init.k1, init.k2);
        case InitialStateSpec::Kind::Gaussian:
            return gaussian_dicke_state(spec.n_qubits, init.sigma2);
        case InitialStateSpec::Kind::Thermal:
            return gibbs_state(ham, init.beta);
        case InitialStateSpec::Kind::File: {
            std::ifstream in(init.path);
            if (!in) throw InvalidArgument("cannot read initial state file " + init.path);
            json j = json::parse(in);
            const auto& re = j.at("re");
            const auto& im = j.at("im");
            const int d = spec.n_qubits + 1;
            if (int(re.size()) != d || int(im.size()) != d)
                throw InvalidArgument("initial state file dimension mismatch");
            Matrix rho(d, d);
            for (int r = 0; r < d; ++r)
                for (int c = 0; c < d; ++c)
                    rho(r, c) = Complex(re[r][c].get<double>(), im[r][c].get<double>());
            return SymmetricState::from_matrix(spec.n_qubits, rho);
        }
    }
    throw InvalidArgument("unhandled initial state kind");
}

std::string status_of(const std::exception_ptr& err) {
    try {
        std::rethrow_exception(err);
    } catch (const DegenerateSteadyState& e) {
        return "degenerate_steady_state(" + std::to_string(e.multiplicity) + ")";
    } catch (const NumericalError&) {
        return "numerical_error";
    } catch (const InvalidArgument&) {
        return "invalid_argument";
    } catch (const std::exception&) {
        return "error";
    }
}

/// Fill the witness/violation fields of a row from a state.
void fill_observables(Row& row, const SymmetricState& state) {
    const BellReport bell = optimize_violation(state);
    row.q_v = bell.q_v;
    row.phi_star = bell.settings.phi;
    row.theta_star = bell.settings.theta;
    const WitnessReport w = witnesses(state);
    row.concurrence = w.concurrence;
    row.xi2_defined = w.squeezing.defined;
    if (w.squeezing.defined) row.xi2 = w.squeezing.value;
}

/// Deterministic worker pool: tasks are indexed and side effects land in
/// index-addressed slots, so the schedule cannot reorder the output.
void run_indexed(int n_tasks, int threads, const std::function<void(int)>& task) {
    const int width = std::min(std::max(threads, 1), n_tasks);
    if (width <= 1) {
        for (int i = 0; i < n_tasks; ++i) task(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> failures(width);
    std::vector<std::thread> pool;
    pool.reserve(width);
    for (int w = 0; w < width; ++w)
        pool.emplace_back([&, w] {
            try {
                for (int i = next.fetch_add(1); i < n_tasks; i = next.fetch_add(1)) task(i);
            } catch (...) {
                failures[w] = std::current_exception();
            }
        });
    for (auto& t : pool) t.join();
    for (auto& f : failures)
        if (f) std::rethrow_exception(f);
}

}  // namespace

std::vector<double> AxisSpec::values() const { return spaced(min, max, count, log_spacing); }

std::vector<double> GridSpec::values() const {
    if (!explicit_values.empty()) return explicit_values;
    return spaced(min, max, count, log_spacing);
}

bool SweepResult::all_ok() const {
    return std::all_of(rows.begin(), rows.end(),
                       [](const Row& r) { return r.status == "ok"; });
}

SweepSpec parse_spec(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("config is not valid JSON: ") + e.what());
    }
    try {
        require_keys(j,
                     {"experiment", "label", "n_qubits", "hamiltonian", "dissipator", "axes",
                      "times", "initial_state", "attack", "formats", "evolve_method"},
                     "config");
        SweepSpec spec;

        const std::string exp = j.at("experiment").get<std::string>();
        if (exp == "steady_phase_diagram")
            spec.experiment = Experiment::SteadyPhaseDiagram;
        else if (exp == "trajectory")
            spec.experiment = Experiment::Trajectory;
        else if (exp == "measurement_attack")
            spec.experiment = Experiment::MeasurementAttack;
        else
            throw InvalidArgument("unknown experiment '" + exp + "'");

        spec.label = j.contains("label") ? j["label"].get<std::string>() : exp;
        spec.n_qubits = static_cast<int>(get_num(j, "n_qubits", "config"));
        if (spec.n_qubits < 2) throw InvalidArgument("n_qubits must be >= 2");

        const json& ham = j.at("hamiltonian");
        const std::string hkind = ham.at("kind").get<std::string>();
        if (hkind == "lmg") {
            require_keys(ham, {"kind", "coupling", "field"}, "hamiltonian");
            spec.hamiltonian = HamiltonianSpec::lmg(spec.n_qubits, get_num_or(ham, "coupling", 1.0),
                                                    get_num_or(ham, "field", 0.0));
        } else if (hkind == "squared_z") {
            require_keys(ham, {"kind", "omega"}, "hamiltonian");
            spec.hamiltonian = HamiltonianSpec::squared_z(spec.n_qubits, get_num_or(ham, "omega", 1.0));
        } else {
            throw InvalidArgument("unknown hamiltonian kind '" + hkind + "'");
        }

        const json& dis = j.at("dissipator");
        const std::string dkind = dis.at("kind").get<std::string>();
        if (dkind == "davies") {
            require_keys(dis, {"kind", "beta", "gamma0"}, "dissipator");
            spec.dissipator.kind = DissipatorSpec::Kind::Davies;
            spec.dissipator.beta = get_num(dis, "beta", "davies dissipator");
            spec.dissipator.gamma0 = get_num_or(dis, "gamma0", 0.01);
        } else if (dkind == "rotated_ladder") {
            require_keys(dis, {"kind", "zeta", "gamma"}, "dissipator");
            spec.dissipator.kind = DissipatorSpec::Kind::RotatedLadder;
            spec.dissipator.zeta = get_num(dis, "zeta", "rotated_ladder dissipator");
            spec.dissipator.gamma = get_num_or(dis, "gamma", 1.0);
        } else if (dkind == "jump") {
            require_keys(dis, {"kind", "operator", "gamma", "normalization"}, "dissipator");
            spec.dissipator.kind = DissipatorSpec::Kind::Jump;
            spec.dissipator.jump_operator = dis.at("operator").get<std::string>();
            spec.dissipator.gamma = get_num(dis, "gamma", "jump dissipator");
            if (dis.contains("normalization")) {
                const std::string norm = dis["normalization"].get<std::string>();
                if (norm == "inv_sqrt_n")
                    spec.dissipator.jump_scale_inv_sqrt_n = true;
                else if (norm != "none")
                    throw InvalidArgument("normalization must be none or inv_sqrt_n");
            }
        } else if (dkind == "measurement") {
            require_keys(dis, {"kind", "kappa"}, "dissipator");
            spec.dissipator.kind = DissipatorSpec::Kind::Measurement;
            spec.dissipator.kappa = get_num(dis, "kappa", "measurement dissipator");
        } else {
            throw InvalidArgument("unknown dissipator kind '" + dkind + "'");
        }
        if (spec.dissipator.gamma < 0 || spec.dissipator.gamma0 < 0 || spec.dissipator.kappa < 0)
            throw InvalidArgument("rates must be nonnegative");

        if (j.contains("axes")) {
            if (spec.experiment != Experiment::SteadyPhaseDiagram)
                throw InvalidArgument("axes are only valid for steady_phase_diagram");
            if (!j["axes"].is_array() || j["axes"].empty() || j["axes"].size() > 2)
                throw InvalidArgument("axes must hold 1 or 2 entries");
            const auto& allowed = axis_names_for(spec);
            for (const auto& a : j["axes"]) {
                require_keys(a, {"name", "min", "max", "count", "spacing"}, "axis");
                AxisSpec axis;
                axis.name = a.at("name").get<std::string>();
                if (!allowed.count(axis.name))
                    throw InvalidArgument("axis '" + axis.name +
                                          "' does not match a declared spec field");
                axis.min = get_num(a, "min", "axis");
                axis.max = get_num(a, "max", "axis");
                axis.count = static_cast<int>(get_num(a, "count", "axis"));
                if (axis.count < 1) throw InvalidArgument("axis count must be >= 1");
                if (a.contains("spacing")) {
                    const std::string s = a["spacing"].get<std::string>();
                    if (s == "log")
                        axis.log_spacing = true;
                    else if (s != "linear")
                        throw InvalidArgument("axis spacing must be linear or log");
                }
                spec.axes.push_back(std::move(axis));
            }
            if (spec.axes.size() == 2 && spec.axes[0].name == spec.axes[1].name)
                throw InvalidArgument("axes must sweep distinct parameters");
        }
        if (spec.experiment == Experiment::SteadyPhaseDiagram) {
            if (spec.axes.empty()) throw InvalidArgument("steady_phase_diagram requires axes");
            if (spec.dissipator.kind == DissipatorSpec::Kind::Measurement)
                throw InvalidArgument(
                    "measurement dephasing has no unique steady state to sweep");
        }

        if (j.contains("times")) spec.times = parse_grid(j["times"], "times");
        if (spec.experiment == Experiment::Trajectory && spec.times.empty())
            throw InvalidArgument("trajectory requires a time grid");

        if (j.contains("initial_state")) {
            const json& init = j["initial_state"];
            const std::string type = init.at("type").get<std::string>();
            if (type == "dicke") {
                require_keys(init, {"type", "k"}, "initial_state");
                spec.initial_state.kind = InitialStateSpec::Kind::Dicke;
                spec.initial_state.k = static_cast<int>(get_num(init, "k", "initial_state"));
            } else if (type == "dicke_superposition") {
                require_keys(init, {"type", "k1", "k2"}, "initial_state");
                spec.initial_state.kind = InitialStateSpec::Kind::DickeSuperposition;
                spec.initial_state.k1 = static_cast<int>(get_num(init, "k1", "initial_state"));
                spec.initial_state.k2 = static_cast<int>(get_num(init, "k2", "initial_state"));
            } else if (type == "gaussian") {
                require_keys(init, {"type", "sigma2"}, "initial_state");
                spec.initial_state.kind = InitialStateSpec::Kind::Gaussian;
                spec.initial_state.sigma2 = get_num(init, "sigma2", "initial_state");
            } else if (type == "thermal") {
                require_keys(init, {"type", "beta"}, "initial_state");
                spec.initial_state.kind = InitialStateSpec::Kind::Thermal;
                spec.initial_state.beta = get_num(init, "beta", "initial_state");
            } else if (type == "file") {
                require_keys(init, {"type", "path"}, "initial_state");
                spec.initial_state.kind = InitialStateSpec::Kind::File;
                spec.initial_state.path = init.at("path").get<std::string>();
            } else {
                throw InvalidArgument("unknown initial state type '" + type + "'");
            }
        } else if (spec.experiment == Experiment::Trajectory) {
            throw InvalidArgument("trajectory requires an initial_state");
        }

        if (spec.experiment == Experiment::MeasurementAttack) {
            const json& att = j.at("attack");
            require_keys(att, {"kappas", "p_grid", "times"}, "attack");
            if (!att.contains("kappas") || !att["kappas"].is_array() || att["kappas"].empty())
                throw InvalidArgument("attack requires a nonempty kappas array");
            for (const auto& k : att["kappas"]) {
                const double kappa = k.get<double>();
                if (kappa < 0) throw InvalidArgument("attack kappas must be >= 0");
                spec.attack.kappas.push_back(kappa);
            }
            if (att.contains("p_grid")) spec.attack.p_grid = parse_grid(att["p_grid"], "p_grid");
            if (att.contains("times")) spec.attack.times = parse_grid(att["times"], "attack times");
            if (spec.attack.p_grid.empty() && spec.attack.times.empty())
                throw InvalidArgument("attack requires p_grid or times");
            const bool has_zero = std::any_of(spec.attack.kappas.begin(), spec.attack.kappas.end(),
                                              [](double k) { return k == 0.0; });
            if (has_zero && spec.attack.times.empty())
                throw InvalidArgument("kappa = 0 needs an explicit attack time grid");
            if (spec.dissipator.kind == DissipatorSpec::Kind::Measurement)
                throw InvalidArgument(
                    "attack preparation dissipator must have a unique steady state");
        } else if (j.contains("attack")) {
            throw InvalidArgument("attack block is only valid for measurement_attack");
        }

        if (j.contains("formats")) {
            spec.formats.clear();
            for (const auto& f : j["formats"]) {
                const std::string fmt = f.get<std::string>();
                if (fmt != "csv" && fmt != "json" && fmt != "svg")
                    throw InvalidArgument("unknown format '" + fmt + "'");
                spec.formats.push_back(fmt);
            }
            if (spec.formats.empty()) throw InvalidArgument("formats must not be empty");
        }

        if (j.contains("evolve_method")) {
            const std::string m = j["evolve_method"].get<std::string>();
            if (m == "eigen")
                spec.method = EvolveMethod::EigenDecomposition;
            else if (m == "rk")
                spec.method = EvolveMethod::AdaptiveRungeKutta;
            else
                throw InvalidArgument("evolve_method must be eigen or rk");
        }

        return spec;
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("malformed config: ") + e.what());
    }
}

SweepResult run_steady_phase_diagram(const SweepSpec& spec, int threads) {
    if (spec.experiment != Experiment::SteadyPhaseDiagram)
        throw InvalidArgument("spec does not declare a steady_phase_diagram experiment");
    const std::vector<double> outer = spec.axes[0].values();
    const std::vector<double> inner =
        spec.axes.size() > 1 ? spec.axes[1].values() : std::vector<double>{0.0};
    const int n_inner = static_cast<int>(inner.size());
    const int n_rows = static_cast<int>(outer.size()) * n_inner;

    SweepResult result;
    result.spec = spec;
    result.rows.resize(n_rows);

    run_indexed(n_rows, threads, [&](int idx) {
        Row& row = result.rows[idx];
        SweepSpec local = spec;
        const double a = outer[idx / n_inner];
        apply_param(local, spec.axes[0].name, a);
        row.params.emplace_back(spec.axes[0].name, a);
        if (spec.axes.size() > 1) {
            const double b = inner[idx % n_inner];
            apply_param(local, spec.axes[1].name, b);
            row.params.emplace_back(spec.axes[1].name, b);
        }
        try {
            const CollectiveOperator ham = build_ham(local);
            const Liouvillian liou = build_generator(local, ham);
            const SteadyStateResult ss = steady_state(liou);
            row.residual = ss.residual;
            fill_observables(row, ss.state);
        } catch (...) {
            row.status = status_of(std::current_exception());
        }
    });
    return result;
}

SweepResult run_trajectory(const SweepSpec& spec, int threads) {
    if (spec.experiment != Experiment::Trajectory)
        throw InvalidArgument("spec does not declare a trajectory experiment");
    const std::vector<double> times = spec.times.values();
    const int n_rows = static_cast<int>(times.size());

    SweepResult result;
    result.spec = spec;
    result.rows.resize(n_rows);
    for (int i = 0; i < n_rows; ++i) result.rows[i].t = times[i];

    EvolveResult traj;
    try {
        const CollectiveOperator ham = build_ham(spec);
        const Liouvillian liou = build_generator(spec, ham);
        const SymmetricState rho0 = build_initial_state(spec, ham);
        traj = evolve(liou, rho0, times, spec.method);
    } catch (...) {
        const std::string status = status_of(std::current_exception());
        for (Row& row : result.rows) row.status = status;
        return result;
    }

    run_indexed(n_rows, threads, [&](int idx) {
        Row& row = result.rows[idx];
        row.residual = traj.trace_drift[idx];
        try {
            fill_observables(row, traj.states[idx]);
        } catch (...) {
            row.status = status_of(std::current_exception());
        }
    });
    return result;
}

SweepResult run_measurement_attack(const SweepSpec& spec, int threads) {
    if (spec.experiment != Experiment::MeasurementAttack)
        throw InvalidArgument("spec does not declare a measurement_attack experiment");

    // Per-kappa time grids: a p grid maps to t = p/kappa, kappa = 0 runs on
    // the explicit time grid with p identically zero.
    std::vector<std::vector<double>> time_grids;
    for (const double kappa : spec.attack.kappas) {
        if (kappa > 0.0 && !spec.attack.p_grid.empty()) {
            std::vector<double> ts;
            for (const double p : spec.attack.p_grid.values()) ts.push_back(p / kappa);
            time_grids.push_back(std::move(ts));
        } else {
            time_grids.push_back(spec.attack.times.values());
        }
    }

    const int n_kappas = static_cast<int>(spec.attack.kappas.size());
    int n_rows = 0;
    std::vector<int> row_offset(n_kappas);
    for (int i = 0; i < n_kappas; ++i) {
        row_offset[i] = n_rows;
        n_rows += static_cast<int>(time_grids[i].size());
    }

    SweepResult result;
    result.spec = spec;
    result.rows.resize(n_rows);
    for (int idx = 0; idx < n_rows; ++idx) {
        const int ki =
            static_cast<int>(std::upper_bound(row_offset.begin(), row_offset.end(), idx) -
                             row_offset.begin()) -
            1;
        const double kappa = spec.attack.kappas[ki];
        const double t = time_grids[ki][idx - row_offset[ki]];
        result.rows[idx].params.emplace_back("kappa", kappa);
        result.rows[idx].params.emplace_back("p", kappa * t);
        result.rows[idx].t = t;
    }

    // The initial state is the preparation dissipator's steady state; if that
    // fails there is nothing to evolve and every row reports the failure.
    CollectiveOperator ham;
    SymmetricState rho0 = dicke_state(spec.n_qubits, 0);
    try {
        ham = build_ham(spec);
        rho0 = steady_state(build_generator(spec, ham)).state;
    } catch (...) {
        const std::string status = status_of(std::current_exception());
        for (Row& row : result.rows) row.status = status;
        return result;
    }
    const Matrix commutator = ham.mat * rho0.rho() - rho0.rho() * ham.mat;
    const bool mixture_applies = commutator.cwiseAbs().maxCoeff() <= 1e-8;

    std::vector<EvolveResult> trajectories(n_kappas);
    std::vector<std::string> evolve_status(n_kappas, "ok");
    run_indexed(n_kappas, threads, [&](int ki) {
        try {
            MeasurementSpec m;
            m.kappa = spec.attack.kappas[ki];
            const Liouvillian liou = measurement_dephasing(ham, m);
            trajectories[ki] = evolve(liou, rho0, time_grids[ki], spec.method);
        } catch (...) {
            evolve_status[ki] = status_of(std::current_exception());
        }
    });

    run_indexed(n_rows, threads, [&](int idx) {
        const int ki =
            static_cast<int>(std::upper_bound(row_offset.begin(), row_offset.end(), idx) -
                             row_offset.begin()) -
            1;
        const int ti = idx - row_offset[ki];
        const double kappa = spec.attack.kappas[ki];
        const double t = time_grids[ki][ti];
        Row& row = result.rows[idx];
        if (evolve_status[ki] != "ok") {
            row.status = evolve_status[ki];
            return;
        }
        row.residual = trajectories[ki].trace_drift[ti];
        try {
            fill_observables(row, trajectories[ki].states[ti]);
            if (mixture_applies && kappa * t <= 0.1) {
                MeasurementSpec m;
                m.kappa = kappa;
                const SymmetricState mix = short_time_mixture(ham, rho0, m, t);
                row.q_v_mixture = optimize_violation(mix).q_v;
            }
        } catch (...) {
            row.status = status_of(std::current_exception());
        }
    });
    return result;
}

SweepResult run(const SweepSpec& spec, int threads) {
    switch (spec.experiment) {
        case Experiment::SteadyPhaseDiagram: return run_steady_phase_diagram(spec, threads);
        case Experiment::Trajectory: return run_trajectory(spec, threads);
        case Experiment::MeasurementAttack: return run_measurement_attack(spec, threads);
    }
    throw InvalidArgument("unhandled experiment kind");
}

}  // namespace symbell::sweep
