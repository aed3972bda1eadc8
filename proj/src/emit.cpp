#include "symbell/emit.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <sstream>

namespace symbell::emit {

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kToolVersion = "symbell 0.1.0";

// The thermal bath's spectral density is a modeling choice, so runs that use
// it carry the choice in their output metadata.
constexpr const char* kDaviesBathNote =
    "ohmic: gamma(w) = gamma0 w (1 + n_B(w)), gamma(-w) = gamma0 w n_B(w), "
    "gamma(0) = gamma0 / beta";

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.11e", x);
    return buf;
}

std::string fmt_opt(const std::optional<double>& x) { return x ? fmt(*x) : std::string(); }

/// RFC 4180 quoting, needed only if a label carries separators.
std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

const char* experiment_token(sweep::Experiment e) {
    switch (e) {
        case sweep::Experiment::SteadyPhaseDiagram: return "steady_phase_diagram";
        case sweep::Experiment::Trajectory: return "trajectory";
        case sweep::Experiment::MeasurementAttack: return "measurement_attack";
    }
    return "unknown";
}

std::string experiment_id(const sweep::SweepSpec& spec) {
    return spec.label.empty() ? experiment_token(spec.experiment) : spec.label;
}

/// Swept-parameter column names in their fixed order for this experiment.
std::vector<std::string> param_columns(const sweep::SweepSpec& spec) {
    std::vector<std::string> cols;
    switch (spec.experiment) {
        case sweep::Experiment::SteadyPhaseDiagram:
            for (const auto& axis : spec.axes) cols.push_back(axis.name);
            break;
        case sweep::Experiment::Trajectory:
            break;
        case sweep::Experiment::MeasurementAttack:
            cols = {"kappa", "p"};
            break;
    }
    return cols;
}

std::optional<double> param_value(const sweep::Row& row, const std::string& name) {
    for (const auto& [key, value] : row.params)
        if (key == name) return value;
    return std::nullopt;
}

json grid_to_json(const sweep::GridSpec& grid) {
    json j;
    if (!grid.explicit_values.empty()) {
        j["values"] = grid.explicit_values;
        return j;
    }
    j["min"] = grid.min;
    j["max"] = grid.max;
    j["count"] = grid.count;
    j["spacing"] = grid.log_spacing ? "log" : "linear";
    return j;
}

/// The resolved spec in the same schema parse_spec accepts, so a saved run's
/// metadata block is itself a valid config document.
json spec_to_json(const sweep::SweepSpec& spec) {
    json j;
    j["experiment"] = experiment_token(spec.experiment);
    j["label"] = experiment_id(spec);
    j["n_qubits"] = spec.n_qubits;

    json ham;
    if (spec.hamiltonian.kind == HamiltonianSpec::Kind::Lmg) {
        ham["kind"] = "lmg";
        ham["coupling"] = spec.hamiltonian.coupling;
        ham["field"] = spec.hamiltonian.field;
    } else {
        ham["kind"] = "squared_z";
        ham["omega"] = spec.hamiltonian.omega;
    }
    j["hamiltonian"] = std::move(ham);

    json dis;
    switch (spec.dissipator.kind) {
        case sweep::DissipatorSpec::Kind::Davies:
            dis["kind"] = "davies";
            dis["beta"] = spec.dissipator.beta;
            dis["gamma0"] = spec.dissipator.gamma0;
            break;
        case sweep::DissipatorSpec::Kind::RotatedLadder:
            dis["kind"] = "rotated_ladder";
            dis["zeta"] = spec.dissipator.zeta;
            dis["gamma"] = spec.dissipator.gamma;
            break;
        case sweep::DissipatorSpec::Kind::Jump:
            dis["kind"] = "jump";
            dis["operator"] = spec.dissipator.jump_operator;
            dis["gamma"] = spec.dissipator.gamma;
            dis["normalization"] = spec.dissipator.jump_scale_inv_sqrt_n ? "inv_sqrt_n" : "none";
            break;
        case sweep::DissipatorSpec::Kind::Measurement:
            dis["kind"] = "measurement";
            dis["kappa"] = spec.dissipator.kappa;
            break;
    }
    j["dissipator"] = std::move(dis);

    if (spec.experiment == sweep::Experiment::SteadyPhaseDiagram) {
        json axes = json::array();
        for (const auto& axis : spec.axes) {
            json a;
            a["name"] = axis.name;
            a["min"] = axis.min;
            a["max"] = axis.max;
            a["count"] = axis.count;
            a["spacing"] = axis.log_spacing ? "log" : "linear";
            axes.push_back(std::move(a));
        }
        j["axes"] = std::move(axes);
    }

    if (spec.experiment == sweep::Experiment::Trajectory) {
        j["times"] = grid_to_json(spec.times);
        json init;
        switch (spec.initial_state.kind) {
            case sweep::InitialStateSpec::Kind::Dicke:
                init["type"] = "dicke";
                init["k"] = spec.initial_state.k;
                break;
            case sweep::InitialStateSpec::Kind::DickeSuperposition:
                init["type"] = "dicke_superposition";
                init["k1"] = spec.initial_state.k1;
                init["k2"] = spec.initial_state.k2;
                break;
            case sweep::InitialStateSpec::Kind::Gaussian:
                init["type"] = "gaussian";
                init["sigma2"] = spec.initial_state.sigma2;
                break;
            case sweep::InitialStateSpec::Kind::Thermal:
                init["type"] = "thermal";
                init["beta"] = spec.initial_state.beta;
                break;
            case sweep::InitialStateSpec::Kind::File:
                init["type"] = "file";
                init["path"] = spec.initial_state.path;
                break;
        }
        j["initial_state"] = std::move(init);
    }

    if (spec.experiment == sweep::Experiment::MeasurementAttack) {
        json att;
        att["kappas"] = spec.attack.kappas;
        if (!spec.attack.p_grid.empty()) att["p_grid"] = grid_to_json(spec.attack.p_grid);
        if (!spec.attack.times.empty()) att["times"] = grid_to_json(spec.attack.times);
        j["attack"] = std::move(att);
    }

    j["formats"] = spec.formats;
    j["evolve_method"] =
        spec.method == EvolveMethod::AdaptiveRungeKutta ? "rk" : "eigen";
    return j;
}

json opt_to_json(const std::optional<double>& x) {
    if (!x) return nullptr;
    return *x;
}

std::optional<double> opt_from_json(const json& j) {
    if (j.is_number()) return j.get<double>();
    return std::nullopt;
}

}  // namespace

std::string to_csv(const sweep::SweepResult& result) {
    const std::vector<std::string> params = param_columns(result.spec);
    const bool attack = result.spec.experiment == sweep::Experiment::MeasurementAttack;

    std::ostringstream out;
    out << "experiment";
    for (const auto& name : params) out << ',' << name;
    out << ",t,q_v,phi_star,theta_star,concurrence,xi2,xi2_defined,residual,status";
    if (attack) out << ",q_v_mixture";
    out << '\n';

    const std::string id = csv_field(experiment_id(result.spec));
    for (const auto& row : result.rows) {
        out << id;
        for (const auto& name : params) out << ',' << fmt_opt(param_value(row, name));
        out << ',' << fmt_opt(row.t);
        out << ',' << fmt_opt(row.q_v);
        out << ',' << fmt_opt(row.phi_star);
        out << ',' << fmt_opt(row.theta_star);
        out << ',' << fmt_opt(row.concurrence);
        out << ',' << fmt_opt(row.xi2);
        out << ',' << (row.xi2_defined ? "true" : "false");
        out << ',' << fmt_opt(row.residual);
        out << ',' << csv_field(row.status);
        if (attack) out << ',' << fmt_opt(row.q_v_mixture);
        out << '\n';
    }
    return out.str();
}

std::string to_json(const sweep::SweepResult& result) {
    json doc;
    json meta;
    meta["tool_version"] = kToolVersion;
    meta["spec"] = spec_to_json(result.spec);
    json tol;
    tol["steady_state_residual"] = 1e-8;
    tol["evolve_eps_abs"] = 1e-12;
    tol["evolve_eps_rel"] = 1e-9;
    tol["optimizer_simplex_diameter"] = 1e-8;
    meta["tolerances"] = std::move(tol);
    json transforms;
    transforms["concurrence_plot_scale"] = result.spec.n_qubits;
    transforms["xi2_undefined_plotted_as"] = 1.0;
    meta["figure_transforms"] = std::move(transforms);
    if (result.spec.dissipator.kind == sweep::DissipatorSpec::Kind::Davies)
        meta["bath_rate_function"] = kDaviesBathNote;
    doc["metadata"] = std::move(meta);

    json rows = json::array();
    for (const auto& row : result.rows) {
        json r;
        json params;
        for (const auto& [name, value] : row.params) params[name] = value;
        r["params"] = std::move(params);
        r["t"] = opt_to_json(row.t);
        r["q_v"] = opt_to_json(row.q_v);
        r["phi_star"] = opt_to_json(row.phi_star);
        r["theta_star"] = opt_to_json(row.theta_star);
        r["concurrence"] = opt_to_json(row.concurrence);
        r["xi2"] = opt_to_json(row.xi2);
        r["xi2_defined"] = row.xi2_defined;
        r["residual"] = opt_to_json(row.residual);
        r["status"] = row.status;
        r["q_v_mixture"] = opt_to_json(row.q_v_mixture);
        rows.push_back(std::move(r));
    }
    doc["rows"] = std::move(rows);
    return doc.dump(2) + "\n";
}

sweep::SweepResult from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("result document is not valid JSON: ") + e.what());
    }
    sweep::SweepResult result;
    try {
        result.spec = sweep::parse_spec(doc.at("metadata").at("spec").dump());
        for (const auto& r : doc.at("rows")) {
            sweep::Row row;
            for (auto it = r.at("params").begin(); it != r.at("params").end(); ++it)
                row.params.emplace_back(it.key(), it.value().get<double>());
            row.t = opt_from_json(r.at("t"));
            row.q_v = opt_from_json(r.at("q_v"));
            row.phi_star = opt_from_json(r.at("phi_star"));
            row.theta_star = opt_from_json(r.at("theta_star"));
            row.concurrence = opt_from_json(r.at("concurrence"));
            row.xi2 = opt_from_json(r.at("xi2"));
            row.xi2_defined = r.at("xi2_defined").get<bool>();
            row.residual = opt_from_json(r.at("residual"));
            row.status = r.at("status").get<std::string>();
            row.q_v_mixture = opt_from_json(r.at("q_v_mixture"));
            result.rows.push_back(std::move(row));
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("malformed result document: ") + e.what());
    }
    return result;
}

namespace {

std::string fmt_px(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", x);
    return buf;
}

/// Short label for tick marks; scientific only when the value demands it.
std::string fmt_tick(double x) {
    char buf[32];
    if (x == 0.0) return "0";
    if (std::abs(x) >= 0.01 && std::abs(x) < 1000.0)
        std::snprintf(buf, sizeof(buf), "%.3g", x);
    else
        std::snprintf(buf, sizeof(buf), "%.2e", x);
    return buf;
}

void svg_text(std::ostringstream& out, double x, double y, const std::string& anchor,
              const std::string& text) {
    out << "<text x=\"" << fmt_px(x) << "\" y=\"" << fmt_px(y)
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"" << anchor << "\">"
        << text << "</text>\n";
}

/// Diverging fill centered at zero: blue for violation, red for positive,
/// white at the boundary, linear in q_v / vmax.
std::string diverging_fill(double q, double vmax) {
    const double u = std::max(-1.0, std::min(1.0, vmax > 0 ? q / vmax : 0.0));
    int r = 255, g = 255, b = 255;
    if (u < 0) {
        r = static_cast<int>(std::lround(255 + u * (255 - 33)));
        g = static_cast<int>(std::lround(255 + u * (255 - 102)));
        b = static_cast<int>(std::lround(255 + u * (255 - 172)));
    } else if (u > 0) {
        r = static_cast<int>(std::lround(255 - u * (255 - 178)));
        g = static_cast<int>(std::lround(255 - u * (255 - 24)));
        b = static_cast<int>(std::lround(255 - u * (255 - 43)));
    }
    char buf[16];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
    return buf;
}

std::string heatmap_svg(const sweep::SweepResult& result) {
    const auto& axes = result.spec.axes;
    const std::vector<double> xs = axes[0].values();
    const std::vector<double> ys = axes.size() > 1 ? axes[1].values() : std::vector<double>{0.0};
    const int nx = static_cast<int>(xs.size());
    const int ny = static_cast<int>(ys.size());

    const double cell = 28.0;
    const double ml = 70.0, mt = 40.0, mr = 30.0, mb = 55.0;
    const double w = ml + nx * cell + mr;
    const double h = mt + ny * cell + mb;

    double vmax = 0.0;
    for (const auto& row : result.rows)
        if (row.status == "ok" && row.q_v) vmax = std::max(vmax, std::abs(*row.q_v));
    if (vmax == 0.0) vmax = 1.0;

    // Sign per cell: -1/+1 for ok rows, 0 for failed or missing ones. Rows are
    // row-major with axes[0] outer, so cell (ix, iy) is row ix * ny + iy.
    auto sign_at = [&](int ix, int iy) -> int {
        const auto& row = result.rows[static_cast<size_t>(ix) * ny + iy];
        if (row.status != "ok" || !row.q_v) return 0;
        return *row.q_v < 0 ? -1 : 1;
    };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt_px(w) << "\" height=\""
        << fmt_px(h) << "\" viewBox=\"0 0 " << fmt_px(w) << " " << fmt_px(h) << "\">\n";
    if (result.spec.dissipator.kind == sweep::DissipatorSpec::Kind::Davies)
        out << "<desc>bath rate function " << kDaviesBathNote << "</desc>\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg_text(out, w / 2, 20, "middle", experiment_id(result.spec));

    for (int ix = 0; ix < nx; ++ix) {
        for (int iy = 0; iy < ny; ++iy) {
            const auto& row = result.rows[static_cast<size_t>(ix) * ny + iy];
            const double px = ml + ix * cell;
            const double py = mt + (ny - 1 - iy) * cell;
            std::string fill = "#bdbdbd";
            std::string cls = "failed";
            if (row.status == "ok" && row.q_v) {
                fill = diverging_fill(*row.q_v, vmax);
                cls = *row.q_v < 0 ? "neg" : (*row.q_v > 0 ? "pos" : "zero");
            }
            out << "<rect class=\"cell " << cls << "\" x=\"" << fmt_px(px) << "\" y=\""
                << fmt_px(py) << "\" width=\"" << fmt_px(cell) << "\" height=\"" << fmt_px(cell)
                << "\" fill=\"" << fill << "\" stroke=\"#e0e0e0\" stroke-width=\"0.5\"/>\n";
        }
    }

    // Zero contour drawn on cell edges wherever neighbouring cells disagree
    // in sign, which by construction separates the shaded regions.
    for (int ix = 0; ix < nx; ++ix) {
        for (int iy = 0; iy < ny; ++iy) {
            const int s = sign_at(ix, iy);
            if (s == 0) continue;
            if (ix + 1 < nx && sign_at(ix + 1, iy) == -s) {
                const double px = ml + (ix + 1) * cell;
                const double py = mt + (ny - 1 - iy) * cell;
                out << "<line class=\"contour\" x1=\"" << fmt_px(px) << "\" y1=\"" << fmt_px(py)
                    << "\" x2=\"" << fmt_px(px) << "\" y2=\"" << fmt_px(py + cell)
                    << "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
            }
            if (iy + 1 < ny && sign_at(ix, iy + 1) == -s) {
                const double px = ml + ix * cell;
                const double py = mt + (ny - 1 - iy) * cell;
                out << "<line class=\"contour\" x1=\"" << fmt_px(px) << "\" y1=\"" << fmt_px(py)
                    << "\" x2=\"" << fmt_px(px + cell) << "\" y2=\"" << fmt_px(py)
                    << "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
            }
        }
    }

    for (int ix = 0; ix < nx; ++ix)
        svg_text(out, ml + (ix + 0.5) * cell, mt + ny * cell + 16, "middle", fmt_tick(xs[ix]));
    for (int iy = 0; iy < ny; ++iy)
        svg_text(out, ml - 8, mt + (ny - 1 - iy) * cell + 0.65 * cell, "end", fmt_tick(ys[iy]));
    svg_text(out, ml + nx * cell / 2, mt + ny * cell + 38, "middle", axes[0].name);
    svg_text(out, 16, mt + ny * cell / 2, "middle",
             axes.size() > 1 ? axes[1].name : std::string());
    out << "</svg>\n";
    return out.str();
}

struct Series {
    std::string name;
    std::string color;
    std::vector<std::pair<double, double>> points;
};

std::string line_chart_svg(const sweep::SweepResult& result) {
    const bool attack = result.spec.experiment == sweep::Experiment::MeasurementAttack;
    const double n = result.spec.n_qubits;

    // Trajectories plot q_v, N x concurrence, and xi^2 (undefined drawn at 1)
    // against t; attacks plot one q_v series per kappa against p.
    std::vector<Series> series;
    if (attack) {
        const char* palette[] = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e"};
        std::vector<double> kappas;
        for (const auto& row : result.rows) {
            const auto kappa = param_value(row, "kappa");
            if (!kappa) continue;
            if (kappas.empty() || kappas.back() != *kappa) kappas.push_back(*kappa);
        }
        for (size_t i = 0; i < kappas.size(); ++i)
            series.push_back({"kappa=" + fmt_tick(kappas[i]), palette[i % 5], {}});
        for (const auto& row : result.rows) {
            if (row.status != "ok" || !row.q_v) continue;
            const double kappa = *param_value(row, "kappa");
            const double p = *param_value(row, "p");
            for (size_t i = 0; i < kappas.size(); ++i)
                if (kappas[i] == kappa) series[i].points.emplace_back(p, *row.q_v);
        }
    } else {
        series.push_back({"q_v", "#2166ac", {}});
        series.push_back({"N*concurrence", "#b2182b", {}});
        series.push_back({"xi2", "#4d9221", {}});
        for (const auto& row : result.rows) {
            if (row.status != "ok" || !row.t) continue;
            if (row.q_v) series[0].points.emplace_back(*row.t, *row.q_v);
            if (row.concurrence) series[1].points.emplace_back(*row.t, n * *row.concurrence);
            series[2].points.emplace_back(*row.t, row.xi2_defined && row.xi2 ? *row.xi2 : 1.0);
        }
    }

    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool first = true;
    for (const auto& s : series)
        for (const auto& [x, y] : s.points) {
            if (first) {
                xmin = xmax = x;
                ymin = ymax = y;
                first = false;
            }
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    const double ml = 70.0, mt = 40.0, mr = 150.0, mb = 50.0;
    const double pw = 480.0, ph = 300.0;
    const double w = ml + pw + mr, h = mt + ph + mb;
    auto X = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
    auto Y = [&](double y) { return mt + (ymax - y) / (ymax - ymin) * ph; };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt_px(w) << "\" height=\""
        << fmt_px(h) << "\" viewBox=\"0 0 " << fmt_px(w) << " " << fmt_px(h) << "\">\n";
    if (result.spec.dissipator.kind == sweep::DissipatorSpec::Kind::Davies)
        out << "<desc>bath rate function " << kDaviesBathNote << "</desc>\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg_text(out, ml + pw / 2, 20, "middle", experiment_id(result.spec));
    out << "<rect x=\"" << fmt_px(ml) << "\" y=\"" << fmt_px(mt) << "\" width=\"" << fmt_px(pw)
        << "\" height=\"" << fmt_px(ph)
        << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";

    if (ymin < 0 && ymax > 0)
        out << "<line class=\"zero\" x1=\"" << fmt_px(ml) << "\" y1=\"" << fmt_px(Y(0)) << "\" x2=\""
            << fmt_px(ml + pw) << "\" y2=\"" << fmt_px(Y(0))
            << "\" stroke=\"#888888\" stroke-dasharray=\"4 3\" stroke-width=\"1\"/>\n";

    for (int i = 0; i <= 4; ++i) {
        const double x = xmin + (xmax - xmin) * i / 4;
        const double y = ymin + (ymax - ymin) * i / 4;
        svg_text(out, X(x), mt + ph + 16, "middle", fmt_tick(x));
        svg_text(out, ml - 8, Y(y) + 4, "end", fmt_tick(y));
    }
    svg_text(out, ml + pw / 2, h - 12, "middle", attack ? "p" : "t");

    double legend_y = mt + 10;
    for (const auto& s : series) {
        if (s.points.empty()) continue;
        out << "<polyline class=\"series\" fill=\"none\" stroke=\"" << s.color
            << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& [x, y] : s.points) out << fmt_px(X(x)) << ',' << fmt_px(Y(y)) << ' ';
        out << "\"/>\n";
        out << "<line x1=\"" << fmt_px(ml + pw + 10) << "\" y1=\"" << fmt_px(legend_y)
            << "\" x2=\"" << fmt_px(ml + pw + 30) << "\" y2=\"" << fmt_px(legend_y)
            << "\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"/>\n";
        svg_text(out, ml + pw + 36, legend_y + 4, "start", s.name);
        legend_y += 18;
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace

std::string to_svg(const sweep::SweepResult& result) {
    if (result.spec.experiment == sweep::Experiment::SteadyPhaseDiagram)
        return heatmap_svg(result);
    return line_chart_svg(result);
}

}  // namespace symbell::emit
