// Experiment runner: resolves a declarative sweep config, executes it on a
// worker pool, and writes CSV/JSON/SVG renderings of the result.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <string>
#include <vector>

#include "symbell/emit.hpp"
#include "symbell/sweep.hpp"

namespace fs = std::filesystem;

namespace {

struct Options {
    std::string config;
    std::string out = ".";
    int threads = 0;  // 0 means not given on the command line
    std::string format;
};

/// The --threads flag wins over the SYMBELL_THREADS environment variable;
/// with neither present the run is serial.
int resolve_threads(int flag_value) {
    if (flag_value > 0) return flag_value;
    const char* env = std::getenv("SYMBELL_THREADS");
    if (!env || *env == '\0') return 1;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1)
        throw symbell::InvalidArgument("SYMBELL_THREADS must be a positive integer");
    return static_cast<int>(v);
}

std::vector<std::string> resolve_formats(const std::string& flag_value,
                                         const std::vector<std::string>& from_spec) {
    if (flag_value.empty()) return from_spec;
    std::vector<std::string> formats;
    std::string token;
    std::istringstream in(flag_value);
    while (std::getline(in, token, ',')) {
        if (token != "csv" && token != "json" && token != "svg")
            throw symbell::InvalidArgument("unknown format '" + token + "'");
        formats.push_back(token);
    }
    if (formats.empty()) throw symbell::InvalidArgument("--format must name at least one format");
    return formats;
}

std::string sanitize_basename(const std::string& label) {
    std::string base;
    for (char c : label)
        base += (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '-')
                    ? c
                    : '_';
    return base.empty() ? std::string("result") : base;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

void write_outputs(const symbell::sweep::SweepResult& result, const std::string& out_dir,
                   const std::vector<std::string>& formats) {
    fs::create_directories(out_dir);
    const std::string base = sanitize_basename(result.spec.label);
    for (const std::string& format : formats) {
        const fs::path path = fs::path(out_dir) / (base + "." + format);
        if (format == "csv")
            write_file(path, symbell::emit::to_csv(result));
        else if (format == "json")
            write_file(path, symbell::emit::to_json(result));
        else
            write_file(path, symbell::emit::to_svg(result));
        std::cout << "wrote " << path.string() << "\n";
    }
}

int report_and_exit_code(const symbell::sweep::SweepResult& result) {
    std::size_t failed = 0;
    for (const auto& row : result.rows)
        if (row.status != "ok") ++failed;
    std::cout << result.rows.size() << " rows, " << failed << " failed\n";
    return failed == 0 ? 0 : 2;
}

int run_experiment(const Options& opt, symbell::sweep::Experiment expected) {
    symbell::sweep::SweepSpec spec = symbell::sweep::parse_spec(read_file(opt.config));
    if (spec.experiment != expected)
        throw symbell::InvalidArgument(
            "config declares a different experiment; use the matching subcommand");
    const auto result = symbell::sweep::run(spec, resolve_threads(opt.threads));
    write_outputs(result, opt.out, resolve_formats(opt.format, spec.formats));
    return report_and_exit_code(result);
}

int rerender(const Options& opt) {
    const auto result = symbell::emit::from_json(read_file(opt.config));
    std::vector<std::string> formats =
        opt.format.empty() ? std::vector<std::string>{"csv", "svg"}
                           : resolve_formats(opt.format, {});
    write_outputs(result, opt.out, formats);
    return report_and_exit_code(result);
}

void add_common_options(CLI::App* cmd, Options& opt, const char* config_help) {
    cmd->add_option("--config", opt.config, config_help)->required();
    cmd->add_option("--out", opt.out, "Output directory (created if missing)");
    cmd->add_option("--threads", opt.threads, "Worker pool width (default SYMBELL_THREADS or 1)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--format", opt.format,
                    "Comma-separated subset of csv,json,svg; overrides the config");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Permutation-invariant open-system sweeps: steady-state phase diagrams, "
        "Lindblad trajectories, and measurement attacks, with Bell-violation and "
        "entanglement witnesses per row."};
    app.require_subcommand(1);

    Options opt;
    CLI::App* steady =
        app.add_subcommand("steady", "Steady-state phase diagram over 1 or 2 parameter axes");
    CLI::App* trajectory =
        app.add_subcommand("trajectory", "Witness trajectory from a declared initial state");
    CLI::App* attack =
        app.add_subcommand("attack", "Repeated-measurement dephasing of a prepared steady state");
    CLI::App* emit_cmd =
        app.add_subcommand("emit", "Re-render a previously saved result JSON");
    for (CLI::App* cmd : {steady, trajectory, attack})
        add_common_options(cmd, opt, "Sweep config JSON");
    add_common_options(emit_cmd, opt, "Result JSON produced by an earlier run");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (steady->parsed())
            return run_experiment(opt, symbell::sweep::Experiment::SteadyPhaseDiagram);
        if (trajectory->parsed())
            return run_experiment(opt, symbell::sweep::Experiment::Trajectory);
        if (attack->parsed())
            return run_experiment(opt, symbell::sweep::Experiment::MeasurementAttack);
        return rerender(opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
