#pragma once

// Command-line front end: configuration parsing and CSV output.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cavity_tangle/scan.hpp"

namespace cavity_tangle::cli {

enum class Command { trajectory, redcurve, scan };

enum ExitCode : int { kOk = 0, kUsage = 2, kIo = 3, kPhysics = 4 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// --help was given; `text` holds the rendered help.
struct HelpRequested {
    std::string text;
};

struct RunConfig {
    Command command = Command::trajectory;
    ModelKind model = ModelKind::homogeneous;
    PairSumConvention pair_sum = PairSumConvention::dipole_unordered;
    double kappa = 0.0;
    double ising = 0.0;
    double alpha = kWAlpha;
    StateFamily family = StateFamily::psi;
    int n = 1;
    double t_max = 20.0;
    int t_steps = 401;
    double j_min = 0.0;
    double j_max = 2.0;
    int j_steps = 201;
    bool layer_purity = true;
    bool layer_concurrence = false;
    std::uint64_t seed = 0;
    std::string out_path;
};

inline const char* kExitCodeHelp =
    "Exit status: 0 success, 2 usage error, 3 I/O error, 4 physics error.\n"
    "CAVITY_TANGLE_THREADS caps the worker threads used by scan.";

/// Parses `args` (without the program name). Flags override values from a
/// --config file of key=value lines.
inline RunConfig parse_config(const std::vector<std::string>& args) {
    RunConfig cfg;
    CLI::App app{"Entanglement dynamics of three atoms in a cavity", "cavity_tangle"};
    app.footer(kExitCodeHelp);
    app.set_config("--config", "", "key=value file; command-line flags take precedence");
    app.allow_config_extras(CLI::config_extras_mode::error);

    const std::map<std::string, Command> commands{
        {"trajectory", Command::trajectory}, {"redcurve", Command::redcurve}, {"scan", Command::scan}};
    const std::map<std::string, ModelKind> models{{"homogeneous", ModelKind::homogeneous},
                                                  {"quasi_homogeneous", ModelKind::quasi_homogeneous}};
    const std::map<std::string, StateFamily> families{{"phi", StateFamily::phi}, {"psi", StateFamily::psi}};
    const std::map<std::string, PairSumConvention> conventions{{"ordered", PairSumConvention::ordered},
                                                               {"unordered", PairSumConvention::unordered},
                                                               {"dipole_unordered", PairSumConvention::dipole_unordered}};

    app.add_option("command", cfg.command, "trajectory | redcurve | scan")
        ->required()
        ->transform(CLI::CheckedTransformer(commands));
    app.add_option("--model", cfg.model, "homogeneous | quasi_homogeneous")->transform(CLI::CheckedTransformer(models));
    app.add_option("--pair-sum,--pair_sum", cfg.pair_sum, "ordered | unordered | dipole_unordered")
        ->transform(CLI::CheckedTransformer(conventions));
    app.add_option("--kappa", cfg.kappa, "dipole coupling");
    app.add_option("--ising", cfg.ising, "Ising coupling (trajectory)");
    app.add_option("--alpha", cfg.alpha, "initial-state angle in radians");
    app.add_option("--family", cfg.family, "phi | psi")->transform(CLI::CheckedTransformer(families));
    app.add_option("--n", cfg.n, "excitation number")->check(CLI::PositiveNumber);
    app.add_option("--t-max,--t_max", cfg.t_max, "final time");
    app.add_option("--t-steps,--t_steps", cfg.t_steps, "number of time points")->check(CLI::Range(2, 1 << 24));
    app.add_option("--j-min,--j_min", cfg.j_min, "smallest Ising coupling (scan)");
    app.add_option("--j-max,--j_max", cfg.j_max, "largest Ising coupling (scan)");
    app.add_option("--j-steps,--j_steps", cfg.j_steps, "number of Ising values (scan)")->check(CLI::Range(2, 1 << 20));
    std::vector<std::string> layers;
    app.add_option("--layers", layers, "scan layers: purity[,concurrence]")->delimiter(',')->check(CLI::IsMember({"purity", "concurrence"}));
    app.add_option("--seed", cfg.seed, "seed for stochastic components");
    app.add_option("--out", cfg.out_path, "output CSV path")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested{app.help()};
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    for (double x : {cfg.kappa, cfg.ising, cfg.alpha, cfg.t_max, cfg.j_min, cfg.j_max})
        if (!std::isfinite(x)) throw UsageError("numeric options must be finite");
    if (!(cfg.t_max > 0.0)) throw UsageError("--t-max must be positive");
    if (cfg.j_max < cfg.j_min) throw UsageError("--j-max must not be smaller than --j-min");
    if (cfg.out_path.empty()) throw UsageError("--out must not be empty");
    if (!layers.empty()) {
        cfg.layer_purity = true;  // purity is always written
        cfg.layer_concurrence = std::find(layers.begin(), layers.end(), "concurrence") != layers.end();
    }
    return cfg;
}

/// Shortest decimal text that reads back to the same double.
inline std::string format_number(double x) {
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc{}) throw std::logic_error("format_number failed");
    return {buf, end};
}

inline void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
    os << "t,purity,concurrence\n";
    for (const auto& p : tr) os << format_number(p.t) << ',' << format_number(p.purity) << ',' << format_number(p.concurrence) << '\n';
}

inline void write_scan_csv(std::ostream& os, const ScanGrid& grid) {
    os << (grid.has_concurrence() ? "J,t,purity,concurrence\n" : "J,t,purity\n");
    for (std::size_t j = 0; j < grid.j_values.size(); ++j)
        for (std::size_t t = 0; t < grid.t_values.size(); ++t) {
            const std::size_t k = grid.index(j, t);
            os << format_number(grid.j_values[j]) << ',' << format_number(grid.t_values[t]) << ',' << format_number(grid.purity[k]);
            if (grid.has_concurrence()) os << ',' << format_number(grid.concurrence[k]);
            os << '\n';
        }
}

inline unsigned threads_from_environment() {
    const char* env = std::getenv("CAVITY_TANGLE_THREADS");
    if (env == nullptr) return 1;
    unsigned value = 0;
    const std::string s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || value == 0) return 1;
    return value;
}

inline ScanRequest scan_request(const RunConfig& cfg) {
    ScanRequest req;
    req.kappa = cfg.kappa;
    req.model = cfg.model;
    req.j_min = cfg.j_min;
    req.j_max = cfg.j_max;
    req.j_steps = cfg.j_steps;
    req.t_max = cfg.t_max;
    req.t_steps = cfg.t_steps;
    req.spec = {cfg.family, cfg.alpha, cfg.n};
    req.with_concurrence = cfg.layer_concurrence;
    req.pair_sum = cfg.pair_sum;
    return req;
}

/// Computes the requested records and writes them to cfg.out_path.
inline void run(const RunConfig& cfg, unsigned threads = 1) {
    std::ostringstream body;
    switch (cfg.command) {
        case Command::trajectory:
            write_trajectory_csv(body, cp_trajectory(model_params(cfg.model, cfg.kappa, cfg.ising, cfg.pair_sum),
                                                     {cfg.family, cfg.alpha, cfg.n}, cfg.t_max, cfg.t_steps));
            break;
        case Command::redcurve:
            write_trajectory_csv(body, red_curve(cfg.n, cfg.t_max, cfg.t_steps));
            break;
        case Command::scan:
            write_scan_csv(body, density_scan(scan_request(cfg), threads));
            break;
    }
    std::ofstream out(cfg.out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + cfg.out_path + " for writing");
    out << body.str();
    out.flush();
    if (!out) throw IoError("failed writing " + cfg.out_path);
}

/// Full program: parse, run, map failures onto exit codes.
inline int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    try {
        cfg = parse_config(args);
    } catch (const HelpRequested& h) {
        out << h.text;
        return kOk;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\nRun with --help for usage.\n";
        return kUsage;
    }
    try {
        run(cfg, threads_from_environment());
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << '\n';
        return kIo;
    } catch (const std::exception& e) {
        err << "physics error: " << e.what() << '\n';
        return kPhysics;
    }
    return kOk;
}

}  // namespace cavity_tangle::cli
