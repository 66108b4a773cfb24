#include <CLI11.hpp>

#include <iostream>

#include "ssp/experiment.hpp"

namespace {

using ssp::experiment::ExperimentConfig;
using ssp::experiment::Mode;

struct CommonOpts {
    std::string config_path;
    std::string format;
    bool serial = false;
};

void add_common(CLI::App* cmd, ExperimentConfig& cfg, CommonOpts& extra) {
    cmd->add_option("--config", extra.config_path, "declarative JSON config file");
    cmd->add_option("--m", cfg.params.m, "diffusion exponent m > 1");
    cmd->add_option("--N", cfg.params.N, "space dimension N >= 3");
    cmd->add_option("--p", cfg.params.p, "reaction exponent p > m");
    cmd->add_option("--tol-rel", cfg.tol_rel, "integrator relative tolerance");
    cmd->add_option("--tol-abs", cfg.tol_abs, "integrator absolute tolerance");
    cmd->add_option("--tol-C", cfg.tol_C, "bisection tolerance on the shooting parameter");
    cmd->add_option("--x-big", cfg.x_big, "far-field threshold (0: parameter default)");
    cmd->add_option("--drift-tol", cfg.drift_tol, "far-field Z drift gate");
    cmd->add_option("--delta", cfg.delta, "unstable-manifold launch offset");
    cmd->add_option("--span", cfg.eta_span, "integration span in eta");
    cmd->add_option("--out", cfg.out, "output directory");
    cmd->add_option("--format", extra.format, "output format: csv|json");
    cmd->add_flag("--serial", extra.serial, "disable the parallel sweep kernel");
}

// File config as base; every explicitly passed flag wins.
void merge(CLI::App* cmd, const ExperimentConfig& cli, ExperimentConfig& cfg) {
    auto passed = [cmd](const std::string& name) { return cmd->count(name) > 0; };
    if (passed("--m")) cfg.params.m = cli.params.m;
    if (passed("--N")) cfg.params.N = cli.params.N;
    if (passed("--p")) cfg.params.p = cli.params.p;
    if (passed("--tol-rel")) cfg.tol_rel = cli.tol_rel;
    if (passed("--tol-abs")) cfg.tol_abs = cli.tol_abs;
    if (passed("--tol-C")) cfg.tol_C = cli.tol_C;
    if (passed("--x-big")) cfg.x_big = cli.x_big;
    if (passed("--drift-tol")) cfg.drift_tol = cli.drift_tol;
    if (passed("--delta")) cfg.delta = cli.delta;
    if (passed("--span")) cfg.eta_span = cli.eta_span;
    if (passed("--out")) cfg.out = cli.out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"self-similar blow-up profile toolkit"};
    app.require_subcommand(1);

    ExperimentConfig cli;
    CommonOpts extra;
    std::vector<double> C_list;
    int K = 1;
    double eta_end = 10.0, eta_start = -30.0;

    auto* exponents = app.add_subcommand("exponents", "critical-exponent table");
    add_common(exponents, cli, extra);
    auto* portrait = app.add_subcommand("portrait", "critical points and eigen-data");
    add_common(portrait, cli, extra);
    auto* shoot = app.add_subcommand("shoot", "classify members of the orbit family");
    add_common(shoot, cli, extra);
    shoot->add_option("--C", C_list, "shooting parameters (repeatable)");
    auto* find = app.add_subcommand("find", "bisect for connecting orbits");
    add_common(find, cli, extra);
    find->add_option("--K", K, "number of oscillation classes to search");
    auto* lepin = app.add_subcommand("lepin", "linearized zero-count oracle");
    add_common(lepin, cli, extra);
    lepin->add_option("--eta-end", eta_end, "asymptotic initialization point");
    lepin->add_option("--eta-start", eta_start, "left end of the count window");

    auto* residuals = app.add_subcommand("residuals", "exact-solution residual sweep");
    add_common(residuals, cli, extra);

    CLI11_PARSE(app, argc, argv);
    CLI::App* sub = app.get_subcommands().front();

    ExperimentConfig cfg;
    try {
        if (!extra.config_path.empty()) cfg = ssp::experiment::load_config(extra.config_path);
        merge(sub, cli, cfg);
        if (sub == exponents) cfg.mode = Mode::Exponents;
        if (sub == portrait) cfg.mode = Mode::Portrait;
        if (sub == shoot) cfg.mode = Mode::Shoot;
        if (sub == find) cfg.mode = Mode::Find;
        if (sub == lepin) cfg.mode = Mode::Lepin;
        if (sub == residuals) cfg.mode = Mode::Residuals;
        if (sub == shoot && sub->count("--C") > 0) cfg.C_list = C_list;
        if (sub == find && sub->count("--K") > 0) cfg.K_max = K;
        if (sub == lepin) {
            if (sub->count("--eta-end") > 0) cfg.lepin_eta_end = eta_end;
            if (sub->count("--eta-start") > 0) cfg.lepin_eta_start = eta_start;
        }
        if (extra.serial) cfg.parallel = false;
        if (sub->count("--format") > 0) {
            if (extra.format == "csv")
                cfg.format = ssp::experiment::OutputFormat::CSV;
            else if (extra.format == "json")
                cfg.format = ssp::experiment::OutputFormat::JSON;
            else
                throw ssp::experiment::ConfigError("unknown format: " + extra.format);
        }
    } catch (const ssp::experiment::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return ssp::experiment::kExitConfig;
    } catch (const ssp::experiment::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return ssp::experiment::kExitIo;
    }

    const int code = ssp::experiment::run_to_exit_code(cfg);
    if (code == ssp::experiment::kExitOk) {
        std::cout << "wrote " << (cfg.out / "summary.json").string() << "\n";
    } else {
        std::cerr << "failed with exit code " << code << "; see "
                  << (cfg.out / "error.json").string() << "\n";
    }
    return code;
}
