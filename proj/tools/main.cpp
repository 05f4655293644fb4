#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ringecho/area.hpp"
#include "ringecho/config.hpp"
#include "ringecho/echo.hpp"
#include "ringecho/mb.hpp"
#include "ringecho/sweep.hpp"

namespace {

using namespace ringecho;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitSolver = 2;
constexpr int kExitOracle = 3;

struct CommonOpts {
    std::string config_path;
    std::string out_path;
    std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path,
                    "JSON config file (omit or \"-\" for defaults)");
    cmd->add_option("--out", opts.out_path,
                    "output file (default: config output.path, else stdout)");
    cmd->add_option("--set", opts.sets,
                    "dotted config override, e.g. pulses.in_1=0.5pi (repeatable)")
        ->take_all();
}

// --out beats config.output.path; empty means stdout.
void emit(const sweep::Table& table, const CommonOpts& opts,
          const config::OutputSpec& output) {
    const std::string path = !opts.out_path.empty() ? opts.out_path : output.path;
    if (path.empty()) {
        sweep::write_csv(table, std::cout, output.precision);
        return;
    }
    std::ofstream file(path);
    if (!file)
        throw config::ConfigError("output: cannot open \"" + path + "\" for writing");
    sweep::write_csv(table, file, output.precision);
    std::cerr << "wrote " << path << "\n";
}

void emit_text(const std::string& text, const CommonOpts& opts,
               const config::OutputSpec& output) {
    const std::string path = !opts.out_path.empty() ? opts.out_path : output.path;
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream file(path);
    if (!file)
        throw config::ConfigError("output: cannot open \"" + path + "\" for writing");
    file << text;
    std::cerr << "wrote " << path << "\n";
}

std::string describe(const char* label, double in_normalized,
                     const AreaSolution& s) {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "%s: norm_theta_in=%.12g theta=%.12g norm_theta_out=%.12g "
                  "residual=%.3g branch=%d iterations=%d\n",
                  label, in_normalized, s.theta.radians, s.theta_out.normalized,
                  s.residual, s.branch_id, s.iterations);
    return buf;
}

int run_solve(const CommonOpts& opts) {
    const config::RunConfig cfg = config::load_config(opts.config_path, opts.sets);
    const CouplingRatios ratios = coupling_ratios(cfg.cavity);

    std::string text;
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "cavity: kappa=%.12g kappa_in=%.12g varkappa=%.12g kappa_s=%.12g\n",
                  cfg.cavity.kappa, cfg.cavity.kappa_in, cfg.cavity.varkappa,
                  cfg.cavity.kappa_s());
    text += buf;
    std::snprintf(buf, sizeof(buf),
                  "ratios: xi=%.12g xi_im=%.12g impedance_matched=%s "
                  "weak_signal_transmission=%.12g\n",
                  ratios.xi, ratios.xi_im,
                  impedance_matched(cfg.cavity) ? "yes" : "no",
                  weak_signal_transmission(cfg.cavity));
    text += buf;

    const AreaSolution first = solve_first_pulse(cfg.cavity, ExteriorArea{cfg.in_1});
    text += describe("pulse_1", cfg.in_1, first);
    if (cfg.in_2 != 0.0) {
        const AreaSolution second =
            solve_second_pulse(cfg.cavity, ExteriorArea{cfg.in_2}, first.theta);
        text += describe("pulse_2", cfg.in_2, second);
        const AreaSolution total = solve_composite_total(
            cfg.cavity, ExteriorArea{cfg.in_1}, ExteriorArea{cfg.in_2});
        text += describe("composite", cfg.in_1 + cfg.in_2, total);
    }
    emit_text(text, opts, cfg.output);
    return kExitOk;
}

int run_echo_train(const CommonOpts& opts) {
    const config::RunConfig cfg = config::load_config(opts.config_path, opts.sets);
    const EchoTrainResult train =
        echo_train(cfg.cavity, ExteriorArea{cfg.in_1}, ExteriorArea{cfg.in_2},
                   EchoDecoherence{cfg.train_gamma_factor()});
    emit(sweep::train_table(ExteriorArea{cfg.in_1}, ExteriorArea{cfg.in_2}, train),
         opts, cfg.output);
    std::fprintf(stderr,
                 "echo train: theta_1=%.6g theta_2=%.6g echoes=(%.6g, %.6g, %.6g) "
                 "theta_diff=%.6g\n",
                 train.first.theta.radians, train.second.theta.radians,
                 train.echo_1.theta.radians, train.echo_2.theta.radians,
                 train.echo_3.theta.radians, train.theta_diff);
    return kExitOk;
}

int run_sweep(const CommonOpts& opts) {
    const config::RunConfig cfg = config::load_config(opts.config_path, opts.sets);
    emit(sweep::sweep_table(cfg), opts, cfg.output);
    return kExitOk;
}

int run_figure(const CommonOpts& opts, const std::string& name) {
    // Figure overrides address figure struct fields, not the config schema;
    // --config still supplies output settings.
    const config::RunConfig cfg = config::load_config(opts.config_path, {});
    emit(sweep::run_figure(name, opts.sets), opts, cfg.output);
    return kExitOk;
}

int run_mb_verify(const CommonOpts& opts, double tolerance_scale) {
    const config::RunConfig cfg = config::load_config(opts.config_path, opts.sets);
    const mb::MBSimConfig sim = cfg.oracle_config();
    mb::VerifyTolerances tol = cfg.oracle_tolerances();
    if (tolerance_scale > 0.0) {
        tol.pulse *= tolerance_scale;
        tol.echo *= tolerance_scale;
        tol.empty *= tolerance_scale;
    }
    const EchoTrainResult train =
        echo_train(cfg.cavity, ExteriorArea{cfg.in_1}, ExteriorArea{cfg.in_2},
                   EchoDecoherence{cfg.train_gamma_factor()});

    for (const std::string& warning : sim.warnings())
        std::cerr << "warning: " << warning << "\n";

    const mb::VerifyReport report = mb::verify_against_theorem(sim, train, tol);

    sweep::Table table;
    table.columns = {"measured", "predicted", "deviation", "tolerance",
                     "grid_shift", "pass"};
    table.label_column = "quantity";
    for (const mb::VerifyRow& row : report.rows) {
        table.row_labels.push_back(row.label);
        table.rows.push_back({row.measured, row.predicted, row.deviation,
                              row.tolerance, row.grid_shift,
                              row.pass ? 1.0 : 0.0});
    }
    emit(table, opts, cfg.output);

    for (const std::string& note : report.notes)
        std::cerr << "note: " << note << "\n";
    std::fprintf(stderr, "max Bloch norm drift: %.3g\n", report.max_norm_drift);
    std::fprintf(stderr, "verdict: %s\n", report.all_pass ? "PASS" : "FAIL");
    return report.all_pass ? kExitOk : kExitOracle;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Pulse-area bookkeeping for photon echoes in a ring cavity: steady "
        "area solvers, echo-train tables, parameter sweeps and a brute-force "
        "integration cross-check"};
    app.require_subcommand(1);

    CommonOpts solve_opts;
    CLI::App* solve = app.add_subcommand(
        "solve", "solve the steady area balance for the configured pulses");
    add_common(solve, solve_opts);

    CommonOpts train_opts;
    CLI::App* train = app.add_subcommand(
        "echo-train", "two-pulse echo train: pulses, three echoes, totals (CSV)");
    add_common(train, train_opts);

    CommonOpts sweep_opts;
    CLI::App* sweep_cmd = app.add_subcommand(
        "sweep", "echo-train sweep along config.sweep.axis (CSV)");
    add_common(sweep_cmd, sweep_opts);

    CommonOpts figure_opts;
    std::string figure_name;
    CLI::App* figure = app.add_subcommand(
        "figure", "reference tables: transition, approx, echo-th2, three-echoes");
    figure->add_option("name", figure_name, "figure name")->required();
    add_common(figure, figure_opts);

    CommonOpts verify_opts;
    double tolerance_scale = 0.0;
    CLI::App* verify = app.add_subcommand(
        "mb-verify", "integrate the full dynamics and compare to the solvers");
    add_common(verify, verify_opts);
    verify->add_option("--tolerance", tolerance_scale,
                       "scale factor applied to all verification tolerances");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) return run_solve(solve_opts);
        if (train->parsed()) return run_echo_train(train_opts);
        if (sweep_cmd->parsed()) return run_sweep(sweep_opts);
        if (figure->parsed()) return run_figure(figure_opts, figure_name);
        if (verify->parsed()) return run_mb_verify(verify_opts, tolerance_scale);
    } catch (const config::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        std::fprintf(stderr,
                     "  best theta %.12g (residual %.3g) in bracket [%.6g, %.6g]\n",
                     e.best_theta, e.best_residual, e.bracket_lo, e.bracket_hi);
        return kExitSolver;
    } catch (const mb::IntegrationError& e) {
        std::cerr << "integration error at t=" << e.time() << ": " << e.what()
                  << "\n";
        return kExitOracle;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitOracle;
    }
    return kExitOk;
}
