#include "ringecho/sweep.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "ringecho/area.hpp"

namespace ringecho::sweep {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string format_cell(double value, int precision) {
    if (std::isnan(value)) return "";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", precision, value);
    return buf;
}

// Inclusive grid: steps rows covering [from, to].
double grid_at(double from, double to, int steps, int k) {
    if (steps <= 1) return from;
    return from + (to - from) * static_cast<double>(k) / (steps - 1);
}

// Half-open grid: steps rows covering [from, to).
double grid_at_open(double from, double to, int steps, int k) {
    return from + (to - from) * static_cast<double>(k) / steps;
}

double efficiency_of(double out_normalized, double in_normalized) {
    if (in_normalized == 0.0) return 0.0;
    return out_normalized / in_normalized;
}

}  // namespace

void write_csv(const Table& table, std::ostream& out, int precision) {
    const bool labeled = !table.row_labels.empty();
    if (labeled) out << table.label_column;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (labeled || c > 0) out << ',';
        out << table.columns[c];
    }
    out << '\n';
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        if (labeled) out << table.row_labels[r];
        for (std::size_t c = 0; c < table.rows[r].size(); ++c) {
            if (labeled || c > 0) out << ',';
            out << format_cell(table.rows[r][c], precision);
        }
        out << '\n';
    }
}

std::string to_csv(const Table& table, int precision) {
    std::ostringstream out;
    write_csv(table, out, precision);
    return out.str();
}

Table train_table(ExteriorArea in_1, ExteriorArea in_2,
                  const EchoTrainResult& train) {
    Table table;
    table.columns = {"theta",          "norm_theta_in", "norm_theta_out",
                     "v0",             "w0",            "residual",
                     "branch_id",      "theta_e_sigma", "norm_theta_out_sigma",
                     "theta_diff"};
    const auto solution_row = [&](const std::string& label, const AreaSolution& s,
                                  double in_norm, double out_norm,
                                  const BlochSeed& seed) {
        table.row_labels.push_back(label);
        table.rows.push_back({s.theta.radians, in_norm, out_norm, seed.v0, seed.w0,
                              s.residual, static_cast<double>(s.branch_id), kNaN,
                              kNaN, kNaN});
    };
    solution_row("pulse_1", train.first, in_1.normalized, train.out_1.normalized,
                 BlochSeed{0.0, -1.0});
    solution_row("pulse_2", train.second, in_2.normalized, train.out_2.normalized,
                 BlochSeed{0.0, -std::cos(train.first.theta.radians)});
    solution_row("composite", train.total, in_1.normalized + in_2.normalized,
                 train.out_tot.normalized, BlochSeed{0.0, -1.0});
    solution_row("echo_1", train.echo_1, 0.0, train.out_e1.normalized, train.seed_1);
    solution_row("echo_2", train.echo_2, 0.0, train.out_e2.normalized, train.seed_2);
    solution_row("echo_3", train.echo_3, 0.0, train.out_e3.normalized, train.seed_3);
    table.row_labels.push_back("train");
    table.rows.push_back({kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN,
                          train.theta_e_sigma, train.out_sigma.normalized,
                          train.theta_diff});
    return table;
}

Table sweep_table(const config::RunConfig& base) {
    if (!base.sweep)
        throw config::ConfigError("sweep: config has no sweep section");
    const config::SweepSpec& spec = *base.sweep;

    // The axis mutates a copy of the run config per row; decoherence keeps
    // its configured semantics (a swept tau or gamma re-enters through
    // train_gamma_factor).
    const auto apply_axis = [&spec](config::RunConfig& cfg, double value) {
        if (spec.axis == "pulses.in_1")
            cfg.in_1 = value;
        else if (spec.axis == "pulses.in_2")
            cfg.in_2 = value;
        else if (spec.axis == "pulses.tau")
            cfg.tau = value;
        else if (spec.axis == "cavity.kappa")
            cfg.cavity.kappa = value;
        else if (spec.axis == "cavity.kappa_in")
            cfg.cavity.kappa_in = value;
        else if (spec.axis == "cavity.varkappa")
            cfg.cavity.varkappa = value;
        else if (spec.axis == "decoherence.gamma")
            cfg.gamma = value;
        else
            throw config::ConfigError(
                "sweep.axis: unknown axis \"" + spec.axis +
                "\" (expected pulses.in_1, pulses.in_2, pulses.tau, "
                "cavity.kappa, cavity.kappa_in, cavity.varkappa, or "
                "decoherence.gamma)");
    };

    Table table;
    table.columns = {spec.axis,
                     "norm_theta_in_1",
                     "norm_theta_in_2",
                     "theta_1",
                     "theta_2",
                     "theta_tot",
                     "theta_e1",
                     "theta_e2",
                     "theta_e3",
                     "theta_e_sigma",
                     "norm_theta_out_1",
                     "norm_theta_out_2",
                     "norm_theta_out_tot",
                     "norm_theta_out_e1",
                     "norm_theta_out_e2",
                     "norm_theta_out_e3",
                     "norm_theta_out_sigma",
                     "theta_diff",
                     "residual_1",
                     "residual_2",
                     "residual_tot",
                     "branch_1",
                     "branch_2",
                     "branch_tot"};
    for (int k = 0; k < spec.steps; ++k) {
        config::RunConfig cfg = base;
        const double x = grid_at(spec.from, spec.to, spec.steps, k);
        apply_axis(cfg, x);
        cfg.cavity.validate();
        const EchoTrainResult train =
            echo_train(cfg.cavity, ExteriorArea{cfg.in_1}, ExteriorArea{cfg.in_2},
                       EchoDecoherence{cfg.train_gamma_factor()});
        table.rows.push_back({x,
                              cfg.in_1,
                              cfg.in_2,
                              train.first.theta.radians,
                              train.second.theta.radians,
                              train.total.theta.radians,
                              train.echo_1.theta.radians,
                              train.echo_2.theta.radians,
                              train.echo_3.theta.radians,
                              train.theta_e_sigma,
                              train.out_1.normalized,
                              train.out_2.normalized,
                              train.out_tot.normalized,
                              train.out_e1.normalized,
                              train.out_e2.normalized,
                              train.out_e3.normalized,
                              train.out_sigma.normalized,
                              train.theta_diff,
                              train.first.residual,
                              train.second.residual,
                              train.total.residual,
                              static_cast<double>(train.first.branch_id),
                              static_cast<double>(train.second.branch_id),
                              static_cast<double>(train.total.branch_id)});
    }
    return table;
}

Table run(const TransitionFigure& figure) {
    Table table;
    table.columns = {"norm_theta_in_1", "theta_1", "norm_theta_out_1"};
    for (int k = 0; k < figure.steps; ++k) {
        const double in = grid_at(figure.from, figure.to, figure.steps, k);
        const AreaSolution s = solve_first_pulse(figure.params, ExteriorArea{in});
        table.rows.push_back({in, s.theta.radians, s.theta_out.normalized});
    }
    return table;
}

Table run(const ApproxFigure& figure) {
    Table table;
    table.columns = {"norm_theta_in_1"};
    for (const char* suffix : {"_a", "_b"}) {
        table.columns.push_back(std::string("gamma") + suffix);
        table.columns.push_back(std::string("norm_theta_out_e1_num") + suffix);
        table.columns.push_back(std::string("norm_theta_out_e1_linear") + suffix);
        table.columns.push_back(std::string("norm_theta_out_e1_cubic") + suffix);
        table.columns.push_back(std::string("cubic_rel_err") + suffix);
    }

    const double xi = coupling_ratios(figure.params).xi;
    // Undriven emission sqrt(kappa) * theta normalizes to 2 * theta for any kappa.
    const double to_norm = 2.0;
    double prev_cubic_a = 0.0, prev_cubic_b = 0.0;
    for (int k = 0; k < figure.steps; ++k) {
        const double in = grid_at_open(figure.from, figure.to, figure.steps, k);
        const AreaSolution first =
            solve_first_pulse(figure.params, ExteriorArea{in});
        const AreaSolution second =
            solve_second_pulse(figure.params, ExteriorArea{figure.in_2}, first.theta);
        std::vector<double> row{in};
        for (const double gamma : {figure.gamma_a, figure.gamma_b}) {
            EchoSeedContext ctx;
            ctx.theta_1 = first.theta.radians;
            ctx.theta_2 = second.theta.radians;
            ctx.gamma_factor = gamma;
            const BlochSeed seed = primary_echo_seed(ctx);

            double& prev = (gamma == figure.gamma_a) ? prev_cubic_a : prev_cubic_b;
            const AreaSolution echo = solve_echo(figure.params, seed);
            const double num = echo.theta.radians;
            double linear = kNaN;
            try {
                linear = echo_linear(seed, xi);
            } catch (const std::domain_error&) {
            }
            double cubic = kNaN;
            if (seed.w0 != 0.0) {
                cubic = echo_cubic(seed, xi, prev).root;
                prev = cubic;
            }
            double rel = kNaN;
            if (std::abs(num) > 0.01 * std::numbers::pi && !std::isnan(cubic))
                rel = std::abs(cubic - num) / std::abs(num);
            row.push_back(gamma);
            row.push_back(to_norm * num);
            row.push_back(std::isnan(linear) ? kNaN : to_norm * linear);
            row.push_back(std::isnan(cubic) ? kNaN : to_norm * cubic);
            row.push_back(rel);
        }
        table.rows.push_back(row);
    }
    return table;
}

Table run(const EchoTh2Figure& figure) {
    Table table;
    table.columns = {"norm_theta_in_2", "norm_theta_in_1_a", "efficiency_a",
                     "norm_theta_in_1_b", "efficiency_b"};
    for (int k = 0; k < figure.steps; ++k) {
        const double in_2 = grid_at(figure.from, figure.to, figure.steps, k);
        std::vector<double> row{in_2};
        for (const double in_1 : {figure.in_1_a, figure.in_1_b}) {
            const PrimaryEchoResult chain = primary_echo_chain(
                figure.params, ExteriorArea{in_1}, ExteriorArea{in_2});
            row.push_back(in_1);
            row.push_back(chain.efficiency);
        }
        table.rows.push_back(row);
    }
    return table;
}

Table run(const ThreeEchoesFigure& figure) {
    Table table;
    table.columns = {"xi",            "efficiency_e1", "efficiency_e2",
                     "efficiency_e3", "efficiency_e1_weak", "theta_diff"};
    for (int k = 0; k < figure.steps; ++k) {
        const double xi = grid_at(figure.xi_from, figure.xi_to, figure.steps, k);
        const double kappa_s = figure.kappa + figure.kappa_in;
        const CavityParams params{figure.kappa, figure.kappa_in, xi * kappa_s};
        const EchoTrainResult train =
            echo_train(params, ExteriorArea{figure.in_1}, ExteriorArea{figure.in_2},
                       EchoDecoherence{figure.gamma_factor});
        const PrimaryEchoResult weak =
            primary_echo_chain(params, ExteriorArea{figure.in_1_weak},
                               ExteriorArea{figure.in_2}, figure.gamma_factor);
        table.rows.push_back({xi,
                              efficiency_of(train.out_e1.normalized, figure.in_1),
                              efficiency_of(train.out_e2.normalized, figure.in_1),
                              efficiency_of(train.out_e3.normalized, figure.in_1),
                              weak.efficiency, train.theta_diff});
    }
    return table;
}

namespace {

double override_number(const std::string& key, const std::string& value) {
    try {
        return config::parse_area(value);
    } catch (const config::ConfigError& e) {
        throw config::ConfigError("figure override " + key + ": " + e.what());
    }
}

int override_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw config::ConfigError("figure override " + key +
                                  ": expected an integer, got \"" + value + "\"");
    }
}

struct Override {
    std::string key;
    std::string value;
};

std::vector<Override> split_overrides(const std::vector<std::string>& entries) {
    std::vector<Override> out;
    for (const std::string& entry : entries) {
        const auto eq = entry.find('=');
        if (eq == std::string::npos || eq == 0)
            throw config::ConfigError("figure override expects key=value, got \"" +
                                      entry + "\"");
        out.push_back({entry.substr(0, eq), entry.substr(eq + 1)});
    }
    return out;
}

[[noreturn]] void unknown_key(const std::string& name, const std::string& key,
                              const std::string& valid) {
    throw config::ConfigError("figure " + name + ": unknown override \"" + key +
                              "\" (valid: " + valid + ")");
}

}  // namespace

Table run_figure(const std::string& name,
                 const std::vector<std::string>& overrides) {
    const std::vector<Override> sets = split_overrides(overrides);

    if (name == "transition") {
        TransitionFigure figure;
        for (const Override& o : sets) {
            if (o.key == "kappa") figure.params.kappa = override_number(o.key, o.value);
            else if (o.key == "kappa_in") figure.params.kappa_in = override_number(o.key, o.value);
            else if (o.key == "varkappa") figure.params.varkappa = override_number(o.key, o.value);
            else if (o.key == "from") figure.from = override_number(o.key, o.value);
            else if (o.key == "to") figure.to = override_number(o.key, o.value);
            else if (o.key == "steps") figure.steps = override_int(o.key, o.value);
            else unknown_key(name, o.key, "kappa, kappa_in, varkappa, from, to, steps");
        }
        return run(figure);
    }
    if (name == "approx") {
        ApproxFigure figure;
        for (const Override& o : sets) {
            if (o.key == "kappa") figure.params.kappa = override_number(o.key, o.value);
            else if (o.key == "kappa_in") figure.params.kappa_in = override_number(o.key, o.value);
            else if (o.key == "varkappa") figure.params.varkappa = override_number(o.key, o.value);
            else if (o.key == "in_2") figure.in_2 = override_number(o.key, o.value);
            else if (o.key == "from") figure.from = override_number(o.key, o.value);
            else if (o.key == "to") figure.to = override_number(o.key, o.value);
            else if (o.key == "steps") figure.steps = override_int(o.key, o.value);
            else if (o.key == "gamma_a") figure.gamma_a = override_number(o.key, o.value);
            else if (o.key == "gamma_b") figure.gamma_b = override_number(o.key, o.value);
            else unknown_key(name, o.key,
                             "kappa, kappa_in, varkappa, in_2, from, to, steps, "
                             "gamma_a, gamma_b");
        }
        return run(figure);
    }
    if (name == "echo-th2") {
        EchoTh2Figure figure;
        for (const Override& o : sets) {
            if (o.key == "kappa") figure.params.kappa = override_number(o.key, o.value);
            else if (o.key == "kappa_in") figure.params.kappa_in = override_number(o.key, o.value);
            else if (o.key == "varkappa") figure.params.varkappa = override_number(o.key, o.value);
            else if (o.key == "in_1_a") figure.in_1_a = override_number(o.key, o.value);
            else if (o.key == "in_1_b") figure.in_1_b = override_number(o.key, o.value);
            else if (o.key == "from") figure.from = override_number(o.key, o.value);
            else if (o.key == "to") figure.to = override_number(o.key, o.value);
            else if (o.key == "steps") figure.steps = override_int(o.key, o.value);
            else unknown_key(name, o.key,
                             "kappa, kappa_in, varkappa, in_1_a, in_1_b, from, to, steps");
        }
        return run(figure);
    }
    if (name == "three-echoes") {
        ThreeEchoesFigure figure;
        for (const Override& o : sets) {
            if (o.key == "kappa") figure.kappa = override_number(o.key, o.value);
            else if (o.key == "kappa_in") figure.kappa_in = override_number(o.key, o.value);
            else if (o.key == "in_1") figure.in_1 = override_number(o.key, o.value);
            else if (o.key == "in_2") figure.in_2 = override_number(o.key, o.value);
            else if (o.key == "in_1_weak") figure.in_1_weak = override_number(o.key, o.value);
            else if (o.key == "xi_from") figure.xi_from = override_number(o.key, o.value);
            else if (o.key == "xi_to") figure.xi_to = override_number(o.key, o.value);
            else if (o.key == "steps") figure.steps = override_int(o.key, o.value);
            else if (o.key == "gamma_factor") figure.gamma_factor = override_number(o.key, o.value);
            else unknown_key(name, o.key,
                             "kappa, kappa_in, in_1, in_2, in_1_weak, xi_from, "
                             "xi_to, steps, gamma_factor");
        }
        return run(figure);
    }
    throw config::ConfigError(
        "unknown figure \"" + name +
        "\" (expected transition, approx, echo-th2, or three-echoes)");
}

}  // namespace ringecho::sweep
