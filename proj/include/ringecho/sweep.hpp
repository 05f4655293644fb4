#pragma once

#include <iosfwd>
#include <numbers>
#include <string>
#include <vector>

#include "ringecho/config.hpp"
#include "ringecho/echo.hpp"

// Deterministic tabular output: parameter sweeps of the echo train and the
// fixed-parameter tables behind the four reference plots. All floating point
// is printed with a fixed significant-digit count so identical configs give
// byte-identical CSV.
namespace ringecho::sweep {

// NaN cells are printed empty (used where a column does not apply to a row).
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> row_labels;  // non-empty -> leading label column
    std::string label_column = "stage";
};

void write_csv(const Table& table, std::ostream& out, int precision = 12);
std::string to_csv(const Table& table, int precision = 12);

// One row per pulse/echo of a chained train plus a closing "train" row that
// carries the total-area remainder diagnostics.
Table train_table(ExteriorArea in_1, ExteriorArea in_2,
                  const EchoTrainResult& train);

// Echo-train sweep along config.sweep.axis (pulses.in_1, pulses.in_2,
// pulses.tau, cavity.kappa, cavity.kappa_in, cavity.varkappa,
// decoherence.gamma). Rows include both sweep endpoints; the row count equals
// sweep.steps. Throws config::ConfigError for an unknown axis or a missing
// sweep section.
Table sweep_table(const config::RunConfig& base);

// Single-pulse transmission: interior and output areas against the incoming
// area, impedance-matched defaults. Inclusive endpoints.
struct TransitionFigure {
    CavityParams params{1.0, 0.0, 1.0};
    double from = 0.0;
    double to = 2.0 * std::numbers::pi;
    int steps = 201;
};

// Numerical vs linear vs cubic primary-echo area over the first input area,
// one column block per decoherence factor. The grid covers [from, to) in
// `steps` rows, matching the reference sweep. Relative-error cells are empty
// where the numerical area is below the 0.01 pi (interior) guard.
struct ApproxFigure {
    CavityParams params{1.0, 0.0, 1.0};
    double in_2 = 0.9 * std::numbers::pi;
    double from = 0.0;
    double to = 2.0 * std::numbers::pi;
    int steps = 200;
    double gamma_a = 1.0;
    double gamma_b = 0.5;
};

// Primary-echo efficiency against the second input area for two first-pulse
// areas. Inclusive endpoints.
struct EchoTh2Figure {
    CavityParams params{1.0, 0.0, 1.0};
    double in_1_a = std::numbers::pi / 5.0;
    double in_1_b = std::numbers::pi / 2.0;
    double from = 0.0;
    double to = 3.0 * std::numbers::pi;
    int steps = 301;
};

// Three-echo efficiencies and the scaled total-area remainder against the
// coupling ratio xi (kappa_in = 0 keeps xi = varkappa). Inclusive endpoints.
struct ThreeEchoesFigure {
    double kappa = 1.0;
    double kappa_in = 0.0;
    double in_1 = std::numbers::pi / 2.0;
    double in_2 = 0.9 * std::numbers::pi;
    double in_1_weak = std::numbers::pi / 10.0;
    double xi_from = 0.01;
    double xi_to = 2.0;
    int steps = 200;
    double gamma_factor = 1.0;
};

Table run(const TransitionFigure& figure);
Table run(const ApproxFigure& figure);
Table run(const EchoTh2Figure& figure);
Table run(const ThreeEchoesFigure& figure);

// Figure names accepted by the CLI: "transition", "approx", "echo-th2",
// "three-echoes". Overrides are key=value pairs against the figure struct
// fields above (areas accept "0.9pi" strings); unknown names or keys throw
// config::ConfigError.
Table run_figure(const std::string& name,
                 const std::vector<std::string>& overrides);

}  // namespace ringecho::sweep
