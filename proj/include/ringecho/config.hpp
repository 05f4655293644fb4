#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ringecho/core.hpp"
#include "ringecho/mb.hpp"

// JSON run configuration shared by the CLI subcommands. Every section is
// optional and falls back to the defaults below; unknown keys are rejected
// with their full path. Area-valued fields accept plain numbers or strings
// like "0.9pi", "pi/5", "2pi".
namespace ringecho::config {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct SweepSpec {
    std::string axis;  // e.g. "pulses.in_1", "cavity.varkappa"
    double from = 0.0;
    double to = 0.0;
    int steps = 0;
};

// Knobs of the brute-force integration run. t_end = 0 derives an end time
// past the primary-echo window; window_width = 0 selects tau/2.
struct OracleSpec {
    double delta_inh = 0.01;
    int n_atoms = 401;
    double span = 20.0;
    double dt = 0.05;
    double pulse_duration = 2.0;
    mb::PulseShape pulse_shape = mb::PulseShape::Rectangular;
    double t_first = 650.0;
    double t_end = 0.0;
    int store_every = 1;
    double window_width = 0.0;
    double tol_pulse = 0.05;
    double tol_echo = 0.10;
    double tol_empty = 1e-6;
    bool grid_convergence = true;
};

struct OutputSpec {
    std::string path;  // empty -> stdout
    int precision = 12;
};

struct RunConfig {
    CavityParams cavity{1.0, 0.0, 1.0};
    double in_1 = 0.0;  // normalized exterior areas
    double in_2 = 0.0;
    double tau = 2500.0;
    double gamma = 0.0;
    std::optional<double> gamma_factor;  // exclusive with gamma
    std::optional<SweepSpec> sweep;
    OracleSpec oracle;
    OutputSpec output;

    // The per-train decoherence scalar: gamma_factor when given, otherwise
    // exp(-gamma * 2 tau).
    double train_gamma_factor() const;

    // Two-pulse simulation schedule matching this config; tolerances for
    // verify_against_theorem.
    mb::MBSimConfig oracle_config() const;
    mb::VerifyTolerances oracle_tolerances() const;
};

// "0.9pi", "pi/5", "-pi", "2*pi", or any plain decimal.
double parse_area(const std::string& text);

// Parses JSON text, applies dotted key=value overrides (e.g.
// "pulses.in_1=0.5pi"), validates the schema, and extracts the config.
RunConfig parse_config(const std::string& json_text,
                       const std::vector<std::string>& overrides = {});

// Reads the file at `path` ("" or "-" reads nothing and starts from
// defaults) and forwards to parse_config.
RunConfig load_config(const std::string& path,
                      const std::vector<std::string>& overrides = {});

}  // namespace ringecho::config
