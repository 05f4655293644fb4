#pragma once

#include <array>
#include <optional>

#include "ringecho/area.hpp"
#include "ringecho/core.hpp"

namespace ringecho {

// Interior pulse areas feeding a seed builder, plus the decoherence symbol
// value plugged into the seed formulas. gamma_factor enters each builder with
// the power the corresponding formula carries (first power for the primary
// and three-pulse echoes, squared and fourth power for the later ones); the
// caller decides what accumulated attenuation it represents.
struct EchoSeedContext {
    double theta_1 = 0.0;
    double theta_2 = 0.0;
    double theta_3 = 0.0;    // recovery pulse of the three-pulse protocol
    double theta_e1 = 0.0;   // interior area of the already-emitted first echo
    double theta_e2 = 0.0;   // interior area of the already-emitted second echo
    double gamma_factor = 1.0;
};

// Two-pulse (primary) echo: (G sin(t1) sin^2(t2/2), -cos(t1) cos(t2)).
BlochSeed primary_echo_seed(const EchoSeedContext& ctx);

// Three-pulse echo with a recovery pulse theta_3, silenced until the third
// pulse arrives: (G sin(t1) sin^2(t2/2) sin^2(t3/2), -cos(t1) cos(t2) cos(t3)).
BlochSeed rose_echo_seed(const EchoSeedContext& ctx);

// Second echo of the two-pulse train; the first echo acts as a third pulse
// of area theta_e1.
BlochSeed second_echo_seed(const EchoSeedContext& ctx);

// Third echo of the two-pulse train, seeded by theta_1, theta_2 and both
// earlier echoes.
BlochSeed third_echo_seed(const EchoSeedContext& ctx);

// Undriven emission interval: theta_e = xi * (2 v0 cos^2(theta_e/2) + w0 sin(theta_e)).
// The principal branch grows by homotopy in v0 from the trivial root 0; it
// never reaches pi. The emitted exterior area is sqrt(kappa) * theta_e.
AreaSolution solve_echo(const CavityParams& p, const BlochSeed& seed,
                        const BranchPolicy& policy = {});

// Small-area limit of the emission equation, 2 xi v0 / (1 - xi w0).
// Throws std::domain_error at the pole xi * w0 = 1.
double echo_linear(const BlochSeed& seed, double xi);

// Third-order expansion of the emission equation,
//   theta^3 + (3 v0 / w0) theta^2 + 6 zeta theta - 12 v0 / w0 = 0,
// zeta = (1 - w0 xi) / (w0 xi). delta_1 is the depressed-cubic constant
// term -2 (v0/w0) (6 + 3 zeta - (v0/w0)^2); delta_0 = -discriminant/108.
struct CubicSolution {
    double zeta = 0.0;
    double discriminant = 0.0;
    double delta_0 = 0.0;
    double delta_1 = 0.0;
    double root = 0.0;
    int root_count = 1;                    // 1 or 3 real roots
    std::array<double, 3> roots{0, 0, 0};  // all real roots, ascending; first
                                           // root_count entries are valid
};

// Closed-form root of the cubic expansion. With three real roots the one
// nearest `previous` is selected (nearest zero when previous is absent).
// Throws std::domain_error when w0 == 0 (expansion degenerates; use
// solve_echo) and std::invalid_argument when xi <= 0.
CubicSolution echo_cubic(const BlochSeed& seed, double xi,
                         std::optional<double> previous = std::nullopt);

// Phase bound of the emission equation: phi = 2 * atan2(v0, -w0), satisfying
//   2 sqrt(v0^2+w0^2) cos(theta/2) sin((phi-theta)/2) = 2 v0 cos^2(theta/2) + w0 sin(theta)
// for every theta. For v0 > 0 it lies in (0, 2 pi) and bounds the principal
// echo area from above. Throws std::invalid_argument for the zero seed.
double phase_bound(const BlochSeed& seed);

// Value of the decoherence symbol used by the echo-train seed formulas.
struct EchoDecoherence {
    double gamma_factor = 1.0;
};

// Symbol value for a two-pulse train with homogeneous rate gamma: the primary
// echo is emitted at 2 tau, so the factor is exp(-gamma * 2 tau).
EchoDecoherence train_decoherence(const DecoherenceModel& m);

// First and second driven pulses plus the primary echo.
struct PrimaryEchoResult {
    AreaSolution first;
    AreaSolution second;
    BlochSeed seed;
    AreaSolution echo;
    double efficiency = 0.0;  // emitted exterior area over the first input area
};

PrimaryEchoResult primary_echo_chain(const CavityParams& p, ExteriorArea in_1,
                                     ExteriorArea in_2,
                                     double gamma_factor = 1.0);

// Full two-pulse train: both driven pulses, three echoes, the composite-pulse
// total and the total-area bookkeeping. Exterior outputs are reported in the
// emission convention sqrt(kappa) * theta - theta_in, under which the
// composite identity out_sigma = out_tot - out_1 - out_2 holds with the same
// sign as the emitted echoes.
struct EchoTrainResult {
    AreaSolution first;
    AreaSolution second;
    AreaSolution total;
    AreaSolution echo_1;
    AreaSolution echo_2;
    AreaSolution echo_3;
    BlochSeed seed_1;
    BlochSeed seed_2;
    BlochSeed seed_3;
    ExteriorArea out_1;        // emission-convention outputs, normalized
    ExteriorArea out_2;
    ExteriorArea out_tot;
    ExteriorArea out_e1;
    ExteriorArea out_e2;
    ExteriorArea out_e3;
    double theta_e_sigma = 0.0;  // theta_tot - theta_1 - theta_2, radians
    ExteriorArea out_sigma;      // out_tot - out_1 - out_2
    double theta_diff = 0.0;     // (out_sigma - out_e1 - out_e2 - out_e3) raw,
                                 // over 10 * raw first input area
};

EchoTrainResult echo_train(const CavityParams& p, ExteriorArea in_1,
                           ExteriorArea in_2,
                           const EchoDecoherence& dec = {});

}  // namespace ringecho
