#include "ringecho/echo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ringecho {

namespace {

double sin_half_sq(double theta) {
    const double s = std::sin(0.5 * theta);
    return s * s;
}

double cos_half_sq(double theta) {
    const double c = std::cos(0.5 * theta);
    return c * c;
}

}  // namespace

BlochSeed primary_echo_seed(const EchoSeedContext& ctx) {
    BlochSeed s;
    s.v0 = ctx.gamma_factor * std::sin(ctx.theta_1) * sin_half_sq(ctx.theta_2);
    s.w0 = -std::cos(ctx.theta_1) * std::cos(ctx.theta_2);
    return s;
}

BlochSeed rose_echo_seed(const EchoSeedContext& ctx) {
    BlochSeed s;
    s.v0 = ctx.gamma_factor * std::sin(ctx.theta_1) * sin_half_sq(ctx.theta_2) *
           sin_half_sq(ctx.theta_3);
    s.w0 = -std::cos(ctx.theta_1) * std::cos(ctx.theta_2) * std::cos(ctx.theta_3);
    return s;
}

BlochSeed second_echo_seed(const EchoSeedContext& ctx) {
    const double g2 = ctx.gamma_factor * ctx.gamma_factor;
    const double s1 = std::sin(ctx.theta_1), c1 = std::cos(ctx.theta_1);
    const double s2 = std::sin(ctx.theta_2), c2 = std::cos(ctx.theta_2);
    const double se1 = std::sin(ctx.theta_e1), ce1 = std::cos(ctx.theta_e1);
    BlochSeed s;
    s.v0 = g2 * (c1 * s2 * sin_half_sq(ctx.theta_e1) + 0.5 * s1 * s2 * se1);
    s.w0 = -c1 * c2 * ce1 - g2 * s1 * sin_half_sq(ctx.theta_2) * se1;
    return s;
}

BlochSeed third_echo_seed(const EchoSeedContext& ctx) {
    const double g2 = ctx.gamma_factor * ctx.gamma_factor;
    const double g4 = g2 * g2;
    const double s1 = std::sin(ctx.theta_1), c1 = std::cos(ctx.theta_1);
    const double s2 = std::sin(ctx.theta_2), c2 = std::cos(ctx.theta_2);
    const double se1 = std::sin(ctx.theta_e1), ce1 = std::cos(ctx.theta_e1);
    const double se2 = std::sin(ctx.theta_e2), ce2 = std::cos(ctx.theta_e2);
    BlochSeed s;
    s.v0 = 0.5 * g2 *
               (s1 * s2 * ce1 * se2 + c1 * s2 * se1 * se2 +
                2.0 * c1 * c2 * se1 * sin_half_sq(ctx.theta_e2)) +
           g4 * (s1 * cos_half_sq(ctx.theta_2) * sin_half_sq(ctx.theta_e1) *
                     cos_half_sq(ctx.theta_e2) -
                 s1 * sin_half_sq(ctx.theta_2) * cos_half_sq(ctx.theta_e1) *
                     sin_half_sq(ctx.theta_e2));
    // The saturable part rotates the second-echo seed by theta_e2:
    // w0 = -v0' sin(theta_e2) + w0' cos(theta_e2) with (v0', w0') evaluated at
    // the second-echo stage.
    const double v_prev = g2 * (c1 * s2 * sin_half_sq(ctx.theta_e1) + 0.5 * s1 * s2 * se1);
    const double w_prev = -c1 * c2 * ce1 - g2 * s1 * sin_half_sq(ctx.theta_2) * se1;
    s.w0 = -v_prev * se2 + w_prev * ce2;
    return s;
}

AreaSolution solve_echo(const CavityParams& p, const BlochSeed& seed,
                        const BranchPolicy& policy) {
    AreaEquationProblem problem;
    problem.params = p;
    problem.drive = 0.0;
    problem.seed = seed;
    AreaSolution s = solve_area_equation(problem, policy);
    return s;
}

double echo_linear(const BlochSeed& seed, double xi) {
    const double denom = 1.0 - xi * seed.w0;
    if (std::abs(denom) < 1e-14)
        throw std::domain_error("echo_linear: singular at xi * w0 = 1");
    return 2.0 * xi * seed.v0 / denom;
}

CubicSolution echo_cubic(const BlochSeed& seed, double xi,
                         std::optional<double> previous) {
    if (!(xi > 0.0))
        throw std::invalid_argument("echo_cubic: xi must be > 0");
    if (seed.w0 == 0.0)
        throw std::domain_error(
            "echo_cubic: w0 = 0 degenerates the expansion; use solve_echo");

    CubicSolution out;
    const double r = seed.v0 / seed.w0;
    out.zeta = (1.0 - seed.w0 * xi) / (seed.w0 * xi);

    // Third-order series of theta = xi [v0 (1 + cos theta) + w0 sin theta]
    // about (theta, v0) = (0, 0), scaled by -6 / (xi w0):
    // theta^3 + b theta^2 + c theta + d = 0.
    const double b = 3.0 * r;
    const double c = 6.0 * out.zeta;
    const double d = -12.0 * r;

    // Depressed form t^3 + p t + q with theta = t - b/3. q coincides with
    // -2 r (6 + 3 zeta - r^2).
    const double p = c - b * b / 3.0;
    const double q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    out.delta_1 = q;
    out.delta_0 = 0.25 * q * q + p * p * p / 27.0;
    out.discriminant = -108.0 * out.delta_0;

    if (out.discriminant < 0.0) {
        const double s = std::sqrt(out.delta_0);
        out.root = -r + std::cbrt(-0.5 * q + s) + std::cbrt(-0.5 * q - s);
        out.root_count = 1;
        out.roots = {out.root, 0.0, 0.0};
        return out;
    }

    // Three real roots; p <= 0 is guaranteed here.
    out.root_count = 3;
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
    const double phi = std::acos(arg);
    for (int k = 0; k < 3; ++k)
        out.roots[k] =
            m * std::cos((phi - 2.0 * std::numbers::pi * k) / 3.0) - b / 3.0;
    std::sort(out.roots.begin(), out.roots.end());
    const double ref = previous.value_or(0.0);
    out.root = out.roots[0];
    for (double candidate : out.roots)
        if (std::abs(candidate - ref) < std::abs(out.root - ref))
            out.root = candidate;
    return out;
}

double phase_bound(const BlochSeed& seed) {
    if (seed.v0 == 0.0 && seed.w0 == 0.0)
        throw std::invalid_argument("phase_bound: zero seed has no phase");
    return 2.0 * std::atan2(seed.v0, -seed.w0);
}

EchoDecoherence train_decoherence(const DecoherenceModel& m) {
    return EchoDecoherence{decoherence_factor(m, 2.0 * m.tau)};
}

PrimaryEchoResult primary_echo_chain(const CavityParams& p, ExteriorArea in_1,
                                     ExteriorArea in_2, double gamma_factor) {
    PrimaryEchoResult out;
    out.first = solve_first_pulse(p, in_1);
    out.second = solve_second_pulse(p, in_2, out.first.theta);
    EchoSeedContext ctx;
    ctx.theta_1 = out.first.theta.radians;
    ctx.theta_2 = out.second.theta.radians;
    ctx.gamma_factor = gamma_factor;
    out.seed = primary_echo_seed(ctx);
    out.echo = solve_echo(p, out.seed);
    const double emitted_raw = std::sqrt(p.kappa) * out.echo.theta.radians;
    const double in_raw = in_1.raw(p);
    out.efficiency = in_raw != 0.0 ? emitted_raw / in_raw : 0.0;
    return out;
}

EchoTrainResult echo_train(const CavityParams& p, ExteriorArea in_1,
                           ExteriorArea in_2, const EchoDecoherence& dec) {
    EchoTrainResult out;
    out.first = solve_first_pulse(p, in_1);
    out.second = solve_second_pulse(p, in_2, out.first.theta);
    out.total = solve_composite_total(p, in_1, in_2);

    EchoSeedContext ctx;
    ctx.theta_1 = out.first.theta.radians;
    ctx.theta_2 = out.second.theta.radians;
    ctx.gamma_factor = dec.gamma_factor;
    out.seed_1 = primary_echo_seed(ctx);
    out.echo_1 = solve_echo(p, out.seed_1);

    ctx.theta_e1 = out.echo_1.theta.radians;
    out.seed_2 = second_echo_seed(ctx);
    out.echo_2 = solve_echo(p, out.seed_2);

    ctx.theta_e2 = out.echo_2.theta.radians;
    out.seed_3 = third_echo_seed(ctx);
    out.echo_3 = solve_echo(p, out.seed_3);

    const double sqrt_kappa = std::sqrt(p.kappa);
    auto emitted = [&](const AreaSolution& s) {
        return to_normalized(sqrt_kappa * s.theta.radians - s.theta_in_raw, p);
    };
    out.out_1 = emitted(out.first);
    out.out_2 = emitted(out.second);
    out.out_tot = emitted(out.total);
    out.out_e1 = emitted(out.echo_1);
    out.out_e2 = emitted(out.echo_2);
    out.out_e3 = emitted(out.echo_3);

    out.theta_e_sigma = out.total.theta.radians - out.first.theta.radians -
                        out.second.theta.radians;
    out.out_sigma = ExteriorArea{out.out_tot.normalized - out.out_1.normalized -
                                 out.out_2.normalized};

    const double in_1_raw = in_1.raw(p);
    if (in_1_raw != 0.0) {
        const double leftover_raw =
            out.out_sigma.raw(p) - out.out_e1.raw(p) - out.out_e2.raw(p) -
            out.out_e3.raw(p);
        out.theta_diff = leftover_raw / (10.0 * in_1_raw);
    }
    return out;
}

}  // namespace ringecho
