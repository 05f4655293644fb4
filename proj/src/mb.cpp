#include "ringecho/mb.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace ringecho::mb {

namespace {

constexpr double kFieldCeiling = 1e9;

double support_half_width(const PulseSpec& pulse) {
    return pulse.shape == PulseShape::Rectangular ? 0.5 * pulse.duration
                                                  : 2.0 * pulse.duration;
}

// Segment-local description of one driving pulse; `amplitude` is already in
// Rabi units (g a_in) and normalized so the time integral over the support
// equals the requested raw exterior area.
struct ActivePulse {
    double amplitude;
    double center;
    double sigma;  // <= 0 marks a rectangular pulse
};

ActivePulse make_active(const PulseSpec& pulse, const CavityParams& params) {
    const double raw = ExteriorArea{pulse.area_normalized}.raw(params);
    if (pulse.shape == PulseShape::Rectangular)
        return {raw / pulse.duration, pulse.center, 0.0};
    // FWHM = duration, truncated at +-2*duration; rescale for the clipped
    // tails so the injected area stays exact.
    const double sigma = pulse.duration / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
    const double truncated = sigma * std::sqrt(2.0 * std::numbers::pi) *
                             std::erf(2.0 * pulse.duration / (sigma * std::numbers::sqrt2));
    return {raw / truncated, pulse.center, sigma};
}

double drive_at(const std::vector<ActivePulse>& active, double t) {
    double s = 0.0;
    for (const ActivePulse& p : active) {
        if (p.sigma <= 0.0) {
            s += p.amplitude;
        } else {
            const double x = (t - p.center) / p.sigma;
            s += p.amplitude * std::exp(-0.5 * x * x);
        }
    }
    return s;
}

struct Grid {
    std::vector<double> detuning;
    std::vector<double> weight;
};

// Delta = 2 delta_inh tan(phi), phi uniform: the substitution flattens the
// Lorentzian tails so a few hundred points resolve both core and wings.
// Trapezoid weights G(Delta) dDelta/dphi, renormalized to sum exactly to 1.
Grid build_grid(const DetuningGrid& grid, double delta_inh) {
    const int n = grid.n_atoms;
    const double phi_max = std::atan(0.5 * grid.span);
    Grid out;
    out.detuning.resize(n);
    out.weight.resize(n);
    double total = 0.0;
    for (int k = 0; k < n; ++k) {
        const double phi = -phi_max + 2.0 * phi_max * k / (n - 1);
        const double delta = 2.0 * delta_inh * std::tan(phi);
        const double cos_phi = std::cos(phi);
        const double lorentz =
            delta_inh / (std::numbers::pi * (delta * delta + delta_inh * delta_inh));
        double w = lorentz * 2.0 * delta_inh / (cos_phi * cos_phi);
        if (k == 0 || k == n - 1) w *= 0.5;
        out.detuning[k] = delta;
        out.weight[k] = w;
        total += w;
    }
    for (double& w : out.weight) w /= total;
    // Exact symmetry: the resonant atom sits at index (n-1)/2.
    out.detuning[(n - 1) / 2] = 0.0;
    return out;
}

// State layout: [A, u[0..n), v[0..n), w[0..n), theta, theta_in, theta_out].
struct Layout {
    int n;
    int u() const { return 1; }
    int v() const { return 1 + n; }
    int w() const { return 1 + 2 * n; }
    int theta() const { return 1 + 3 * n; }
    int theta_in() const { return 2 + 3 * n; }
    int theta_out() const { return 3 + 3 * n; }
    int size() const { return 4 + 3 * n; }
};

struct System {
    const MBSimConfig* config;
    const Grid* grid;
    Layout lay;
    double sqrt_kappa;
    double half_kappa_s;

    void deriv(const std::vector<double>& y, double t,
               const std::vector<ActivePulse>& active,
               std::vector<double>& dy) const {
        const int n = lay.n;
        const double field = y[0];
        const double s = drive_at(active, t);
        double v_mean = 0.0;
        for (int k = 0; k < n; ++k)
            v_mean += grid->weight[k] * y[lay.v() + k];
        dy[0] = -half_kappa_s * field + config->coupling_product * v_mean +
                sqrt_kappa * s;
        const double gamma = config->gamma;
        for (int k = 0; k < n; ++k) {
            const double u = y[lay.u() + k];
            const double v = y[lay.v() + k];
            const double w = y[lay.w() + k];
            const double delta = grid->detuning[k];
            dy[lay.u() + k] = -delta * v - gamma * u;
            dy[lay.v() + k] = delta * u - gamma * v + field * w;
            dy[lay.w() + k] = -field * v;
        }
        dy[lay.theta()] = field;
        dy[lay.theta_in()] = s;
        dy[lay.theta_out()] = sqrt_kappa * field - s;
    }
};

void axpy(std::vector<double>& out, const std::vector<double>& y, double h,
          const std::vector<double>& k) {
    const std::size_t n = y.size();
    for (std::size_t i = 0; i < n; ++i) out[i] = y[i] + h * k[i];
}

}  // namespace

MBSimConfig MBSimConfig::from_rates(const CavityParams& params, double delta_inh) {
    MBSimConfig config;
    config.params = params;
    config.delta_inh = delta_inh;
    config.coupling_product = 0.5 * params.varkappa * delta_inh;
    return config;
}

void MBSimConfig::validate() const {
    params.validate();
    if (!std::isfinite(coupling_product) || coupling_product < 0.0)
        throw std::invalid_argument("MBSimConfig: coupling_product must be finite and >= 0");
    if (!std::isfinite(delta_inh) || delta_inh <= 0.0)
        throw std::invalid_argument("MBSimConfig: delta_inh must be finite and > 0");
    const double implied = 2.0 * coupling_product / delta_inh;
    if (std::abs(implied - params.varkappa) > 1e-9 * std::max(1.0, params.varkappa))
        throw std::invalid_argument(
            "MBSimConfig: coupling_product inconsistent with varkappa, "
            "2 N g^2 / delta_inh = " + std::to_string(implied) +
            " but varkappa = " + std::to_string(params.varkappa));
    if (!std::isfinite(gamma) || gamma < 0.0)
        throw std::invalid_argument("MBSimConfig: gamma must be finite and >= 0");
    if (!std::isfinite(dt) || dt <= 0.0)
        throw std::invalid_argument("MBSimConfig: dt must be finite and > 0");
    if (!std::isfinite(t_end) || t_end <= 0.0)
        throw std::invalid_argument("MBSimConfig: t_end must be finite and > 0");
    if (grid.n_atoms < 3 || grid.n_atoms % 2 == 0)
        throw std::invalid_argument("MBSimConfig: grid.n_atoms must be odd and >= 3");
    if (!std::isfinite(grid.span) || grid.span <= 0.0)
        throw std::invalid_argument("MBSimConfig: grid.span must be finite and > 0");
    if (store_every < 1)
        throw std::invalid_argument("MBSimConfig: store_every must be >= 1");
    double prev_center = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pulses.size(); ++i) {
        const PulseSpec& p = pulses[i];
        if (!std::isfinite(p.center) || !std::isfinite(p.duration) || p.duration <= 0.0)
            throw std::invalid_argument("MBSimConfig: pulse " + std::to_string(i) +
                                        " needs a finite center and duration > 0");
        if (!std::isfinite(p.area_normalized))
            throw std::invalid_argument("MBSimConfig: pulse " + std::to_string(i) +
                                        " area must be finite");
        if (p.center < prev_center)
            throw std::invalid_argument("MBSimConfig: pulses must be ordered by center");
        prev_center = p.center;
        const double half = support_half_width(p);
        if (p.center - half < 0.0 || p.center + half > t_end)
            throw std::invalid_argument("MBSimConfig: pulse " + std::to_string(i) +
                                        " support leaves [0, t_end]");
    }
}

std::vector<std::string> MBSimConfig::warnings() const {
    std::vector<std::string> notes;
    for (std::size_t i = 0; i < pulses.size(); ++i) {
        const double guard = pulses[i].duration * delta_inh;
        if (guard > 0.05)
            notes.push_back("pulse " + std::to_string(i) +
                            ": duration * delta_inh = " + std::to_string(guard) +
                            " > 0.05, area theorem assumes short pulses");
        if (pulses[i].duration < 4.0 * dt)
            notes.push_back("pulse " + std::to_string(i) +
                            ": fewer than 4 time steps across the pulse");
        if (i > 0) {
            const double gap = (pulses[i].center - support_half_width(pulses[i])) -
                               (pulses[i - 1].center + support_half_width(pulses[i - 1]));
            if (gap < 0.0)
                notes.push_back("pulses " + std::to_string(i - 1) + " and " +
                                std::to_string(i) + " overlap");
        }
    }
    return notes;
}

MBSimResult simulate(const MBSimConfig& config) {
    config.validate();

    const Grid grid = build_grid(config.grid, config.delta_inh);
    const Layout lay{config.grid.n_atoms};
    System sys{&config, &grid, lay, std::sqrt(config.params.kappa),
               0.5 * config.params.kappa_s()};

    // Pulse edges are breakpoints: the drive is smooth inside every segment,
    // so fixed-step integration never straddles a discontinuity.
    std::vector<double> edges{0.0, config.t_end};
    for (const PulseSpec& p : config.pulses) {
        edges.push_back(p.center - support_half_width(p));
        edges.push_back(p.center + support_half_width(p));
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end(),
                            [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                edges.end());

    std::vector<double> y(lay.size(), 0.0);
    for (int k = 0; k < lay.n; ++k) y[lay.w() + k] = -1.0;

    MBSimResult result;
    result.config = config;
    result.detuning = grid.detuning;
    result.weight = grid.weight;

    double last_sample = -1.0;
    const auto sample = [&](double t, const std::vector<ActivePulse>& active) {
        if (!result.t.empty() && t - last_sample < 1e-12) return;
        last_sample = t;
        const double s = drive_at(active, t);
        result.t.push_back(t);
        result.a.push_back(y[0]);
        result.a_in.push_back(s);
        result.a_out.push_back(sys.sqrt_kappa * y[0] - s);
        result.theta.push_back(y[lay.theta()]);
        result.theta_in.push_back(y[lay.theta_in()]);
        result.theta_out.push_back(y[lay.theta_out()]);
        for (int k = 0; k < lay.n; ++k) {
            const double u = y[lay.u() + k];
            const double v = y[lay.v() + k];
            const double w = y[lay.w() + k];
            const double drift = std::abs(u * u + v * v + w * w - 1.0);
            if (drift > result.max_norm_drift) result.max_norm_drift = drift;
        }
    };

    std::vector<double> k1(lay.size()), k2(lay.size()), k3(lay.size()),
        k4(lay.size()), tmp(lay.size());
    long step_index = 0;

    for (std::size_t seg = 0; seg + 1 < edges.size(); ++seg) {
        const double t0 = edges[seg];
        const double t1 = edges[seg + 1];
        const double len = t1 - t0;
        if (len <= 0.0) continue;

        std::vector<ActivePulse> active;
        const double mid = 0.5 * (t0 + t1);
        for (const PulseSpec& p : config.pulses)
            if (std::abs(mid - p.center) < support_half_width(p))
                active.push_back(make_active(p, config.params));

        if (seg == 0) sample(t0, active);

        const long steps = std::max(1L, static_cast<long>(std::ceil(len / config.dt)));
        const double h = len / static_cast<double>(steps);
        for (long i = 0; i < steps; ++i) {
            const double t = t0 + h * static_cast<double>(i);
            sys.deriv(y, t, active, k1);
            axpy(tmp, y, 0.5 * h, k1);
            sys.deriv(tmp, t + 0.5 * h, active, k2);
            axpy(tmp, y, 0.5 * h, k2);
            sys.deriv(tmp, t + 0.5 * h, active, k3);
            axpy(tmp, y, h, k3);
            sys.deriv(tmp, t + h, active, k4);
            for (std::size_t j = 0; j < y.size(); ++j)
                y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
            const double t_next = (i + 1 == steps) ? t1 : t + h;
            if (!std::isfinite(y[0]) || std::abs(y[0]) > kFieldCeiling)
                throw IntegrationError(
                    "mb::simulate: field diverged, reduce dt (|A| > 1e9 at t = " +
                        std::to_string(t_next) + ")",
                    t_next);
            ++step_index;
            if (step_index % config.store_every == 0 || i + 1 == steps)
                sample(t_next, active);
        }
    }

    result.final_u.assign(y.begin() + lay.u(), y.begin() + lay.u() + lay.n);
    result.final_v.assign(y.begin() + lay.v(), y.begin() + lay.v() + lay.n);
    result.final_w.assign(y.begin() + lay.w(), y.begin() + lay.w() + lay.n);
    return result;
}

namespace {

double interpolate(const std::vector<double>& t, const std::vector<double>& f,
                   double at) {
    const auto it = std::lower_bound(t.begin(), t.end(), at);
    if (it == t.begin()) return f.front();
    if (it == t.end()) return f.back();
    const std::size_t hi = static_cast<std::size_t>(it - t.begin());
    const std::size_t lo = hi - 1;
    const double span = t[hi] - t[lo];
    if (span <= 0.0) return f[hi];
    const double x = (at - t[lo]) / span;
    return f[lo] + x * (f[hi] - f[lo]);
}

}  // namespace

double windowed_area(const MBSimResult& result, const Window& window, Side side) {
    if (!(window.t_end > window.t_start))
        throw std::invalid_argument("windowed_area: empty window");
    if (result.t.empty())
        throw std::out_of_range("windowed_area: result has no samples");
    if (window.t_start < result.t.front() - 1e-9 ||
        window.t_end > result.t.back() + 1e-9)
        throw std::out_of_range("windowed_area: window [" +
                                std::to_string(window.t_start) + ", " +
                                std::to_string(window.t_end) +
                                "] leaves the simulated range");
    const std::vector<double>& cum =
        side == Side::Interior ? result.theta : result.theta_out;
    const double raw = interpolate(result.t, cum, window.t_end) -
                       interpolate(result.t, cum, window.t_start);
    if (side == Side::Interior) return raw;
    return to_normalized(raw, result.config.params).normalized;
}

double default_t_end(const MBSimConfig& config) {
    const double settle = 10.0 / config.params.kappa_s();
    if (config.pulses.empty()) return settle;
    const PulseSpec& last = config.pulses.back();
    if (config.pulses.size() < 2)
        return last.center + 2.0 * support_half_width(last) + 2.0 * settle;
    const double c1 = config.pulses.front().center;
    const double tau = config.pulses[1].center - c1;
    // Past the third echo (7 tau / 2 after the first pulse) plus ring-down.
    return c1 + 3.75 * tau + settle;
}

VerifyReport verify_against_theorem(const MBSimConfig& config,
                                    const EchoTrainResult& expected,
                                    const VerifyTolerances& tolerances) {
    config.validate();
    VerifyReport report;

    const bool empty_cavity = config.coupling_product == 0.0;
    if (!empty_cavity && config.pulses.size() < 2)
        throw std::invalid_argument(
            "verify_against_theorem: need two pulses to compare against the chain");

    if (!empty_cavity) {
        const double in_1 =
            to_normalized(expected.first.theta_in_raw, config.params).normalized;
        const double in_2 =
            to_normalized(expected.second.theta_in_raw, config.params).normalized;
        if (std::abs(in_1 - config.pulses[0].area_normalized) >
                1e-9 * std::max(1.0, std::abs(in_1)) ||
            std::abs(in_2 - config.pulses[1].area_normalized) >
                1e-9 * std::max(1.0, std::abs(in_2)))
            throw std::invalid_argument(
                "verify_against_theorem: expected areas do not match the schedule");
    }

    MBSimResult run = simulate(config);
    report.max_norm_drift = run.max_norm_drift;
    for (const std::string& w : config.warnings()) report.notes.push_back(w);

    const auto clamp_window = [&](double center, double width) {
        Window win{center - 0.5 * width, center + 0.5 * width};
        if (win.t_start < 0.0 || win.t_end > config.t_end) {
            win.t_start = std::max(win.t_start, 0.0);
            win.t_end = std::min(win.t_end, config.t_end);
            report.notes.push_back("window around t = " + std::to_string(center) +
                                   " clamped to the simulated range");
        }
        return win;
    };

    struct Probe {
        std::string label;
        Window window;
        double predicted;
        double tolerance;
        bool magnitude;  // compare |measured| against |predicted|, absolute
    };
    std::vector<Probe> probes;

    if (empty_cavity) {
        for (std::size_t i = 0; i < config.pulses.size(); ++i) {
            const PulseSpec& p = config.pulses[i];
            // Ring-down tail: the window must hold e^(-kappa_s T / 2) below
            // the empty tolerance, 60 lifetimes leave ~1e-13.
            const double width =
                tolerances.window_width > 0.0
                    ? tolerances.window_width
                    : 4.0 * support_half_width(p) + 120.0 / config.params.kappa_s();
            probes.push_back({"pulse " + std::to_string(i + 1) + " emission",
                              clamp_window(p.center, width), p.area_normalized,
                              tolerances.empty, true});
        }
    } else {
        const double c1 = config.pulses[0].center;
        report.tau = config.pulses[1].center - c1;
        const double width =
            tolerances.window_width > 0.0 ? tolerances.window_width : 0.5 * report.tau;
        probes.push_back({"pulse 1 interior", clamp_window(c1, width),
                          expected.first.theta.radians, tolerances.pulse, false});
        probes.push_back({"pulse 2 interior",
                          clamp_window(c1 + report.tau, width),
                          expected.second.theta.radians, tolerances.pulse, false});
        probes.push_back({"primary echo interior",
                          clamp_window(c1 + 2.0 * report.tau, width),
                          expected.echo_1.theta.radians, tolerances.echo, false});
    }

    std::vector<MBSimResult> refined;
    if (tolerances.grid_convergence && !empty_cavity) {
        MBSimConfig finer = config;
        finer.grid.n_atoms = 2 * config.grid.n_atoms + 1;
        refined.push_back(simulate(finer));
        report.notes.push_back("grid convergence checked with " +
                               std::to_string(finer.grid.n_atoms) + " atoms");
    }

    report.all_pass = true;
    for (const Probe& probe : probes) {
        VerifyRow row;
        row.label = probe.label;
        row.predicted = probe.predicted;
        row.tolerance = probe.tolerance;
        const Side side = probe.magnitude ? Side::Exterior : Side::Interior;
        row.measured = windowed_area(run, probe.window, side);
        if (probe.magnitude) {
            row.deviation = std::abs(std::abs(row.measured) - std::abs(row.predicted));
        } else {
            row.deviation = std::abs(row.measured - row.predicted) /
                            std::max(std::abs(row.predicted), 1e-12);
        }
        row.pass = row.deviation <= row.tolerance;
        if (!refined.empty()) {
            const double again = windowed_area(refined.front(), probe.window, side);
            row.grid_shift = std::abs(again - row.measured) /
                             std::max(std::abs(row.predicted), 1e-12);
            if (row.grid_shift >= 0.5 * row.tolerance) row.pass = false;
        }
        report.all_pass = report.all_pass && row.pass;
        report.rows.push_back(row);
    }
    return report;
}

}  // namespace ringecho::mb
