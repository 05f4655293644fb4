#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "ringecho/core.hpp"
#include "ringecho/echo.hpp"

// Brute-force cross-check of the area solvers: direct integration of the
// single-mode cavity field coupled to an inhomogeneously broadened two-level
// ensemble,
//   da/dt = -(kappa_s/2) a + N g <v> + sqrt(kappa) a_in,
//   du/dt = -Delta v - gamma u,
//   dv/dt =  Delta u - gamma v + (g a) w,
//   dw/dt = -(g a) v,
//   a_out = sqrt(kappa) a - a_in,
// with <v> the Lorentzian-weighted ensemble average. Internally the field is
// kept in Rabi units (state A = g a, drive S = g a_in), so only the product
// N g^2 enters and cumulative areas are plain time integrals of the state.
namespace ringecho::mb {

enum class PulseShape { Rectangular, Gaussian };
enum class LineShape { Lorentzian };

// One input pulse. `area_normalized` is the exterior area in (2/sqrt(kappa))
// units, matching the solver inputs. Rectangular support is
// [center - duration/2, center + duration/2]; Gaussian means FWHM = duration
// truncated at center +- 2*duration with the amplitude rescaled so the
// injected area is exact despite the truncation.
struct PulseSpec {
    double center = 0.0;
    double duration = 1.0;
    double area_normalized = 0.0;
    PulseShape shape = PulseShape::Rectangular;
};

// Detuning discretization: n_atoms points placed symmetrically via
// Delta = 2 delta_inh tan(phi) with phi uniform, so Lorentzian tails are
// covered with few points. span is the half-width in units of delta_inh.
// n_atoms must be odd so the resonant atom sits exactly on the grid.
struct DetuningGrid {
    int n_atoms = 401;
    double span = 20.0;
};

struct MBSimConfig {
    CavityParams params;
    double coupling_product = 0.0;  // N g^2, must equal varkappa * delta_inh / 2
    double delta_inh = 1.0;
    double gamma = 0.0;
    LineShape line_shape = LineShape::Lorentzian;
    DetuningGrid grid;
    double dt = 0.05;
    double t_end = 0.0;
    std::vector<PulseSpec> pulses;
    int store_every = 1;

    // Builds a config whose coupling_product is consistent with
    // params.varkappa for a Lorentzian line of the given width.
    static MBSimConfig from_rates(const CavityParams& params, double delta_inh);

    void validate() const;
    // Non-fatal diagnostics, e.g. pulse duration too long against the
    // inhomogeneous dephasing time (duration * delta_inh > 0.05).
    std::vector<std::string> warnings() const;
};

// Thrown when the integrated field diverges (step size too large).
class IntegrationError : public std::runtime_error {
  public:
    IntegrationError(const std::string& what, double time)
        : std::runtime_error(what), time_(time) {}
    double time() const { return time_; }

  private:
    double time_;
};

// Time series are sampled every store_every steps plus at every pulse edge.
// theta/theta_in/theta_out are cumulative raw areas (integrals of a, a_in,
// sqrt(kappa) a - a_in) carried as extra integration state, so windowed areas
// inherit the integrator accuracy. max_norm_drift is the largest
// |u^2 + v^2 + w^2 - 1| seen across atoms and samples; it measures integrator
// error only when gamma = 0 (decoherence legitimately shrinks the vector).
struct MBSimResult {
    MBSimConfig config;
    std::vector<double> t;
    std::vector<double> a;
    std::vector<double> a_in;
    std::vector<double> a_out;
    std::vector<double> theta;
    std::vector<double> theta_in;
    std::vector<double> theta_out;
    std::vector<double> detuning;
    std::vector<double> weight;
    std::vector<double> final_u;
    std::vector<double> final_v;
    std::vector<double> final_w;
    double max_norm_drift = 0.0;
};

MBSimResult simulate(const MBSimConfig& config);

struct Window {
    double t_start = 0.0;
    double t_end = 0.0;
};

// Interior reports the raw area of the cavity field over the window;
// Exterior reports the output-mode area in normalized (2/sqrt(kappa)) units.
enum class Side { Interior, Exterior };

// Linear interpolation on the stored cumulative areas. Throws
// std::invalid_argument for an empty window and std::out_of_range when the
// window leaves the simulated range.
double windowed_area(const MBSimResult& result, const Window& window, Side side);

// Reasonable end time for a schedule: past the third echo of a two-pulse
// sequence plus several cavity lifetimes.
double default_t_end(const MBSimConfig& config);

struct VerifyTolerances {
    double pulse = 0.05;
    double echo = 0.10;
    double empty = 1e-6;
    // Full window width; 0 selects tau/2. Windows are clamped to the
    // simulated range (a note records when that happens).
    double window_width = 0.0;
    bool grid_convergence = true;
};

struct VerifyRow {
    std::string label;
    double measured = 0.0;
    double predicted = 0.0;
    double deviation = 0.0;
    double tolerance = 0.0;
    double grid_shift = 0.0;
    bool pass = false;
};

struct VerifyReport {
    std::vector<VerifyRow> rows;
    std::vector<std::string> notes;
    double tau = 0.0;
    double max_norm_drift = 0.0;
    bool all_pass = false;
};

// Runs the simulation and compares windowed interior areas of both input
// pulses and the primary echo against the chained solver predictions.
// `expected` must come from the same cavity and the same normalized input
// areas as config.pulses (checked, std::invalid_argument otherwise). With
// coupling_product = 0 the comparison degenerates to the lossless empty
// cavity: |output area| = |input area| within tolerances.empty. When
// grid_convergence is set the run is repeated with 2 n + 1 atoms and each
// row's measured value must move by less than half its tolerance.
VerifyReport verify_against_theorem(const MBSimConfig& config,
                                    const EchoTrainResult& expected,
                                    const VerifyTolerances& tolerances = {});

}  // namespace ringecho::mb
