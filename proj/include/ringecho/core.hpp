#pragma once

#include <cmath>
#include <stdexcept>

namespace ringecho {

// Rates of the ring cavity and of the intracavity medium. All rates share one
// time unit; every reported area is dimensionless, so only rate ratios matter.
struct CavityParams {
    double kappa = 1.0;     // output mirror coupling rate, > 0
    double kappa_in = 0.0;  // intracavity (unwanted) loss rate, >= 0
    double varkappa = 0.0;  // medium coupling rate 2*N*g^2/delta_inh, >= 0

    double kappa_s() const { return kappa + kappa_in; }

    // Throws std::invalid_argument if any rate is out of range.
    void validate() const;
};

// Dimensionless coupling ratios derived from CavityParams.
//   xi    = varkappa / kappa_s       (absorption vs. total cavity decay)
//   xi_im = kappa / (varkappa + kappa_in), equal to 1 at impedance matching
// xi_im is +inf when varkappa + kappa_in == 0 (lossless empty cavity).
struct CouplingRatios {
    double xi = 0.0;
    double xi_im = 0.0;
};

CouplingRatios coupling_ratios(const CavityParams& p);

// Pulse area of the intracavity field, in radians.
struct InteriorArea {
    double radians = 0.0;
};

// Pulse area of a traveling (input or output) field. Stored in normalized
// form (2/sqrt(kappa)) * raw so that interesting features sit at multiples
// of pi; raw() recovers the bare integral of the traveling amplitude.
struct ExteriorArea {
    double normalized = 0.0;

    double raw(const CavityParams& p) const {
        return 0.5 * std::sqrt(p.kappa) * normalized;
    }
};

ExteriorArea to_normalized(double raw_area, const CavityParams& p);
double from_normalized(const ExteriorArea& area, const CavityParams& p);

// Phased Bloch components seeding one emission interval: v0 multiplies the
// absorption-free part of the source, w0 the saturable part. A physical seed
// lies in the Bloch ball, v0^2 + w0^2 <= 1.
struct BlochSeed {
    double v0 = 0.0;
    double w0 = -1.0;

    double norm() const { return std::sqrt(v0 * v0 + w0 * w0); }

    // Throws std::invalid_argument when outside the Bloch ball by more
    // than slack.
    void validate(double slack = 1e-12) const;
};

// Homogeneous decoherence of the optical coherence: amplitude factor
// exp(-gamma * t) accumulated up to the emission time.
struct DecoherenceModel {
    double gamma = 0.0;  // decoherence rate, >= 0
    double tau = 0.0;    // delay between the first two pulses, >= 0
};

// exp(-gamma * emission_time). Throws std::domain_error for negative times.
double decoherence_factor(const DecoherenceModel& m, double emission_time);

}  // namespace ringecho
