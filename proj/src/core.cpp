#include "ringecho/core.hpp"

#include <limits>
#include <string>

namespace ringecho {

void CavityParams::validate() const {
    if (!(kappa > 0.0) || !std::isfinite(kappa))
        throw std::invalid_argument("CavityParams: kappa must be finite and > 0, got " +
                                    std::to_string(kappa));
    if (!(kappa_in >= 0.0) || !std::isfinite(kappa_in))
        throw std::invalid_argument("CavityParams: kappa_in must be finite and >= 0, got " +
                                    std::to_string(kappa_in));
    if (!(varkappa >= 0.0) || !std::isfinite(varkappa))
        throw std::invalid_argument("CavityParams: varkappa must be finite and >= 0, got " +
                                    std::to_string(varkappa));
}

CouplingRatios coupling_ratios(const CavityParams& p) {
    p.validate();
    CouplingRatios r;
    r.xi = p.varkappa / p.kappa_s();
    const double denom = p.varkappa + p.kappa_in;
    r.xi_im = denom > 0.0 ? p.kappa / denom
                          : std::numeric_limits<double>::infinity();
    return r;
}

ExteriorArea to_normalized(double raw_area, const CavityParams& p) {
    p.validate();
    return ExteriorArea{2.0 * raw_area / std::sqrt(p.kappa)};
}

double from_normalized(const ExteriorArea& area, const CavityParams& p) {
    p.validate();
    return area.raw(p);
}

void BlochSeed::validate(double slack) const {
    if (!std::isfinite(v0) || !std::isfinite(w0))
        throw std::invalid_argument("BlochSeed: components must be finite");
    const double n2 = v0 * v0 + w0 * w0;
    if (n2 > 1.0 + slack)
        throw std::invalid_argument("BlochSeed: (v0, w0) outside the Bloch ball, |seed|^2 = " +
                                    std::to_string(n2));
}

double decoherence_factor(const DecoherenceModel& m, double emission_time) {
    if (!(m.gamma >= 0.0) || !std::isfinite(m.gamma))
        throw std::invalid_argument("DecoherenceModel: gamma must be finite and >= 0");
    if (emission_time < 0.0)
        throw std::domain_error("decoherence_factor: emission_time must be >= 0");
    return std::exp(-m.gamma * emission_time);
}

}  // namespace ringecho
