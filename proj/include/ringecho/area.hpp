#pragma once

#include <numbers>
#include <stdexcept>
#include <vector>

#include "ringecho/core.hpp"

namespace ringecho {

// Steady pulse-area balance of the driven ring cavity,
//   (kappa_s/2) * theta = drive + (varkappa/2) * (2 v0 cos^2(theta/2) + w0 sin(theta)),
// where drive = sqrt(kappa) * (raw exterior input area). The solver works on
// the rescaled residual
//   g(theta) = theta - (2/kappa_s) * drive - xi * (2 v0 cos^2(theta/2) + w0 sin(theta)),
// which is expressed in radians.
struct AreaEquationProblem {
    CavityParams params;
    double drive = 0.0;  // sqrt(kappa) * raw input area
    BlochSeed seed;

    double residual(double theta) const;
    double residual_derivative(double theta) const;
};

enum class BranchMode {
    UniqueRoot,         // principal root; a homotopy from zero excitation
                        // disambiguates when several roots coexist
    ContinuationFrom,   // nearest root to a caller-supplied previous solution
    ScanAll,            // diagnostic: every root inside the policy interval
};

struct BranchPolicy {
    BranchMode mode = BranchMode::UniqueRoot;
    double previous = 0.0;  // Newton start for ContinuationFrom
    double interval_lo = -4.0 * std::numbers::pi;  // ScanAll search interval
    double interval_hi = 4.0 * std::numbers::pi;
    int scan_points = 512;     // uniform sign-change scan resolution
    double tolerance = 1e-10;  // on the rescaled residual, radians
    int max_iterations = 200;

    static BranchPolicy unique_root();
    static BranchPolicy continue_from(double previous_theta);
    static BranchPolicy scan_all(double lo, double hi);
};

enum class Branch { Principal, Continued };

struct AreaSolution {
    InteriorArea theta;
    ExteriorArea theta_out;     // normalized form of theta_out_raw
    double theta_in_raw = 0.0;  // drive / sqrt(kappa)
    double theta_out_raw = 0.0; // theta_in_raw - sqrt(kappa) * theta
    double residual = 0.0;      // rescaled residual at theta
    Branch branch = Branch::Principal;
    int branch_id = 0;          // homotopy / continuation hops used to land here
    bool converged = false;
    int iterations = 0;
};

// Raised when the iteration budget is exhausted; carries the best bracket so
// the caller can widen the policy or restart from best_theta.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double lo, double hi, double best,
                double residual)
        : std::runtime_error(what),
          bracket_lo(lo),
          bracket_hi(hi),
          best_theta(best),
          best_residual(residual) {}

    double bracket_lo;
    double bracket_hi;
    double best_theta;
    double best_residual;
};

// Solves the balance equation under the requested branch policy. varkappa = 0
// short-circuits to the closed form theta = 2 * drive / kappa_s. UniqueRoot
// and ContinuationFrom ignore the policy interval: every root provably lies
// within |theta - 2*drive/kappa_s| <= xi * (2|v0| + |w0|), and the scan covers
// that band. Throws SolverError on non-convergence.
AreaSolution solve_area_equation(const AreaEquationProblem& problem,
                                 const BranchPolicy& policy = {});

// Every root inside [policy.interval_lo, policy.interval_hi], ascending.
// Throws std::domain_error for an empty interval.
std::vector<AreaSolution> scan_all_roots(const AreaEquationProblem& problem,
                                         const BranchPolicy& policy);

// First pulse entering a cold medium: seed (0, -1).
AreaSolution solve_first_pulse(const CavityParams& p, ExteriorArea in_1,
                               const BranchPolicy& policy = {});

// Second pulse against the inversion left by the first: seed (0, -cos(theta_1)).
AreaSolution solve_second_pulse(const CavityParams& p, ExteriorArea in_2,
                                InteriorArea theta_1,
                                const BranchPolicy& policy = {});

// Both pulses merged into one composite drive, seed (0, -1); the baseline for
// total-area accounting of the echo train.
AreaSolution solve_composite_total(const CavityParams& p, ExteriorArea in_1,
                                   ExteriorArea in_2,
                                   const BranchPolicy& policy = {});

// Amplitude transmission of a weak signal through the cold cavity,
//   (varkappa + kappa_in - kappa) / (kappa_s + varkappa).
// Exactly 0 at impedance matching kappa = varkappa + kappa_in.
double weak_signal_transmission(const CavityParams& p);

// True when |xi_im - 1| <= tol, i.e. kappa = varkappa + kappa_in within tol.
bool impedance_matched(const CavityParams& p, double tol = 1e-9);

}  // namespace ringecho
