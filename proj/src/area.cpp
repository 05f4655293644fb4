#include "ringecho/area.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ringecho {

namespace {

constexpr double kNewtonClamp = 0.5;  // max Newton step in radians

double source_term(const BlochSeed& s, double theta) {
    const double c = std::cos(0.5 * theta);
    return 2.0 * s.v0 * c * c + s.w0 * std::sin(theta);
}

double source_term_derivative(const BlochSeed& s, double theta) {
    return -s.v0 * std::sin(theta) + s.w0 * std::cos(theta);
}

struct RefineResult {
    double theta = 0.0;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Hybrid bisection / clamped-Newton refinement inside a sign-change bracket.
// The bracket never widens, so bisection alone guarantees progress when the
// Newton step escapes or stalls.
RefineResult refine_root(const AreaEquationProblem& problem, double lo,
                         double hi, double f_lo, double f_hi,
                         const BranchPolicy& policy) {
    RefineResult out;
    if (f_lo == 0.0) {
        out = {lo, 0.0, 0, true};
        return out;
    }
    if (f_hi == 0.0) {
        out = {hi, 0.0, 0, true};
        return out;
    }
    double a = lo, b = hi, fa = f_lo;
    double x = 0.5 * (a + b);
    for (int it = 0; it < policy.max_iterations; ++it) {
        double fx = problem.residual(x);
        out.theta = x;
        out.residual = fx;
        out.iterations = it + 1;
        if (std::abs(fx) <= policy.tolerance) {
            out.converged = true;
            return out;
        }
        if ((fx > 0.0) == (fa > 0.0)) {
            a = x;
            fa = fx;
        } else {
            b = x;
        }
        const double dfx = problem.residual_derivative(x);
        double x_next;
        if (dfx != 0.0) {
            double step = -fx / dfx;
            step = std::clamp(step, -kNewtonClamp, kNewtonClamp);
            x_next = x + step;
            if (!(x_next > a) || !(x_next < b)) x_next = 0.5 * (a + b);
        } else {
            x_next = 0.5 * (a + b);
        }
        x = x_next;
    }
    return out;
}

// Clamped Newton without a bracket; used for continuation starts where the
// root is known to be nearby.
RefineResult newton_from(const AreaEquationProblem& problem, double start,
                         const BranchPolicy& policy, int max_iter) {
    RefineResult out;
    double x = start;
    for (int it = 0; it < max_iter; ++it) {
        const double fx = problem.residual(x);
        out.theta = x;
        out.residual = fx;
        out.iterations = it + 1;
        if (std::abs(fx) <= policy.tolerance) {
            out.converged = true;
            return out;
        }
        const double dfx = problem.residual_derivative(x);
        if (std::abs(dfx) < 1e-14) break;
        double step = -fx / dfx;
        step = std::clamp(step, -kNewtonClamp, kNewtonClamp);
        x += step;
    }
    return out;
}

std::vector<RefineResult> scan_interval(const AreaEquationProblem& problem,
                                        double lo, double hi,
                                        const BranchPolicy& policy) {
    std::vector<RefineResult> roots;
    const int n = std::max(policy.scan_points, 8);
    const double h = (hi - lo) / n;
    double x_prev = lo;
    double f_prev = problem.residual(x_prev);
    for (int i = 1; i <= n; ++i) {
        const double x = lo + i * h;
        const double f = problem.residual(x);
        if (f_prev == 0.0 || (f_prev < 0.0) != (f < 0.0)) {
            RefineResult r =
                refine_root(problem, x_prev, x, f_prev, f, policy);
            const bool duplicate =
                !roots.empty() &&
                std::abs(roots.back().theta - r.theta) <
                    1e-8 * (1.0 + std::abs(r.theta));
            if (!duplicate) roots.push_back(r);
        }
        x_prev = x;
        f_prev = f;
    }
    if (f_prev == 0.0 &&
        (roots.empty() ||
         std::abs(roots.back().theta - x_prev) >= 1e-8 * (1.0 + std::abs(x_prev))))
        roots.push_back({x_prev, 0.0, 0, true});
    return roots;
}

AreaSolution make_solution(const AreaEquationProblem& problem,
                           const RefineResult& r, Branch branch,
                           int branch_id) {
    AreaSolution s;
    s.theta.radians = r.theta;
    const double sqrt_kappa = std::sqrt(problem.params.kappa);
    s.theta_in_raw = problem.drive / sqrt_kappa;
    s.theta_out_raw = s.theta_in_raw - sqrt_kappa * s.theta.radians;
    s.theta_out = to_normalized(s.theta_out_raw, problem.params);
    s.residual = r.residual;
    s.branch = branch;
    s.branch_id = branch_id;
    s.converged = r.converged;
    s.iterations = r.iterations;
    return s;
}

// Every root satisfies |theta - 2*drive/kappa_s| <= xi * (2|v0| + |w0|); the
// band below adds margin so the scan always brackets.
void root_band(const AreaEquationProblem& problem, double& lo, double& hi) {
    const double center = 2.0 * problem.drive / problem.params.kappa_s();
    const double xi = problem.params.varkappa / problem.params.kappa_s();
    const double half =
        xi * (2.0 * std::abs(problem.seed.v0) + std::abs(problem.seed.w0)) + 0.5;
    lo = center - half;
    hi = center + half;
}

AreaSolution scaled_problem_root(const AreaEquationProblem& problem,
                                 double lambda, double prev_theta,
                                 const BranchPolicy& policy, bool& ok) {
    AreaEquationProblem scaled = problem;
    scaled.drive *= lambda;
    scaled.seed.v0 *= lambda;
    RefineResult r = newton_from(scaled, prev_theta, policy, 60);
    ok = r.converged && std::abs(r.theta - prev_theta) <= kNewtonClamp + 0.1;
    return make_solution(scaled, r, Branch::Principal, 0);
}

// Principal branch when several roots coexist: follow the solution of the
// gradually switched-on problem (drive and v0 scaled by lambda) from the
// trivial root theta = 0 at lambda = 0. At a fold, where the tracked root
// vanishes, the nearest surviving root is taken.
RefineResult homotopy_principal(const AreaEquationProblem& problem,
                                const std::vector<RefineResult>& roots,
                                const BranchPolicy& policy, int& steps_used) {
    double lambda = 0.0;
    double d_lambda = 1.0 / 16.0;
    constexpr double kMinStep = 1.0 / 4096.0;
    double theta = 0.0;
    steps_used = 0;
    while (lambda < 1.0 && steps_used < 20000) {
        const double lambda_next = std::min(1.0, lambda + d_lambda);
        bool ok = false;
        AreaSolution cand =
            scaled_problem_root(problem, lambda_next, theta, policy, ok);
        ++steps_used;
        if (ok) {
            lambda = lambda_next;
            theta = cand.theta.radians;
            d_lambda = std::min(d_lambda * 2.0, 1.0 / 16.0);
            continue;
        }
        if (d_lambda > kMinStep) {
            d_lambda *= 0.5;
            continue;
        }
        // Fold: the tracked branch no longer exists. Jump to the nearest
        // root of the partially switched-on problem and keep going.
        AreaEquationProblem scaled = problem;
        scaled.drive *= lambda_next;
        scaled.seed.v0 *= lambda_next;
        double lo, hi;
        root_band(scaled, lo, hi);
        std::vector<RefineResult> local = scan_interval(scaled, lo, hi, policy);
        if (local.empty()) break;
        const RefineResult* nearest = &local.front();
        for (const RefineResult& r : local)
            if (std::abs(r.theta - theta) < std::abs(nearest->theta - theta))
                nearest = &r;
        theta = nearest->theta;
        lambda = lambda_next;
        d_lambda = 1.0 / 16.0;
    }
    // Land on the closest fully switched-on root.
    const RefineResult* best = &roots.front();
    for (const RefineResult& r : roots)
        if (std::abs(r.theta - theta) < std::abs(best->theta - theta))
            best = &r;
    return *best;
}

}  // namespace

double AreaEquationProblem::residual(double theta) const {
    const double kappa_s = params.kappa_s();
    const double xi = params.varkappa / kappa_s;
    return theta - 2.0 * drive / kappa_s - xi * source_term(seed, theta);
}

double AreaEquationProblem::residual_derivative(double theta) const {
    const double xi = params.varkappa / params.kappa_s();
    return 1.0 - xi * source_term_derivative(seed, theta);
}

BranchPolicy BranchPolicy::unique_root() { return {}; }

BranchPolicy BranchPolicy::continue_from(double previous_theta) {
    BranchPolicy p;
    p.mode = BranchMode::ContinuationFrom;
    p.previous = previous_theta;
    return p;
}

BranchPolicy BranchPolicy::scan_all(double lo, double hi) {
    BranchPolicy p;
    p.mode = BranchMode::ScanAll;
    p.interval_lo = lo;
    p.interval_hi = hi;
    return p;
}

AreaSolution solve_area_equation(const AreaEquationProblem& problem,
                                 const BranchPolicy& policy) {
    problem.params.validate();
    problem.seed.validate(1e-9);

    if (problem.params.varkappa == 0.0) {
        RefineResult r;
        r.theta = 2.0 * problem.drive / problem.params.kappa_s();
        r.residual = problem.residual(r.theta);
        r.converged = true;
        return make_solution(problem, r, Branch::Principal, 0);
    }

    if (policy.mode == BranchMode::ContinuationFrom) {
        RefineResult r = newton_from(problem, policy.previous, policy,
                                     policy.max_iterations);
        if (r.converged) {
            AreaSolution s = make_solution(problem, r, Branch::Continued, 1);
            return s;
        }
        double lo, hi;
        root_band(problem, lo, hi);
        std::vector<RefineResult> roots = scan_interval(problem, lo, hi, policy);
        if (roots.empty())
            throw SolverError("solve_area_equation: no root found near previous solution",
                              lo, hi, r.theta, r.residual);
        const RefineResult* nearest = &roots.front();
        for (const RefineResult& root : roots)
            if (std::abs(root.theta - policy.previous) <
                std::abs(nearest->theta - policy.previous))
                nearest = &root;
        if (!nearest->converged)
            throw SolverError("solve_area_equation: refinement failed", lo, hi,
                              nearest->theta, nearest->residual);
        return make_solution(problem, *nearest, Branch::Continued, 1);
    }

    // UniqueRoot and ScanAll: bracketed scan first.
    double lo, hi;
    if (policy.mode == BranchMode::ScanAll) {
        if (!(policy.interval_lo < policy.interval_hi))
            throw std::domain_error("solve_area_equation: empty ScanAll interval");
        lo = policy.interval_lo;
        hi = policy.interval_hi;
    } else {
        root_band(problem, lo, hi);
    }
    std::vector<RefineResult> roots = scan_interval(problem, lo, hi, policy);
    if (roots.empty())
        throw SolverError("solve_area_equation: no sign change inside the scan band",
                          lo, hi, 0.5 * (lo + hi),
                          problem.residual(0.5 * (lo + hi)));
    for (const RefineResult& r : roots)
        if (!r.converged)
            throw SolverError("solve_area_equation: bracket refinement failed",
                              lo, hi, r.theta, r.residual);
    if (roots.size() == 1)
        return make_solution(problem, roots.front(), Branch::Principal, 0);

    int steps = 0;
    RefineResult principal = homotopy_principal(problem, roots, policy, steps);
    return make_solution(problem, principal, Branch::Principal, steps);
}

std::vector<AreaSolution> scan_all_roots(const AreaEquationProblem& problem,
                                         const BranchPolicy& policy) {
    problem.params.validate();
    problem.seed.validate(1e-9);
    if (!(policy.interval_lo < policy.interval_hi))
        throw std::domain_error("scan_all_roots: empty interval");
    std::vector<RefineResult> roots =
        scan_interval(problem, policy.interval_lo, policy.interval_hi, policy);
    std::vector<AreaSolution> out;
    out.reserve(roots.size());
    int id = 0;
    for (const RefineResult& r : roots)
        out.push_back(make_solution(problem, r, Branch::Continued, id++));
    return out;
}

AreaSolution solve_first_pulse(const CavityParams& p, ExteriorArea in_1,
                               const BranchPolicy& policy) {
    AreaEquationProblem problem;
    problem.params = p;
    problem.drive = std::sqrt(p.kappa) * in_1.raw(p);
    problem.seed = BlochSeed{0.0, -1.0};
    return solve_area_equation(problem, policy);
}

AreaSolution solve_second_pulse(const CavityParams& p, ExteriorArea in_2,
                                InteriorArea theta_1,
                                const BranchPolicy& policy) {
    AreaEquationProblem problem;
    problem.params = p;
    problem.drive = std::sqrt(p.kappa) * in_2.raw(p);
    problem.seed = BlochSeed{0.0, -std::cos(theta_1.radians)};
    return solve_area_equation(problem, policy);
}

AreaSolution solve_composite_total(const CavityParams& p, ExteriorArea in_1,
                                   ExteriorArea in_2,
                                   const BranchPolicy& policy) {
    AreaEquationProblem problem;
    problem.params = p;
    problem.drive =
        std::sqrt(p.kappa) * ExteriorArea{in_1.normalized + in_2.normalized}.raw(p);
    problem.seed = BlochSeed{0.0, -1.0};
    return solve_area_equation(problem, policy);
}

double weak_signal_transmission(const CavityParams& p) {
    p.validate();
    return (p.varkappa + p.kappa_in - p.kappa) / (p.kappa_s() + p.varkappa);
}

bool impedance_matched(const CavityParams& p, double tol) {
    const CouplingRatios r = coupling_ratios(p);
    return std::abs(r.xi_im - 1.0) <= tol;
}

}  // namespace ringecho
