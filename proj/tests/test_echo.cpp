#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ringecho/echo.hpp"

using namespace ringecho;
namespace {

constexpr double kPi = std::numbers::pi;

double cubic_value(const BlochSeed& seed, double xi, double theta) {
    const double r = seed.v0 / seed.w0;
    const double zeta = (1.0 - seed.w0 * xi) / (seed.w0 * xi);
    return theta * theta * theta + 3.0 * r * theta * theta + 6.0 * zeta * theta -
           12.0 * r;
}

}  // namespace

TEST_CASE("seed builders match their closed forms") {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
    std::uniform_real_distribution<double> gamma(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        EchoSeedContext ctx;
        ctx.theta_1 = angle(rng);
        ctx.theta_2 = angle(rng);
        ctx.theta_3 = angle(rng);
        ctx.gamma_factor = gamma(rng);

        const BlochSeed p = primary_echo_seed(ctx);
        const double sh2 = std::sin(0.5 * ctx.theta_2);
        CHECK(p.v0 == doctest::Approx(ctx.gamma_factor * std::sin(ctx.theta_1) *
                                      sh2 * sh2)
                          .epsilon(1e-14));
        CHECK(p.w0 == doctest::Approx(-std::cos(ctx.theta_1) *
                                      std::cos(ctx.theta_2))
                          .epsilon(1e-14));

        const BlochSeed r = rose_echo_seed(ctx);
        const double sh3 = std::sin(0.5 * ctx.theta_3);
        CHECK(r.v0 == doctest::Approx(p.v0 * sh3 * sh3).epsilon(1e-14));
        CHECK(r.w0 == doctest::Approx(p.w0 * std::cos(ctx.theta_3)).epsilon(1e-14));
    }
}

TEST_CASE("seed builders stay inside the Bloch ball") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
    std::uniform_real_distribution<double> gamma(0.0, 1.0);

    // Builders whose arguments are all freely driven angles hold on any tuple.
    int violations = 0;
    for (int i = 0; i < 100000; ++i) {
        EchoSeedContext ctx;
        ctx.theta_1 = angle(rng);
        ctx.theta_2 = angle(rng);
        ctx.theta_3 = angle(rng);
        ctx.theta_e1 = angle(rng);
        ctx.gamma_factor = gamma(rng);
        if (primary_echo_seed(ctx).norm() > 1.0 + 1e-12) ++violations;
        if (rose_echo_seed(ctx).norm() > 1.0 + 1e-12) ++violations;
        if (second_echo_seed(ctx).norm() > 1.0 + 1e-12) ++violations;
    }
    CHECK(violations == 0);

    // The later-echo builders take earlier echo areas as arguments; their
    // formulas presuppose those areas came from the same sequence (free
    // combinations can represent more rephased coherence than the sequence
    // created and leave the ball). Chained solver outputs are the domain.
    std::uniform_real_distribution<double> in_dist(0.0, 2.0 * kPi);
    std::uniform_real_distribution<double> xi_dist(0.05, 3.0);
    int chained_violations = 0;
    for (int i = 0; i < 20000; ++i) {
        const CavityParams p{1.0, 0.0, xi_dist(rng)};
        const EchoTrainResult t =
            echo_train(p, ExteriorArea{in_dist(rng)}, ExteriorArea{in_dist(rng)},
                       EchoDecoherence{gamma(rng)});
        if (t.seed_2.norm() > 1.0 + 1e-12) ++chained_violations;
        if (t.seed_3.norm() > 1.0 + 1e-12) ++chained_violations;
    }
    CHECK(chained_violations == 0);
}

TEST_CASE("linear emission estimate") {
    CHECK(echo_linear(BlochSeed{0.2, -0.5}, 1.0) ==
          doctest::Approx(2.0 * 0.2 / 1.5).epsilon(1e-15));
    CHECK(echo_linear(BlochSeed{0.2, 0.5}, 1.0) ==
          doctest::Approx(2.0 * 0.2 / 0.5).epsilon(1e-15));
    CHECK_THROWS_AS(echo_linear(BlochSeed{0.1, 1.0}, 1.0), std::domain_error);
}

TEST_CASE("cubic emission estimate, single-root case") {
    // Frozen: v0 = 0.1, w0 = 1, xi = 0.5 gives zeta = 1 and the cubic
    // theta^3 + 0.3 theta^2 + 6 theta - 1.2 with one real root.
    const CubicSolution c = echo_cubic(BlochSeed{0.1, 1.0}, 0.5);
    CHECK(c.zeta == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(c.delta_1 == doctest::Approx(-1.798).epsilon(1e-12));
    CHECK(c.delta_0 == doctest::Approx(8.6888).epsilon(1e-12));
    CHECK(c.discriminant == doctest::Approx(-938.3904).epsilon(1e-12));
    CHECK(c.root_count == 1);
    CHECK(c.root == doctest::Approx(0.196793394052).epsilon(1e-10));
    CHECK(cubic_value(BlochSeed{0.1, 1.0}, 0.5, c.root) ==
          doctest::Approx(0.0).epsilon(1e-10));

    // The depressed-cubic constant equals -2 r (6 + 3 zeta - r^2).
    const double r = 0.1;
    CHECK(c.delta_1 ==
          doctest::Approx(-2.0 * r * (6.0 + 3.0 * c.zeta - r * r)).epsilon(1e-14));
}

TEST_CASE("cubic emission estimate, three-root case") {
    // w0 xi > 1 makes zeta negative and opens the fold: three real roots.
    const BlochSeed seed{0.1, 1.0};
    const CubicSolution c = echo_cubic(seed, 2.0);
    CHECK(c.zeta == doctest::Approx(-0.5).epsilon(1e-14));
    REQUIRE(c.root_count == 3);
    CHECK(c.roots[0] < c.roots[1]);
    CHECK(c.roots[1] < c.roots[2]);
    for (int k = 0; k < 3; ++k)
        CHECK(cubic_value(seed, 2.0, c.roots[k]) ==
              doctest::Approx(0.0).epsilon(1e-9));

    // Default selection is the root nearest zero; continuity follows previous.
    CHECK(c.root == c.roots[1]);
    CHECK(echo_cubic(seed, 2.0, c.roots[2] + 0.05).root ==
          doctest::Approx(c.roots[2]).epsilon(1e-14));
    CHECK(echo_cubic(seed, 2.0, c.roots[0] - 0.05).root ==
          doctest::Approx(c.roots[0]).epsilon(1e-14));
}

TEST_CASE("cubic degeneracies are rejected") {
    CHECK_THROWS_AS(echo_cubic(BlochSeed{0.1, 0.0}, 1.0), std::domain_error);
    CHECK_THROWS_AS(echo_cubic(BlochSeed{0.1, 1.0}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(echo_cubic(BlochSeed{0.1, 1.0}, -1.0), std::invalid_argument);
}

TEST_CASE("cubic root solves its own polynomial and tracks the full solve") {
    std::mt19937 rng(5150);
    std::uniform_real_distribution<double> v_dist(0.01, 0.5);
    std::uniform_real_distribution<double> w_dist(0.5, 0.86);
    std::uniform_real_distribution<double> xi_dist(0.1, 1.0);
    const CavityParams base{1.0, 0.0, 1.0};
    for (int i = 0; i < 500; ++i) {
        BlochSeed seed{v_dist(rng), w_dist(rng)};
        if (seed.norm() > 1.0) continue;
        const double xi = xi_dist(rng);
        const CubicSolution c = echo_cubic(seed, xi);
        CHECK(std::abs(cubic_value(seed, xi, c.root)) <=
              1e-9 * (1.0 + std::abs(12.0 * seed.v0 / seed.w0)));

        CavityParams p = base;
        p.varkappa = xi * p.kappa_s();
        const AreaSolution full = solve_echo(p, seed);
        if (std::abs(full.theta.radians) > 0.01 * kPi)
            CHECK(std::abs(c.root - full.theta.radians) <=
                  0.11 * std::abs(full.theta.radians));
    }
}

TEST_CASE("emission solve is odd in the driving coherence") {
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> v_dist(0.05, 0.7);
    std::uniform_real_distribution<double> w_dist(-0.7, 0.7);
    const CavityParams p{1.0, 0.0, 1.0};
    for (int i = 0; i < 200; ++i) {
        BlochSeed seed{v_dist(rng), w_dist(rng)};
        if (seed.norm() > 1.0) continue;
        const AreaSolution plus = solve_echo(p, seed);
        const AreaSolution minus = solve_echo(p, BlochSeed{-seed.v0, seed.w0});
        CHECK(minus.theta.radians ==
              doctest::Approx(-plus.theta.radians).epsilon(1e-9));
    }
}

TEST_CASE("emitted area stays below the phase bound and below pi") {
    std::mt19937 rng(4242);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
    std::uniform_real_distribution<double> radius(0.05, 1.0);
    std::uniform_real_distribution<double> xi_dist(0.05, 3.0);
    const CavityParams base{1.0, 0.0, 1.0};
    int checked = 0;
    for (int i = 0; i < 2000; ++i) {
        const double rho = std::sqrt(radius(rng));
        const double phi = angle(rng);
        BlochSeed seed{rho * std::abs(std::sin(phi)), rho * std::cos(phi)};
        if (seed.v0 <= 0.0) continue;
        CavityParams p = base;
        p.varkappa = xi_dist(rng) * p.kappa_s();
        const AreaSolution s = solve_echo(p, seed);
        const double bound = phase_bound(seed);
        CHECK(bound > 0.0);
        CHECK(bound < 2.0 * kPi);
        CHECK(s.theta.radians < bound + 1e-12);
        CHECK(s.theta.radians < kPi);
        ++checked;
    }
    CHECK(checked > 1500);
}

TEST_CASE("phase bound identity and zero-seed rejection") {
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> comp(-1.0, 1.0);
    std::uniform_real_distribution<double> angle(-2.0 * kPi, 2.0 * kPi);
    for (int i = 0; i < 300; ++i) {
        const BlochSeed seed{comp(rng), comp(rng)};
        if (seed.norm() < 1e-6) continue;
        const double phi = phase_bound(seed);
        const double theta = angle(rng);
        const double lhs = 2.0 * seed.norm() * std::cos(0.5 * theta) *
                           std::sin(0.5 * (phi - theta));
        const double c = std::cos(0.5 * theta);
        const double rhs = 2.0 * seed.v0 * c * c + seed.w0 * std::sin(theta);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
    CHECK_THROWS_AS(phase_bound(BlochSeed{0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("train decoherence factor") {
    const EchoDecoherence d = train_decoherence(DecoherenceModel{1e-4, 2500.0});
    CHECK(d.gamma_factor == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
}

TEST_CASE("primary echo chain spot values") {
    // Frozen from the area solves at xi = 1, inputs (pi/5, pi) normalized.
    const CavityParams p{1.0, 0.0, 1.0};
    const PrimaryEchoResult chain =
        primary_echo_chain(p, ExteriorArea{kPi / 5.0}, ExteriorArea{kPi});
    CHECK(chain.first.theta.radians == doctest::Approx(0.31679545124).epsilon(1e-10));
    CHECK(chain.second.theta.radians == doctest::Approx(kPi).epsilon(1e-10));
    CHECK(chain.seed.v0 == doctest::Approx(0.311523079478).epsilon(1e-10));
    CHECK(chain.seed.w0 == doctest::Approx(0.950238586331).epsilon(1e-10));
    CHECK(chain.echo.theta.radians == doctest::Approx(1.309957894).epsilon(1e-9));
    CHECK(chain.efficiency == doctest::Approx(4.16972548143).epsilon(1e-10));
}

TEST_CASE("echo train bookkeeping identities") {
    const CavityParams p{2.0, 0.3, 1.5};
    const ExteriorArea in_1{0.5 * kPi}, in_2{0.9 * kPi};
    const EchoTrainResult t = echo_train(p, in_1, in_2, EchoDecoherence{0.8});

    CHECK(t.theta_e_sigma ==
          doctest::Approx(t.total.theta.radians - t.first.theta.radians -
                          t.second.theta.radians)
              .epsilon(1e-14));
    CHECK(t.out_sigma.normalized ==
          doctest::Approx(t.out_tot.normalized - t.out_1.normalized -
                          t.out_2.normalized)
              .epsilon(1e-14));

    // Emission convention: output = sqrt(kappa) * theta - input, normalized.
    const double sk = std::sqrt(p.kappa);
    CHECK(t.out_1.normalized ==
          doctest::Approx(
              to_normalized(sk * t.first.theta.radians - in_1.raw(p), p).normalized)
              .epsilon(1e-12));
    CHECK(t.out_e1.normalized ==
          doctest::Approx(to_normalized(sk * t.echo_1.theta.radians, p).normalized)
              .epsilon(1e-12));

    const double leftover = t.out_sigma.raw(p) - t.out_e1.raw(p) -
                            t.out_e2.raw(p) - t.out_e3.raw(p);
    CHECK(t.theta_diff ==
          doctest::Approx(leftover / (10.0 * in_1.raw(p))).epsilon(1e-12));
}

TEST_CASE("echo train regimes") {
    const ExteriorArea in_1{0.5 * kPi}, in_2{0.9 * kPi};

    // Weak coupling: one dominant echo, near-exact total-area balance.
    const EchoTrainResult weak =
        echo_train(CavityParams{1.0, 0.0, 0.25}, in_1, in_2);
    CHECK(weak.theta_diff == doctest::Approx(4.73075591908e-05).epsilon(1e-6));
    CHECK(weak.out_e1.normalized / weak.out_e2.normalized > 5.0);
    CHECK(weak.out_e1.normalized / in_1.normalized ==
          doctest::Approx(0.600915990672).epsilon(1e-9));

    // Strong coupling: the echoes become comparable and the balance degrades.
    const EchoTrainResult strong =
        echo_train(CavityParams{1.0, 0.0, 2.0}, in_1, in_2);
    CHECK(strong.theta_diff == doctest::Approx(0.36395).epsilon(1e-3));
    CHECK(std::max(strong.out_e2.normalized, strong.out_e3.normalized) >
          0.3 * strong.out_e1.normalized);

    // No phased coherence left: the train stays dark.
    const EchoTrainResult dark =
        echo_train(CavityParams{1.0, 0.0, 1.0}, in_1, in_2, EchoDecoherence{0.0});
    CHECK(dark.echo_1.theta.radians == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(dark.out_e1.normalized == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("solve_echo validates the seed") {
    CHECK_THROWS_AS(solve_echo(CavityParams{1.0, 0.0, 1.0}, BlochSeed{0.1, -1.0}),
                    std::invalid_argument);
}
