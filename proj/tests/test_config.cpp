#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <string>

#include "ringecho/config.hpp"
#include "ringecho/sweep.hpp"

using namespace ringecho;
using config::ConfigError;
using config::parse_area;
using config::parse_config;

namespace {
constexpr double kPi = std::numbers::pi;

bool mentions(const std::exception& e, const std::string& needle) {
    return std::string(e.what()).find(needle) != std::string::npos;
}
}  // namespace

TEST_CASE("area strings") {
    CHECK(parse_area("0.5") == 0.5);
    CHECK(parse_area("-0.25") == -0.25);
    CHECK(parse_area("1e-3") == 1e-3);
    CHECK(parse_area("pi") == doctest::Approx(kPi).epsilon(1e-15));
    CHECK(parse_area("-pi") == doctest::Approx(-kPi).epsilon(1e-15));
    CHECK(parse_area("0.9pi") == doctest::Approx(0.9 * kPi).epsilon(1e-15));
    CHECK(parse_area("2*pi") == doctest::Approx(2.0 * kPi).epsilon(1e-15));
    CHECK(parse_area("pi/5") == doctest::Approx(kPi / 5.0).epsilon(1e-15));
    CHECK(parse_area("3pi/4") == doctest::Approx(0.75 * kPi).epsilon(1e-15));
    CHECK(parse_area(" 0.9 pi ") == doctest::Approx(0.9 * kPi).epsilon(1e-15));
    CHECK_THROWS_AS(parse_area("abc"), ConfigError);
    CHECK_THROWS_AS(parse_area(""), ConfigError);
    CHECK_THROWS_AS(parse_area("pi/0"), ConfigError);
    CHECK_THROWS_AS(parse_area("2pipi"), ConfigError);
}

TEST_CASE("defaults and full parse") {
    const config::RunConfig d = parse_config("");
    CHECK(d.cavity.kappa == 1.0);
    CHECK(d.cavity.kappa_in == 0.0);
    CHECK(d.cavity.varkappa == 1.0);
    CHECK(d.in_1 == 0.0);
    CHECK(d.tau == 2500.0);
    CHECK(d.gamma == 0.0);
    CHECK(!d.gamma_factor);
    CHECK(!d.sweep);
    CHECK(d.oracle.n_atoms == 401);
    CHECK(d.output.precision == 12);

    const config::RunConfig c = parse_config(R"({
        "cavity": {"kappa": 2.0, "kappa_in": 0.5, "varkappa": "pi"},
        "pulses": {"in_1": "pi/2", "in_2": "0.9pi", "tau": 1000},
        "decoherence": {"gamma": 1e-4},
        "sweep": {"axis": "pulses.in_1", "from": 0, "to": "2pi", "steps": 11},
        "oracle": {"n_atoms": 201, "tolerances": {"echo": 0.2}},
        "output": {"path": "out.csv", "precision": 9}
    })");
    CHECK(c.cavity.kappa == 2.0);
    CHECK(c.cavity.varkappa == doctest::Approx(kPi).epsilon(1e-15));
    CHECK(c.in_1 == doctest::Approx(0.5 * kPi).epsilon(1e-15));
    CHECK(c.tau == 1000.0);
    CHECK(c.gamma == 1e-4);
    REQUIRE(c.sweep.has_value());
    CHECK(c.sweep->steps == 11);
    CHECK(c.sweep->to == doctest::Approx(2.0 * kPi).epsilon(1e-15));
    CHECK(c.oracle.n_atoms == 201);
    CHECK(c.oracle.tol_echo == 0.2);
    CHECK(c.oracle.tol_pulse == 0.05);
    CHECK(c.output.path == "out.csv");
    CHECK(c.output.precision == 9);
}

TEST_CASE("unknown keys are rejected with their path") {
    try {
        parse_config(R"({"cavity": {"kappaX": 1}})");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(mentions(e, "cavity.kappaX"));
    }
    try {
        parse_config(R"({"bogus_section": {}})");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(mentions(e, "bogus_section"));
    }
    try {
        parse_config(R"({"oracle": {"tolerances": {"weird": 1}}})");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(mentions(e, "oracle.tolerances.weird"));
    }
}

TEST_CASE("invalid values are rejected") {
    CHECK_THROWS_AS(parse_config("not json"), ConfigError);
    CHECK_THROWS_AS(parse_config("[1, 2]"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"cavity": {"kappa": -1}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"pulses": {"tau": 0}})"), ConfigError);
    CHECK_THROWS_AS(
        parse_config(R"({"decoherence": {"gamma": 1e-4, "gamma_factor": 0.5}})"),
        ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"decoherence": {"gamma_factor": 0.0}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"decoherence": {"gamma_factor": 1.5}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"sweep": {"from": 0, "to": 1, "steps": 5}})"),
                    ConfigError);
    CHECK_THROWS_AS(
        parse_config(R"({"sweep": {"axis": "pulses.in_1", "from": 1, "to": 1, "steps": 5}})"),
        ConfigError);
    CHECK_THROWS_AS(
        parse_config(R"({"sweep": {"axis": "pulses.in_1", "from": 0, "to": 1, "steps": 0}})"),
        ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"output": {"precision": 0}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"output": {"precision": 18}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"oracle": {"pulse_shape": "triangle"}})"),
                    ConfigError);
}

TEST_CASE("dotted overrides") {
    const config::RunConfig c = parse_config(
        R"({"pulses": {"in_1": 1.0}})",
        {"pulses.in_1=0.5pi", "pulses.in_2=0.25", "cavity.varkappa=2",
         "oracle.n_atoms=201", "oracle.grid_convergence=false",
         "output.path=result.csv"});
    CHECK(c.in_1 == doctest::Approx(0.5 * kPi).epsilon(1e-15));
    CHECK(c.in_2 == 0.25);
    CHECK(c.cavity.varkappa == 2.0);
    CHECK(c.oracle.n_atoms == 201);
    CHECK(c.oracle.grid_convergence == false);
    CHECK(c.output.path == "result.csv");

    CHECK_THROWS_AS(parse_config("", {"no_equals"}), ConfigError);
    CHECK_THROWS_AS(parse_config("", {"=value"}), ConfigError);
    CHECK_THROWS_AS(parse_config("", {"pulses..in_1=1"}), ConfigError);
    CHECK_THROWS_AS(parse_config("", {"pulses.bogus=1"}), ConfigError);
}

TEST_CASE("train decoherence scalar") {
    const config::RunConfig by_rate =
        parse_config(R"({"pulses": {"tau": 2500}, "decoherence": {"gamma": 1e-4}})");
    CHECK(by_rate.train_gamma_factor() ==
          doctest::Approx(std::exp(-0.5)).epsilon(1e-15));

    const config::RunConfig by_factor =
        parse_config(R"({"decoherence": {"gamma_factor": 0.75}})");
    CHECK(by_factor.train_gamma_factor() == 0.75);

    CHECK(parse_config("").train_gamma_factor() == 1.0);
}

TEST_CASE("oracle schedule derivation") {
    const config::RunConfig c = parse_config(R"({
        "pulses": {"in_1": "pi/2", "in_2": "0.9pi", "tau": 2500},
        "oracle": {"delta_inh": 0.01, "t_first": 650}
    })");
    const mb::MBSimConfig sim = c.oracle_config();
    CHECK_NOTHROW(sim.validate());
    REQUIRE(sim.pulses.size() == 2);
    CHECK(sim.pulses[0].center == 650.0);
    CHECK(sim.pulses[1].center == 3150.0);
    CHECK(sim.pulses[0].area_normalized == doctest::Approx(0.5 * kPi).epsilon(1e-15));
    CHECK(sim.delta_inh == 0.01);
    // Past the primary echo at t_first + 2 tau plus half a window and margin.
    CHECK(sim.t_end > 650.0 + 2.0 * 2500.0 + 600.0);

    const mb::VerifyTolerances tol = c.oracle_tolerances();
    CHECK(tol.pulse == 0.05);
    CHECK(tol.echo == 0.10);
    CHECK(tol.empty == 1e-6);

    // gamma_factor back-solves the rate for the simulated span.
    const config::RunConfig g = parse_config(
        R"({"pulses": {"tau": 1000}, "decoherence": {"gamma_factor": 0.5}})");
    const mb::MBSimConfig gsim = g.oracle_config();
    CHECK(std::exp(-gsim.gamma * 2.0 * 1000.0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("csv writer") {
    sweep::Table t;
    t.columns = {"x", "y"};
    t.rows = {{1.0, 2.5}, {std::numeric_limits<double>::quiet_NaN(), -0.125},
              {1.0 / 3.0, 1e-20}};

    const std::string csv = sweep::to_csv(t, 12);
    CHECK(csv ==
          "x,y\n"
          "1,2.5\n"
          ",-0.125\n"
          "0.333333333333,1e-20\n");

    // Byte-identical across calls, precision honored.
    CHECK(sweep::to_csv(t, 12) == csv);
    CHECK(sweep::to_csv(t, 3).find("0.333,") != std::string::npos);

    t.row_labels = {"a", "b", "c"};
    const std::string labeled = sweep::to_csv(t, 12);
    CHECK(labeled.substr(0, 10) == "stage,x,y\n");
    CHECK(labeled.find("\nb,,-0.125\n") != std::string::npos);
}

TEST_CASE("sweep table endpoints and axis dispatch") {
    const config::RunConfig c = parse_config(R"({
        "pulses": {"in_1": "pi/2", "in_2": "0.9pi"},
        "sweep": {"axis": "cavity.varkappa", "from": 0.25, "to": 2.0, "steps": 8}
    })");
    const sweep::Table t = sweep::sweep_table(c);
    REQUIRE(t.rows.size() == 8);
    CHECK(t.columns.front() == "cavity.varkappa");
    CHECK(t.rows.front()[0] == 0.25);
    CHECK(t.rows.back()[0] == 2.0);

    // The swept rate reaches the train: stronger coupling moves the echoes.
    CHECK(t.rows.front()[6] != t.rows.back()[6]);

    config::RunConfig bad = c;
    bad.sweep->axis = "cavity.bogus";
    CHECK_THROWS_AS(sweep::sweep_table(bad), ConfigError);

    config::RunConfig none = c;
    none.sweep.reset();
    CHECK_THROWS_AS(sweep::sweep_table(none), ConfigError);
}

TEST_CASE("figure override plumbing") {
    const sweep::Table t = sweep::run_figure("transition", {"steps=5", "to=pi"});
    REQUIRE(t.rows.size() == 5);
    CHECK(t.rows.back()[0] == doctest::Approx(kPi).epsilon(1e-15));

    CHECK_THROWS_AS(sweep::run_figure("transition", {"bogus=1"}), ConfigError);
    CHECK_THROWS_AS(sweep::run_figure("transition", {"steps=abc"}), ConfigError);
    CHECK_THROWS_AS(sweep::run_figure("transition", {"steps"}), ConfigError);
    CHECK_THROWS_AS(sweep::run_figure("unknown-figure", {}), ConfigError);

    // Every figure runs on a coarse grid.
    CHECK(sweep::run_figure("approx", {"steps=8"}).rows.size() == 8);
    CHECK(sweep::run_figure("echo-th2", {"steps=7"}).rows.size() == 7);
    CHECK(sweep::run_figure("three-echoes", {"steps=6"}).rows.size() == 6);
}
