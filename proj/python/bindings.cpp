#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <vector>

#include "ringecho/area.hpp"
#include "ringecho/core.hpp"
#include "ringecho/echo.hpp"

namespace py = pybind11;
using namespace ringecho;

namespace {

// The python surface reports interior areas as plain radians and exterior
// areas in their normalized (2/sqrt(kappa)) form.
double interior(const InteriorArea& a) { return a.radians; }
double exterior(const ExteriorArea& a) { return a.normalized; }

}  // namespace

PYBIND11_MODULE(_ringecho, m) {
    m.doc() = "Pulse-area bookkeeping for photon echoes in a ring cavity";

    py::class_<CavityParams>(m, "CavityParams",
                             "Rates of the ring cavity and the intracavity "
                             "medium; only ratios matter.")
        .def(py::init([](double kappa, double kappa_in, double varkappa) {
                 return CavityParams{kappa, kappa_in, varkappa};
             }),
             py::arg("kappa") = 1.0, py::arg("kappa_in") = 0.0,
             py::arg("varkappa") = 0.0)
        .def_readwrite("kappa", &CavityParams::kappa)
        .def_readwrite("kappa_in", &CavityParams::kappa_in)
        .def_readwrite("varkappa", &CavityParams::varkappa)
        .def("kappa_s", &CavityParams::kappa_s)
        .def("validate", &CavityParams::validate)
        .def("__repr__", [](const CavityParams& p) {
            return "CavityParams(kappa=" + std::to_string(p.kappa) +
                   ", kappa_in=" + std::to_string(p.kappa_in) +
                   ", varkappa=" + std::to_string(p.varkappa) + ")";
        });

    py::class_<CouplingRatios>(m, "CouplingRatios")
        .def_readonly("xi", &CouplingRatios::xi)
        .def_readonly("xi_im", &CouplingRatios::xi_im);
    m.def("coupling_ratios", &coupling_ratios, py::arg("params"),
          "Dimensionless ratios: xi = varkappa / kappa_s, xi_im = kappa / "
          "(varkappa + kappa_in).");

    py::class_<BlochSeed>(m, "BlochSeed",
                          "Phased Bloch components seeding one emission "
                          "interval; physical seeds satisfy v0^2 + w0^2 <= 1.")
        .def(py::init([](double v0, double w0) {
                 return BlochSeed{v0, w0};
             }),
             py::arg("v0") = 0.0, py::arg("w0") = -1.0)
        .def_readwrite("v0", &BlochSeed::v0)
        .def_readwrite("w0", &BlochSeed::w0)
        .def("norm", &BlochSeed::norm)
        .def("validate", &BlochSeed::validate, py::arg("slack") = 1e-12)
        .def("__repr__", [](const BlochSeed& s) {
            return "BlochSeed(v0=" + std::to_string(s.v0) +
                   ", w0=" + std::to_string(s.w0) + ")";
        });

    py::class_<AreaSolution>(m, "AreaSolution",
                             "One root of the pulse-area balance. theta is "
                             "the interior area in radians; theta_out the "
                             "normalized exterior output area.")
        .def_property_readonly(
            "theta", [](const AreaSolution& s) { return interior(s.theta); })
        .def_property_readonly(
            "theta_out",
            [](const AreaSolution& s) { return exterior(s.theta_out); })
        .def_readonly("theta_in_raw", &AreaSolution::theta_in_raw)
        .def_readonly("theta_out_raw", &AreaSolution::theta_out_raw)
        .def_readonly("residual", &AreaSolution::residual)
        .def_readonly("branch_id", &AreaSolution::branch_id)
        .def_readonly("converged", &AreaSolution::converged)
        .def_readonly("iterations", &AreaSolution::iterations);

    m.def(
        "solve_first_pulse",
        [](const CavityParams& p, double in_1) {
            return solve_first_pulse(p, ExteriorArea{in_1});
        },
        py::arg("params"), py::arg("in_1"),
        "Driven pulse entering a cold medium; in_1 is the normalized input "
        "area.");
    m.def(
        "solve_second_pulse",
        [](const CavityParams& p, double in_2, double theta_1) {
            return solve_second_pulse(p, ExteriorArea{in_2},
                                      InteriorArea{theta_1});
        },
        py::arg("params"), py::arg("in_2"), py::arg("theta_1"),
        "Driven pulse against the inversion left by an interior area "
        "theta_1.");
    m.def(
        "solve_composite_total",
        [](const CavityParams& p, double in_1, double in_2) {
            return solve_composite_total(p, ExteriorArea{in_1},
                                         ExteriorArea{in_2});
        },
        py::arg("params"), py::arg("in_1"), py::arg("in_2"),
        "Both inputs merged into one composite drive on a cold medium.");
    m.def(
        "area_residual",
        [](const CavityParams& p, double drive, const BlochSeed& seed,
           double theta) {
            return AreaEquationProblem{p, drive, seed}.residual(theta);
        },
        py::arg("params"), py::arg("drive"), py::arg("seed"), py::arg("theta"),
        "Rescaled residual of the balance equation at theta.");
    m.def(
        "scan_roots",
        [](const CavityParams& p, double drive, const BlochSeed& seed,
           double lo, double hi) {
            return scan_all_roots(AreaEquationProblem{p, drive, seed},
                                  BranchPolicy::scan_all(lo, hi));
        },
        py::arg("params"), py::arg("drive"), py::arg("seed"),
        py::arg("lo") = -4.0 * std::numbers::pi,
        py::arg("hi") = 4.0 * std::numbers::pi,
        "Every root of the balance equation inside [lo, hi], ascending.");

    m.def("weak_signal_transmission", &weak_signal_transmission,
          py::arg("params"),
          "Amplitude transmission of a weak signal through the cold cavity; "
          "exactly 0 at impedance matching.");
    m.def("impedance_matched", &impedance_matched, py::arg("params"),
          py::arg("tol") = 1e-9);

    m.def(
        "normalized_area",
        [](double raw, const CavityParams& p) {
            return to_normalized(raw, p).normalized;
        },
        py::arg("raw"), py::arg("params"),
        "Normalized form (2/sqrt(kappa)) * raw of a traveling-field area.");
    m.def(
        "raw_area",
        [](double normalized, const CavityParams& p) {
            return from_normalized(ExteriorArea{normalized}, p);
        },
        py::arg("normalized"), py::arg("params"));

    py::class_<EchoSeedContext>(m, "EchoSeedContext",
                                "Interior areas feeding a seed builder, plus "
                                "the decoherence symbol value.")
        .def(py::init([](double theta_1, double theta_2, double theta_3,
                         double theta_e1, double theta_e2,
                         double gamma_factor) {
                 return EchoSeedContext{theta_1, theta_2,   theta_3,
                                        theta_e1, theta_e2, gamma_factor};
             }),
             py::arg("theta_1") = 0.0, py::arg("theta_2") = 0.0,
             py::arg("theta_3") = 0.0, py::arg("theta_e1") = 0.0,
             py::arg("theta_e2") = 0.0, py::arg("gamma_factor") = 1.0)
        .def_readwrite("theta_1", &EchoSeedContext::theta_1)
        .def_readwrite("theta_2", &EchoSeedContext::theta_2)
        .def_readwrite("theta_3", &EchoSeedContext::theta_3)
        .def_readwrite("theta_e1", &EchoSeedContext::theta_e1)
        .def_readwrite("theta_e2", &EchoSeedContext::theta_e2)
        .def_readwrite("gamma_factor", &EchoSeedContext::gamma_factor);

    m.def("primary_echo_seed", &primary_echo_seed, py::arg("ctx"));
    m.def("rose_echo_seed", &rose_echo_seed, py::arg("ctx"));
    m.def("second_echo_seed", &second_echo_seed, py::arg("ctx"));
    m.def("third_echo_seed", &third_echo_seed, py::arg("ctx"));

    m.def(
        "solve_echo",
        [](const CavityParams& p, const BlochSeed& seed) {
            return solve_echo(p, seed);
        },
        py::arg("params"), py::arg("seed"),
        "Undriven emission interval; the principal branch never reaches pi.");
    m.def("echo_linear", &echo_linear, py::arg("seed"), py::arg("xi"),
          "Small-area limit 2 xi v0 / (1 - xi w0) of the emission equation.");
    m.def("phase_bound", &phase_bound, py::arg("seed"),
          "Upper bound 2 atan2(v0, -w0) on the principal emitted area for "
          "v0 > 0.");

    py::class_<CubicSolution>(m, "CubicSolution")
        .def_readonly("zeta", &CubicSolution::zeta)
        .def_readonly("discriminant", &CubicSolution::discriminant)
        .def_readonly("delta_0", &CubicSolution::delta_0)
        .def_readonly("delta_1", &CubicSolution::delta_1)
        .def_readonly("root", &CubicSolution::root)
        .def_readonly("root_count", &CubicSolution::root_count)
        .def_property_readonly("roots", [](const CubicSolution& c) {
            return std::vector<double>(c.roots.begin(),
                                       c.roots.begin() + c.root_count);
        });
    m.def(
        "echo_cubic",
        [](const BlochSeed& seed, double xi, std::optional<double> previous) {
            return echo_cubic(seed, xi, previous);
        },
        py::arg("seed"), py::arg("xi"), py::arg("previous") = py::none(),
        "Closed-form root of the third-order expansion of the emission "
        "equation; with three real roots the one nearest `previous` is "
        "selected.");

    py::class_<PrimaryEchoResult>(m, "PrimaryEchoResult")
        .def_readonly("first", &PrimaryEchoResult::first)
        .def_readonly("second", &PrimaryEchoResult::second)
        .def_readonly("seed", &PrimaryEchoResult::seed)
        .def_readonly("echo", &PrimaryEchoResult::echo)
        .def_readonly("efficiency", &PrimaryEchoResult::efficiency);
    m.def("primary_echo_chain",
          [](const CavityParams& p, double in_1, double in_2,
             double gamma_factor) {
              return primary_echo_chain(p, ExteriorArea{in_1},
                                        ExteriorArea{in_2}, gamma_factor);
          },
          py::arg("params"), py::arg("in_1"), py::arg("in_2"),
          py::arg("gamma_factor") = 1.0,
          "Both driven pulses plus the primary echo; efficiency is the "
          "emitted area over the first input area.");

    py::class_<EchoTrainResult>(m, "EchoTrainResult",
                                "Full two-pulse train. out_* are normalized "
                                "exterior areas in the emission convention "
                                "sqrt(kappa) theta - theta_in.")
        .def_readonly("first", &EchoTrainResult::first)
        .def_readonly("second", &EchoTrainResult::second)
        .def_readonly("total", &EchoTrainResult::total)
        .def_readonly("echo_1", &EchoTrainResult::echo_1)
        .def_readonly("echo_2", &EchoTrainResult::echo_2)
        .def_readonly("echo_3", &EchoTrainResult::echo_3)
        .def_readonly("seed_1", &EchoTrainResult::seed_1)
        .def_readonly("seed_2", &EchoTrainResult::seed_2)
        .def_readonly("seed_3", &EchoTrainResult::seed_3)
        .def_property_readonly(
            "out_1", [](const EchoTrainResult& t) { return exterior(t.out_1); })
        .def_property_readonly(
            "out_2", [](const EchoTrainResult& t) { return exterior(t.out_2); })
        .def_property_readonly(
            "out_tot",
            [](const EchoTrainResult& t) { return exterior(t.out_tot); })
        .def_property_readonly(
            "out_e1",
            [](const EchoTrainResult& t) { return exterior(t.out_e1); })
        .def_property_readonly(
            "out_e2",
            [](const EchoTrainResult& t) { return exterior(t.out_e2); })
        .def_property_readonly(
            "out_e3",
            [](const EchoTrainResult& t) { return exterior(t.out_e3); })
        .def_readonly("theta_e_sigma", &EchoTrainResult::theta_e_sigma)
        .def_property_readonly(
            "out_sigma",
            [](const EchoTrainResult& t) { return exterior(t.out_sigma); })
        .def_readonly("theta_diff", &EchoTrainResult::theta_diff);
    m.def("echo_train",
          [](const CavityParams& p, double in_1, double in_2,
             double gamma_factor) {
              return echo_train(p, ExteriorArea{in_1}, ExteriorArea{in_2},
                                EchoDecoherence{gamma_factor});
          },
          py::arg("params"), py::arg("in_1"), py::arg("in_2"),
          py::arg("gamma_factor") = 1.0,
          "Both driven pulses, three echoes, the composite total and the "
          "total-area bookkeeping.");
}
