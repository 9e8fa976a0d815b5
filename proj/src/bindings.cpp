#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qtoa/booster.hpp"
#include "qtoa/clock_model.hpp"
#include "qtoa/experiments.hpp"
#include "qtoa/gradual_clock.hpp"
#include "qtoa/spin_trigger.hpp"
#include "qtoa/tdse.hpp"
#include "qtoa/toa_operator.hpp"

namespace py = pybind11;
using namespace qtoa;

PYBIND11_MODULE(_qtoa, m) {
    m.doc() = "Toy models of quantum time-of-arrival measurement";

    py::class_<PacketSpec>(m, "PacketSpec")
        .def(py::init<double, double, double, double, double, double>(),
             py::arg("m") = 1.0, py::arg("k0") = 1.0, py::arg("dx") = 1.0,
             py::arg("x0") = 10.0, py::arg("p0") = 1.0, py::arg("dy") = 1.0)
        .def_readwrite("m", &PacketSpec::m)
        .def_readwrite("k0", &PacketSpec::k0)
        .def_readwrite("dx", &PacketSpec::dx)
        .def_readwrite("x0", &PacketSpec::x0)
        .def_readwrite("p0", &PacketSpec::p0)
        .def_readwrite("dy", &PacketSpec::dy)
        .def("validate", &PacketSpec::validate)
        .def("clock_tail_mass", &PacketSpec::clock_tail_mass);

    m.def("normalization", py::overload_cast<const PacketSpec&>(&normalization));
    m.def("classical_toa", &classical_toa);
    m.def("late_time", py::overload_cast<const PacketSpec&>(&late_time));

    py::class_<ClockChannel>(m, "ClockChannel")
        .def_readonly("k", &ClockChannel::k)
        .def_readonly("p", &ClockChannel::p)
        .def_readonly("q", &ClockChannel::q)
        .def_readonly("A_T", &ClockChannel::A_T)
        .def_readonly("A_R", &ClockChannel::A_R)
        .def("flux_error", &ClockChannel::flux_error);
    m.def("channel", &channel, py::arg("k"), py::arg("p"), py::arg("m") = 1.0);
    m.def("detection_probability", &detection_probability, py::arg("E_k"), py::arg("p"));

    py::class_<ClockHistogram>(m, "ClockHistogram")
        .def_readonly("edges", &ClockHistogram::edges)
        .def_readonly("density", &ClockHistogram::density)
        .def_readonly("detection_weight", &ClockHistogram::detection_weight)
        .def_readonly("clock_tail_mass", &ClockHistogram::clock_tail_mass)
        .def("mass", &ClockHistogram::mass)
        .def("mean", &ClockHistogram::mean)
        .def("stddev", &ClockHistogram::stddev)
        .def("peak", &ClockHistogram::peak);

    m.def(
        "readout_distribution",
        [](const PacketSpec& s, double t, int nodes, const std::string& route,
           int bins) {
            ReadoutOptions opt;
            opt.bins = bins;
            if (route == "xgrid") opt.route = ReadoutRoute::XGrid;
            else if (route == "shell") opt.route = ReadoutRoute::EnergyShell;
            return readout_distribution(s, t, make_grid(s, {nodes, 6.0}), opt);
        },
        py::arg("spec"), py::arg("t"), py::arg("nodes") = 128,
        py::arg("route") = "auto", py::arg("bins") = 400);
    m.def("detection_weight",
          [](const PacketSpec& s) { return detection_weight_flux(s, make_grid(s)); });
    m.def("appendix_gamma", &appendix_gamma);
    m.def("phase_peaks", [](const PacketSpec& s, double t) {
        const PhasePeaks r = phase_peaks(s, t);
        return py::make_tuple(r.x_peak, r.y_peak, r.predicted_arrival);
    });

    py::class_<TriggerChannel>(m, "TriggerChannel")
        .def_readonly("k_up", &TriggerChannel::k_up)
        .def_readonly("k_down", &TriggerChannel::k_down)
        .def_readonly("phi_L_up", &TriggerChannel::phi_L_up)
        .def_readonly("phi_L_down", &TriggerChannel::phi_L_down)
        .def_readonly("phi_R_up", &TriggerChannel::phi_R_up)
        .def_readonly("phi_R_down", &TriggerChannel::phi_R_down)
        .def("flux_error", &TriggerChannel::flux_error);
    m.def("trigger_clock_channel", &trigger_clock_channel, py::arg("alpha"),
          py::arg("E_k"), py::arg("p"), py::arg("m") = 1.0);
    m.def("trigger_detection_probability", &trigger_detection_probability);
    m.def("alpha_infinite", &alpha_infinite);
    m.def("multi_trigger", [](int n) {
        const MultiTrigger t = multi_trigger(n);
        return py::make_tuple(t.num, t.den, t.flip_probability);
    });

    py::class_<BoosterParams>(m, "BoosterParams")
        .def_readonly("k", &BoosterParams::k)
        .def_readonly("k_prime", &BoosterParams::k_prime)
        .def_readonly("lambda_", &BoosterParams::lambda)
        .def_readonly("q", &BoosterParams::q)
        .def_readonly("alpha", &BoosterParams::alpha)
        .def_readonly("V1", &BoosterParams::V1)
        .def_readonly("V2", &BoosterParams::V2)
        .def_readonly("W", &BoosterParams::W);
    m.def("tune", &tune, py::arg("m"), py::arg("k"), py::arg("k_prime"),
          py::arg("lambda"));
    py::class_<BoosterChannel>(m, "BoosterChannel")
        .def_readonly("k_in", &BoosterChannel::k_in)
        .def_readonly("J_L_up", &BoosterChannel::J_L_up)
        .def_readonly("J_R_down", &BoosterChannel::J_R_down)
        .def("flux_error", &BoosterChannel::flux_error);
    m.def("booster_channel", &booster_channel);

    py::class_<ClosedFormTerms>(m, "ClosedFormTerms")
        .def_readonly("a_travel", &ClosedFormTerms::a_travel)
        .def_readonly("b_minus_elapsed", &ClosedFormTerms::b_minus_elapsed)
        .def_readonly("c_drift", &ClosedFormTerms::c_drift)
        .def("sum", &ClosedFormTerms::sum);
    py::class_<GradualConfig>(m, "GradualConfig")
        .def(py::init<>())
        .def_readwrite("m", &GradualConfig::m)
        .def_readwrite("E", &GradualConfig::E)
        .def_readwrite("p_y", &GradualConfig::p_y)
        .def_readwrite("x_A", &GradualConfig::x_A)
        .def_readwrite("x_i", &GradualConfig::x_i)
        .def_readwrite("t_i", &GradualConfig::t_i)
        .def_readwrite("t_f", &GradualConfig::t_f);
    py::class_<TrajectoryResult>(m, "TrajectoryResult")
        .def_readonly("y_displacement", &TrajectoryResult::y_displacement)
        .def_readonly("terms", &TrajectoryResult::terms)
        .def_readonly("residual", &TrajectoryResult::residual)
        .def_readonly("arrival_time", &TrajectoryResult::arrival_time)
        .def_readonly("energy_drift", &TrajectoryResult::energy_drift);
    m.def("closed_form_terms", &closed_form_terms);
    m.def("integrate_trajectory", &integrate_trajectory);

    m.def("toa_overlap", [](double T, double Tp, double mm, std::vector<double> damps) {
        const OverlapResult r = overlap(T, Tp, mm, damps);
        return py::make_tuple(r.overlap, r.predicted_offdiag, r.richardson_spread);
    });
    m.def("position_tail", [](double T, double mm, double lo, double hi, int n) {
        const TailFit f = position_tail(T, mm, lo, hi, n);
        return py::make_tuple(f.exponent, f.r_squared);
    });
    m.def("conjugacy_residual", [](double k0, double dx, double k_lo, double k_hi, int n) {
        const ConjugacyResult r = conjugacy_residual(gaussian_state(k0, dx, k_lo, k_hi, n));
        return py::make_tuple(r.best, std::string(1, r.best_sign));
    });

    m.def("reflection_probe", &reflection_probe, py::arg("p_y"), py::arg("epsilon"),
          py::arg("packet"), py::arg("sharp") = false);

    m.def("experiment_names", [] { return experiment_names(); });
    m.def(
        "run_experiment",
        [](const std::string& name, std::map<std::string, std::string> params,
           const std::string& out_dir, int threads) {
            ExperimentConfig cfg;
            cfg.name = name;
            cfg.params = std::move(params);
            cfg.out_dir = out_dir;
            cfg.threads = threads;
            return run(cfg);
        },
        py::arg("name"), py::arg("params") = std::map<std::string, std::string>{},
        py::arg("out_dir") = "out", py::arg("threads") = 0);
}
