// Copyright 2026 The qmean Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <numeric>
#include <sstream>

#include "qmean/config.hpp"
#include "qmean/estimators.hpp"
#include "qmean/harness.hpp"
#include "qmean/image.hpp"
#include "qmean/noise.hpp"
#include "qmean/primitives.hpp"
#include "qmean/statevector.hpp"

namespace py = pybind11;
using namespace qmean;

namespace {

// Runs `fn` with the exact backend for a noiseless model, a trajectory
// backend otherwise.
template <class Fn>
Estimate with_backend(const NoiseModel &noise, Fn fn) {
    noise.validate();
    if (noise.is_noiseless()) return fn(exact_backend());
    const NoisyBackend backend(noise);
    return fn(backend);
}

template <class Writer, class Rows>
std::string to_csv(Writer writer, const Rows &rows) {
    std::ostringstream out;
    writer(out, rows);
    return out.str();
}

}  // namespace

PYBIND11_MODULE(qmean, m) {
    m.doc() = "Quantum mean estimation: Monte Carlo, QSS and QCoin on a statevector simulator.";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<ImageError>(m, "ImageError", PyExc_ValueError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    py::enum_<Algorithm>(m, "Algorithm")
        .value("monte_carlo", Algorithm::monte_carlo)
        .value("qss", Algorithm::qss)
        .value("qcoin", Algorithm::qcoin);
    m.def("parse_algorithm", [](const std::string &s) { return parse_algorithm(s); });

    py::class_<NoiseModel>(m, "NoiseModel")
        .def(py::init<>())
        .def(py::init([](double readout, std::optional<double> readout_1to0, double g1, double gm) {
                 NoiseModel n;
                 n.readout_flip_prob = readout;
                 n.readout_flip_prob_1to0 = readout_1to0;
                 n.gate_error_1q = g1;
                 n.gate_error_mq = gm;
                 n.validate();
                 return n;
             }),
             py::arg("readout_flip_prob") = 0.0, py::arg("readout_flip_prob_1to0") = py::none(),
             py::arg("gate_error_1q") = 0.0, py::arg("gate_error_mq") = 0.0)
        .def_readwrite("readout_flip_prob", &NoiseModel::readout_flip_prob)
        .def_readwrite("readout_flip_prob_1to0", &NoiseModel::readout_flip_prob_1to0)
        .def_readwrite("gate_error_1q", &NoiseModel::gate_error_1q)
        .def_readwrite("gate_error_mq", &NoiseModel::gate_error_mq)
        .def("is_noiseless", &NoiseModel::is_noiseless)
        .def_static("preset", [](const std::string &name) { return NoiseModel::preset(name); })
        .def_static("hardware_like", &NoiseModel::hardware_like)
        .def("__repr__", &NoiseModel::describe);

    py::class_<StepTrace>(m, "StepTrace")
        .def_readonly("step", &StepTrace::step)
        .def_readonly("lower", &StepTrace::lower)
        .def_readonly("upper", &StepTrace::upper)
        .def_readonly("fraction", &StepTrace::fraction)
        .def_readonly("value", &StepTrace::value)
        .def_readonly("trials", &StepTrace::trials)
        .def_readonly("aa_repetitions", &StepTrace::aa_repetitions);

    py::class_<Estimate>(m, "Estimate")
        .def_readonly("algorithm", &Estimate::algorithm)
        .def_readonly("value", &Estimate::value)
        .def_readonly("queries_used", &Estimate::queries_used)
        .def_readonly("seed", &Estimate::seed)
        .def_readonly("trace", &Estimate::trace)
        .def("__repr__", [](const Estimate &e) {
            return "Estimate(" + std::string(to_string(e.algorithm)) + ", value=" + format_number(e.value) +
                   ", queries=" + std::to_string(e.queries_used) + ")";
        });

    // Integrands are tables of 2^n values in [0, 1]; their mean is estimated.
    m.def(
        "estimate_monte_carlo",
        [](std::vector<double> values, std::uint64_t trials, std::uint64_t seed, const NoiseModel &noise) {
            const auto o = OracleSpec::sqrt_amplitude(std::move(values));
            return with_backend(noise, [&](const ShotBackend &b) { return estimate_monte_carlo(o, trials, seed, b); });
        },
        py::arg("values"), py::arg("trials"), py::arg("seed") = 0, py::arg("noise") = NoiseModel{});
    m.def(
        "estimate_qss",
        [](std::vector<double> values, std::size_t P, std::uint64_t seed, const NoiseModel &noise) {
            const auto o = OracleSpec::sqrt_amplitude(std::move(values));
            return with_backend(noise, [&](const ShotBackend &b) { return estimate_qss(o, P, seed, b); });
        },
        py::arg("values"), py::arg("P"), py::arg("seed") = 0, py::arg("noise") = NoiseModel{});
    m.def(
        "estimate_qcoin",
        [](std::vector<double> values, std::size_t k, std::uint64_t L, std::uint64_t seed,
           const NoiseModel &noise) {
            const auto o = OracleSpec::sqrt_amplitude(std::move(values));
            return with_backend(noise, [&](const ShotBackend &b) { return estimate_qcoin(o, k, L, seed, b); });
        },
        py::arg("values"), py::arg("k"), py::arg("L"), py::arg("seed") = 0, py::arg("noise") = NoiseModel{});
    m.def(
        "estimate_qcoin_budget",
        [](std::vector<double> values, std::size_t k, std::uint64_t budget, std::uint64_t seed,
           const NoiseModel &noise) {
            const auto o = OracleSpec::sqrt_amplitude(std::move(values));
            return with_backend(noise,
                                [&](const ShotBackend &b) { return estimate_qcoin_budget(o, k, budget, seed, b); });
        },
        py::arg("values"), py::arg("k"), py::arg("budget"), py::arg("seed") = 0, py::arg("noise") = NoiseModel{});

    m.def("mc_queries", &mc_queries, py::arg("trials"));
    m.def("qss_queries", &qss_queries, py::arg("P"));
    m.def("qcoin_queries", py::overload_cast<std::size_t, std::uint64_t>(&qcoin_queries), py::arg("k"),
          py::arg("L"));
    m.def("qcoin_trials_for_budget", &qcoin_trials_for_budget, py::arg("k"), py::arg("budget"));
    m.def("qcoin_delta", &qcoin_delta, py::arg("level"));

    m.def(
        "qft",
        [](std::vector<std::complex<double>> amplitudes) {
            const std::size_t dim = amplitudes.size();
            StateVector s = StateVector::from_amplitudes(std::move(amplitudes));
            std::vector<Qubit> qs(s.n_qubits());
            std::iota(qs.begin(), qs.end(), Qubit{0});
            qft(s, qs);
            return std::vector<std::complex<double>>(s.amplitudes().begin(), s.amplitudes().begin() + dim);
        },
        py::arg("amplitudes"), "QFT of a normalized state; qubit 0 is the least significant bit.");

    py::enum_<QssRoute>(m, "QssRoute")
        .value("automatic", QssRoute::automatic)
        .value("statevector", QssRoute::statevector)
        .value("analytic", QssRoute::analytic);
    m.def("qss_outcome_distribution",
          py::overload_cast<double, std::size_t, QssRoute>(&qss_outcome_distribution), py::arg("f"),
          py::arg("P"), py::arg("route") = QssRoute::automatic);
    m.def("qss_exact_error", &qss_exact_error, py::arg("f"), py::arg("P"), py::arg("route") = QssRoute::automatic);
    m.def("qss_mean_exact_error", &qss_mean_exact_error, py::arg("P"), py::arg("points") = 200,
          py::arg("route") = QssRoute::automatic);
    m.def("qss_resolution_for_budget", &qss_resolution_for_budget, py::arg("budget"));

    py::class_<OptimalKTable>(m, "OptimalKTable")
        .def(py::init<>())
        .def_readwrite("budgets", &OptimalKTable::budgets)
        .def_readwrite("ks", &OptimalKTable::ks)
        .def_readwrite("error", &OptimalKTable::error)
        .def("to_csv", [](const OptimalKTable &t) { return to_csv(write_optimal_k_csv, t); })
        .def_static("from_csv", [](const std::string &text) {
            std::istringstream in(text);
            return read_optimal_k_csv(in);
        });
    m.def("select_optimal_k", &select_optimal_k, py::arg("budget"), py::arg("table"));

    py::class_<SweepSpec>(m, "SweepSpec")
        .def(py::init<>())
        .def_readwrite("algorithms", &SweepSpec::algorithms)
        .def_readwrite("qcoin_ks", &SweepSpec::qcoin_ks)
        .def_readwrite("f_values", &SweepSpec::f_values)
        .def_readwrite("budgets", &SweepSpec::budgets)
        .def_readwrite("qss_resolutions", &SweepSpec::qss_resolutions)
        .def_readwrite("repetitions", &SweepSpec::repetitions)
        .def_readwrite("noise", &SweepSpec::noise)
        .def_readwrite("seed_base", &SweepSpec::seed_base)
        .def_readwrite("qss_exact_points", &SweepSpec::qss_exact_points)
        .def_readwrite("jobs", &SweepSpec::jobs)
        .def_readwrite("keep_trials", &SweepSpec::keep_trials);

    py::class_<TrialRow>(m, "TrialRow")
        .def_readonly("algorithm", &TrialRow::algorithm)
        .def_readonly("k", &TrialRow::k)
        .def_readonly("P", &TrialRow::P)
        .def_readonly("budget", &TrialRow::budget)
        .def_readonly("repetition", &TrialRow::repetition)
        .def_readonly("f_true", &TrialRow::f_true)
        .def_readonly("f_est", &TrialRow::f_est)
        .def_readonly("queries", &TrialRow::queries)
        .def_readonly("seed", &TrialRow::seed);

    py::class_<PointRow>(m, "PointRow")
        .def_readonly("algorithm", &PointRow::algorithm)
        .def_readonly("k", &PointRow::k)
        .def_readonly("P", &PointRow::P)
        .def_readonly("f", &PointRow::f)
        .def_readonly("budget", &PointRow::budget)
        .def_readonly("queries", &PointRow::queries)
        .def_readonly("mean_abs_error", &PointRow::mean_abs_error)
        .def_readonly("std_error", &PointRow::std_error)
        .def_readonly("samples", &PointRow::samples)
        .def_readonly("exact", &PointRow::exact);

    py::class_<SlopeRow>(m, "SlopeRow")
        .def_readonly("algorithm", &SlopeRow::algorithm)
        .def_readonly("k", &SlopeRow::k)
        .def_readonly("slope", &SlopeRow::slope)
        .def_readonly("points", &SlopeRow::points);

    py::class_<ValueSweepResult>(m, "ValueSweepResult")
        .def_readonly("points", &ValueSweepResult::points)
        .def_readonly("trials", &ValueSweepResult::trials)
        .def("value_csv", [](const ValueSweepResult &r) { return to_csv(write_value_csv, r.points); })
        .def("trials_csv", [](const ValueSweepResult &r) { return to_csv(write_trials_csv, r.trials); });

    py::class_<ConvergenceResult>(m, "ConvergenceResult")
        .def_readonly("points", &ConvergenceResult::points)
        .def_readonly("trials", &ConvergenceResult::trials)
        .def_readonly("slopes", &ConvergenceResult::slopes)
        .def_readonly("optimal_k", &ConvergenceResult::optimal_k)
        .def("convergence_csv", [](const ConvergenceResult &r) { return to_csv(write_convergence_csv, r.points); })
        .def("slopes_csv", [](const ConvergenceResult &r) { return to_csv(write_slopes_csv, r.slopes); })
        .def("trials_csv", [](const ConvergenceResult &r) { return to_csv(write_trials_csv, r.trials); });

    m.def("run_value_sweep", &run_value_sweep, py::arg("spec"), py::call_guard<py::gil_scoped_release>());
    m.def("run_convergence_sweep", &run_convergence_sweep, py::arg("spec"),
          py::call_guard<py::gil_scoped_release>());
    m.def("fit_loglog_slope", &fit_loglog_slope, py::arg("x"), py::arg("y"), py::arg("skip_smallest") = true);
    m.def("interpolate_loglog", &interpolate_loglog, py::arg("x"), py::arg("y"), py::arg("at"));

    py::class_<ScalingRow>(m, "ScalingRow")
        .def_readonly("level", &ScalingRow::level)
        .def_readonly("delta", &ScalingRow::delta)
        .def_readonly("trials", &ScalingRow::trials)
        .def_readonly("queries", &ScalingRow::queries)
        .def_readonly("mean_abs_error", &ScalingRow::mean_abs_error)
        .def_readonly("std_error", &ScalingRow::std_error)
        .def_readonly("samples", &ScalingRow::samples);
    py::class_<ScalingResult>(m, "ScalingResult")
        .def_readonly("rows", &ScalingResult::rows)
        .def_readonly("slope", &ScalingResult::slope)
        .def("scaling_csv", [](const ScalingResult &r) { return to_csv(write_scaling_csv, r.rows); });
    m.def("run_single_step_scaling", &run_single_step_scaling, py::arg("levels"), py::arg("repetitions"),
          py::arg("seed_base") = 0, py::arg("trials_factor") = 9.0, py::arg("jobs") = 1,
          py::arg("noise") = NoiseModel{}, py::call_guard<py::gil_scoped_release>());

    py::class_<GrayImage>(m, "GrayImage")
        .def(py::init<std::size_t, std::size_t, double>(), py::arg("width"), py::arg("height"),
             py::arg("fill") = 0.0)
        .def_readonly("width", &GrayImage::width)
        .def_readonly("height", &GrayImage::height)
        .def_readwrite("pixels", &GrayImage::pixels)
        .def("at", [](const GrayImage &g, std::size_t x, std::size_t y) { return g.at(x, y); })
        .def("set", [](GrayImage &g, std::size_t x, std::size_t y, double v) { g.at(x, y) = v; });
    m.def("load_pgm", &load_pgm, py::arg("path"));
    m.def("save_pgm", &save_pgm, py::arg("path"), py::arg("image"));
    m.def("synthetic_teaser_image", &synthetic_teaser_image, py::arg("pixels_wide") = 40,
          py::arg("pixels_high") = 24);

    py::class_<Region>(m, "Region")
        .def(py::init([](std::string name, std::size_t x, std::size_t y, std::size_t w, std::size_t h) {
                 return Region{std::move(name), x, y, w, h};
             }),
             py::arg("name"), py::arg("x"), py::arg("y"), py::arg("width"), py::arg("height"))
        .def_readonly("name", &Region::name)
        .def_readonly("x", &Region::x)
        .def_readonly("y", &Region::y)
        .def_readonly("width", &Region::width)
        .def_readonly("height", &Region::height);
    m.def("default_regions", &default_regions, py::arg("pixels_wide"), py::arg("pixels_high"));

    py::class_<SupersampleJob>(m, "SupersampleJob")
        .def(py::init<>())
        .def_readwrite("source", &SupersampleJob::source)
        .def_readwrite("algorithm", &SupersampleJob::algorithm)
        .def_readwrite("budget", &SupersampleJob::budget)
        .def_readwrite("k", &SupersampleJob::k)
        .def_readwrite("P", &SupersampleJob::P)
        .def_readwrite("noise", &SupersampleJob::noise)
        .def_readwrite("seed", &SupersampleJob::seed)
        .def_readwrite("regions", &SupersampleJob::regions)
        .def_readwrite("jobs", &SupersampleJob::jobs);
    py::class_<RegionError>(m, "RegionError")
        .def_readonly("region", &RegionError::region)
        .def_readonly("mae", &RegionError::mae)
        .def_readonly("pixels", &RegionError::pixels);
    py::class_<SupersampleResult>(m, "SupersampleResult")
        .def_readonly("ideal", &SupersampleResult::ideal)
        .def_readonly("estimate", &SupersampleResult::estimate)
        .def_readonly("regions", &SupersampleResult::regions)
        .def_readonly("queries_per_pixel", &SupersampleResult::queries_per_pixel)
        .def_readonly("pixel_seeds", &SupersampleResult::pixel_seeds);
    m.def("run_supersample", &run_supersample, py::arg("job"), py::call_guard<py::gil_scoped_release>());

    py::class_<CircuitResources>(m, "CircuitResources")
        .def_readonly("algorithm", &CircuitResources::algorithm)
        .def_readonly("aa_repetitions", &CircuitResources::aa_repetitions)
        .def_readonly("qubits", &CircuitResources::qubits)
        .def_readonly("qubits_without_target", &CircuitResources::qubits_without_target)
        .def_readonly("register_qubits", &CircuitResources::register_qubits)
        .def_readonly("queries", &CircuitResources::queries)
        .def_readonly("gate_count", &CircuitResources::gate_count)
        .def_readonly("multi_qubit_gate_count", &CircuitResources::multi_qubit_gate_count)
        .def_readonly("edges", &CircuitResources::edges);
    py::class_<ResourceReport>(m, "ResourceReport")
        .def_readonly("N", &ResourceReport::N)
        .def_readonly("P", &ResourceReport::P)
        .def_readonly("qss", &ResourceReport::qss)
        .def_readonly("qcoin", &ResourceReport::qcoin)
        .def("to_text", &ResourceReport::to_text);
    m.def("report_resources", &report_resources, py::arg("N"), py::arg("P"));
}
