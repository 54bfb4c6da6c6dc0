// Python bindings for the main operations: specs and presets, region checks,
// the transform, layout construction, and full experiment runs.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "coordsim/construction.hpp"
#include "coordsim/metrics.hpp"
#include "coordsim/polar.hpp"
#include "coordsim/probmodel.hpp"
#include "coordsim/scenario.hpp"

namespace py = pybind11;
using namespace coordsim;

namespace {

std::vector<int> transform_list(const std::vector<int>& bits) {
    BitBlock b(static_cast<int>(bits.size()));
    for (size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] != 0 && bits[i] != 1) throw std::invalid_argument("bits must be 0 or 1");
        b[static_cast<int>(i)] = static_cast<Bit>(bits[i]);
    }
    const BitBlock t = polar_transform(b);
    return std::vector<int>(t.bits.begin(), t.bits.end());
}

IndexLayout make_layout(const CoordinationSpec& spec, int n, double delta, long samples,
                        std::uint64_t seed, bool allow_infeasible) {
    return build_layout(profile_all(spec, n, ProfileMethod::MonteCarlo, samples, seed), delta,
                        allow_infeasible);
}

}  // namespace

PYBIND11_MODULE(_coordsim, m) {
    m.doc() = "explicit polar coding for empirical coordination over a noisy channel";

    py::class_<FiniteDist>(m, "FiniteDist")
        .def(py::init<std::vector<double>>())
        .def_static("uniform", &FiniteDist::uniform)
        .def_static("bernoulli", &FiniteDist::bernoulli)
        .def_property_readonly("probs", &FiniteDist::probs)
        .def("__len__", &FiniteDist::size);

    py::class_<CondDist>(m, "CondDist")
        .def(py::init<std::vector<int>, int, std::vector<double>>(), py::arg("input_sizes"),
             py::arg("output_size"), py::arg("table"))
        .def_static("bsc", &CondDist::bsc)
        .def_static("identity", &CondDist::identity)
        .def_property_readonly("input_sizes", &CondDist::input_sizes)
        .def_property_readonly("output_size", &CondDist::output_size);

    py::class_<CoordinationSpec>(m, "CoordinationSpec")
        .def(py::init<FiniteDist, FiniteDist, CondDist, CondDist, CondDist>(), py::arg("source"),
             py::arg("input"), py::arg("aux_given_xs"), py::arg("channel"),
             py::arg("recon_given_uy"))
        .def_property_readonly("s_size", &CoordinationSpec::s_size)
        .def_property_readonly("y_size", &CoordinationSpec::y_size)
        .def_property_readonly("shat_size", &CoordinationSpec::shat_size)
        .def("hash", &CoordinationSpec::hash);

    py::class_<RegionReport>(m, "RegionReport")
        .def_readonly("rate_needed", &RegionReport::rate_needed)
        .def_readonly("rate_available", &RegionReport::rate_available)
        .def_readonly("slack", &RegionReport::slack)
        .def_readonly("inside", &RegionReport::inside);

    py::class_<IndexLayout>(m, "IndexLayout")
        .def_readonly("n", &IndexLayout::n)
        .def_readonly("delta", &IndexLayout::delta)
        .def_readonly("a1", &IndexLayout::a1)
        .def_readonly("a2", &IndexLayout::a2)
        .def_readonly("a3", &IndexLayout::a3)
        .def_readonly("a4", &IndexLayout::a4)
        .def_readonly("b1", &IndexLayout::b1)
        .def_readonly("b3", &IndexLayout::b3)
        .def_readonly("b4", &IndexLayout::b4)
        .def_readonly("feasible", &IndexLayout::feasible);

    py::class_<Scenario>(m, "Scenario")
        .def_readwrite("name", &Scenario::name)
        .def_readwrite("spec", &Scenario::spec)
        .def_readwrite("n_list", &Scenario::n_list)
        .def_readwrite("k", &Scenario::k)
        .def_readwrite("delta", &Scenario::delta)
        .def_readwrite("beta", &Scenario::beta)
        .def_readwrite("seeds", &Scenario::seeds)
        .def_readwrite("samples", &Scenario::samples)
        .def_readwrite("source_offset", &Scenario::source_offset)
        .def_readwrite("workers", &Scenario::workers)
        .def_readwrite("construction_seed", &Scenario::construction_seed)
        .def_readwrite("force", &Scenario::force);

    py::class_<RunResult>(m, "RunResult")
        .def_readonly("scenario", &RunResult::scenario)
        .def_readonly("n", &RunResult::n)
        .def_readonly("k", &RunResult::k)
        .def_readonly("delta", &RunResult::delta)
        .def_readonly("seed", &RunResult::seed)
        .def_readonly("v_total", &RunResult::v_total)
        .def_readonly("v_block_mean", &RunResult::v_block_mean)
        .def_readonly("d_proxy", &RunResult::d_proxy)
        .def_readonly("cr_rate", &RunResult::cr_rate)
        .def_readonly("block_err_count", &RunResult::block_err_count)
        .def_readonly("extra_block_fail", &RunResult::extra_block_fail)
        .def_readonly("wall_ms", &RunResult::wall_ms);

    py::class_<ExperimentResult>(m, "ExperimentResult")
        .def_readonly("preamble", &ExperimentResult::preamble)
        .def_readonly("rows", &ExperimentResult::rows);

    m.def("preset_names", &preset_names);
    m.def("scenario_preset", &scenario_preset, py::arg("name"));
    m.def("scenario_from_json_text", &scenario_from_json_text, py::arg("text"));
    m.def("delta_for", &delta_for, py::arg("scenario"), py::arg("n"));
    m.def("check_region", &check_region, py::arg("spec"));
    m.def("polar_transform", &transform_list, py::arg("bits"),
          "apply the binary polarization transform (an involution) to a bit list");
    m.def("make_layout", &make_layout, py::arg("spec"), py::arg("n"), py::arg("delta"),
          py::arg("samples") = 10000, py::arg("seed") = 0x5eedc0de,
          py::arg("allow_infeasible") = false);
    m.def(
        "run_experiment",
        [](const Scenario& sc) { return run_experiment(sc); }, py::arg("scenario"),
        py::call_guard<py::gil_scoped_release>());
    m.def("to_csv", &to_csv, py::arg("result"), py::arg("include_wall_ms") = true);
}
