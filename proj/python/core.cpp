// Copyright 2026 The qabias Authors
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
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qabias/annealing.hpp"
#include "qabias/errors.hpp"
#include "qabias/instance_io.hpp"
#include "qabias/protocols.hpp"
#include "qabias/sweep.hpp"

namespace py = pybind11;
using namespace qabias;

namespace {

// Configurations cross the boundary as bit strings, '1' <-> spin +1.
SpinConfig config_arg(const std::string &bits) { return SpinConfig::from_bits(bits); }

BiasField bias_arg(const Instance &inst, const std::optional<std::vector<double>> &h) {
    return h ? BiasField(*h) : BiasField::zeros(inst.n);
}

py::array_t<std::complex<double>> to_numpy(const StateVector &s) {
    const auto amps = s.amplitudes();
    return py::array_t<std::complex<double>>(static_cast<py::ssize_t>(amps.size()), amps.data());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Quantum annealing with longitudinal bias fields on exact-cover instances";
    m.attr("__version__") = QABIAS_VERSION;

    py::class_<Instance>(m, "Instance")
        .def_readonly("n", &Instance::n)
        .def_readonly("seed", &Instance::seed)
        .def_property_readonly("m", &Instance::m)
        .def_property_readonly("clauses",
                               [](const Instance &inst) {
                                   std::vector<std::array<int, 3>> out;
                                   for (const auto &c : inst.clauses) {
                                       out.push_back(c.indices);
                                   }
                                   return out;
                               })
        .def_property_readonly("solution", [](const Instance &inst) { return inst.solution.bits(); })
        .def("cost", [](const Instance &inst, const std::string &bits) { return cost_of_config(inst, config_arg(bits)); })
        .def("to_json", &instance_to_json)
        .def_static("from_json", &instance_from_json)
        .def("__repr__", [](const Instance &inst) {
            return "<Instance n=" + std::to_string(inst.n) + " m=" + std::to_string(inst.m()) + " seed=" +
                   std::to_string(inst.seed) + ">";
        });

    m.def("load_instance", [](const std::string &path) { return load_instance(path); });
    m.def("save_instance", [](const Instance &inst, const std::string &path) { save_instance(inst, path); });
    m.def("find_instance",
          [](int n, std::optional<int> clauses, std::uint64_t master_seed, std::uint64_t budget) {
              return find_instance(n, clauses.value_or(default_clause_count(n)), master_seed, 0, budget).instance;
          },
          py::arg("n"), py::arg("m") = py::none(), py::arg("master_seed") = 1, py::arg("budget") = 1000000,
          "First certified unique-solution instance for the master seed, or None.");
    m.def("brute_force_minima", [](const Instance &inst) {
        const Minima mins = brute_force_minima(inst);
        std::vector<std::string> configs;
        for (const auto &c : mins.configs) {
            configs.push_back(c.bits());
        }
        return py::make_tuple(mins.min_cost, configs);
    });

    py::class_<Schedule>(m, "Schedule")
        .def(py::init<double, double, double, double>(), py::arg("b0") = 50.0, py::arg("tau") = 1.0,
             py::arg("a") = 1.0, py::arg("dt") = 0.0)
        .def_property_readonly("b0", &Schedule::b0)
        .def_property_readonly("tau", &Schedule::tau)
        .def_property_readonly("a", &Schedule::a)
        .def_property_readonly("dt", &Schedule::step)
        .def_property_readonly("steps", &Schedule::steps)
        .def_property_readonly("total_time", &Schedule::total_time)
        .def("b_at", &Schedule::b_at);

    m.def("initial_state",
          [](int n, const std::optional<std::vector<double>> &h) {
              return to_numpy(initial_state(n, h ? BiasField(*h) : BiasField::zeros(n)));
          },
          py::arg("n"), py::arg("h") = py::none());
    m.def("evolve",
          [](const Instance &inst, const std::optional<std::vector<double>> &h, const Schedule &sched) {
              py::gil_scoped_release release;
              StateVector s = evolve(inst, bias_arg(inst, h), sched);
              py::gil_scoped_acquire acquire;
              return to_numpy(s);
          },
          py::arg("instance"), py::arg("h") = py::none(), py::arg("schedule") = Schedule());
    m.def("dense_propagator_oracle",
          [](const Instance &inst, const std::optional<std::vector<double>> &h, const Schedule &sched,
             double dt_ref) { return to_numpy(dense_propagator_oracle(inst, bias_arg(inst, h), sched, dt_ref)); },
          py::arg("instance"), py::arg("h") = py::none(), py::arg("schedule") = Schedule(),
          py::arg("dt_ref") = 1e-3);

    py::class_<RunRecord>(m, "RunRecord")
        .def_readonly("alpha", &RunRecord::alpha)
        .def_readonly("success_prob", &RunRecord::success_prob)
        .def_property_readonly("final_config", [](const RunRecord &r) { return r.final_config.bits(); })
        .def_readonly("final_cost", &RunRecord::final_cost)
        .def_readonly("hamming_to_solution", &RunRecord::hamming_to_solution)
        .def_readonly("magnetizations", &RunRecord::magnetizations)
        .def_property_readonly("sampled_config",
                               [](const RunRecord &r) -> std::optional<std::string> {
                                   if (r.sampled_config) {
                                       return r.sampled_config->bits();
                                   }
                                   return std::nullopt;
                               })
        .def_readonly("sampled_cost", &RunRecord::sampled_cost)
        .def_readonly("sample_seed", &RunRecord::sample_seed)
        .def_property_readonly("bias", [](const RunRecord &r) { return r.bias_used.values(); });

    py::class_<ProtocolResult>(m, "ProtocolResult")
        .def_readonly("records", &ProtocolResult::records)
        .def_property_readonly("terminated_by",
                               [](const ProtocolResult &r) { return std::string(to_string(r.terminated_by)); })
        .def_property_readonly("steps_used", &ProtocolResult::steps_used)
        .def_readonly("bias_capped", &ProtocolResult::bias_capped)
        .def_property_readonly("success_probs", &ProtocolResult::success_probs);

    m.def("run_standard",
          [](const Instance &inst, const Schedule &sched, std::uint64_t seed) {
              py::gil_scoped_release release;
              return run_standard(inst, sched, seed);
          },
          py::arg("instance"), py::arg("schedule") = Schedule(), py::arg("seed") = 1);
    m.def("run_biased",
          [](const Instance &inst, const std::string &guess, const Schedule &sched, std::uint64_t seed) {
              const SpinConfig g = config_arg(guess);
              py::gil_scoped_release release;
              return run_biased(inst, g, sched, seed);
          },
          py::arg("instance"), py::arg("guess"), py::arg("schedule") = Schedule(), py::arg("seed") = 1);
    m.def("run_iterative",
          [](const Instance &inst, const Schedule &sched, std::uint64_t seed, int max_iters) {
              py::gil_scoped_release release;
              return run_iterative(inst, sched, seed, max_iters);
          },
          py::arg("instance"), py::arg("schedule") = Schedule(), py::arg("seed") = 1,
          py::arg("max_iters") = kDefaultMaxIters);
    m.def("run_antibias",
          [](const Instance &inst, const Schedule &sched, std::uint64_t seed, double h, int max_steps,
             const std::string &stop) {
              if (stop != "sample" && stop != "expectation") {
                  throw InputError("stop must be \"sample\" or \"expectation\"");
              }
              const AntibiasStop rule = stop == "sample" ? AntibiasStop::sample : AntibiasStop::expectation;
              py::gil_scoped_release release;
              return run_antibias(inst, sched, seed, h, max_steps, rule);
          },
          py::arg("instance"), py::arg("schedule") = Schedule(), py::arg("seed") = 1,
          py::arg("h") = kDefaultAntibiasStrength, py::arg("max_steps") = kDefaultMaxSteps,
          py::arg("stop") = "sample");

    m.def("run_sweep",
          [](const std::string &spec_json) {
              const SweepSpec spec = SweepSpec::from_json(spec_json);
              SweepOutcome out;
              {
                  py::gil_scoped_release release;
                  out = run_sweep(spec);
              }
              py::dict d;
              d["instances_total"] = out.instances_total;
              d["instances_skipped"] = out.instances_skipped;
              d["instances_run"] = out.instances_run;
              d["failures"] = out.failures;
              d["complete"] = out.complete;
              d["out"] = spec.out.string();
              return d;
          },
          py::arg("spec_json"), "Runs a sweep from its JSON spec; outputs land in the spec's \"out\" directory.");
}
