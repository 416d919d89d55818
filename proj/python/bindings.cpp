#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "mineplan/commands.hpp"
#include "mineplan/errors.hpp"
#include "mineplan/feasibility.hpp"
#include "mineplan/generator.hpp"
#include "mineplan/instance.hpp"
#include "mineplan/lns.hpp"
#include "mineplan/swindow.hpp"

namespace py = pybind11;
using namespace mineplan;

namespace {

py::dict ReportDict(const ViolationReport& r) {
  py::list entries;
  for (const auto& v : r.entries)
    entries.append(py::dict(py::arg("family") = std::string(ToString(v.family)),
                            py::arg("indices") = v.indices,
                            py::arg("magnitude") = v.magnitude));
  return py::dict(py::arg("clean") = r.clean(), py::arg("max_violation") = r.max_violation,
                  py::arg("entries") = entries);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Open-pit mine production scheduling: model, sliding windows and LNS";

  auto& base = py::register_exception<Error>(m, "MineplanError");
  py::register_exception<WindowInfeasible>(m, "WindowInfeasible", base.ptr());

  py::class_<Instance>(m, "Instance")
      .def_static("load", &load_instance, py::arg("path"))
      .def_static(
          "from_json",
          [](const std::string& text) { return Instance(parse_instance_json(text)); },
          py::arg("text"))
      .def_static(
          "generate",
          [](const std::string& name, std::uint64_t seed) {
            return generate_instance(preset(name), seed);
          },
          py::arg("preset"), py::arg("seed") = 0)
      .def("to_json", [](const Instance& i) { return dump_instance_json(i.data()); })
      .def("save", py::overload_cast<const Instance&, const std::filesystem::path&>(&save_instance))
      .def_property_readonly("periods", &Instance::periods)
      .def_property_readonly("num_pits", &Instance::num_pits)
      .def_property_readonly("num_blocks", &Instance::num_blocks)
      .def_property_readonly("num_parcels", &Instance::num_parcels)
      .def("block_id", [](const Instance& i, int b) {
        i.require_block(b);
        return i.block(b).id;
      });

  py::class_<Solution>(m, "Solution")
      .def_readonly("objective", &Solution::objective)
      .def_readonly("x", &Solution::x)
      .def_readonly("y", &Solution::y)
      .def_readonly("z", &Solution::z)
      .def("to_json", [](const Solution& s, const Instance& i) { return dump_solution_json(i, s); })
      .def_static("from_json", [](const Instance& i, const std::string& text) {
        return parse_solution_json(i, text);
      });

  m.def("preset_names", [] {
    std::vector<std::string> out;
    for (auto n : preset_names()) out.emplace_back(n);
    return out;
  });
  m.def(
      "validate",
      [](const Instance& i, const Solution& s, double tol) { return ReportDict(validate(i, s, tol)); },
      py::arg("instance"), py::arg("solution"), py::arg("tol") = kDefaultTolerance);
  m.def("npv", &npv, py::arg("instance"), py::arg("solution"));
  m.def("oracle_optimum", [](const Instance& i) { return oracle_optimum(i); });

  m.def(
      "full_solve",
      [](const Instance& i, double mip_gap, std::optional<double> time_limit) {
        SolveParams p;
        p.mip_gap = mip_gap;
        if (time_limit) p.time_limit = *time_limit;
        FullSolveResult r;
        {
          py::gil_scoped_release release;
          r = full_solve(i, p);
        }
        return py::make_tuple(r.solution, std::string(ToString(r.status)), r.best_bound);
      },
      py::arg("instance"), py::arg("mip_gap") = 1e-3, py::arg("time_limit") = py::none());

  m.def(
      "window_schedule",
      [](int T, int W, int O) {
        std::vector<std::pair<int, int>> out;
        for (const auto& s : window_schedule(T, W, O)) out.emplace_back(s.start, s.fix_through);
        return out;
      },
      py::arg("T"), py::arg("W"), py::arg("O"));

  m.def(
      "sliding_windows",
      [](const Instance& i, int W, int O, int H) {
        SwConfig c;
        c.W = W;
        c.O = O;
        c.H = H;
        py::gil_scoped_release release;
        return run_sliding_windows(i, c).solution;
      },
      py::arg("instance"), py::arg("W") = 3, py::arg("O") = 1, py::arg("H") = 0);

  m.def(
      "lns",
      [](const Instance& i, const Solution& start, int nbar, const std::string& focal,
         const std::string& fixing, bool rins, int workers, double improve_rate, int min_iters,
         double time_limit, std::uint64_t seed) {
        LnsConfig c;
        c.nbar = nbar;
        c.focal = ParseFocalMethod(focal);
        c.fixing = ParseFixing(fixing);
        c.rins = rins;
        c.workers = workers;
        c.term.improve_rate = improve_rate;
        c.term.min_iters = min_iters;
        c.term.time_limit = time_limit;
        c.seed = seed;
        LnsResult r;
        {
          py::gil_scoped_release release;
          r = run_lns(i, start, c);
        }
        return py::make_tuple(r.best, r.iterations, r.accepted);
      },
      py::arg("instance"), py::arg("start"), py::arg("nbar") = 30, py::arg("focal") = "md",
      py::arg("fixing") = "sd", py::arg("rins") = false, py::arg("workers") = 1,
      py::arg("improve_rate") = 1.0, py::arg("min_iters") = 10, py::arg("time_limit") = 600.0,
      py::arg("seed") = 0);
}
