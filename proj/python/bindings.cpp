#include "adiabatic/bounds.hpp"
#include "adiabatic/cli.hpp"
#include "adiabatic/engine.hpp"
#include "adiabatic/errors.hpp"
#include "adiabatic/glauber.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace adiabatic;

namespace {

Schedule schedule_from(const py::object& obj) {
  if (obj.is_none()) return Schedule::linear();
  if (py::isinstance<py::int_>(obj)) return Schedule::poly_flat(obj.cast<int>());
  return obj.cast<Schedule>();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Adiabatic times of time-inhomogeneous Markov chains.";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ValidationError>(m, "ValidationError", error.ptr());
  py::register_exception<NonUniqueStationary>(m, "NonUniqueStationary", error.ptr());
  py::register_exception<SearchTimeoutError>(m, "SearchTimeoutError", error.ptr());

  py::class_<Schedule>(m, "Schedule")
      .def_static("linear", &Schedule::linear)
      .def_static("poly_flat", &Schedule::poly_flat, py::arg("m"))
      .def_static("glauber", &Schedule::glauber, py::arg("a"), py::arg("beta1"), py::arg("beta2"))
      .def("__call__", &Schedule::operator(), py::arg("s"))
      .def("__repr__", &Schedule::describe);

  py::class_<AdiabaticSpec>(m, "AdiabaticSpec")
      .def_static(
          "discrete",
          [](const Eigen::MatrixXd& initial, const Eigen::MatrixXd& final, const py::object& schedule) {
            return AdiabaticSpec::discrete(StochasticMatrix(initial), StochasticMatrix(final),
                                           ScheduleFamily(schedule_from(schedule)));
          },
          py::arg("initial"), py::arg("final"), py::arg("schedule") = py::none())
      .def_static(
          "continuous",
          [](const Eigen::MatrixXd& initial, const Eigen::MatrixXd& final, const py::object& schedule) {
            return AdiabaticSpec::continuous(Generator(initial), Generator(final),
                                             ScheduleFamily(schedule_from(schedule)));
          },
          py::arg("initial"), py::arg("final"), py::arg("schedule") = py::none())
      .def_property_readonly("mode", [](const AdiabaticSpec& s) { return to_string(s.mode()); })
      .def_property_readonly("dim", &AdiabaticSpec::dim)
      .def_property_readonly("uniform_rate", &AdiabaticSpec::uniform_rate)
      .def_property_readonly("start_states", &AdiabaticSpec::start_states)
      .def_property_readonly("final_stationary",
                             [](const AdiabaticSpec& s) { return s.final_stationary().weights(); });

  m.def(
      "example",
      [](const std::string& name, const py::object& schedule) {
        return cli::builtin_example(name, schedule.is_none() ? std::nullopt
                                                             : std::optional<Schedule>(schedule_from(schedule)));
      },
      py::arg("name"), py::arg("schedule") = py::none());

  m.def(
      "glauber_spec",
      [](int n, int d, double beta1, double beta2) {
        return build_adiabatic_glauber_spec(TorusLattice(n, d), beta1, beta2).spec;
      },
      py::arg("n"), py::arg("d"), py::arg("beta1"), py::arg("beta2"));

  m.def(
      "worst_case_tv",
      [](const AdiabaticSpec& spec, double T, double tol) { return worst_case_evolution(spec, T, tol).worst_case_tv; },
      py::arg("spec"), py::arg("T"), py::arg("tol") = 1e-8);

  m.def(
      "evolve",
      [](const AdiabaticSpec& spec, const Eigen::VectorXd& nu, double T) -> Eigen::VectorXd {
        const Distribution d(nu);
        if (spec.mode() == Mode::discrete) {
          return evolve_discrete(spec, d, static_cast<long>(T)).weights();
        }
        return evolve_continuous(spec, d, T).weights();
      },
      py::arg("spec"), py::arg("nu"), py::arg("T"));

  m.def(
      "mixing_time",
      [](const Eigen::MatrixXd& matrix, double epsilon, bool continuous) -> double {
        if (continuous) return mixing_time(Generator(matrix), epsilon);
        return static_cast<double>(mixing_time(StochasticMatrix(matrix), epsilon));
      },
      py::arg("matrix"), py::arg("epsilon"), py::arg("continuous") = false);

  m.def(
      "adiabatic_time",
      [](const AdiabaticSpec& spec, double epsilon, std::size_t max_evaluations) {
        SearchOptions options;
        options.max_evaluations = max_evaluations;
        const auto r = adiabatic_time(spec, epsilon, options);
        py::dict out;
        out["T"] = r.measured_time;
        out["worst_case_tv"] = r.worst_case_tv;
        out["bracket"] = r.bracket;
        out["monotonicity_flag"] = r.monotonicity_flag;
        out["evaluations"] = r.evaluations;
        return out;
      },
      py::arg("spec"), py::arg("epsilon"), py::arg("max_evaluations") = 200);

  m.def("sample_final_counts", &sample_final_counts, py::arg("spec"), py::arg("T"), py::arg("paths"),
        py::arg("seed"), py::arg("start") = 0, py::arg("threads") = 1);

  m.def(
      "faulhaber_sum",
      [](long n, int k) { return py::int_(py::str(faulhaber_sum(n, k).str())); }, py::arg("n"), py::arg("k"));
  m.def(
      "kovchegov_bound",
      [](double t_mix, double epsilon, double lambda) {
        return kovchegov_continuous_explicit(t_mix, epsilon, lambda).value;
      },
      py::arg("t_mix"), py::arg("epsilon"), py::arg("lam"));
  m.def("shift_lower_bound", &shift_example_lower_bound, py::arg("n"), py::arg("T"), py::arg("exact") = true);
  m.def(
      "fit_scaling_exponent",
      [](const std::vector<std::array<double, 2>>& samples) {
        const auto f = fit_scaling_exponent(samples);
        return py::make_tuple(f.exponent, f.log_prefactor, f.r_squared);
      },
      py::arg("samples"));
}
