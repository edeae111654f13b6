#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "smoothnorm/boundary.hpp"
#include "smoothnorm/cli.hpp"
#include "smoothnorm/equiv.hpp"
#include "smoothnorm/orlicz.hpp"
#include "smoothnorm/renorm.hpp"
#include "smoothnorm/spaces.hpp"
#include "smoothnorm/tensor.hpp"

namespace py = pybind11;
using namespace smoothnorm;

namespace {

std::vector<Functional> to_functionals(const std::vector<std::vector<double>>& rows) {
  std::vector<Functional> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(Functional{r});
  return out;
}

}  // namespace

PYBIND11_MODULE(_smoothnorm, m) {
  m.doc() = "Smooth approximating norms built from boundary decompositions";

  py::register_exception<Error>(m, "Error");
  py::register_exception<ParameterError>(m, "ParameterError", m.attr("Error"));
  py::register_exception<NumericError>(m, "NumericError", m.attr("Error"));
  py::register_exception<PreconditionError>(m, "PreconditionError", m.attr("Error"));
  py::register_exception<ConstructionError>(m, "ConstructionError", m.attr("Error"));
  py::register_exception<ConfigError>(m, "ConfigError", m.attr("Error"));

  py::class_<OrliczFunction>(m, "OrliczFunction")
      .def_property_readonly("zero_threshold", &OrliczFunction::zero_threshold)
      .def_property_readonly("exceed_threshold", &OrliczFunction::exceed_threshold)
      .def_property_readonly("log_scale", &OrliczFunction::log_scale)
      .def("value", &OrliczFunction::value, py::arg("t"))
      .def("first_derivative", &OrliczFunction::first_derivative, py::arg("t"))
      .def("second_derivative", &OrliczFunction::second_derivative, py::arg("t"));

  m.def("make_orlicz", &make_orlicz, py::arg("zero_threshold"), py::arg("exceed_threshold"),
        py::arg("exceed_margin") = OrliczFunction::kDefaultExceedMargin, py::arg("bump_width") = 1.0,
        "C-infinity Orlicz function vanishing below zero_threshold");
  m.def(
      "power_norm",
      [](const std::vector<double>& x, double p) {
        return luxemburg_norm(OrliczFamily::constant(PowerFunction{p}, x.size()), x);
      },
      py::arg("x"), py::arg("p"), "Luxemburg norm of x for the family t -> t^p");
  m.def(
      "orlicz_norm",
      [](const std::vector<double>& x, double zero_threshold, double exceed_threshold) {
        const auto f = make_orlicz(zero_threshold, exceed_threshold);
        return luxemburg_norm(OrliczFamily::constant(f, x.size()), x);
      },
      py::arg("x"), py::arg("zero_threshold"), py::arg("exceed_threshold"),
      "Luxemburg norm of x for one Orlicz function on every coordinate");

  m.def("epsilon_n", &epsilon_n, py::arg("eps"), py::arg("n"));
  m.def(
      "psi_from_indices",
      [](double eps, const std::vector<std::size_t>& idx) { return psi_from_indices(eps, idx); },
      py::arg("eps"), py::arg("closure_indices"));

  py::class_<ModelSpace>(m, "ModelSpace")
      .def_static("sup", &ModelSpace::sup, py::arg("dim"))
      .def_static("euclidean", &ModelSpace::euclidean, py::arg("dim"))
      .def_static("lap", &ModelSpace::lap, py::arg("dim"), py::arg("blocks"), py::arg("exponents"))
      .def_static("lorentz", &ModelSpace::lorentz, py::arg("weights"))
      .def_static("lorentz_predual", &ModelSpace::lorentz_predual, py::arg("weights"))
      .def_static(
          "polyhedral",
          [](std::size_t dim, const std::vector<std::vector<double>>& rows) {
            return ModelSpace::polyhedral(dim, to_functionals(rows));
          },
          py::arg("dim"), py::arg("functionals"))
      .def_property_readonly("kind", [](const ModelSpace& s) { return to_string(s.kind()); })
      .def_property_readonly("dim", &ModelSpace::dim)
      .def("norm", [](const ModelSpace& s, const std::vector<double>& x) { return s.norm(x); })
      .def("dual_norm",
           [](const ModelSpace& s, const std::vector<double>& f) { return s.dual_norm(f).value; })
      .def("norming_functional",
           [](const ModelSpace& s, const std::vector<double>& x) {
             return s.norming_functional(x).coords;
           })
      .def("__repr__", &ModelSpace::describe);

  m.def(
      "find_norming_support",
      [](const ModelSpace& s, const std::vector<double>& y, double tol) {
        return find_norming_support(s, y, tol);
      },
      py::arg("space"), py::arg("y"), py::arg("tol") = 1e-9);

  m.def(
      "injective_norm",
      [](const ModelSpace& x, const ModelSpace& y, const std::vector<double>& coeffs) {
        return injective_norm(TensorElement(x, y, coeffs)).value;
      },
      py::arg("x_space"), py::arg("y_space"), py::arg("coeffs"),
      "Injective norm of a tensor given by row-major coefficients");

  py::class_<PhiNormSpec>(m, "PhiNorm")
      .def_property_readonly("epsilon", &PhiNormSpec::epsilon)
      .def_property_readonly("net_size", [](const PhiNormSpec& s) { return s.net().size(); })
      .def_property_readonly("max_psi", &PhiNormSpec::max_psi)
      .def("__call__",
           [](const PhiNormSpec& s, const std::vector<double>& u) { return phi_norm(s, u); })
      .def("base_norm",
           [](const PhiNormSpec& s, const std::vector<double>& u) {
             return base_norm(s, as_element(s, u));
           })
      .def("active_set", [](const PhiNormSpec& s, const std::vector<double>& u) {
        const auto a = active_set(s, as_element(s, u));
        return py::make_tuple(a.points, a.margin);
      });

  m.def(
      "build_renorm",
      [](const ModelSpace& x, const std::vector<std::vector<std::vector<double>>>& pieces,
         double eps, const ModelSpace& y) {
        std::vector<Piece> ps;
        for (std::size_t i = 0; i < pieces.size(); ++i) {
          Piece p;
          p.index = i;
          p.members = to_functionals(pieces[i]);
          ps.push_back(std::move(p));
        }
        if (ps.empty()) ps.push_back(coordinate_piece(x.dim()));
        return build_renorm(x, Decomposition(x, ps, eps), y);
      },
      py::arg("x_space"), py::arg("pieces"), py::arg("epsilon"), py::arg("y_space"),
      "Smooth approximating norm; an empty piece list means the coordinate boundary");

  m.def(
      "run_config",
      [](const std::string& text, std::vector<std::string> suites, std::optional<std::uint64_t> seed) {
        const auto cfg = parse_config(text);
        RunOptions opts;
        opts.suites = std::move(suites);
        opts.seed = seed;
        py::gil_scoped_release release;
        return run_suites(cfg, opts).report;
      },
      py::arg("config"), py::arg("suites") = std::vector<std::string>{}, py::arg("seed") = py::none(),
      "Run verification suites for a JSON config and return the report JSON");
}
