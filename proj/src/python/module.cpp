#include "anisotrope/aniso.hpp"
#include "anisotrope/cli.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace anisotrope;

namespace {

MCConfig mc(std::int64_t samples, std::uint64_t seed, int workers) {
  MCConfig c;
  c.samples = samples;
  c.seed = seed;
  c.workers = workers;
  c.validate();
  return c;
}

py::dict check_dict(const Check& c) {
  py::dict d;
  d["name"] = c.name;
  d["tag"] = c.tag;
  d["lhs"] = c.lhs;
  d["rhs"] = c.rhs;
  d["residual"] = c.residual;
  d["tolerance"] = c.tolerance;
  d["pass"] = c.pass;
  d["std_error"] = c.std_error ? py::cast(*c.std_error) : py::none();
  d["note"] = c.note;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Densities, jacobians, Wulff shapes and the scenario suite.";

  static py::exception<Error> error(m, "Error", PyExc_ValueError);
  static py::exception<ConfigError> config_error(m, "ConfigError", error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      config_error(e.what());
    } catch (const Error& e) {
      error(e.what());
    }
  });

  py::class_<Estimate>(m, "Estimate")
      .def_readonly("value", &Estimate::value)
      .def_readonly("std_error", &Estimate::std_error)
      .def("__repr__", [](const Estimate& e) {
        return "Estimate(" + std::to_string(e.value) + " +- " + std::to_string(e.std_error) + ")";
      });

  py::class_<Norm>(m, "Norm")
      .def_readonly("dim", &Norm::dim)
      .def_readonly("name", &Norm::name)
      .def("__call__", [](const Norm& n, const Vec& v) { return n(v); });
  m.def("euclidean_norm", &euclidean_norm, py::arg("dim"));
  m.def("l1_norm", &l1_norm, py::arg("dim"));
  m.def("linf_norm", &linf_norm, py::arg("dim"));
  m.def("lp_norm", &lp_norm, py::arg("dim"), py::arg("p"));

  py::class_<Density>(m, "Density")
      .def_property_readonly("degree", &Density::degree)
      .def_property_readonly("ambient_dim", &Density::ambient_dim)
      .def_property_readonly("name", &Density::name)
      .def_property_readonly("symmetric", &Density::symmetric)
      .def_property_readonly("constant", &Density::constant)
      .def(
          "__call__", [](const Density& d, const Mat& vectors) { return d(SimpleKVector(vectors)); },
          "Value on the wedge of the columns of `vectors`.", py::arg("vectors"));
  m.def("euclidean_density", &euclidean_density, py::arg("k"), py::arg("n"));
  m.def("scaled_lebesgue", &scaled_lebesgue, py::arg("n"), py::arg("scale") = 1.0);
  m.def("grassmann_lp_density", &grassmann_lp_density, py::arg("k"), py::arg("n"), py::arg("p"));
  m.def("linear_image_density", &linear_image_density, py::arg("k"), py::arg("matrix"));
  m.def(
      "busemann_density",
      [](const Norm& n, std::int64_t samples, std::uint64_t seed, int workers) {
        return busemann_density(n, mc(samples, seed, workers));
      },
      py::arg("norm"), py::arg("samples") = 1'000'000, py::arg("seed") = 1, py::arg("workers") = 1);
  m.def(
      "holmes_thompson_density",
      [](const Norm& n, std::int64_t samples, std::uint64_t seed, int workers) {
        return holmes_thompson_density(n, mc(samples, seed, workers));
      },
      py::arg("norm"), py::arg("samples") = 1'000'000, py::arg("seed") = 1, py::arg("workers") = 1);

  m.def("jacobian", py::overload_cast<const Mat&, const Density&, const Density&>(&jacobian), py::arg("a"),
        py::arg("source"), py::arg("target"));
  m.def("cojacobian",
        py::overload_cast<const Mat&, const Density&, const Density&, const Density&, bool>(&cojacobian),
        py::arg("a"), py::arg("nu"), py::arg("f"), py::arg("mu"), py::arg("oriented") = true);
  m.def(
      "k_jacobian",
      [](const Mat& a, const Norm& domain, const Norm& range, std::int64_t samples, std::uint64_t seed) {
        return k_jacobian(a, domain, range, mc(samples, seed, 1));
      },
      py::arg("a"), py::arg("domain"), py::arg("range"), py::arg("samples") = 1'000'000, py::arg("seed") = 1);
  m.def(
      "verify_identities",
      [](const std::string& which, int count, std::uint64_t seed, int max_dim, double tol) {
        if (which.size() != 1) throw DomainError("identity is one letter a-e");
        const auto s = verify_identities(which[0], count, seed, max_dim, tol);
        py::dict d;
        d["instances"] = s.instances;
        d["failures"] = s.failures;
        d["max_residual"] = s.max_residual;
        d["worst"] = check_dict(s.worst);
        return d;
      },
      py::arg("which"), py::arg("count") = 1000, py::arg("seed") = 1, py::arg("max_dim") = 5, py::arg("tol") = 1e-9);

  py::class_<SupportFunction>(m, "SupportFunction")
      .def_readonly("dim", &SupportFunction::dim)
      .def_readonly("name", &SupportFunction::name)
      .def_readonly("symmetric", &SupportFunction::symmetric)
      .def("__call__", [](const SupportFunction& s, const Vec& u) { return s.h(u); });
  m.def("euclidean_support", &euclidean_support, py::arg("dim") = 2);
  m.def("ellipse_support", &ellipse_support, py::arg("semi_axes"));
  m.def("square_support", &square_support, py::arg("dim") = 2);
  m.def("pnorm_support", &pnorm_support, py::arg("dim"), py::arg("p"));
  m.def("translated_support", &translated_support, py::arg("support"), py::arg("center"));
  m.def(
      "random_planar_body",
      [](std::uint64_t seed, double c0) {
        std::mt19937_64 rng(seed);
        return random_planar_body(rng, c0);
      },
      py::arg("seed"), py::arg("c0") = 1.0);

  py::class_<WulffShape>(m, "WulffShape")
      .def(py::init([](const SupportFunction& s, std::int64_t samples, std::uint64_t seed) {
             return WulffShape(s, mc(samples, seed, 1));
           }),
           py::arg("support"), py::arg("samples") = 1'000'000, py::arg("seed") = 1)
      .def_property_readonly("dim", &WulffShape::dim)
      .def_property_readonly("name", &WulffShape::name)
      .def_property_readonly("volume", [](const WulffShape& w) { return Estimate(w.volume()); })
      .def("support", &WulffShape::support, py::arg("u"))
      .def("support_gradient", &WulffShape::support_gradient, py::arg("u"))
      .def("gauge", &WulffShape::gauge, py::arg("v"))
      .def("contains", &WulffShape::contains, py::arg("v"));
  m.def(
      "wulff_integrand", [](const WulffShape& w) { return wulff_integrand(w, VolumeForm{w.dim(), 1.0}); },
      py::arg("wulff"));

  py::class_<Hypersurface>(m, "Hypersurface")
      .def_readonly("name", &Hypersurface::name)
      .def_readonly("closed", &Hypersurface::closed)
      .def_property_readonly("ambient", &Hypersurface::ambient);
  m.def(
      "circle", [](double r) { return single_patch_surface(circle_patch(r), true); }, py::arg("radius") = 1.0);
  m.def(
      "ellipse", [](double a, double b) { return single_patch_surface(ellipse_patch(a, b), true); }, py::arg("a"),
      py::arg("b"));
  m.def(
      "sphere", [](double r) { return single_patch_surface(sphere_patch(r), true); }, py::arg("radius") = 1.0);
  m.def(
      "convex_boundary", [](const SupportFunction& s, double scale) { return convex_boundary(s, scale); },
      py::arg("support"), py::arg("scale") = 1.0);
  m.def(
      "anisotropic_area",
      [](const Hypersurface& s, const WulffShape& w, bool interior) { return anisotropic_area(s, w, interior).value; },
      py::arg("surface"), py::arg("wulff"), py::arg("interior") = false);
  m.def("curvature_integrals", &curvature_integrals, py::arg("surface"), py::arg("wulff"), py::arg("negative") = false);
  m.def("tube_polynomial", &tube_polynomial, py::arg("integrals"), py::arg("eps"));
  m.def(
      "tube_volume",
      [](const Hypersurface& s, const WulffShape& w, const std::vector<double>& eps, const std::string& side,
         std::int64_t samples, std::uint64_t seed) {
        TubeSide t = TubeSide::Outer;
        if (side == "full") {
          t = TubeSide::Full;
        } else if (side == "both") {
          t = TubeSide::Both;
        } else if (side != "outer") {
          throw DomainError("side is outer, full or both");
        }
        py::list out;
        for (const auto& r : tube_volume(s, w, eps, mc(samples, seed, 1), t)) {
          py::dict d;
          d["eps"] = r.epsilon;
          d["side"] = r.full ? "full" : "outer";
          d["formula"] = r.formula;
          d["mc"] = Estimate(r.mc);
          d["check"] = check_dict(r.check);
          out.append(d);
        }
        return out;
      },
      py::arg("surface"), py::arg("wulff"), py::arg("eps"), py::arg("side") = "outer",
      py::arg("samples") = 1'000'000, py::arg("seed") = 1);
  m.def(
      "minkowski_content",
      [](const SupportFunction& body, const WulffShape& w, double t0, std::int64_t samples, std::uint64_t seed,
         double tol) {
        const auto r = minkowski_content(body, w, t0, mc(samples, seed, 1), tol);
        py::dict d;
        d["t"] = r.t;
        d["slope"] = r.slope;
        d["slope_error"] = r.slope_error;
        d["extrapolated"] = Estimate{r.extrapolated, r.extrapolated_error};
        d["area"] = r.area;
        d["check"] = check_dict(r.check);
        return d;
      },
      py::arg("body"), py::arg("wulff"), py::arg("t0") = 0.2, py::arg("samples") = 2'000'000, py::arg("seed") = 1,
      py::arg("tolerance") = 1e-2);

  // Scenario suites; reports come back as the JSON text the CLI writes.
  m.def(
      "scenario_names", [](const std::string& text) { return Suite::parse(text).names(); }, py::arg("config_text"));
  m.def(
      "run_scenarios",
      [](const std::string& text, std::optional<std::uint64_t> seed, const std::string& filter) {
        RunOptions opts;
        opts.seed = seed;
        opts.filter = filter;
        const Suite suite = Suite::parse(text);
        RunSummary s;
        {
          py::gil_scoped_release release;
          s = suite.run(opts);
        }
        std::vector<std::string> out;
        for (const auto& r : s.reports) out.push_back(report_json(r));
        return out;
      },
      py::arg("config_text"), py::arg("seed") = std::nullopt, py::arg("filter") = "");
}
