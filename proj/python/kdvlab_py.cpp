#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <numbers>

#include "kdvlab/errors.hpp"
#include "kdvlab/io.hpp"
#include "kdvlab/manifold.hpp"
#include "kdvlab/solver.hpp"
#include "kdvlab/spectral.hpp"

namespace py = pybind11;
using namespace kdv;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Array to_array(const std::vector<double>& v) { return Array(static_cast<py::ssize_t>(v.size()), v.data()); }

GridFunction from_array(const Grid& g, const Array& a) {
  if (a.ndim() != 1) throw ConfigError("field must be one-dimensional");
  return {g, std::vector<double>(a.data(), a.data() + a.size())};
}

Scheme scheme_arg(const std::string& s) { return scheme_from_string(s); }

py::dict trace_to_dict(const SimulationTrace& tr) {
  const std::size_t m = tr.records.size();
  std::vector<double> t(m), l2(m), h1(m), p(m), res(m), bd(m);
  for (std::size_t k = 0; k < m; ++k) {
    const auto& r = tr.records[k];
    t[k] = r.t;
    l2[k] = r.l2_norm;
    h1[k] = r.h1_norm;
    p[k] = r.p;
    res[k] = r.manifold_residual;
    bd[k] = r.boundary_dissipation;
  }
  py::dict d;
  d["t"] = to_array(t);
  d["l2_norm"] = to_array(l2);
  d["h1_norm"] = to_array(h1);
  d["p"] = to_array(p);
  d["manifold_residual"] = to_array(res);
  d["boundary_dissipation"] = to_array(bd);
  d["steps"] = tr.steps;
  d["max_step_growth"] = tr.max_step_growth;
  d["max_newton_iterations"] = tr.max_newton_iterations;
  if (!tr.fields.empty()) {
    const auto n = static_cast<py::ssize_t>(tr.config.n);
    Array fields({static_cast<py::ssize_t>(tr.fields.size()), n});
    auto w = fields.mutable_unchecked<2>();
    for (std::size_t k = 0; k < tr.fields.size(); ++k) {
      for (py::ssize_t i = 0; i < n; ++i) w(static_cast<py::ssize_t>(k), i) = tr.fields[k].values[i];
    }
    d["fields"] = fields;
  }
  return d;
}

py::dict fit_to_dict(const DecayFit& f) {
  py::dict d;
  d["window_start"] = f.window_start;
  d["window_end"] = f.window_end;
  d["samples"] = f.samples;
  d["c_fit"] = f.c_fit;
  d["target"] = f.target;
  d["relative_error"] = f.relative_error;
  d["closed_form_deviation"] = f.closed_form_deviation;
  d["cubic_law_consistent"] = f.cubic_law_consistent;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bindings for the kdvlab core library";
  m.attr("__version__") = kToolVersion;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  m.def("nodes", [](double length, int n) {
    const Grid g(length, n);
    std::vector<double> x(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) x[i] = g.node(i + 1);
    return to_array(x);
  }, py::arg("length"), py::arg("n"));

  m.def("inner_product", [](double length, const Array& u, const Array& v) {
    const Grid g(length, static_cast<int>(u.size()));
    return inner_product(from_array(g, u), from_array(g, v));
  }, py::arg("length"), py::arg("u"), py::arg("v"));

  m.def("critical_lengths", [](int max_index) {
    std::vector<std::tuple<int, int, double>> out;
    for (const auto& e : critical_lengths(max_index).entries) out.emplace_back(e.j, e.l, e.value);
    return out;
  }, py::arg("max_index"));
  m.def("is_critical", &is_critical, py::arg("length"), py::arg("max_index") = 5, py::arg("tol") = 1e-9);

  m.def("characteristic_function", &characteristic_function, py::arg("lam"), py::arg("length"));
  m.def("normalized_characteristic", &normalized_characteristic, py::arg("lam"), py::arg("length"));
  m.def("determinant_eigenvalues", [](double length, std::array<double, 4> region, int density) {
    std::vector<cplx> out;
    for (const auto& p : find_eigenvalues_determinant(length, {region[0], region[1], region[2], region[3]}, density)
                             .pairs) {
      out.push_back(p.lambda);
    }
    return out;
  }, py::arg("length"), py::arg("region") = std::array<double, 4>{-1.0, 0.1, -5.0, 5.0}, py::arg("density") = 16);

  m.def("operator_matrix", [](double length, int n, const std::string& scheme) {
    const Eigen::MatrixXd d = assemble_operator(Grid(length, n), scheme_arg(scheme)).dense();
    Array out({static_cast<py::ssize_t>(n), static_cast<py::ssize_t>(n)});
    auto w = out.mutable_unchecked<2>();
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) w(i, j) = d(i, j);
    }
    return out;
  }, py::arg("length"), py::arg("n"), py::arg("scheme") = "dissipative_biased");

  m.def("apply_operator", [](double length, const Array& y, const std::string& scheme) {
    const Grid g(length, static_cast<int>(y.size()));
    return to_array(apply(assemble_operator(g, scheme_arg(scheme)), from_array(g, y)).values);
  }, py::arg("length"), py::arg("y"), py::arg("scheme") = "dissipative_biased");

  m.def("matrix_eigenvalues", [](double length, int n, const std::string& scheme) {
    std::vector<cplx> out;
    for (const auto& p : matrix_spectrum(assemble_operator(Grid(length, n), scheme_arg(scheme)), false).pairs) {
      out.push_back(p.lambda);
    }
    return out;
  }, py::arg("length"), py::arg("n"), py::arg("scheme") = "dissipative_biased");

  m.def("kernel_vector", [](double length, int n, const std::string& scheme) {
    return to_array(kernel_vector(assemble_operator(Grid(length, n), scheme_arg(scheme))).values);
  }, py::arg("length"), py::arg("n"), py::arg("scheme") = "dissipative_biased");

  m.def("dissipativity_report", [](double length, int n, int trials, std::uint64_t seed, const std::string& scheme) {
    return dissipativity_report(assemble_operator(Grid(length, n), scheme_arg(scheme)), trials, seed);
  }, py::arg("length"), py::arg("n"), py::arg("trials") = 1000, py::arg("seed") = 0,
        py::arg("scheme") = "dissipative_biased");

  m.def("phi_profile", [](int n) { return to_array(phi_profile(Grid(2 * std::numbers::pi, n)).values); },
        py::arg("n"));
  m.def("a_profile", [](int n) { return to_array(a_profile(Grid(2 * std::numbers::pi, n)).values); }, py::arg("n"));
  m.def("coefficient_quadrature", [](int n) { return coefficient_quadrature(Grid(2 * std::numbers::pi, n)); },
        py::arg("n"));
  m.def("a_pde_residual", &a_pde_residual, py::arg("samples") = 1000);
  m.def("reduced_closed_form", &reduced_closed_form, py::arg("p0"), py::arg("t"));
  m.attr("REDUCED_COEFFICIENT") = kReducedCoefficient;

  m.def("cutoff_value", &cutoff_value, py::arg("x"), py::arg("epsilon"));
  m.def("nonlinear_term", [](double length, const Array& y) {
    const Grid g(length, static_cast<int>(y.size()));
    return to_array(nonlinear_term(from_array(g, y)).values);
  }, py::arg("length"), py::arg("y"));

  m.def("_parse_config", [](const std::string& text) {
    return config_to_json(parse_config(json::parse(text))).dump();
  });
  m.def("_simulate", [](const std::string& text, py::object y0) {
    json doc = json::parse(text);
    bool keep = doc.value("keep_fields", false);
    SimulationConfig c = parse_config(doc);
    c.keep_fields = keep;
    std::optional<GridFunction> start;
    if (!y0.is_none()) start = from_array(Grid(c.length, c.n), y0.cast<Array>());
    SimulationTrace tr;
    {
      py::gil_scoped_release release;
      tr = simulate(c, std::move(start));
    }
    return trace_to_dict(tr);
  }, py::arg("config_json"), py::arg("y0") = py::none());

  m.def("fit_decay", [](const Array& t, const Array& p, double ta, double tb) {
    return fit_to_dict(fit_decay(std::span<const double>(t.data(), t.size()),
                                 std::span<const double>(p.data(), p.size()), ta, tb));
  }, py::arg("t"), py::arg("p"), py::arg("window_start"), py::arg("window_end"));
}
