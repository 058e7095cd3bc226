#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "mvsp/circuit.hpp"
#include "mvsp/error.hpp"
#include "mvsp/experiment.hpp"
#include "mvsp/grid.hpp"
#include "mvsp/series.hpp"
#include "mvsp/simulator.hpp"
#include "mvsp/synthesis.hpp"
#include "mvsp/targets.hpp"
#include "mvsp/verification.hpp"

namespace py = pybind11;
using namespace mvsp;

namespace {

py::array_t<cplx> to_array(std::span<const cplx> v) {
  return py::array_t<cplx>(static_cast<py::ssize_t>(v.size()), v.data());
}

std::vector<double> as_matrix2(const py::array_t<double, py::array::c_style | py::array::forcecast>& m) {
  if (m.size() != 4) throw std::invalid_argument("expected a 2x2 matrix");
  return {m.data(), m.data() + 4};
}

py::dict counts_dict(const GateCounts& n) {
  py::dict by_kind;
  for (const auto& [k, v] : n.by_kind) by_kind[py::str(to_string(k))] = v;
  py::dict d;
  d["by_kind"] = by_kind;
  d["total"] = n.total;
  d["cx_equivalent"] = n.cx_equivalent;
  return d;
}

}  // namespace

PYBIND11_MODULE(_mvsp, m) {
  m.doc() = "Multivariate quantum state preparation from Fourier and Chebyshev series";

  py::register_exception<ResourceLimitError>(m, "ResourceLimitError", PyExc_MemoryError);
  auto numeric = py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<DegeneratePostselectionError>(m, "DegeneratePostselectionError", numeric.ptr());

  py::enum_<Basis>(m, "Basis").value("fourier", Basis::fourier).value("chebyshev", Basis::chebyshev);
  py::enum_<DomainKind>(m, "DomainKind")
      .value("unit_cube", DomainKind::unit_cube)
      .value("symmetric_cube", DomainKind::symmetric_cube)
      .value("periodic", DomainKind::periodic);
  py::enum_<GridConvention>(m, "GridConvention")
      .value("fourier_unit", GridConvention::fourier_unit)
      .value("chebyshev_symmetric", GridConvention::chebyshev_symmetric);

  py::class_<TargetFunction>(m, "TargetFunction")
      .def(py::init([](int arity, DomainKind domain, std::function<cplx(std::vector<double>)> f) {
             TargetFunction t;
             t.arity = arity;
             t.domain = domain;
             t.evaluate = [f](std::span<const double> x) { return f(std::vector<double>(x.begin(), x.end())); };
             return t;
           }),
           py::arg("arity"), py::arg("domain"), py::arg("f"))
      .def_readonly("arity", &TargetFunction::arity)
      .def_readonly("domain", &TargetFunction::domain)
      .def("__call__", [](const TargetFunction& f, const std::vector<double>& x) {
        if (static_cast<int>(x.size()) != f.arity) throw std::invalid_argument("point has the wrong dimension");
        return f(x);
      });

  py::class_<SeriesApprox>(m, "SeriesApprox")
      .def(py::init<Basis, std::vector<int>>(), py::arg("basis"), py::arg("degrees"))
      .def_static("fourier_range", &SeriesApprox::fourier_range, py::arg("index_min"), py::arg("extent"))
      .def_property_readonly("basis", &SeriesApprox::basis)
      .def_property_readonly("dims", &SeriesApprox::dims)
      .def_property_readonly("degrees", &SeriesApprox::degrees)
      .def_property_readonly("extents", &SeriesApprox::extents)
      .def_property_readonly("index_mins", &SeriesApprox::index_mins)
      .def("norm", &SeriesApprox::norm)
      .def("__getitem__", [](const SeriesApprox& s, const std::vector<int>& k) { return s.at(k); })
      .def("__setitem__", [](SeriesApprox& s, const std::vector<int>& k, cplx v) { s.at(k) = v; })
      .def_property(
          "coeffs",
          [](const SeriesApprox& s) {
            py::array_t<cplx> a(std::vector<py::ssize_t>(s.extents().begin(), s.extents().end()));
            std::copy(s.coeffs().begin(), s.coeffs().end(), a.mutable_data());
            return a;
          },
          [](SeriesApprox& s, const py::array_t<cplx, py::array::c_style | py::array::forcecast>& a) {
            if (static_cast<std::size_t>(a.size()) != s.size())
              throw std::invalid_argument("coefficient array has the wrong size");
            std::copy(a.data(), a.data() + a.size(), s.coeffs().begin());
          })
      .def("to_json", [](const SeriesApprox& s) { return series_to_json(s).dump(); })
      .def_static("from_json", [](const std::string& text) { return series_from_json(nlohmann::json::parse(text)); });

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init<GridConvention, std::vector<int>>(), py::arg("convention"), py::arg("qubits"))
      .def_readonly("convention", &GridSpec::convention)
      .def_readonly("qubits", &GridSpec::qubits)
      .def("total_points", &GridSpec::total_points)
      .def("axes", &GridSpec::axes);
  m.def("convention_for", &convention_for);

  m.def("ricker2d", &ricker2d, py::arg("sigma") = 0.5);
  m.def(
      "student_t2d",
      [](std::vector<double> mu, const py::array_t<double, py::array::c_style | py::array::forcecast>& sigma) {
        return student_t2d(mu, as_matrix2(sigma));
      },
      py::arg("mu"), py::arg("sigma"));
  m.def(
      "gaussian2d",
      [](std::vector<double> mu, const py::array_t<double, py::array::c_style | py::array::forcecast>& sigma) {
        return gaussian2d(mu, as_matrix2(sigma));
      },
      py::arg("mu"), py::arg("sigma"));
  m.def("covariance_2d", &covariance_2d, py::arg("sigma_x"), py::arg("sigma_y"), py::arg("rho"));
  m.def("mirror_extend", &mirror_extend);

  m.def(
      "chebyshev_interpolate", [](const TargetFunction& f, std::vector<int> d) { return chebyshev_interpolate(f, d); },
      py::arg("f"), py::arg("degrees"));
  m.def(
      "fourier_interpolate", [](const TargetFunction& f, std::vector<int> d) { return fourier_interpolate(f, d); },
      py::arg("f"), py::arg("degrees"));
  m.def(
      "gaussian_fourier_coeffs",
      [](std::vector<double> mu, const py::array_t<double, py::array::c_style | py::array::forcecast>& sigma,
         int degree) { return gaussian_fourier_coeffs(mu, as_matrix2(sigma), degree); },
      py::arg("mu"), py::arg("sigma"), py::arg("degree"));
  m.def(
      "evaluate_on_grid",
      [](const SeriesApprox& s, const std::vector<std::vector<double>>& axes) {
        return to_array(evaluate_on_grid(s, axes));
      },
      py::arg("series"), py::arg("axes"));

  py::class_<Circuit>(m, "Circuit")
      .def_property_readonly("num_qubits", &Circuit::num_qubits)
      .def_property_readonly("num_gates", [](const Circuit& c) { return c.gates().size(); })
      .def("gate_counts", [](const Circuit& c) { return counts_dict(count_gates(c)); })
      .def("registers",
           [](const Circuit& c) {
             py::list out;
             for (const Register& r : c.registers())
               out.append(py::dict(py::arg("name") = r.name, py::arg("role") = to_string(r.role),
                                   py::arg("dim") = r.dim, py::arg("width") = r.width, py::arg("offset") = r.offset));
             return out;
           })
      .def("to_json", [](const Circuit& c) { return circuit_to_json(c).dump(); })
      .def("__str__", [](const Circuit& c) {
        std::ostringstream os;
        print_circuit(os, c);
        return os.str();
      });

  m.def("assemble_state_prep", &assemble_state_prep, py::arg("series"), py::arg("grid"),
        py::arg("allow_factorization") = true);
  m.def("build_fourier_b", py::overload_cast<int, int>(&build_fourier_b), py::arg("n"), py::arg("d"));
  m.def("build_chebyshev_uv", &build_chebyshev_uv, py::arg("n"));
  m.def(
      "to_unitary",
      [](const Circuit& c) {
        const Eigen::MatrixXcd u = to_unitary(c);
        py::array_t<cplx> a({u.rows(), u.cols()});
        auto r = a.mutable_unchecked<2>();
        for (Eigen::Index i = 0; i < u.rows(); ++i)
          for (Eigen::Index j = 0; j < u.cols(); ++j) r(i, j) = u(i, j);
        return a;
      },
      py::arg("circuit"));

  py::class_<PreparationOutcome>(m, "PreparationOutcome")
      .def_readonly("qubits", &PreparationOutcome::qubits)
      .def_readonly("p_success", &PreparationOutcome::p_success)
      .def_property_readonly("amplitudes", [](const PreparationOutcome& o) { return to_array(o.main_amplitudes); });

  m.def(
      "simulate",
      [](const Circuit& c, int qubit_cap) {
        RunOptions opt;
        opt.qubit_cap = qubit_cap;
        StateVector sv;
        {
          py::gil_scoped_release release;
          sv = run(c, opt);
        }
        return postselect_zero_ancillas(sv, c);
      },
      py::arg("circuit"), py::arg("qubit_cap") = 26);
  m.def(
      "sample_shots",
      [](const PreparationOutcome& o, std::uint64_t shots, std::uint64_t seed) {
        if (shots < 1) throw std::invalid_argument("shots must be >= 1");
        return sample_shots(o, shots, seed);
      },
      py::arg("outcome"), py::arg("shots"), py::arg("seed"));

  m.def("success_probability_analytic", &success_probability_analytic, py::arg("series"), py::arg("grid"));
  m.def(
      "asymptotic_success_probability",
      [](const TargetFunction& f, double norm, DomainKind d) { return asymptotic_success_probability(f, norm, d).value; },
      py::arg("f"), py::arg("coeff_norm"), py::arg("domain"));
  m.def(
      "classical_fidelity",
      [](std::vector<double> p, std::vector<double> q) { return classical_fidelity(p, q); }, py::arg("p"),
      py::arg("q"));
  m.def(
      "density_moments",
      [](std::vector<double> d, std::vector<double> x, std::vector<double> y) {
        const Moments mo = density_moments(d, x, y);
        return py::dict(py::arg("mu_x") = mo.mu_x, py::arg("mu_y") = mo.mu_y, py::arg("var_x") = mo.var_x,
                        py::arg("var_y") = mo.var_y, py::arg("rho") = mo.rho);
      },
      py::arg("density"), py::arg("x"), py::arg("y"));
  m.def(
      "kde_cv_bandwidth",
      [](const std::vector<std::vector<double>>& points, std::vector<double> h) {
        const BandwidthSelection b = kde_cv_bandwidth(points, h);
        return py::make_tuple(b.h_opt, b.q);
      },
      py::arg("points"), py::arg("h_grid"));
  m.def("log_spaced", &log_spaced, py::arg("lo"), py::arg("hi"), py::arg("count"));

  py::class_<PlaneWaveState>(m, "PlaneWaveState")
      .def_readonly("energy", &PlaneWaveState::energy)
      .def_readonly("coeffs", &PlaneWaveState::coeffs);
  m.def(
      "solve_coulomb_planewaves",
      [](int modes, std::vector<std::array<double, 3>> positions, std::vector<double> weights, int n_states) {
        if (!weights.empty() && weights.size() != positions.size())
          throw std::invalid_argument("one weight per nucleus");
        PlaneWaveProblem p;
        p.modes = modes;
        p.n_states = n_states;
        p.nuclei.clear();
        for (std::size_t i = 0; i < positions.size(); ++i)
          p.nuclei.push_back(Nucleus{positions[i], weights.empty() ? 1.0 : weights[i]});
        py::gil_scoped_release release;
        return solve_coulomb_planewaves(p);
      },
      py::arg("modes") = 8, py::arg("positions") = std::vector<std::array<double, 3>>{{0.5, 0.5, 0.5}},
      py::arg("weights") = std::vector<double>{}, py::arg("n_states") = 2);

  m.def(
      "run_command",
      [](const std::string& command, const std::filesystem::path& config, std::optional<std::filesystem::path> out,
         std::optional<std::uint64_t> seed, std::optional<int> qubit_cap) {
        CommandOptions opt{out, seed, qubit_cap};
        std::ostringstream log;
        const int code = run_command(command, config, opt, log);
        return py::make_tuple(code, log.str());
      },
      py::arg("command"), py::arg("config"), py::arg("out") = py::none(), py::arg("seed") = py::none(),
      py::arg("qubit_cap") = py::none());
}
