#include "mvsp/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "mvsp/circuit.hpp"
#include "mvsp/error.hpp"
#include "mvsp/simulator.hpp"
#include "mvsp/synthesis.hpp"
#include "mvsp/targets.hpp"
#include "mvsp/verification.hpp"

namespace mvsp {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

Preprocessing preprocessing_from_string(const std::string& s) {
  if (s == "interpolate") return Preprocessing::interpolate;
  if (s == "mirror_extend") return Preprocessing::mirror_extend;
  if (s == "characteristic_function") return Preprocessing::characteristic_function;
  if (s == "direct_coefficients") return Preprocessing::direct_coefficients;
  throw std::invalid_argument("unknown preprocessing '" + s + "'");
}

std::string to_string(Preprocessing p) {
  switch (p) {
    case Preprocessing::interpolate: return "interpolate";
    case Preprocessing::mirror_extend: return "mirror_extend";
    case Preprocessing::characteristic_function: return "characteristic_function";
    case Preprocessing::direct_coefficients: return "direct_coefficients";
  }
  return "interpolate";
}

std::vector<double> read_matrix2(const json& j) {
  std::vector<double> m;
  if (j.is_array() && j.size() == 2 && j[0].is_array()) {
    for (const auto& row : j) {
      if (row.size() != 2) throw std::invalid_argument("2x2 matrix rows must have two entries");
      m.push_back(row[0].get<double>());
      m.push_back(row[1].get<double>());
    }
  } else {
    m = j.get<std::vector<double>>();
  }
  if (m.size() != 4) throw std::invalid_argument("expected a 2x2 matrix");
  return m;
}

std::vector<double> gaussian_covariance(const json& p) {
  if (p.contains("sigma")) return read_matrix2(p.at("sigma"));
  const auto c = covariance_2d(p.at("sigma_x").get<double>(), p.at("sigma_y").get<double>(), p.value("rho", 0.0));
  return {c.begin(), c.end()};
}

PlaneWaveProblem coulomb_problem(const json& p) { return planewave_problem_from_json(p); }

int target_arity(const ExperimentConfig& cfg) {
  if (cfg.target_name == "ricker2d" || cfg.target_name == "student_t2d" || cfg.target_name == "gaussian2d") return 2;
  if (cfg.target_name == "coulomb") return 3;
  if (cfg.target_name == "constant") return cfg.target_params.value("arity", static_cast<int>(cfg.qubits.size()));
  return -1;
}

fs::path output_dir(const ExperimentConfig& cfg, const CommandOptions& opt) {
  fs::path dir = opt.out_dir ? *opt.out_dir : (cfg.out_dir ? *cfg.out_dir : fs::path("out"));
  fs::create_directories(dir);
  return dir;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw std::invalid_argument("cannot write " + path.string());
  return os;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream os = open_output(path);
  os << std::setw(2) << j << '\n';
}

json effective_config(const ExperimentConfig& cfg, const CommandOptions& opt) {
  json j = cfg.raw;
  if (opt.seed) j["simulation"]["seed"] = *opt.seed;
  if (opt.qubit_cap) j["simulation"]["qubit_cap"] = *opt.qubit_cap;
  return j;
}

json base_report(const ExperimentConfig& cfg, const CommandOptions& opt, const std::string& command) {
  return {{"command", command}, {"config_hash", config_hash(effective_config(cfg, opt))}};
}

json null_if_nan(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::vector<double> abs_values(std::span<const cplx> v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::abs(v[i]);
  return out;
}

std::vector<cplx> target_on_grid(const TargetFunction& f, const GridSpec& g) {
  const auto axes = g.axes();
  std::vector<cplx> out(g.total_points());
  std::vector<double> x(g.dims());
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    const auto idx = unflatten_index(flat, g.qubits);
    for (int d = 0; d < g.dims(); ++d) x[d] = axes[d][idx[d]];
    out[flat] = f(x);
  }
  return out;
}

DomainKind quadrature_domain(Basis b) { return b == Basis::chebyshev ? DomainKind::symmetric_cube : DomainKind::unit_cube; }

json resources_json(const LcuPlan& plan) {
  json dims = json::array();
  for (const auto& d : plan.dims)
    dims.push_back({{"dim", d.dim}, {"basis", to_string(d.basis)}, {"K", d.extent}, {"index_min", d.index_min},
                    {"a", d.a}, {"b", d.b}, {"n", d.n}});
  return {{"main", plan.main_qubits()},
          {"coeff_ancilla", plan.joint_width()},
          {"be_ancilla", plan.be_qubits()},
          {"total", plan.total_qubits()},
          {"dimensions", dims}};
}

struct Simulated {
  Circuit circuit;
  PreparationOutcome outcome;
};

Simulated simulate(const ExperimentConfig& cfg, const CommandOptions& opt, const SeriesApprox& s, const GridSpec& g) {
  Simulated r{assemble_state_prep(s, g, cfg.allow_factorization), {}};
  RunOptions ro;
  ro.qubit_cap = opt.qubit_cap ? *opt.qubit_cap : cfg.simulation.qubit_cap;
  const StateVector sv = run(r.circuit, ro);
  r.outcome = postselect_zero_ancillas(sv, r.circuit);
  return r;
}

}  // namespace

std::string config_hash(const json& j) {
  const std::string text = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig parse_config(const json& j, const fs::path& base_dir) {
  try {
    ExperimentConfig cfg;
    cfg.raw = j;
    cfg.base_dir = base_dir;
    auto resolve = [&](const std::string& p) {
      fs::path path(p);
      return path.is_absolute() ? path : base_dir / path;
    };

    const json& t = j.at("target");
    if (t.contains("coefficients")) {
      cfg.target_name = "file";
      cfg.coefficient_file = resolve(t.at("coefficients").get<std::string>());
      if (!fs::exists(*cfg.coefficient_file))
        throw std::invalid_argument("coefficient file " + cfg.coefficient_file->string() + " does not exist");
    } else {
      cfg.target_name = t.at("builtin").get<std::string>();
      cfg.target_params = t.value("params", json::object());
      static const char* known[] = {"ricker2d", "student_t2d", "gaussian2d", "constant", "coulomb"};
      bool ok = false;
      for (const char* k : known) ok = ok || cfg.target_name == k;
      if (!ok) throw std::invalid_argument("unknown builtin target '" + cfg.target_name + "'");
    }

    cfg.qubits = j.at("qubits").get<std::vector<int>>();
    if (cfg.target_name == "file") {
      const SeriesApprox s = make_series(cfg);
      cfg.basis = s.basis();
      cfg.degrees = s.degrees();
      cfg.preprocessing = Preprocessing::direct_coefficients;
    } else if (cfg.target_name == "coulomb") {
      const int n_modes = cfg.target_params.at("N").get<int>();
      cfg.basis = Basis::fourier;
      cfg.degrees.assign(3, n_modes / 2);
      cfg.preprocessing = Preprocessing::direct_coefficients;
    } else {
      cfg.basis = basis_from_string(j.at("basis").get<std::string>());
      const json& d = j.at("degrees");
      cfg.degrees = d.is_array() ? d.get<std::vector<int>>() : std::vector<int>(cfg.qubits.size(), d.get<int>());
      cfg.preprocessing = cfg.basis == Basis::chebyshev ? Preprocessing::interpolate : Preprocessing::mirror_extend;
      if (j.contains("preprocessing")) cfg.preprocessing = preprocessing_from_string(j.at("preprocessing"));
      if (cfg.preprocessing == Preprocessing::direct_coefficients)
        throw std::invalid_argument("direct_coefficients needs a coefficient file or a coulomb target");
      if (cfg.basis == Basis::chebyshev && cfg.preprocessing != Preprocessing::interpolate)
        throw std::invalid_argument("Chebyshev series are computed by interpolation only");
      if (cfg.preprocessing == Preprocessing::characteristic_function && cfg.target_name != "gaussian2d")
        throw std::invalid_argument("characteristic_function preprocessing applies to gaussian2d only");
    }
    if (cfg.qubits.size() != cfg.degrees.size())
      throw std::invalid_argument("qubits and degrees must list the same number of dimensions");
    const int arity = target_arity(cfg);
    if (arity > 0 && arity != static_cast<int>(cfg.degrees.size()))
      throw std::invalid_argument("target arity " + std::to_string(arity) + " does not match the degree list");
    GridSpec(convention_for(cfg.basis), cfg.qubits);  // validates qubit counts

    cfg.degree_list = j.contains("degree_list") ? j.at("degree_list").get<std::vector<int>>() : std::vector<int>{};
    if (cfg.degree_list.empty()) cfg.degree_list.push_back(cfg.degrees.front());
    cfg.allow_factorization = j.value("factorize", true);
    cfg.dense_samples = j.value("dense_samples", 0);

    if (j.contains("simulation")) {
      const json& s = j.at("simulation");
      cfg.simulation.enabled = s.value("enabled", true);
      cfg.simulation.qubit_cap = s.value("qubit_cap", 26);
      cfg.simulation.shots = s.value("shots", std::uint64_t{20000});
      cfg.simulation.seed = s.value("seed", std::uint64_t{1});
      cfg.simulation.shots_before_postselection = s.value("shots_before_postselection", true);
      if (cfg.simulation.qubit_cap < 1) throw std::invalid_argument("qubit_cap must be positive");
    }
    if (j.contains("analysis")) {
      const json& a = j.at("analysis");
      if (a.contains("counts")) cfg.analysis.counts = resolve(a.at("counts").get<std::string>());
      cfg.analysis.h_min = a.value("h_min", cfg.analysis.h_min);
      cfg.analysis.h_max = a.value("h_max", cfg.analysis.h_max);
      cfg.analysis.h_count = a.value("h_count", cfg.analysis.h_count);
    }
    if (j.contains("outputs") && j.at("outputs").contains("dir"))
      cfg.out_dir = resolve(j.at("outputs").at("dir").get<std::string>());
    return cfg;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("invalid config: ") + e.what());
  }
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot open config " + path.string());
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(j, path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

std::optional<TargetFunction> make_target(const ExperimentConfig& cfg) {
  const json& p = cfg.target_params;
  try {
    if (cfg.target_name == "ricker2d") return ricker2d(p.value("sigma", 0.5));
    if (cfg.target_name == "student_t2d") {
      const auto mu = p.value("mu", std::vector<double>{0.5, 0.5});
      const auto sigma = p.contains("sigma") ? read_matrix2(p.at("sigma")) : std::vector<double>{0.05, 0, 0, 0.05};
      return student_t2d(mu, sigma);
    }
    if (cfg.target_name == "gaussian2d") {
      const auto mu = p.value("mu", std::vector<double>{0.5, 0.5});
      return gaussian2d(mu, gaussian_covariance(p));
    }
    if (cfg.target_name == "constant") {
      cplx value = 1.0;
      if (p.contains("value")) {
        const json& v = p.at("value");
        value = v.is_array() ? cplx(v.at(0).get<double>(), v.at(1).get<double>()) : cplx(v.get<double>());
      }
      TargetFunction f;
      f.arity = target_arity(cfg);
      f.domain = cfg.basis == Basis::chebyshev ? DomainKind::symmetric_cube : DomainKind::unit_cube;
      f.evaluate = [value](std::span<const double>) { return value; };
      return f;
    }
    if (cfg.target_name == "coulomb") {
      auto s = std::make_shared<SeriesApprox>(make_series(cfg));
      TargetFunction f;
      f.arity = 3;
      f.domain = DomainKind::periodic;
      f.evaluate = [s](std::span<const double> x) {
        const std::vector<double> point(x.begin(), x.end());
        return planewave_state(*s, std::span<const std::vector<double>>(&point, 1))[0];
      };
      return f;
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("invalid target parameters: ") + e.what());
  }
  return std::nullopt;
}

SeriesApprox make_series(const ExperimentConfig& cfg, std::optional<std::vector<int>> degrees) {
  if (cfg.target_name == "file") {
    std::ifstream is(*cfg.coefficient_file);
    if (!is) throw std::invalid_argument("cannot open coefficient file " + cfg.coefficient_file->string());
    json j;
    try {
      is >> j;
    } catch (const json::exception& e) {
      throw std::invalid_argument("coefficient file is not valid JSON: " + std::string(e.what()));
    }
    return series_from_json(j);
  }
  if (cfg.target_name == "coulomb") {
    PlaneWaveProblem prob = coulomb_problem(cfg.target_params);
    const int state = cfg.target_params.value("state", 0);
    if (state < 0) throw std::invalid_argument("coulomb state index must be non-negative");
    prob.n_states = std::max(prob.n_states, state + 1);
    return solve_coulomb_planewaves(prob).at(static_cast<std::size_t>(state)).coeffs;
  }

  const std::vector<int> deg = degrees ? *degrees : cfg.degrees;
  const TargetFunction f = *make_target(cfg);
  switch (cfg.preprocessing) {
    case Preprocessing::interpolate:
      return cfg.basis == Basis::chebyshev ? chebyshev_interpolate(f, deg) : fourier_interpolate(f, deg);
    case Preprocessing::mirror_extend:
      return fourier_interpolate(mirror_extend(f), deg);
    case Preprocessing::characteristic_function: {
      for (int d : deg)
        if (d != deg.front()) throw std::invalid_argument("characteristic_function needs equal degrees");
      const auto mu = cfg.target_params.value("mu", std::vector<double>{0.5, 0.5});
      return gaussian_fourier_coeffs(mu, gaussian_covariance(cfg.target_params), deg.front());
    }
    case Preprocessing::direct_coefficients:
      break;
  }
  throw std::invalid_argument("no coefficient source for this target");
}

GridSpec make_grid(const ExperimentConfig& cfg) { return GridSpec(convention_for(cfg.basis), cfg.qubits); }

nlohmann::json cmd_approx(const ExperimentConfig& cfg, const CommandOptions& opt) {
  const fs::path dir = output_dir(cfg, opt);
  const auto target = make_target(cfg);
  json report = base_report(cfg, opt, "approx");
  json table = json::array();

  std::ofstream csv = open_output(dir / "convergence.csv");
  csv << "degree,norm,max_dense_error\n" << std::setprecision(17);
  const int dims = static_cast<int>(cfg.degrees.size());
  const int samples = cfg.dense_samples > 0 ? cfg.dense_samples : (dims <= 2 ? 2001 : 65);
  const bool sweep = cfg.target_name != "file" && cfg.target_name != "coulomb";
  const std::vector<int> list = sweep ? cfg.degree_list : std::vector<int>{cfg.degrees.front()};
  for (int d : list) {
    const SeriesApprox s = sweep ? make_series(cfg, std::vector<int>(dims, d)) : make_series(cfg);
    double err = std::nan("");
    if (target) err = dense_sup_error(s, *target, samples);
    csv << d << ',' << s.norm() << ',';
    if (std::isfinite(err)) csv << err;
    csv << '\n';
    table.push_back({{"degree", d}, {"norm", s.norm()}, {"max_dense_error", null_if_nan(err)}});
  }

  const SeriesApprox s = make_series(cfg);
  write_json(dir / "coefficients.json", series_to_json(s));
  report["convergence"] = table;
  report["norm"] = s.norm();
  report["preprocessing"] = to_string(cfg.preprocessing);
  report["degrees"] = s.degrees();
  write_json(dir / "approx_report.json", report);
  return report;
}

nlohmann::json cmd_synth(const ExperimentConfig& cfg, const CommandOptions& opt) {
  const fs::path dir = output_dir(cfg, opt);
  const SeriesApprox s = make_series(cfg);
  const GridSpec g = make_grid(cfg);
  const Circuit c = assemble_state_prep(s, g, cfg.allow_factorization);
  {
    std::ofstream os = open_output(dir / "circuit.json");
    write_circuit_json(os, c);
  }
  {
    std::ofstream os = open_output(dir / "circuit.txt");
    print_circuit(os, c);
  }
  json report = base_report(cfg, opt, "synth");
  report["qubits"] = resources_json(make_lcu_plan(s, g));
  report["circuit_qubits"] = c.num_qubits();
  report["factorized"] = cfg.allow_factorization && uses_factorized_assembly(s);
  report["gate_counts"] = gate_counts_to_json(count_gates(c));
  write_json(dir / "resources.json", report);
  return report;
}

nlohmann::json cmd_simulate(const ExperimentConfig& cfg, const CommandOptions& opt) {
  if (!cfg.simulation.enabled) throw std::invalid_argument("simulation is disabled in this config");
  const fs::path dir = output_dir(cfg, opt);
  const SeriesApprox s = make_series(cfg);
  const GridSpec g = make_grid(cfg);
  const Simulated sim = simulate(cfg, opt, s, g);
  {
    std::ofstream os = open_output(dir / "amplitudes.csv");
    write_amplitudes_csv(os, sim.outcome, g);
  }

  std::vector<cplx> series_values = evaluate_on_grid(s, g.axes(), cfg.target_name != "coulomb");
  double w = 0.0;
  for (const cplx& v : series_values) w += std::norm(v);
  for (cplx& v : series_values) v /= std::sqrt(w);

  json report = base_report(cfg, opt, "simulate");
  report["qubits"] = sim.circuit.num_qubits();
  report["p_success"] = sim.outcome.p_success;
  report["p_success_analytic"] = success_probability_analytic(s, g);
  report["series_deviation"] = max_deviation_mod_phase(sim.outcome.main_amplitudes, series_values);
  const auto target = make_target(cfg);
  const std::vector<double> prepared = abs_values(sim.outcome.main_amplitudes);
  if (target) {
    report["max_grid_error"] = max_grid_error(sim.outcome, *target, g);
    report["fidelity"] = classical_fidelity(abs_values(target_on_grid(*target, g)), prepared);
  } else {
    report["max_grid_error"] = nullptr;
    report["fidelity"] = classical_fidelity(abs_values(series_values), prepared);
  }
  write_json(dir / "report.json", report);
  return report;
}

nlohmann::json cmd_sample(const ExperimentConfig& cfg, const CommandOptions& opt) {
  const std::uint64_t shots = cfg.simulation.shots;
  if (shots < 1) throw std::invalid_argument("shots must be >= 1");
  const std::uint64_t seed = opt.seed ? *opt.seed : cfg.simulation.seed;
  const fs::path dir = output_dir(cfg, opt);
  const SeriesApprox s = make_series(cfg);
  const GridSpec g = make_grid(cfg);
  const Simulated sim = simulate(cfg, opt, s, g);

  std::uint64_t kept = shots;
  if (cfg.simulation.shots_before_postselection) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::binomial_distribution<std::uint64_t> accept(shots, std::min(1.0, sim.outcome.p_success));
    kept = accept(rng);
    if (kept == 0) throw NumericError("no shot survived post-selection");
  }
  const std::vector<std::uint64_t> counts = sample_shots(sim.outcome, kept, seed);
  {
    std::ofstream os = open_output(dir / "counts.csv");
    write_counts_csv(os, counts, g);
  }
  json report = base_report(cfg, opt, "sample");
  report["shots"] = shots;
  report["postselected_shots"] = kept;
  report["p_success"] = sim.outcome.p_success;
  report["seed"] = seed;
  write_json(dir / "sample_report.json", report);
  return report;
}

nlohmann::json cmd_analyze(const ExperimentConfig& cfg, const CommandOptions& opt) {
  const fs::path dir = output_dir(cfg, opt);
  const GridSpec g = make_grid(cfg);
  if (g.dims() > 2) throw std::invalid_argument("analyze supports one- and two-dimensional grids");
  const fs::path counts_path = cfg.analysis.counts ? *cfg.analysis.counts : dir / "counts.csv";
  std::ifstream is(counts_path);
  if (!is) throw std::invalid_argument("cannot open counts file " + counts_path.string());
  const std::vector<std::uint64_t> counts = read_counts_csv(is, g);
  std::vector<double> weights(counts.begin(), counts.end());

  const SeriesApprox s = make_series(cfg);
  const auto axes = g.axes();
  const std::vector<double> target = abs_values(evaluate_on_grid(s, axes));

  const std::vector<double> h_grid = log_spaced(cfg.analysis.h_min, cfg.analysis.h_max, cfg.analysis.h_count);
  const BandwidthSelection bw = kde_cv_bandwidth_grid(weights, axes, h_grid);
  std::vector<double> estimate = kde_estimate_grid(weights, axes, bw.h_opt);
  for (double& v : estimate) v = std::sqrt(v);

  json report = base_report(cfg, opt, "analyze");
  report["p_success"] = success_probability_analytic(s, g);
  const auto f = make_target(cfg);
  report["p_star"] = f && f->domain != DomainKind::periodic
                         ? json(asymptotic_success_probability(*f, s.norm(), quadrature_domain(s.basis())).value)
                         : json(nullptr);
  report["max_grid_error"] = nullptr;
  report["fidelity"] = classical_fidelity(target, estimate);
  if (g.dims() == 2) {
    report["moments"] = {{"target", moments_to_json(density_moments(target, axes[0], axes[1]))},
                         {"estimate", moments_to_json(density_moments(estimate, axes[0], axes[1]))}};
  } else {
    report["moments"] = nullptr;
  }
  report["kde"] = bandwidth_to_json(bw);
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  report["samples"] = total;
  write_json(dir / "analysis_report.json", report);

  std::ofstream est = open_output(dir / "kde_estimate.csv");
  est << std::setprecision(17);
  for (int d = 0; d < g.dims(); ++d) est << 'i' << d << ',';
  est << "target,estimate\n";
  for (std::size_t flat = 0; flat < estimate.size(); ++flat) {
    for (int v : unflatten_index(flat, g.qubits)) est << v << ',';
    est << target[flat] << ',' << estimate[flat] << '\n';
  }
  return report;
}

int run_command(const std::string& command, const fs::path& config_path, const CommandOptions& opt,
                std::ostream& log) {
  try {
    const ExperimentConfig cfg = load_config(config_path);
    json report;
    if (command == "approx") {
      report = cmd_approx(cfg, opt);
    } else if (command == "synth") {
      report = cmd_synth(cfg, opt);
    } else if (command == "simulate") {
      report = cmd_simulate(cfg, opt);
    } else if (command == "sample") {
      report = cmd_sample(cfg, opt);
    } else if (command == "analyze") {
      report = cmd_analyze(cfg, opt);
    } else {
      throw std::invalid_argument("unknown command '" + command + "'");
    }
    log << std::setw(2) << report << '\n';
    return 0;
  } catch (const ResourceLimitError& e) {
    log << "resource limit: " << e.what() << '\n';
    return 3;
  } catch (const NumericError& e) {
    log << "numeric failure: " << e.what() << '\n';
    return 4;
  } catch (const std::invalid_argument& e) {
    log << "invalid config: " << e.what() << '\n';
    return 2;
  } catch (const std::out_of_range& e) {
    log << "invalid config: " << e.what() << '\n';
    return 2;
  } catch (const fs::filesystem_error& e) {
    log << "invalid config: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace mvsp
