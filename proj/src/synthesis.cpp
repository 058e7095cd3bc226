#include "mvsp/synthesis.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace mvsp {

namespace {

constexpr double kPi = std::numbers::pi;

std::string label(const char* prefix, int dim) { return std::string(prefix) + "_" + std::to_string(dim); }

double grid_step_angle(int n, int j) {
  return kPi * std::ldexp(1.0, j) / (std::ldexp(1.0, n) - 1.0);
}

void append_gates(Circuit& c, const std::vector<Gate>& gates) {
  for (const Gate& g : gates) c.add(g);
}

}  // namespace

int ceil_log2(long long k) {
  int a = 0;
  while ((1LL << a) < k) ++a;
  return a;
}

int LcuPlan::joint_width() const {
  int w = 0;
  for (const auto& d : dims) w += d.a;
  return w;
}

int LcuPlan::main_qubits() const {
  int w = 0;
  for (const auto& d : dims) w += d.n;
  return w;
}

int LcuPlan::be_qubits() const {
  int w = 0;
  for (const auto& d : dims) w += d.b;
  return w;
}

LcuPlan make_lcu_plan(const SeriesApprox& s, const GridSpec& g, std::span<const int> labels) {
  if (s.dims() != g.dims())
    throw std::invalid_argument("series has " + std::to_string(s.dims()) + " dimensions but grid has " +
                                std::to_string(g.dims()));
  if (g.convention != convention_for(s.basis()))
    throw std::invalid_argument("grid convention does not match the series basis");
  if (!labels.empty() && static_cast<int>(labels.size()) != s.dims())
    throw std::invalid_argument("register label count does not match series dimension");

  LcuPlan plan;
  for (int i = 0; i < s.dims(); ++i) {
    DimensionPlan d;
    d.dim = labels.empty() ? i : labels[i];
    d.basis = s.basis();
    d.index_min = s.index_min(i);
    d.extent = s.extent(i);
    d.a = ceil_log2(d.extent);
    d.n = g.qubits[i];
    d.b = s.basis() == Basis::chebyshev ? ceil_log2(d.n) : 0;
    plan.dims.push_back(d);
  }
  plan.norm = s.norm();
  if (!(plan.norm > 0.0)) throw std::invalid_argument("coefficient vector is all zero");
  if (!std::isfinite(plan.norm)) throw std::invalid_argument("coefficient vector is not finite");

  const int width = plan.joint_width();
  if (width > 30) throw std::invalid_argument("coefficient register too wide");
  plan.magnitudes.assign(std::size_t{1} << width, 0.0);
  plan.phases.assign(std::size_t{1} << width, 0.0);

  // Walk the row-major coefficient tensor and scatter into the joint index.
  std::vector<int> idx(s.dims(), 0);
  for (std::size_t flat = 0; flat < s.size(); ++flat) {
    std::size_t joint = 0;
    int shift = 0;
    for (int i = 0; i < s.dims(); ++i) {
      joint |= static_cast<std::size_t>(idx[i]) << shift;
      shift += plan.dims[i].a;
    }
    const cplx c = s.coeffs()[flat];
    const double mag = std::abs(c);
    plan.magnitudes[joint] = mag / plan.norm;
    if (mag > 0.0) {
      double ph = std::arg(c);
      if (ph <= -kPi) ph = kPi;
      plan.phases[joint] = ph;
    }
    for (int i = s.dims() - 1; i >= 0; --i) {
      if (++idx[i] < s.extent(i)) break;
      idx[i] = 0;
    }
  }
  return plan;
}

Circuit build_fourier_u(int n) {
  if (n < 1) throw std::invalid_argument("build_fourier_u: n must be >= 1");
  Circuit c;
  c.add_register("main", RegisterRole::main, 0, n);
  for (int j = 0; j < n; ++j) c.add(phase_shift(c.qubit("main", j), grid_step_angle(n, j)));
  return c;
}

Circuit build_fourier_b(int n, int d) {
  if (d < 0) throw std::invalid_argument("build_fourier_b: d must be >= 0");
  return build_fourier_b(n, ceil_log2(2LL * d + 1), -d);
}

Circuit build_fourier_b(int n, int a, int offset) {
  if (n < 1) throw std::invalid_argument("build_fourier_b: n must be >= 1");
  if (a < 0) throw std::invalid_argument("build_fourier_b: a must be >= 0");
  Circuit c = build_controlled_powers(build_fourier_u(n), a, PowerMode::fourier);
  if (offset != 0)
    for (int j = 0; j < n; ++j) c.add(phase_shift(c.qubit("main", j), offset * grid_step_angle(n, j)));
  return c;
}

void append_amplitude_tree(Circuit& c, std::span<const int> qubits, std::span<const double> amplitudes,
                           Segment segment) {
  const int m = static_cast<int>(qubits.size());
  if (amplitudes.size() != (std::size_t{1} << m))
    throw std::invalid_argument("amplitude table must have 2^width entries");
  if (m == 0) return;

  // mass[level][h]: squared norm of the branch whose top `level` bits equal h.
  std::vector<double> probs(amplitudes.size());
  for (std::size_t x = 0; x < amplitudes.size(); ++x) probs[x] = amplitudes[x] * amplitudes[x];

  // Target qubit t is controlled by qubits t+1..m-1; the control value h is
  // the integer formed by those bits (little-endian in control order).
  for (int t = m - 1; t >= 0; --t) {
    const std::size_t controls = static_cast<std::size_t>(m - 1 - t);
    std::vector<double> angles(std::size_t{1} << controls, 0.0);
    const std::size_t block = std::size_t{1} << t;  // indices sharing the higher bits and target bit
    for (std::size_t h = 0; h < angles.size(); ++h) {
      double mass0 = 0.0;
      double mass1 = 0.0;
      const std::size_t base = h << (t + 1);
      for (std::size_t low = 0; low < block; ++low) {
        mass0 += probs[base + low];
        mass1 += probs[base + block + low];
      }
      angles[h] = 2.0 * std::atan2(std::sqrt(mass1), std::sqrt(mass0));
    }
    std::vector<int> ctrl(qubits.begin() + t + 1, qubits.end());
    Gate g = uniformly_controlled_ry(std::move(ctrl), qubits[t], std::move(angles));
    g.segment = segment;
    c.add(std::move(g));
  }
}

Circuit build_chebyshev_uv(int n) {
  if (n < 1) throw std::invalid_argument("build_chebyshev_uv: n must be >= 1");
  const int b = ceil_log2(n);
  Circuit c;
  c.add_register("main", RegisterRole::main, 0, n);
  c.add_register("be", RegisterRole::be_ancilla, 0, b);
  const std::vector<int> anc = c.qubits_of("be");

  std::vector<double> amps(std::size_t{1} << b, 0.0);
  const double denom = std::ldexp(1.0, n) - 1.0;
  for (int j = 0; j < n; ++j) amps[j] = std::sqrt(std::ldexp(1.0, j) / denom);

  Circuit prep;
  prep.add_register("main", RegisterRole::main, 0, n);
  prep.add_register("be", RegisterRole::be_ancilla, 0, b);
  append_amplitude_tree(prep, anc, amps, Segment::prepare);
  c.append(prep);

  // B_V = sum_j |j><j| (x) X_j Z_j X_j.
  for (int j = 0; j < n; ++j) {
    const int target = c.qubit("main", j);
    std::vector<std::uint8_t> pol(b + 1, 1);
    for (int i = 0; i < b; ++i) pol[i] = static_cast<std::uint8_t>((j >> i) & 1);
    Gate x = pauli_x(target);
    x.segment = Segment::select;
    Gate z = multi_controlled_z(anc, target, pol);
    z.segment = Segment::select;
    c.add(x);
    c.add(z);
    c.add(x);
  }

  Circuit unprep = prep.inverse();
  for (const Gate& g : unprep.gates()) {
    Gate u = g;
    u.segment = Segment::unprepare;
    c.add(std::move(u));
  }

  if (b > 0) {
    // All-open MCZ = -(2|0><0| - I); the Z X Z X gadget (= -I) restores the sign.
    std::vector<int> ctrl(anc.begin(), anc.end() - 1);
    Gate r = multi_controlled_z(ctrl, anc.back(), std::vector<std::uint8_t>(b, 0));
    r.segment = Segment::reflect;
    c.add(std::move(r));
    for (Gate g : {pauli_z(anc[0]), pauli_x(anc[0]), pauli_z(anc[0]), pauli_x(anc[0])}) {
      g.segment = Segment::sign;
      c.add(std::move(g));
    }
  }
  return c;
}

std::vector<Gate> controlled_gate(const Gate& g, int control) {
  switch (g.kind) {
    case GateKind::phase_shift:
      return {controlled_phase(control, g.qubits[0], g.params[0])};
    case GateKind::controlled_phase: {
      std::vector<double> table(8, 0.0);
      table[7] = g.params[0];
      return {diagonal_phase({g.qubits[0], g.qubits[1], control}, table)};
    }
    case GateKind::pauli_x:
      return {cx(control, g.qubits[0])};
    case GateKind::pauli_z:
      return {multi_controlled_z({control}, g.qubits[0])};
    case GateKind::hadamard:
      // H = Ry(pi/2) Z.
      return {multi_controlled_z({control}, g.qubits[0]),
              uniformly_controlled_ry({control}, g.qubits[0], {0.0, kPi / 2})};
    case GateKind::cx: {
      const int t = g.qubits[1];
      return {hadamard(t), multi_controlled_z({control, g.qubits[0]}, t), hadamard(t)};
    }
    case GateKind::multi_controlled_z: {
      Gate out = g;
      out.qubits.insert(out.qubits.begin(), control);
      out.polarity.insert(out.polarity.begin(), 1);
      return {out};
    }
    case GateKind::uniformly_controlled_ry: {
      std::vector<int> controls(g.qubits.begin(), g.qubits.end() - 1);
      controls.push_back(control);
      std::vector<double> angles(g.params.size(), 0.0);
      angles.insert(angles.end(), g.params.begin(), g.params.end());
      return {uniformly_controlled_ry(std::move(controls), g.qubits.back(), std::move(angles))};
    }
    case GateKind::diagonal_phase: {
      std::vector<int> qubits = g.qubits;
      qubits.push_back(control);
      std::vector<double> phases(g.params.size(), 0.0);
      phases.insert(phases.end(), g.params.begin(), g.params.end());
      return {diagonal_phase(std::move(qubits), std::move(phases))};
    }
  }
  return {};
}

Circuit build_controlled_powers(const Circuit& base, int a, PowerMode mode) {
  if (a < 0) throw std::invalid_argument("build_controlled_powers: a must be >= 0");
  if (a > 20) throw std::invalid_argument("build_controlled_powers: a is unreasonably large");
  if (base.has_register("coeff")) throw std::invalid_argument("base circuit already has a 'coeff' register");

  Circuit c;
  for (const Register& r : base.registers()) c.add_register(r.name, r.role, r.dim, r.width);
  c.add_register("coeff", RegisterRole::coeff_ancilla, 0, a);
  // Base registers keep their offsets, so base qubit indices carry over.

  if (mode == PowerMode::fourier) {
    for (const Gate& g : base.gates())
      if (g.kind != GateKind::phase_shift)
        throw std::invalid_argument("fourier power mode needs a base made of phase shifts only");
    for (int i = 0; i < a; ++i) {
      const int ctrl = c.qubit("coeff", i);
      for (const Gate& g : base.gates())
        c.add(controlled_phase(ctrl, g.qubits[0], std::ldexp(g.params[0], i)));
    }
    return c;
  }

  if (mode == PowerMode::none) {
    for (int i = 0; i < a; ++i) {
      const int ctrl = c.qubit("coeff", i);
      for (long long rep = 0; rep < (1LL << i); ++rep)
        for (const Gate& g : base.gates()) append_gates(c, controlled_gate(g, ctrl));
    }
    return c;
  }

  // Chebyshev: split the walk operator into its tagged pieces.
  std::vector<Gate> prep, select, unprep, reflect, sign;
  Segment last = Segment::prepare;
  for (const Gate& g : base.gates()) {
    if (g.segment < last || g.segment == Segment::none)
      throw std::invalid_argument("chebyshev power mode needs a base built by build_chebyshev_uv");
    last = g.segment;
    switch (g.segment) {
      case Segment::prepare: prep.push_back(g); break;
      case Segment::select: select.push_back(g); break;
      case Segment::unprepare: unprep.push_back(g); break;
      case Segment::reflect: reflect.push_back(g); break;
      case Segment::sign: sign.push_back(g); break;
      case Segment::none: break;
    }
  }

  auto emit = [&](const std::vector<Gate>& gates) { append_gates(c, gates); };
  auto emit_controlled = [&](const std::vector<Gate>& gates, int ctrl) {
    for (const Gate& g : gates) append_gates(c, controlled_gate(g, ctrl));
  };

  for (int i = 0; i < a; ++i) {
    const int ctrl = c.qubit("coeff", i);
    if (i == 0) {
      // Controlled U_V: prepare pair needs no control; the -I gadget becomes Z on the control.
      emit(prep);
      for (const Gate& g : select) {
        // X_j Z X_j: the X pair cancels when the control is off.
        if (g.kind == GateKind::pauli_x) {
          c.add(g);
        } else {
          append_gates(c, controlled_gate(g, ctrl));
        }
      }
      emit(unprep);
      emit_controlled(reflect, ctrl);
      if (!sign.empty()) c.add(pauli_z(ctrl));
      continue;
    }
    // Controlled U_V^2 = controlled (R'V)(R'V): V^2 = I, so only R' needs the control.
    for (long long rep = 0; rep < (1LL << (i - 1)); ++rep) {
      for (int half = 0; half < 2; ++half) {
        emit(prep);
        emit(select);
        emit(unprep);
        emit_controlled(reflect, ctrl);
      }
    }
  }
  return c;
}

CoefficientLoader build_coefficient_loader(const LcuPlan& plan) {
  double total = std::accumulate(plan.magnitudes.begin(), plan.magnitudes.end(), 0.0);
  if (!(total > 0.0)) throw std::invalid_argument("coefficient vector is all zero");
  if (std::abs(total - 1.0) > 1e-10) throw std::invalid_argument("plan magnitudes must sum to 1");

  CoefficientLoader loader;
  std::vector<int> joint;
  for (Circuit* c : {&loader.prepare, &loader.phase})
    for (const auto& d : plan.dims) c->add_register(label("coeff", d.dim), RegisterRole::coeff_ancilla, d.dim, d.a);
  for (const auto& d : plan.dims)
    for (int q : loader.prepare.qubits_of(label("coeff", d.dim))) joint.push_back(q);

  std::vector<double> amps(plan.magnitudes.size());
  for (std::size_t x = 0; x < amps.size(); ++x) amps[x] = std::sqrt(plan.magnitudes[x]);
  append_amplitude_tree(loader.prepare, joint, amps);
  if (!joint.empty()) loader.phase.add(diagonal_phase(joint, plan.phases));
  return loader;
}

namespace {

void append_lcu(Circuit& c, const LcuPlan& plan) {
  const CoefficientLoader loader = build_coefficient_loader(plan);
  c.append(loader.prepare);
  for (const auto& d : plan.dims) {
    if (d.a == 0 && d.index_min == 0) continue;
    std::map<std::string, std::string> rename{{"coeff", label("coeff", d.dim)}, {"main", label("main", d.dim)}};
    if (d.basis == Basis::fourier) {
      c.append(build_fourier_b(d.n, d.a, d.index_min), rename);
    } else {
      rename["be"] = label("be", d.dim);
      c.append(build_controlled_powers(build_chebyshev_uv(d.n), d.a, PowerMode::chebyshev), rename);
    }
  }
  c.append(loader.phase);
  c.append(loader.prepare.inverse());
}

}  // namespace

bool uses_factorized_assembly(const SeriesApprox& s) {
  return s.dims() == 2 && factorize_series(s).separable;
}

Circuit assemble_state_prep(const SeriesApprox& s, const GridSpec& g, bool allow_factorization) {
  const LcuPlan plan = make_lcu_plan(s, g);

  Circuit c;
  for (int i = g.dims() - 1; i >= 0; --i) c.add_register(label("main", i), RegisterRole::main, i, g.qubits[i]);
  for (const auto& d : plan.dims) c.add_register(label("coeff", d.dim), RegisterRole::coeff_ancilla, d.dim, d.a);
  for (const auto& d : plan.dims)
    if (d.b > 0) c.add_register(label("be", d.dim), RegisterRole::be_ancilla, d.dim, d.b);

  for (int i = 0; i < g.dims(); ++i)
    for (int q : c.qubits_of(label("main", i))) c.add(hadamard(q));

  SeriesFactorization fact;
  if (allow_factorization && s.dims() == 2) fact = factorize_series(s);
  if (fact.separable) {
    for (int i = 0; i < 2; ++i) {
      const int lab[] = {i};
      append_lcu(c, make_lcu_plan(fact.factors[i], GridSpec(g.convention, {g.qubits[i]}), lab));
    }
  } else {
    append_lcu(c, plan);
  }
  return c;
}

}  // namespace mvsp
