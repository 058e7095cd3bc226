#include "mvsp/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

#include "mvsp/error.hpp"

namespace mvsp {

Gate phase_shift(int target, double theta) { return {GateKind::phase_shift, {target}, {theta}, {}}; }

Gate controlled_phase(int control, int target, double theta) {
  return {GateKind::controlled_phase, {control, target}, {theta}, {}};
}

Gate pauli_x(int target) { return {GateKind::pauli_x, {target}, {}, {}}; }
Gate pauli_z(int target) { return {GateKind::pauli_z, {target}, {}, {}}; }
Gate hadamard(int target) { return {GateKind::hadamard, {target}, {}, {}}; }
Gate cx(int control, int target) { return {GateKind::cx, {control, target}, {}, {}}; }

Gate multi_controlled_z(std::vector<int> controls, int target, std::vector<std::uint8_t> polarity) {
  Gate g{GateKind::multi_controlled_z, std::move(controls), {}, std::move(polarity)};
  g.qubits.push_back(target);
  if (g.polarity.empty()) g.polarity.assign(g.qubits.size(), 1);
  return g;
}

Gate uniformly_controlled_ry(std::vector<int> controls, int target, std::vector<double> angles) {
  Gate g{GateKind::uniformly_controlled_ry, std::move(controls), std::move(angles), {}};
  g.qubits.push_back(target);
  return g;
}

Gate diagonal_phase(std::vector<int> qubits, std::vector<double> phases) {
  return {GateKind::diagonal_phase, std::move(qubits), std::move(phases), {}};
}

Gate adjoint(const Gate& g) {
  Gate inv = g;
  switch (g.kind) {
    case GateKind::phase_shift:
    case GateKind::controlled_phase:
    case GateKind::uniformly_controlled_ry:
    case GateKind::diagonal_phase:
      for (double& p : inv.params) p = -p;
      break;
    default:
      break;
  }
  return inv;
}

// ---------------------------------------------------------------------------
// Circuit

const Register& Circuit::add_register(const std::string& name, RegisterRole role, int dim, int width) {
  if (name.empty()) throw std::invalid_argument("register name must be non-empty");
  if (width < 0) throw std::invalid_argument("register width must be non-negative");
  if (has_register(name)) throw std::invalid_argument("duplicate register name '" + name + "'");
  registers_.push_back({name, role, dim, width, num_qubits_});
  num_qubits_ += width;
  return registers_.back();
}

bool Circuit::has_register(const std::string& name) const {
  return std::any_of(registers_.begin(), registers_.end(), [&](const Register& r) { return r.name == name; });
}

const Register& Circuit::reg(const std::string& name) const {
  for (const Register& r : registers_)
    if (r.name == name) return r;
  throw std::invalid_argument("unknown register '" + name + "'");
}

int Circuit::qubit(const std::string& name, int index) const {
  const Register& r = reg(name);
  if (index < 0 || index >= r.width)
    throw std::out_of_range("qubit index " + std::to_string(index) + " out of range for register '" + name + "'");
  return r.offset + index;
}

std::vector<int> Circuit::qubits_of(const std::string& name) const {
  const Register& r = reg(name);
  std::vector<int> q(r.width);
  for (int i = 0; i < r.width; ++i) q[i] = r.offset + i;
  return q;
}

void Circuit::add(Gate g) {
  if (g.qubits.empty()) throw std::invalid_argument("gate has no qubits");
  std::set<int> seen;
  for (int q : g.qubits) {
    if (q < 0 || q >= num_qubits_) throw std::invalid_argument("gate references undeclared qubit " + std::to_string(q));
    if (!seen.insert(q).second) throw std::invalid_argument("gate references qubit " + std::to_string(q) + " twice");
  }
  for (double p : g.params)
    if (!std::isfinite(p)) throw std::invalid_argument("gate parameter is not finite");

  const std::size_t nq = g.qubits.size();
  auto expect = [&](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(to_string(g.kind) + ": " + what);
  };
  switch (g.kind) {
    case GateKind::phase_shift:
      expect(nq == 1 && g.params.size() == 1, "expects one qubit and one angle");
      break;
    case GateKind::controlled_phase:
      expect(nq == 2 && g.params.size() == 1, "expects two qubits and one angle");
      break;
    case GateKind::pauli_x:
    case GateKind::pauli_z:
    case GateKind::hadamard:
      expect(nq == 1 && g.params.empty(), "expects one qubit");
      break;
    case GateKind::cx:
      expect(nq == 2 && g.params.empty(), "expects two qubits");
      break;
    case GateKind::multi_controlled_z:
      expect(g.polarity.size() == nq, "polarity must list every qubit");
      for (auto p : g.polarity) expect(p <= 1, "polarity entries must be 0 or 1");
      break;
    case GateKind::uniformly_controlled_ry:
      expect(nq <= 31 && g.params.size() == (std::size_t{1} << (nq - 1)), "angle table must have 2^controls entries");
      break;
    case GateKind::diagonal_phase:
      expect(nq <= 31 && g.params.size() == (std::size_t{1} << nq), "phase table must have 2^width entries");
      break;
  }
  gates_.push_back(std::move(g));
}

void Circuit::append(const Circuit& other, const std::map<std::string, std::string>& rename) {
  // Map each global qubit of `other` to a global qubit of this circuit.
  std::vector<int> route(other.num_qubits(), -1);
  for (const Register& r : other.registers()) {
    if (r.width == 0) continue;
    auto it = rename.find(r.name);
    const std::string& target_name = it == rename.end() ? r.name : it->second;
    const Register& target = reg(target_name);
    if (target.width != r.width)
      throw std::invalid_argument("append: register '" + r.name + "' has width " + std::to_string(r.width) +
                                  " but '" + target_name + "' has width " + std::to_string(target.width));
    for (int i = 0; i < r.width; ++i) route[r.offset + i] = target.offset + i;
  }
  for (const Gate& g : other.gates()) {
    Gate mapped = g;
    for (int& q : mapped.qubits) q = route[q];
    add(std::move(mapped));
  }
}

Circuit Circuit::inverse() const {
  Circuit inv;
  inv.registers_ = registers_;
  inv.num_qubits_ = num_qubits_;
  for (auto it = gates_.rbegin(); it != gates_.rend(); ++it) inv.gates_.push_back(adjoint(*it));
  return inv;
}

// ---------------------------------------------------------------------------
// Accounting

long long cx_cost(const Gate& g) {
  const auto nq = static_cast<long long>(g.qubits.size());
  switch (g.kind) {
    case GateKind::controlled_phase:
      return 2;
    case GateKind::cx:
      return 1;
    case GateKind::multi_controlled_z: {
      const long long c = nq - 1;
      if (c <= 0) return 0;
      if (c == 1) return 1;
      if (c == 2) return 6;
      return 8 * c - 20;
    }
    case GateKind::uniformly_controlled_ry: {
      const long long c = nq - 1;
      return c == 0 ? 0 : (1LL << c);
    }
    case GateKind::diagonal_phase:
      return nq <= 1 ? 0 : (1LL << nq) - 2;
    default:
      return 0;
  }
}

GateCounts count_gates(const Circuit& c) {
  GateCounts counts;
  for (const Gate& g : c.gates()) {
    ++counts.by_kind[g.kind];
    ++counts.total;
    counts.cx_equivalent += cx_cost(g);
  }
  return counts;
}

// ---------------------------------------------------------------------------
// Kernels

namespace {

using index_t = std::int64_t;

// Inserts zero bits at the (ascending) positions in `sorted`.
inline index_t insert_zeros(index_t k, const std::vector<int>& sorted) {
  for (int t : sorted) {
    const index_t low = k & ((index_t{1} << t) - 1);
    k = ((k >> t) << (t + 1)) | low;
  }
  return k;
}

inline index_t gather_bits(index_t i, const int* qubits, std::size_t count) {
  index_t v = 0;
  for (std::size_t b = 0; b < count; ++b) v |= ((i >> qubits[b]) & 1) << b;
  return v;
}

template <class F>
void for_each_pair(index_t dim, int target, F&& f) {
  const index_t half = dim >> 1;
  const index_t bit = index_t{1} << target;
#pragma omp parallel for if (half > (1 << 15)) schedule(static)
  for (index_t k = 0; k < half; ++k) {
    const index_t i0 = ((k >> target) << (target + 1)) | (k & (bit - 1));
    f(i0, i0 | bit);
  }
}

void apply_mcz(std::span<cplx> amps, const Gate& g) {
  std::vector<int> sorted = g.qubits;
  std::sort(sorted.begin(), sorted.end());
  index_t value = 0;
  for (std::size_t b = 0; b < g.qubits.size(); ++b)
    if (g.polarity[b]) value |= index_t{1} << g.qubits[b];
  const index_t count = static_cast<index_t>(amps.size()) >> g.qubits.size();
#pragma omp parallel for if (count > (1 << 15)) schedule(static)
  for (index_t k = 0; k < count; ++k) {
    const index_t i = insert_zeros(k, sorted) | value;
    amps[i] = -amps[i];
  }
}

void apply_ucry(std::span<cplx> amps, const Gate& g) {
  const int target = g.qubits.back();
  const std::size_t nc = g.qubits.size() - 1;
  const int* controls = g.qubits.data();
  std::vector<double> c(g.params.size());
  std::vector<double> s(g.params.size());
  for (std::size_t h = 0; h < g.params.size(); ++h) {
    c[h] = std::cos(0.5 * g.params[h]);
    s[h] = std::sin(0.5 * g.params[h]);
  }
  for_each_pair(static_cast<index_t>(amps.size()), target, [&](index_t i0, index_t i1) {
    const index_t h = gather_bits(i0, controls, nc);
    const cplx a0 = amps[i0];
    const cplx a1 = amps[i1];
    amps[i0] = c[h] * a0 - s[h] * a1;
    amps[i1] = s[h] * a0 + c[h] * a1;
  });
}

void apply_diagonal(std::span<cplx> amps, const Gate& g) {
  std::vector<cplx> table(g.params.size());
  for (std::size_t x = 0; x < table.size(); ++x) table[x] = std::polar(1.0, g.params[x]);
  const index_t dim = static_cast<index_t>(amps.size());
  const int* qubits = g.qubits.data();
  const std::size_t m = g.qubits.size();
#pragma omp parallel for if (dim > (1 << 15)) schedule(static)
  for (index_t i = 0; i < dim; ++i) amps[i] *= table[gather_bits(i, qubits, m)];
}

}  // namespace

void apply_gate(std::span<cplx> amps, int num_qubits, const Gate& g) {
  if (amps.size() != (std::size_t{1} << num_qubits))
    throw std::invalid_argument("apply_gate: amplitude array does not match qubit count");
  const index_t dim = static_cast<index_t>(amps.size());
  switch (g.kind) {
    case GateKind::phase_shift: {
      const cplx ph = std::polar(1.0, g.params[0]);
      for_each_pair(dim, g.qubits[0], [&](index_t, index_t i1) { amps[i1] *= ph; });
      break;
    }
    case GateKind::controlled_phase: {
      const cplx ph = std::polar(1.0, g.params[0]);
      const index_t cbit = index_t{1} << g.qubits[0];
      for_each_pair(dim, g.qubits[1], [&](index_t, index_t i1) {
        if (i1 & cbit) amps[i1] *= ph;
      });
      break;
    }
    case GateKind::pauli_x:
      for_each_pair(dim, g.qubits[0], [&](index_t i0, index_t i1) { std::swap(amps[i0], amps[i1]); });
      break;
    case GateKind::pauli_z:
      for_each_pair(dim, g.qubits[0], [&](index_t, index_t i1) { amps[i1] = -amps[i1]; });
      break;
    case GateKind::hadamard: {
      const double r = 1.0 / std::sqrt(2.0);
      for_each_pair(dim, g.qubits[0], [&](index_t i0, index_t i1) {
        const cplx a0 = amps[i0];
        const cplx a1 = amps[i1];
        amps[i0] = r * (a0 + a1);
        amps[i1] = r * (a0 - a1);
      });
      break;
    }
    case GateKind::cx: {
      const index_t cbit = index_t{1} << g.qubits[0];
      for_each_pair(dim, g.qubits[1], [&](index_t i0, index_t i1) {
        if (i0 & cbit) std::swap(amps[i0], amps[i1]);
      });
      break;
    }
    case GateKind::multi_controlled_z:
      apply_mcz(amps, g);
      break;
    case GateKind::uniformly_controlled_ry:
      apply_ucry(amps, g);
      break;
    case GateKind::diagonal_phase:
      apply_diagonal(amps, g);
      break;
  }
}

Eigen::MatrixXcd to_unitary(const Circuit& c, int max_qubits) {
  max_qubits = std::min(max_qubits, 14);
  if (c.num_qubits() > max_qubits)
    throw ResourceLimitError("to_unitary: " + std::to_string(c.num_qubits()) + " qubits exceeds the limit of " +
                             std::to_string(max_qubits));
  const Eigen::Index dim = Eigen::Index{1} << c.num_qubits();
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    std::span<cplx> column(u.col(col).data(), static_cast<std::size_t>(dim));
    for (const Gate& g : c.gates()) apply_gate(column, c.num_qubits(), g);
  }
  return u;
}

}  // namespace mvsp
