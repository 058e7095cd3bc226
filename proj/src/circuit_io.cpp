#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "mvsp/circuit.hpp"

namespace mvsp {

namespace {

struct KindName {
  GateKind kind;
  const char* name;
};

constexpr KindName kKindNames[] = {
    {GateKind::phase_shift, "PhaseShift"},
    {GateKind::controlled_phase, "ControlledPhase"},
    {GateKind::pauli_x, "PauliX"},
    {GateKind::pauli_z, "PauliZ"},
    {GateKind::hadamard, "Hadamard"},
    {GateKind::cx, "CX"},
    {GateKind::multi_controlled_z, "MultiControlledZ"},
    {GateKind::uniformly_controlled_ry, "UniformlyControlledRy"},
    {GateKind::diagonal_phase, "DiagonalPhase"},
};

// Resolves a global qubit to (register name, index).
std::pair<std::string, int> locate(const Circuit& c, int q) {
  for (const Register& r : c.registers())
    if (q >= r.offset && q < r.offset + r.width) return {r.name, q - r.offset};
  throw std::invalid_argument("qubit " + std::to_string(q) + " is not in any register");
}

nlohmann::json gate_to_json(const Circuit& c, const Gate& g) {
  nlohmann::json j;
  j["kind"] = to_string(g.kind);
  nlohmann::json refs = nlohmann::json::array();
  for (int q : g.qubits) {
    auto [name, idx] = locate(c, q);
    refs.push_back({name, idx});
  }
  j["qubits"] = std::move(refs);
  j["params"] = g.params;
  if (g.kind == GateKind::multi_controlled_z) {
    std::vector<int> pol(g.polarity.begin(), g.polarity.end());
    j["polarity"] = pol;
  }
  return j;
}

}  // namespace

std::string to_string(GateKind k) {
  for (const auto& kn : kKindNames)
    if (kn.kind == k) return kn.name;
  return "Unknown";
}

GateKind gate_kind_from_string(const std::string& s) {
  for (const auto& kn : kKindNames)
    if (s == kn.name) return kn.kind;
  throw std::invalid_argument("unknown gate kind '" + s + "'");
}

std::string to_string(RegisterRole r) {
  switch (r) {
    case RegisterRole::main:
      return "main";
    case RegisterRole::coeff_ancilla:
      return "coeff_ancilla";
    case RegisterRole::be_ancilla:
      return "be_ancilla";
  }
  return "main";
}

RegisterRole register_role_from_string(const std::string& s) {
  if (s == "main") return RegisterRole::main;
  if (s == "coeff_ancilla") return RegisterRole::coeff_ancilla;
  if (s == "be_ancilla") return RegisterRole::be_ancilla;
  throw std::invalid_argument("unknown register role '" + s + "'");
}

nlohmann::json circuit_to_json(const Circuit& c) {
  nlohmann::json j;
  nlohmann::json regs = nlohmann::json::array();
  for (const Register& r : c.registers())
    regs.push_back({{"name", r.name}, {"role", to_string(r.role)}, {"dim", r.dim}, {"width", r.width}});
  j["registers"] = std::move(regs);
  nlohmann::json gates = nlohmann::json::array();
  for (const Gate& g : c.gates()) gates.push_back(gate_to_json(c, g));
  j["gates"] = std::move(gates);
  return j;
}

Circuit circuit_from_json(const nlohmann::json& j) {
  try {
    Circuit c;
    for (const auto& r : j.at("registers"))
      c.add_register(r.at("name").get<std::string>(), register_role_from_string(r.at("role").get<std::string>()),
                     r.value("dim", 0), r.at("width").get<int>());
    for (const auto& gj : j.at("gates")) {
      Gate g;
      g.kind = gate_kind_from_string(gj.at("kind").get<std::string>());
      for (const auto& ref : gj.at("qubits")) {
        if (!ref.is_array() || ref.size() != 2) throw std::invalid_argument("qubit references must be [register, index]");
        g.qubits.push_back(c.qubit(ref[0].get<std::string>(), ref[1].get<int>()));
      }
      if (gj.contains("params")) g.params = gj.at("params").get<std::vector<double>>();
      if (gj.contains("polarity")) {
        for (int p : gj.at("polarity").get<std::vector<int>>()) g.polarity.push_back(static_cast<std::uint8_t>(p));
      } else if (g.kind == GateKind::multi_controlled_z) {
        g.polarity.assign(g.qubits.size(), 1);
      }
      c.add(std::move(g));
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed circuit JSON: ") + e.what());
  }
}

void write_circuit_json(std::ostream& os, const Circuit& c) {
  nlohmann::json regs = nlohmann::json::array();
  for (const Register& r : c.registers())
    regs.push_back({{"name", r.name}, {"role", to_string(r.role)}, {"dim", r.dim}, {"width", r.width}});
  os << "{\n\"registers\": " << regs.dump() << ",\n\"gates\": [";
  bool first = true;
  for (const Gate& g : c.gates()) {
    os << (first ? "\n" : ",\n") << gate_to_json(c, g).dump();
    first = false;
  }
  os << "\n]\n}\n";
}

void print_circuit(std::ostream& os, const Circuit& c) {
  for (const Register& r : c.registers())
    os << "# " << r.name << " (" << to_string(r.role) << ", dim " << r.dim << ") width " << r.width << '\n';
  auto ref = [&](int q) {
    auto [name, idx] = locate(c, q);
    return name + "[" + std::to_string(idx) + "]";
  };
  const auto flags = os.flags();
  os << std::setprecision(6);
  for (const Gate& g : c.gates()) {
    os << to_string(g.kind);
    if (g.kind == GateKind::phase_shift || g.kind == GateKind::controlled_phase) os << '(' << g.params[0] << ')';
    const std::size_t last = g.qubits.size() - 1;
    for (std::size_t i = 0; i < g.qubits.size(); ++i) {
      const bool is_target = i == last && g.kind != GateKind::diagonal_phase;
      os << (i == 0 ? " " : (is_target ? " -> " : " ")) << ref(g.qubits[i]);
      if (g.kind == GateKind::multi_controlled_z && !g.polarity[i]) os << "'";
    }
    if (g.kind == GateKind::uniformly_controlled_ry || g.kind == GateKind::diagonal_phase)
      os << "  [" << g.params.size() << " entries]";
    os << '\n';
  }
  os.flags(flags);
}

nlohmann::json gate_counts_to_json(const GateCounts& counts) {
  nlohmann::json by_kind = nlohmann::json::object();
  for (const auto& [kind, n] : counts.by_kind) by_kind[to_string(kind)] = n;
  return {{"by_kind", by_kind}, {"total", counts.total}, {"cx_equivalent", counts.cx_equivalent}};
}

}  // namespace mvsp
