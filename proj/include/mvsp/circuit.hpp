#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace mvsp {

using cplx = std::complex<double>;

enum class RegisterRole { main, coeff_ancilla, be_ancilla };

struct Register {
  std::string name;
  RegisterRole role = RegisterRole::main;
  int dim = 0;     // 0-based dimension the register belongs to
  int width = 0;
  int offset = 0;  // global index of the register's qubit 0
};

enum class GateKind {
  phase_shift,              // qubits {t}; params {theta}
  controlled_phase,         // qubits {c, t}; params {theta}
  pauli_x,                  // qubits {t}
  pauli_z,                  // qubits {t}
  hadamard,                 // qubits {t}
  cx,                       // qubits {c, t}
  multi_controlled_z,       // qubits {c_0..c_{m-1}, t}; polarity per qubit
  uniformly_controlled_ry,  // qubits {c_0..c_{m-1}, t}; params: 2^m angles
  diagonal_phase,           // qubits {q_0..q_{m-1}}; params: 2^m phases
};

/// Structural tag used by the controlled-power builder to recognize the
/// pieces of a qubitized walk operator.
enum class Segment : std::uint8_t { none, prepare, select, unprepare, reflect, sign };

/// One gate. Qubits are global indices. Multi-qubit tables (UCRy angles,
/// diagonal phases) are indexed little-endian over the listed control /
/// register qubits. A MultiControlledZ applies -1 iff every qubit q_i is in
/// state polarity[i].
struct Gate {
  GateKind kind = GateKind::pauli_x;
  std::vector<int> qubits;
  std::vector<double> params;
  std::vector<std::uint8_t> polarity;
  Segment segment = Segment::none;
};

Gate phase_shift(int target, double theta);
Gate controlled_phase(int control, int target, double theta);
Gate pauli_x(int target);
Gate pauli_z(int target);
Gate hadamard(int target);
Gate cx(int control, int target);
Gate multi_controlled_z(std::vector<int> controls, int target, std::vector<std::uint8_t> polarity = {});
Gate uniformly_controlled_ry(std::vector<int> controls, int target, std::vector<double> angles);
Gate diagonal_phase(std::vector<int> qubits, std::vector<double> phases);

/// Inverse gate (same qubits).
Gate adjoint(const Gate& g);

std::string to_string(GateKind k);
GateKind gate_kind_from_string(const std::string& s);
std::string to_string(RegisterRole r);
RegisterRole register_role_from_string(const std::string& s);

class Circuit {
 public:
  const Register& add_register(const std::string& name, RegisterRole role, int dim, int width);

  bool has_register(const std::string& name) const;
  const Register& reg(const std::string& name) const;
  const std::vector<Register>& registers() const { return registers_; }
  int num_qubits() const { return num_qubits_; }
  int qubit(const std::string& name, int index) const;
  /// All global qubit indices of a register, in bit order.
  std::vector<int> qubits_of(const std::string& name) const;

  /// Validates qubit indices, distinctness and table sizes.
  void add(Gate g);
  const std::vector<Gate>& gates() const { return gates_; }

  /// Appends the gates of `other`, routing each of its registers to the
  /// register of this circuit with the same name (after `rename`).
  void append(const Circuit& other, const std::map<std::string, std::string>& rename = {});

  /// Same registers, reversed gate order, every gate adjointed.
  Circuit inverse() const;

 private:
  std::vector<Register> registers_;
  std::vector<Gate> gates_;
  int num_qubits_ = 0;
};

/// Decomposition costs in CX equivalents, per gate.
long long cx_cost(const Gate& g);

struct GateCounts {
  std::map<GateKind, std::size_t> by_kind;
  std::size_t total = 0;
  long long cx_equivalent = 0;

  std::size_t operator[](GateKind k) const {
    auto it = by_kind.find(k);
    return it == by_kind.end() ? 0 : it->second;
  }
};

GateCounts count_gates(const Circuit& c);

/// In-place application of one gate to a 2^num_qubits amplitude array.
void apply_gate(std::span<cplx> amps, int num_qubits, const Gate& g);

/// Dense unitary of the circuit (little-endian). Throws ResourceLimitError
/// above `max_qubits` (at most 14).
Eigen::MatrixXcd to_unitary(const Circuit& c, int max_qubits = 14);

nlohmann::json circuit_to_json(const Circuit& c);
Circuit circuit_from_json(const nlohmann::json& j);
/// JSON text with one gate per line.
void write_circuit_json(std::ostream& os, const Circuit& c);
/// Human-readable listing, one gate per line.
void print_circuit(std::ostream& os, const Circuit& c);

nlohmann::json gate_counts_to_json(const GateCounts& counts);

}  // namespace mvsp
