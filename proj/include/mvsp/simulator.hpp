#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "mvsp/circuit.hpp"
#include "mvsp/grid.hpp"

namespace mvsp {

struct StateVector {
  int num_qubits = 0;
  std::vector<cplx> amps;  // little-endian over the circuit's global qubit order

  double norm() const;
};

struct RunOptions {
  int qubit_cap = 26;
  bool check_norm = false;  // verify ||psi|| after every gate
  double norm_tolerance = 1e-12;
};

/// Applies the circuit to |0...0>. Throws ResourceLimitError above the cap
/// and NumericError if a norm check fails.
StateVector run(const Circuit& c, const RunOptions& options = {});

/// Normalized post-selected main-register state. Amplitudes are row-major
/// over the grid (dimension 0 slowest), each dimension indexed little-endian.
struct PreparationOutcome {
  std::vector<int> qubits;  // n_i per dimension
  std::vector<cplx> main_amplitudes;
  double p_success = 0.0;
};

/// Projects every non-main register onto |0>. Main registers are ordered by
/// their `dim` field. Throws DegeneratePostselectionError if p < 1e-300.
PreparationOutcome postselect_zero_ancillas(const StateVector& sv, const Circuit& layout);

/// Multinomial draw of `shots` samples from |main_amplitudes|^2. Returns a
/// dense count per grid index.
std::vector<std::uint64_t> sample_shots(const PreparationOutcome& outcome, std::uint64_t shots,
                                        std::uint64_t seed);

/// Columns: i0..i{D-1}, x0..x{D-1}, re, im, prob.
void write_amplitudes_csv(std::ostream& os, const PreparationOutcome& outcome, const GridSpec& g);
/// Columns: i0..i{D-1}, x0..x{D-1}, count.
void write_counts_csv(std::ostream& os, const std::vector<std::uint64_t>& counts, const GridSpec& g);
/// Reads a counts CSV written by write_counts_csv back into a dense vector.
std::vector<std::uint64_t> read_counts_csv(std::istream& is, const GridSpec& g);

/// Per-dimension grid indices of a row-major flat index.
std::vector<int> unflatten_index(std::size_t flat, const std::vector<int>& qubits);

}  // namespace mvsp
