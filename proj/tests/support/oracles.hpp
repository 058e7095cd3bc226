#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mvsp/circuit.hpp"
#include "mvsp/grid.hpp"
#include "mvsp/series.hpp"

namespace mvsp::oracle {

/// cos(k acos x), independent of the three-term recurrence.
double chebyshev_t(int k, double x);

/// Naive nested-loop series evaluation on a tensor grid (row-major, axis 0 slowest).
std::vector<cplx> naive_series_on_grid(const SeriesApprox& s, const std::vector<std::vector<double>>& axes);

/// Series with seeded random complex coefficients.
SeriesApprox random_series(Basis basis, const std::vector<int>& degrees, std::uint64_t seed);

/// Block <hi_row| U |hi_col> where the high bits (above `low_qubits`) are fixed.
Eigen::MatrixXcd high_bits_block(const Eigen::MatrixXcd& u, int low_qubits, std::size_t hi_row, std::size_t hi_col);

/// max |a - e^{i phi} b| with phi fixed by the largest-magnitude entry of b.
double max_diff_mod_phase(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

double max_abs(const Eigen::MatrixXcd& m);

/// Assembled circuit without its leading Hadamard layer: the bare LCU block-encoding.
Circuit without_initial_hadamards(const Circuit& c);

}  // namespace mvsp::oracle

namespace mvsp::props {

struct Check {
  std::string name;
  double worst = 0.0;
  double tolerance = 0.0;
  bool exact = false;  // counts: worst is the number of mismatches
  bool pass() const { return exact ? worst == 0.0 : worst < tolerance; }
};

Check lcu_block_identity();
Check qubitization_power_law();
Check control_elision_soundness();
Check norm_preservation();
Check gate_count_formulas();
Check interpolation_nodes();

std::vector<Check> all();

}  // namespace mvsp::props
