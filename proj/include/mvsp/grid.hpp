#pragma once

#include <cstddef>
#include <vector>

#include "mvsp/series.hpp"

namespace mvsp {

enum class GridConvention {
  fourier_unit,         // x_j = j / (2^n - 1) on [0, 1]
  chebyshev_symmetric,  // x_j = 2 j / (2^n - 1) - 1 on [-1, 1]
};

/// Uniform tensor grid addressed by the main registers. Basis index x of a
/// register is little-endian: x = sum_j 2^j x_j with bit j on qubit j.
struct GridSpec {
  GridConvention convention = GridConvention::fourier_unit;
  std::vector<int> qubits;  // n_i per dimension

  GridSpec() = default;
  GridSpec(GridConvention c, std::vector<int> n);

  int dims() const { return static_cast<int>(qubits.size()); }
  int total_qubits() const;
  std::size_t total_points() const;
  std::vector<double> axis(int dim) const;
  std::vector<std::vector<double>> axes() const;
};

std::vector<double> grid_points(GridConvention c, int n);

/// Diagonal of H^F or H^C; identical to grid_points (basis index -> grid value).
std::vector<double> grid_operator_diag(GridConvention c, int n);

/// The grid convention that pairs with a series basis.
GridConvention convention_for(Basis b);

}  // namespace mvsp
