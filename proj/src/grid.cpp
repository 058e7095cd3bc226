#include "mvsp/grid.hpp"

#include <stdexcept>

namespace mvsp {

GridSpec::GridSpec(GridConvention c, std::vector<int> n) : convention(c), qubits(std::move(n)) {
  if (qubits.empty()) throw std::invalid_argument("GridSpec needs at least one dimension");
  for (int q : qubits)
    if (q < 1 || q > 30) throw std::invalid_argument("GridSpec qubit count must lie in [1, 30]");
}

int GridSpec::total_qubits() const {
  int t = 0;
  for (int q : qubits) t += q;
  return t;
}

std::size_t GridSpec::total_points() const { return std::size_t{1} << total_qubits(); }

std::vector<double> GridSpec::axis(int dim) const { return grid_points(convention, qubits.at(dim)); }

std::vector<std::vector<double>> GridSpec::axes() const {
  std::vector<std::vector<double>> out;
  for (int i = 0; i < dims(); ++i) out.push_back(axis(i));
  return out;
}

std::vector<double> grid_points(GridConvention c, int n) {
  if (n < 1 || n > 30) throw std::invalid_argument("grid_points: n must lie in [1, 30]");
  const std::size_t count = std::size_t{1} << n;
  const double denom = static_cast<double>(count - 1);
  std::vector<double> x(count);
  for (std::size_t j = 0; j < count; ++j) {
    const double u = static_cast<double>(j) / denom;
    x[j] = c == GridConvention::fourier_unit ? u : 2.0 * static_cast<double>(j) / denom - 1.0;
  }
  x.back() = 1.0;
  return x;
}

std::vector<double> grid_operator_diag(GridConvention c, int n) { return grid_points(c, n); }

GridConvention convention_for(Basis b) {
  return b == Basis::fourier ? GridConvention::fourier_unit : GridConvention::chebyshev_symmetric;
}

}  // namespace mvsp
