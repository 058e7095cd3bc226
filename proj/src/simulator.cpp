#include "mvsp/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "mvsp/error.hpp"

namespace mvsp {

double StateVector::norm() const {
  double s = 0.0;
  for (const cplx& a : amps) s += std::norm(a);
  return std::sqrt(s);
}

StateVector run(const Circuit& c, const RunOptions& options) {
  if (c.num_qubits() > options.qubit_cap)
    throw ResourceLimitError("circuit has " + std::to_string(c.num_qubits()) + " qubits; the simulation cap is " +
                             std::to_string(options.qubit_cap));
  if (c.num_qubits() > 40) throw ResourceLimitError("statevector too large");
  StateVector sv;
  sv.num_qubits = c.num_qubits();
  sv.amps.assign(std::size_t{1} << sv.num_qubits, cplx{});
  sv.amps[0] = 1.0;
  std::size_t step = 0;
  for (const Gate& g : c.gates()) {
    apply_gate(sv.amps, sv.num_qubits, g);
    ++step;
    if (options.check_norm) {
      const double drift = std::abs(sv.norm() - 1.0);
      if (drift > options.norm_tolerance)
        throw NumericError("norm drift " + std::to_string(drift) + " after gate " + std::to_string(step) + " (" +
                           to_string(g.kind) + ")");
    }
  }
  return sv;
}

std::vector<int> unflatten_index(std::size_t flat, const std::vector<int>& qubits) {
  std::vector<int> idx(qubits.size());
  for (int i = static_cast<int>(qubits.size()) - 1; i >= 0; --i) {
    idx[i] = static_cast<int>(flat & ((std::size_t{1} << qubits[i]) - 1));
    flat >>= qubits[i];
  }
  return idx;
}

PreparationOutcome postselect_zero_ancillas(const StateVector& sv, const Circuit& layout) {
  if (layout.num_qubits() != sv.num_qubits)
    throw std::invalid_argument("postselect: layout and state have different qubit counts");

  std::vector<const Register*> mains;
  for (const Register& r : layout.registers())
    if (r.role == RegisterRole::main) mains.push_back(&r);
  std::sort(mains.begin(), mains.end(), [](const Register* x, const Register* y) { return x->dim < y->dim; });

  PreparationOutcome out;
  int main_total = 0;
  for (const Register* r : mains) {
    out.qubits.push_back(r->width);
    main_total += r->width;
  }
  const std::size_t count = std::size_t{1} << main_total;
  out.main_amplitudes.resize(count);

  // Row-major flat index with the last dimension fastest is a little-endian
  // concatenation with main_{D-1} lowest; check whether the registers already
  // sit that way at the bottom of the state.
  bool contiguous = true;
  int expected = 0;
  for (auto it = mains.rbegin(); it != mains.rend(); ++it) {
    if ((*it)->offset != expected) contiguous = false;
    expected += (*it)->width;
  }

  if (contiguous) {
    std::copy(sv.amps.begin(), sv.amps.begin() + static_cast<std::ptrdiff_t>(count), out.main_amplitudes.begin());
  } else {
    for (std::size_t flat = 0; flat < count; ++flat) {
      std::size_t rest = flat;
      std::size_t global = 0;
      for (auto it = mains.rbegin(); it != mains.rend(); ++it) {
        const std::size_t x = rest & ((std::size_t{1} << (*it)->width) - 1);
        rest >>= (*it)->width;
        global |= x << (*it)->offset;
      }
      out.main_amplitudes[flat] = sv.amps[global];
    }
  }

  double p = 0.0;
  for (const cplx& a : out.main_amplitudes) p += std::norm(a);
  if (!(p >= 1e-300)) throw DegeneratePostselectionError("post-selection probability is numerically zero");
  out.p_success = p;
  const double inv = 1.0 / std::sqrt(p);
  for (cplx& a : out.main_amplitudes) a *= inv;
  return out;
}

std::vector<std::uint64_t> sample_shots(const PreparationOutcome& outcome, std::uint64_t shots,
                                        std::uint64_t seed) {
  if (shots < 1) throw std::invalid_argument("sample_shots: shots must be >= 1");
  const std::size_t count = outcome.main_amplitudes.size();
  std::vector<double> cdf(count);
  double acc = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    acc += std::norm(outcome.main_amplitudes[i]);
    cdf[i] = acc;
  }
  if (!(acc > 0.0)) throw std::invalid_argument("sample_shots: distribution has zero mass");

  std::mt19937_64 rng(seed);
  std::vector<std::uint64_t> counts(count, 0);
  for (std::uint64_t s = 0; s < shots; ++s) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53 * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    std::size_t idx = static_cast<std::size_t>(it - cdf.begin());
    if (idx >= count) idx = count - 1;
    // Skip zero-probability cells that share the cumulative value.
    while (idx + 1 < count && std::norm(outcome.main_amplitudes[idx]) == 0.0) ++idx;
    ++counts[idx];
  }
  return counts;
}

namespace {

void write_header(std::ostream& os, int dims) {
  for (int i = 0; i < dims; ++i) os << "i" << i << ',';
  for (int i = 0; i < dims; ++i) os << "x" << i << ',';
}

void write_coords(std::ostream& os, const std::vector<int>& idx, const std::vector<std::vector<double>>& axes) {
  for (int v : idx) os << v << ',';
  for (std::size_t i = 0; i < idx.size(); ++i) os << axes[i][idx[i]] << ',';
}

}  // namespace

void write_amplitudes_csv(std::ostream& os, const PreparationOutcome& outcome, const GridSpec& g) {
  if (outcome.qubits != g.qubits) throw std::invalid_argument("outcome does not match grid");
  const auto axes = g.axes();
  const auto flags = os.flags();
  os << std::setprecision(17);
  write_header(os, g.dims());
  os << "re,im,prob\n";
  for (std::size_t flat = 0; flat < outcome.main_amplitudes.size(); ++flat) {
    write_coords(os, unflatten_index(flat, g.qubits), axes);
    const cplx a = outcome.main_amplitudes[flat];
    os << a.real() << ',' << a.imag() << ',' << std::norm(a) << '\n';
  }
  os.flags(flags);
}

void write_counts_csv(std::ostream& os, const std::vector<std::uint64_t>& counts, const GridSpec& g) {
  if (counts.size() != g.total_points()) throw std::invalid_argument("counts do not match grid");
  const auto axes = g.axes();
  const auto flags = os.flags();
  os << std::setprecision(17);
  write_header(os, g.dims());
  os << "count\n";
  for (std::size_t flat = 0; flat < counts.size(); ++flat) {
    write_coords(os, unflatten_index(flat, g.qubits), axes);
    os << counts[flat] << '\n';
  }
  os.flags(flags);
}

std::vector<std::uint64_t> read_counts_csv(std::istream& is, const GridSpec& g) {
  std::vector<std::uint64_t> counts(g.total_points(), 0);
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("counts CSV is empty");
  const int dims = g.dims();
  std::size_t row = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    ++row;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (static_cast<int>(fields.size()) != 2 * dims + 1)
      throw std::invalid_argument("counts CSV row " + std::to_string(row) + " has the wrong number of columns");
    std::size_t flat = 0;
    for (int i = 0; i < dims; ++i) {
      const long v = std::stol(fields[i]);
      if (v < 0 || v >= (1L << g.qubits[i]))
        throw std::invalid_argument("counts CSV row " + std::to_string(row) + " has an out-of-range index");
      flat = (flat << g.qubits[i]) | static_cast<std::size_t>(v);
    }
    counts[flat] += std::stoull(fields.back());
  }
  return counts;
}

}  // namespace mvsp
