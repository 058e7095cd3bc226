#pragma once

#include <span>
#include <string>
#include <vector>

#include "mvsp/circuit.hpp"
#include "mvsp/grid.hpp"
#include "mvsp/series.hpp"

namespace mvsp {

/// Smallest a with 2^a >= k (0 for k <= 1).
int ceil_log2(long long k);

struct DimensionPlan {
  int dim = 0;  // label used for register names (coeff_<dim>, be_<dim>, main_<dim>)
  Basis basis = Basis::fourier;
  int index_min = 0;
  int extent = 1;  // K_i
  int a = 0;       // coefficient ancillas
  int b = 0;       // block-encoding ancillas (Chebyshev only)
  int n = 1;       // main qubits
};

/// Normalized LCU data over the joint coefficient index. The joint index is
/// dimension-major and little-endian: J = s_0 + 2^{a_0} s_1 + ..., where s_i
/// is the storage index (k - index_min) along dimension i.
struct LcuPlan {
  std::vector<DimensionPlan> dims;
  double norm = 0.0;               // sum |c_k|
  std::vector<double> magnitudes;  // |c_k| / norm, length 2^{sum a_i}, zero padded
  std::vector<double> phases;      // arg c_k in (-pi, pi], 0 where |c_k| = 0

  int joint_width() const;
  int main_qubits() const;
  int be_qubits() const;
  int total_qubits() const { return main_qubits() + joint_width() + be_qubits(); }
};

/// `labels` overrides the per-dimension register labels (default 0..D-1).
LcuPlan make_lcu_plan(const SeriesApprox& s, const GridSpec& g, std::span<const int> labels = {});

/// U = exp(i pi H^F) on an n-qubit register named "main".
Circuit build_fourier_u(int n);

/// Fourier select operator over registers "main" (n) and "coeff" (a = ceil_log2(2d+1)).
Circuit build_fourier_b(int n, int d);
/// Same, for an arbitrary coefficient width and index offset (prefix U^offset).
Circuit build_fourier_b(int n, int a, int offset);

/// Qubitized walk operator U_V = R A_V^dag B_V A_V on registers "main" (n)
/// and "be" (ceil_log2(n)). Gates carry Segment tags.
Circuit build_chebyshev_uv(int n);

enum class PowerMode {
  none,       // control every gate of every repetition
  fourier,    // base is a product of phase shifts; powers fold into angles
  chebyshev,  // base is build_chebyshev_uv; prepare controls and select controls elided
};

/// sum_k |k><k| (x) U^k with U = base, via ancilla bit i controlling U^{2^i}.
/// The control register "coeff" (width a) is placed after the base registers.
Circuit build_controlled_powers(const Circuit& base, int a, PowerMode mode);

/// Controlled version of one gate, expressed in the native gate set.
std::vector<Gate> controlled_gate(const Gate& g, int control);

/// Real amplitude loader: maps |0..0> on `qubits` (little-endian) to
/// sum_x amplitudes[x] |x> with a tree of UniformlyControlledRy gates.
void append_amplitude_tree(Circuit& c, std::span<const int> qubits, std::span<const double> amplitudes,
                           Segment segment = Segment::none);

struct CoefficientLoader {
  Circuit prepare;  // A
  Circuit phase;    // C
};

/// Loader circuits over registers coeff_<dim> for every planned dimension.
CoefficientLoader build_coefficient_loader(const LcuPlan& plan);

/// Full preparation circuit A^dag C B_D ... B_1 A, preceded by Hadamards on
/// the main registers. Register layout (least significant first):
/// main_{D-1} .. main_0, coeff_0 .. coeff_{D-1}, be_0 .. be_{D-1}. With this
/// layout the all-zero ancilla block is the leading 2^{sum n} amplitudes,
/// ordered row-major over the grid with dimension 0 slowest.
Circuit assemble_state_prep(const SeriesApprox& s, const GridSpec& g, bool allow_factorization = true);

/// True when assemble_state_prep would emit per-factor circuits.
bool uses_factorized_assembly(const SeriesApprox& s);

}  // namespace mvsp
