#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace mvsp {

using cplx = std::complex<double>;

enum class Basis { fourier, chebyshev };

/// Domain a target function is naturally defined on.
enum class DomainKind {
  unit_cube,       // [0,1]^D
  symmetric_cube,  // [-1,1]^D
  periodic,        // R^D, period 2 in every variable
};

/// A deterministic map from R^D to C.
struct TargetFunction {
  int arity = 1;
  DomainKind domain = DomainKind::symmetric_cube;
  std::function<cplx(std::span<const double>)> evaluate;

  cplx operator()(std::span<const double> x) const { return evaluate(x); }
};

/// A finite Fourier or Chebyshev series in D variables.
///
/// Coefficients are a dense row-major tensor (dimension 1 slowest). Along each
/// dimension the storage index s maps to the series index k = index_min + s.
/// The standard Fourier range is k in [-d, d]; the Chebyshev range is [0, d].
class SeriesApprox {
 public:
  SeriesApprox() = default;

  /// Zero-initialized series with the standard index range for `basis`.
  SeriesApprox(Basis basis, std::vector<int> degrees);

  /// Fourier series over the index range [index_min[i], index_min[i] + extent[i] - 1].
  static SeriesApprox fourier_range(std::vector<int> index_min, std::vector<int> extent);

  Basis basis() const { return basis_; }
  int dims() const { return static_cast<int>(index_min_.size()); }

  /// Largest |k| along each dimension.
  std::vector<int> degrees() const;
  int index_min(int dim) const { return index_min_[dim]; }
  int extent(int dim) const { return extent_[dim]; }
  const std::vector<int>& extents() const { return extent_; }
  const std::vector<int>& index_mins() const { return index_min_; }

  std::size_t size() const { return coeffs_.size(); }
  std::span<cplx> coeffs() { return coeffs_; }
  std::span<const cplx> coeffs() const { return coeffs_; }

  /// Coefficient at series multi-index k (not the storage index).
  cplx& at(std::span<const int> k);
  const cplx& at(std::span<const int> k) const;
  cplx& at(std::initializer_list<int> k) { return at(std::span<const int>(k.begin(), k.size())); }
  const cplx& at(std::initializer_list<int> k) const {
    return at(std::span<const int>(k.begin(), k.size()));
  }

  /// LCU normalization: sum of coefficient magnitudes.
  double norm() const;

  bool has_standard_range() const;

 private:
  std::size_t flat_index(std::span<const int> k) const;

  Basis basis_ = Basis::fourier;
  std::vector<int> index_min_;
  std::vector<int> extent_;
  std::vector<cplx> coeffs_;
};

/// Roots of T_N in decreasing order: x_m = cos(pi (2m+1) / 2N).
std::vector<double> chebyshev_nodes(int count);

/// Chebyshev interpolant matching f on the tensor grid of Chebyshev roots of
/// degrees d_i + 1. Uses a type-II DCT per axis (via FFT).
SeriesApprox chebyshev_interpolate(const TargetFunction& f, std::span<const int> degrees);

/// Trigonometric interpolant of a 2-periodic f on the equispaced nodes
/// x_m = 2m / (2d+1), computed with a D-dimensional FFT.
SeriesApprox fourier_interpolate(const TargetFunction& f, std::span<const int> degrees);

/// Even, 2-periodic extension of a function given on [0,1]^D.
TargetFunction mirror_extend(TargetFunction f);

/// Fourier coefficients of a bivariate Gaussian on [0,1]^2 from its
/// characteristic function (zero extension to [-1,1]^2, tails neglected).
/// `sigma` is row-major 2x2. Warns when more than 1e-4 of the mass lies
/// outside the unit square.
SeriesApprox gaussian_fourier_coeffs(std::span<const double> mu, std::span<const double> sigma,
                                     int degree);

/// Series values at arbitrary points (each point has dims() coordinates).
std::vector<cplx> evaluate_series(const SeriesApprox& s, std::span<const std::vector<double>> points);

/// Series values on a tensor grid given by per-axis coordinates; output is
/// row-major with axis 0 slowest. Evaluated by separable contraction.
std::vector<cplx> evaluate_on_grid(const SeriesApprox& s, std::span<const std::vector<double>> axes,
                                   bool check_domain = true);

/// Rank-1 split of a 2D coefficient tensor, if sigma_2 / sigma_1 < tol.
struct SeriesFactorization {
  bool separable = false;
  double singular_ratio = 1.0;
  std::vector<SeriesApprox> factors;  // one univariate series per dimension
};
SeriesFactorization factorize_series(const SeriesApprox& s, double tol = 1e-12);

nlohmann::json series_to_json(const SeriesApprox& s);
SeriesApprox series_from_json(const nlohmann::json& j);

std::string to_string(Basis b);
Basis basis_from_string(const std::string& s);

}  // namespace mvsp
