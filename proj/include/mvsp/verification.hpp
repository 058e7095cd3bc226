#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "mvsp/grid.hpp"
#include "mvsp/series.hpp"
#include "mvsp/simulator.hpp"

namespace mvsp {

/// sum_x |f_d(x)|^2 / (N^2 prod 2^{n_i}) over the grid.
double success_probability_analytic(const SeriesApprox& s, const GridSpec& g);

struct AsymptoticEstimate {
  double value = 0.0;         // refined quadrature
  double coarse = 0.0;        // quadrature before refinement
  bool converged = false;     // relative change <= 1e-4
  long long points_per_axis = 0;
};

/// Continuum limit of the success probability: int |f|^2 / (V N^2) over the
/// unit cube (V = 1) or the symmetric cube (V = 2^D). Tensor midpoint rule
/// with at least 1e6 points, then one refinement.
AsymptoticEstimate asymptotic_success_probability(const TargetFunction& f, double coeff_norm, DomainKind domain);

/// Largest |a_i - e^{i phi} b_i| with phi chosen by least squares.
double max_deviation_mod_phase(std::span<const cplx> a, std::span<const cplx> b);

/// Rescales the outcome by sqrt(sum |f|^2) on the grid and returns
/// max |f - g_d| modulo a global phase.
double max_grid_error(const PreparationOutcome& outcome, const TargetFunction& f, const GridSpec& g);

/// max |f - f_d| over a dense tensor sample of the series domain.
double dense_sup_error(const SeriesApprox& s, const TargetFunction& f, int samples_per_axis = 2001);

/// (sum sqrt(p q))^2 / (sum p * sum q).
double classical_fidelity(std::span<const double> p, std::span<const double> q);

struct Moments {
  double mu_x = 0.0;
  double mu_y = 0.0;
  double var_x = 0.0;
  double var_y = 0.0;
  double rho = 0.0;
};

/// Moments of a nonnegative density on a 2D grid (row-major, x slowest);
/// the density is normalized internally.
Moments density_moments(std::span<const double> density, std::span<const double> x, std::span<const double> y);

/// Gaussian KDE evaluated on the tensor grid `axes` (row-major), rescaled
/// to unit sum. `points` holds one coordinate vector per sample.
std::vector<double> kde_estimate(std::span<const std::vector<double>> points, double h,
                                 std::span<const std::vector<double>> axes);

/// Gaussian KDE of weighted grid data (counts on the same grid it is
/// evaluated on); exact via separable convolution. D = 1 or 2.
std::vector<double> kde_estimate_grid(std::span<const double> counts, std::span<const std::vector<double>> axes,
                                      double h);

struct BandwidthSelection {
  std::vector<double> h_grid;
  std::vector<double> q;  // leave-one-out mean log-probability
  double h_opt = 0.0;
  double q_opt = 0.0;
  std::size_t index = 0;
  bool at_boundary = false;  // maximum at either end of h_grid
  bool degenerate = false;   // q = -inf for every candidate
};

/// Leave-one-out cross-validation over `h_grid` (positive, ascending).
/// Exact O(N^2) for N <= 5000; larger data sets are binned onto a grid.
BandwidthSelection kde_cv_bandwidth(std::span<const std::vector<double>> points, std::span<const double> h_grid);

/// Same for grid-binned data; each occupied cell is an exact multi-point.
BandwidthSelection kde_cv_bandwidth_grid(std::span<const double> counts, std::span<const std::vector<double>> axes,
                                         std::span<const double> h_grid);

/// Log-spaced bandwidth candidates.
std::vector<double> log_spaced(double lo, double hi, int count);

nlohmann::json moments_to_json(const Moments& m);
nlohmann::json bandwidth_to_json(const BandwidthSelection& b);

}  // namespace mvsp
