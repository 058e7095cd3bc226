#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "mvsp/error.hpp"
#include "mvsp/verification.hpp"

namespace mvsp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::size_t kExactLimit = 5000;

// Unnormalized Gaussian kernel matrix K_ij = exp(-(a_i - b_j)^2 / 2h^2).
Eigen::MatrixXd kernel_matrix(std::span<const double> a, std::span<const double> b, double h) {
  Eigen::MatrixXd k(a.size(), b.size());
  const double inv = 1.0 / (2.0 * h * h);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double d = a[i] - b[j];
      k(i, j) = std::exp(-d * d * inv);
    }
  return k;
}

void check_bandwidths(std::span<const double> h_grid) {
  if (h_grid.empty()) throw std::invalid_argument("bandwidth grid is empty");
  for (std::size_t i = 0; i < h_grid.size(); ++i) {
    if (!(h_grid[i] > 0.0)) throw std::invalid_argument("bandwidths must be positive");
    if (i > 0 && !(h_grid[i] > h_grid[i - 1])) throw std::invalid_argument("bandwidth grid must be ascending");
  }
}

std::vector<double> normalized(std::vector<double> v) {
  double total = 0.0;
  for (double x : v) total += x;
  if (!(total > 0.0) || !std::isfinite(total))
    throw NumericError("kernel density vanishes on the evaluation grid (bandwidth too small)");
  for (double& x : v) x /= total;
  return v;
}

// Separable smoothing of a weighted grid (D = 1 or 2): returns K * counts.
Eigen::MatrixXd smooth_grid(std::span<const double> counts, std::span<const std::vector<double>> axes, double h) {
  if (axes.size() == 1) {
    const Eigen::MatrixXd k = kernel_matrix(axes[0], axes[0], h);
    Eigen::Map<const Eigen::VectorXd> c(counts.data(), static_cast<Eigen::Index>(counts.size()));
    return k * c;
  }
  const auto rows = static_cast<Eigen::Index>(axes[0].size());
  const auto cols = static_cast<Eigen::Index>(axes[1].size());
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> c(counts.data(), rows,
                                                                                               cols);
  const Eigen::MatrixXd k0 = kernel_matrix(axes[0], axes[0], h);
  const Eigen::MatrixXd k1 = kernel_matrix(axes[1], axes[1], h);
  return k0 * c * k1.transpose();
}

void check_grid_data(std::span<const double> counts, std::span<const std::vector<double>> axes) {
  if (axes.empty() || axes.size() > 2) throw std::invalid_argument("grid KDE supports 1 or 2 dimensions");
  std::size_t total = 1;
  for (const auto& a : axes) total *= a.size();
  if (counts.size() != total) throw std::invalid_argument("counts do not match the grid shape");
}

BandwidthSelection finish(std::span<const double> h_grid, std::vector<double> q) {
  BandwidthSelection r;
  r.h_grid.assign(h_grid.begin(), h_grid.end());
  r.q = std::move(q);
  r.q_opt = kNegInf;
  r.degenerate = true;
  for (std::size_t i = 0; i < r.q.size(); ++i) {
    if (std::isfinite(r.q[i])) r.degenerate = false;
    if (r.q[i] > r.q_opt) {
      r.q_opt = r.q[i];
      r.index = i;
    }
  }
  r.h_opt = r.h_grid[r.index];
  r.at_boundary = r.degenerate || r.index == 0 || r.index + 1 == r.h_grid.size();
  if (r.degenerate) warn("kernel density cross-validation: log-probability is -inf for every bandwidth");
  return r;
}

}  // namespace

std::vector<double> log_spaced(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2) throw std::invalid_argument("log_spaced: need 0 < lo < hi, count >= 2");
  std::vector<double> out(count);
  const double step = std::log(hi / lo) / (count - 1);
  for (int i = 0; i < count; ++i) out[i] = lo * std::exp(step * i);
  out.back() = hi;
  return out;
}

std::vector<double> kde_estimate(std::span<const std::vector<double>> points, double h,
                                 std::span<const std::vector<double>> axes) {
  if (!(h > 0.0)) throw std::invalid_argument("kde_estimate: bandwidth must be positive");
  if (points.size() < 2) throw std::invalid_argument("kde_estimate: needs at least 2 points");
  const std::size_t dims = axes.size();
  if (dims == 0) throw std::invalid_argument("kde_estimate: no evaluation axes");
  for (const auto& p : points)
    if (p.size() != dims) throw std::invalid_argument("kde_estimate: point dimension mismatch");

  const auto n = static_cast<Eigen::Index>(points.size());
  if (dims <= 2) {
    // Separable: value(e0, e1) = sum_p E0(e0, p) E1(e1, p).
    std::vector<Eigen::MatrixXd> e;
    for (std::size_t d = 0; d < dims; ++d) {
      std::vector<double> coord(points.size());
      for (std::size_t p = 0; p < points.size(); ++p) coord[p] = points[p][d];
      e.push_back(kernel_matrix(axes[d], coord, h));
    }
    std::vector<double> out;
    if (dims == 1) {
      const Eigen::VectorXd v = e[0] * Eigen::VectorXd::Ones(n);
      out.assign(v.data(), v.data() + v.size());
    } else {
      const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> v = e[0] * e[1].transpose();
      out.assign(v.data(), v.data() + v.size());
    }
    return normalized(std::move(out));
  }

  std::size_t total = 1;
  for (const auto& a : axes) total *= a.size();
  std::vector<double> out(total, 0.0);
  std::vector<std::size_t> idx(dims, 0);
  const double inv = 1.0 / (2.0 * h * h);
  for (std::size_t flat = 0; flat < total; ++flat) {
    double sum = 0.0;
    for (const auto& p : points) {
      double d2 = 0.0;
      for (std::size_t d = 0; d < dims; ++d) {
        const double diff = axes[d][idx[d]] - p[d];
        d2 += diff * diff;
      }
      sum += std::exp(-d2 * inv);
    }
    out[flat] = sum;
    for (int d = static_cast<int>(dims) - 1; d >= 0; --d) {
      if (++idx[d] < axes[d].size()) break;
      idx[d] = 0;
    }
  }
  return normalized(std::move(out));
}

std::vector<double> kde_estimate_grid(std::span<const double> counts, std::span<const std::vector<double>> axes,
                                      double h) {
  if (!(h > 0.0)) throw std::invalid_argument("kde_estimate_grid: bandwidth must be positive");
  check_grid_data(counts, axes);
  const Eigen::MatrixXd s = smooth_grid(counts, axes, h);
  std::vector<double> out(counts.size());
  if (axes.size() == 1) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = s(static_cast<Eigen::Index>(i), 0);
  } else {
    const std::size_t cols = axes[1].size();
    for (std::size_t i = 0; i < axes[0].size(); ++i)
      for (std::size_t j = 0; j < cols; ++j)
        out[i * cols + j] = s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  return normalized(std::move(out));
}

BandwidthSelection kde_cv_bandwidth(std::span<const std::vector<double>> points, std::span<const double> h_grid) {
  check_bandwidths(h_grid);
  if (points.size() < 10) throw std::invalid_argument("kde_cv_bandwidth: needs at least 10 points");
  const std::size_t dims = points[0].size();
  if (dims == 0) throw std::invalid_argument("kde_cv_bandwidth: points have no coordinates");
  for (const auto& p : points)
    if (p.size() != dims) throw std::invalid_argument("kde_cv_bandwidth: point dimension mismatch");

  const std::size_t n = points.size();
  if (n > kExactLimit) {
    if (dims > 2) throw std::invalid_argument("kde_cv_bandwidth: binned path supports D <= 2");
    const std::size_t bins = dims == 1 ? 4096 : 512;
    std::vector<std::vector<double>> axes(dims);
    std::vector<double> lo(dims), width(dims);
    for (std::size_t d = 0; d < dims; ++d) {
      auto [mn, mx] = std::minmax_element(points.begin(), points.end(),
                                          [d](const auto& a, const auto& b) { return a[d] < b[d]; });
      lo[d] = (*mn)[d];
      const double span = std::max((*mx)[d] - lo[d], 1e-12);
      width[d] = span / static_cast<double>(bins - 1);
      axes[d].resize(bins);
      for (std::size_t b = 0; b < bins; ++b) axes[d][b] = lo[d] + width[d] * static_cast<double>(b);
    }
    std::vector<double> counts(dims == 1 ? bins : bins * bins, 0.0);
    for (const auto& p : points) {
      std::size_t flat = 0;
      for (std::size_t d = 0; d < dims; ++d) {
        const auto b = static_cast<std::size_t>(std::lround((p[d] - lo[d]) / width[d]));
        flat = flat * bins + std::min(b, bins - 1);
      }
      counts[flat] += 1.0;
    }
    return kde_cv_bandwidth_grid(counts, axes, h_grid);
  }

  const std::size_t nh = h_grid.size();
  std::vector<double> inv2h2(nh);
  for (std::size_t k = 0; k < nh; ++k) inv2h2[k] = 1.0 / (2.0 * h_grid[k] * h_grid[k]);
  std::vector<double> per_point(n * nh);

#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    std::vector<double> d2;
    d2.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      double s = 0.0;
      for (std::size_t d = 0; d < dims; ++d) {
        const double diff = points[i][d] - points[j][d];
        s += diff * diff;
      }
      d2.push_back(s);
    }
    const double dmin = *std::min_element(d2.begin(), d2.end());
    for (std::size_t k = 0; k < nh; ++k) {
      double sum = 0.0;
      for (double v : d2) sum += std::exp(-(v - dmin) * inv2h2[k]);
      per_point[i * nh + k] = -dmin * inv2h2[k] + std::log(sum);
    }
  }

  const double log_norm_const = std::log(static_cast<double>(n - 1)) + 0.5 * dims * std::log(2.0 * std::numbers::pi);
  std::vector<double> q(nh, 0.0);
  for (std::size_t k = 0; k < nh; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += per_point[i * nh + k];
    q[k] = acc / static_cast<double>(n) - log_norm_const - static_cast<double>(dims) * std::log(h_grid[k]);
  }
  return finish(h_grid, std::move(q));
}

BandwidthSelection kde_cv_bandwidth_grid(std::span<const double> counts, std::span<const std::vector<double>> axes,
                                         std::span<const double> h_grid) {
  check_bandwidths(h_grid);
  check_grid_data(counts, axes);
  double n = 0.0;
  for (double c : counts) {
    if (c < 0.0) throw std::invalid_argument("counts must be nonnegative");
    n += c;
  }
  if (n < 10.0) throw std::invalid_argument("kde_cv_bandwidth_grid: needs at least 10 points");
  const double dims = static_cast<double>(axes.size());
  const double log_norm_const = std::log(n - 1.0) + 0.5 * dims * std::log(2.0 * std::numbers::pi);

  struct Cell {
    std::size_t row, col;
    double count;
  };
  const std::size_t cols = axes.size() == 1 ? 1 : axes[1].size();
  std::vector<Cell> cells;
  for (std::size_t flat = 0; flat < counts.size(); ++flat)
    if (counts[flat] > 0.0) cells.push_back({flat / cols, flat % cols, counts[flat]});

  std::vector<double> q(h_grid.size());
  for (std::size_t k = 0; k < h_grid.size(); ++k) {
    const double h = h_grid[k];
    // Kernel sums over other cells only: with K = I + K' per axis, the
    // off-cell part K'c + cK1'^T + K'cK1'^T has no cancellation.
    Eigen::MatrixXd k0 = kernel_matrix(axes[0], axes[0], h);
    k0.diagonal().setZero();
    Eigen::MatrixXd off;
    if (axes.size() == 1) {
      Eigen::Map<const Eigen::VectorXd> c(counts.data(), static_cast<Eigen::Index>(counts.size()));
      off = k0 * c;
    } else {
      Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> c(
          counts.data(), static_cast<Eigen::Index>(axes[0].size()), static_cast<Eigen::Index>(cols));
      Eigen::MatrixXd k1 = kernel_matrix(axes[1], axes[1], h);
      k1.diagonal().setZero();
      const Eigen::MatrixXd k0c = k0 * c;
      off = k0c + c * k1.transpose() + k0c * k1.transpose();
    }
    const double inv = 1.0 / (2.0 * h * h);
    double acc = 0.0;
    for (const Cell& cell : cells) {
      const double other = off(static_cast<Eigen::Index>(cell.row), static_cast<Eigen::Index>(cell.col));
      double log_loo;
      if (cell.count > 1.0 || other > 1e-200) {
        log_loo = std::log(cell.count - 1.0 + other);
      } else {
        // Underflow: log-sum-exp over the occupied cells.
        double dmin = std::numeric_limits<double>::infinity();
        std::vector<double> d2;
        d2.reserve(cells.size());
        for (const Cell& o : cells) {
          if (&o == &cell) continue;
          double v = (axes[0][o.row] - axes[0][cell.row]) * (axes[0][o.row] - axes[0][cell.row]);
          if (axes.size() == 2) v += (axes[1][o.col] - axes[1][cell.col]) * (axes[1][o.col] - axes[1][cell.col]);
          d2.push_back(v);
          dmin = std::min(dmin, v);
        }
        double sum = 0.0;
        std::size_t i = 0;
        for (const Cell& o : cells) {
          if (&o == &cell) continue;
          sum += o.count * std::exp(-(d2[i++] - dmin) * inv);
        }
        log_loo = sum > 0.0 ? -dmin * inv + std::log(sum) : kNegInf;
      }
      acc += cell.count * log_loo;
    }
    q[k] = acc / n - log_norm_const - dims * std::log(h);
  }
  return finish(h_grid, std::move(q));
}

}  // namespace mvsp
