#include "mvsp/verification.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mvsp/error.hpp"

namespace mvsp {

namespace {

// Values of f on the row-major tensor grid spanned by `axes`.
std::vector<cplx> sample_on_grid(const TargetFunction& f, const std::vector<std::vector<double>>& axes) {
  const std::size_t dims = axes.size();
  std::size_t total = 1;
  for (const auto& a : axes) total *= a.size();
  std::vector<cplx> out(total);
  std::vector<std::size_t> idx(dims, 0);
  std::vector<double> x(dims);
  for (std::size_t flat = 0; flat < total; ++flat) {
    for (std::size_t i = 0; i < dims; ++i) x[i] = axes[i][idx[i]];
    out[flat] = f(x);
    for (int i = static_cast<int>(dims) - 1; i >= 0; --i) {
      if (++idx[i] < axes[i].size()) break;
      idx[i] = 0;
    }
  }
  return out;
}

double midpoint_integral(const TargetFunction& f, double lo, double hi, long long m) {
  const int dims = f.arity;
  const double step = (hi - lo) / static_cast<double>(m);
  std::vector<long long> idx(dims, 0);
  std::vector<double> x(dims);
  long long total = 1;
  for (int i = 0; i < dims; ++i) total *= m;
  double sum = 0.0;
  for (long long flat = 0; flat < total; ++flat) {
    for (int i = 0; i < dims; ++i) x[i] = lo + (static_cast<double>(idx[i]) + 0.5) * step;
    sum += std::norm(f(x));
    for (int i = dims - 1; i >= 0; --i) {
      if (++idx[i] < m) break;
      idx[i] = 0;
    }
  }
  return sum * std::pow(step, dims);
}

}  // namespace

double success_probability_analytic(const SeriesApprox& s, const GridSpec& g) {
  if (s.dims() != g.dims()) throw std::invalid_argument("series and grid dimensions differ");
  const double norm = s.norm();
  if (!(norm > 0.0)) throw std::invalid_argument("series has zero norm");
  const auto axes = g.axes();
  const std::vector<cplx> values = evaluate_on_grid(s, axes);
  double sum = 0.0;
  for (const cplx& v : values) sum += std::norm(v);
  return sum / (norm * norm * static_cast<double>(g.total_points()));
}

AsymptoticEstimate asymptotic_success_probability(const TargetFunction& f, double coeff_norm, DomainKind domain) {
  if (!(coeff_norm > 0.0)) throw std::invalid_argument("coefficient norm must be positive");
  if (f.arity < 1 || f.arity > 4) throw std::invalid_argument("asymptotic_success_probability supports 1 <= D <= 4");
  double lo = 0.0;
  double hi = 1.0;
  if (domain == DomainKind::symmetric_cube) {
    lo = -1.0;
  } else if (domain != DomainKind::unit_cube) {
    throw std::invalid_argument("asymptotic_success_probability needs a unit or symmetric cube domain");
  }
  const double volume = std::pow(hi - lo, f.arity);

  long long m = static_cast<long long>(std::ceil(std::pow(1e6, 1.0 / f.arity) - 1e-9));
  AsymptoticEstimate est;
  est.coarse = midpoint_integral(f, lo, hi, m) / (volume * coeff_norm * coeff_norm);
  m *= 2;
  est.value = midpoint_integral(f, lo, hi, m) / (volume * coeff_norm * coeff_norm);
  est.points_per_axis = m;
  const double rel = std::abs(est.value - est.coarse) / std::max(std::abs(est.value), 1e-300);
  est.converged = rel <= 1e-4;
  if (!est.converged) {
    std::ostringstream msg;
    msg << "asymptotic success probability quadrature changed by " << rel << " (relative) on refinement";
    warn(msg.str());
  }
  return est;
}

double max_deviation_mod_phase(std::span<const cplx> a, std::span<const cplx> b) {
  if (a.size() != b.size()) throw std::invalid_argument("max_deviation_mod_phase: length mismatch");
  cplx overlap{};
  for (std::size_t i = 0; i < a.size(); ++i) overlap += std::conj(b[i]) * a[i];
  const cplx phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : cplx{1.0};
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - phase * b[i]));
  return worst;
}

double max_grid_error(const PreparationOutcome& outcome, const TargetFunction& f, const GridSpec& g) {
  if (outcome.qubits != g.qubits) throw std::invalid_argument("outcome does not match grid");
  const std::vector<cplx> target = sample_on_grid(f, g.axes());
  double weight = 0.0;
  for (const cplx& v : target) weight += std::norm(v);
  const double scale = std::sqrt(weight);
  std::vector<cplx> rescaled(outcome.main_amplitudes.size());
  for (std::size_t i = 0; i < rescaled.size(); ++i) rescaled[i] = scale * outcome.main_amplitudes[i];
  return max_deviation_mod_phase(target, rescaled);
}

double dense_sup_error(const SeriesApprox& s, const TargetFunction& f, int samples_per_axis) {
  if (samples_per_axis < 2) throw std::invalid_argument("dense_sup_error needs at least 2 samples per axis");
  const double lo = s.basis() == Basis::chebyshev ? -1.0 : 0.0;
  std::vector<double> axis(samples_per_axis);
  for (int i = 0; i < samples_per_axis; ++i) axis[i] = lo + (1.0 - lo) * i / (samples_per_axis - 1);
  const std::vector<std::vector<double>> axes(s.dims(), axis);
  const std::vector<cplx> approx = evaluate_on_grid(s, axes);
  const std::vector<cplx> exact = sample_on_grid(f, axes);
  double worst = 0.0;
  for (std::size_t i = 0; i < approx.size(); ++i) worst = std::max(worst, std::abs(approx[i] - exact[i]));
  return worst;
}

double classical_fidelity(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("classical_fidelity: length mismatch");
  double sp = 0.0;
  double sq = 0.0;
  double overlap = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < 0.0 || q[i] < 0.0) throw std::invalid_argument("classical_fidelity: negative entry");
    sp += p[i];
    sq += q[i];
    overlap += std::sqrt(p[i] * q[i]);
  }
  if (!(sp > 0.0) || !(sq > 0.0)) throw std::invalid_argument("classical_fidelity: zero-sum input");
  return std::min(1.0, overlap * overlap / (sp * sq));
}

Moments density_moments(std::span<const double> density, std::span<const double> x, std::span<const double> y) {
  if (density.size() != x.size() * y.size()) throw std::invalid_argument("density_moments: shape mismatch");
  double total = 0.0;
  for (double v : density) {
    if (v < 0.0) throw std::invalid_argument("density_moments: negative density");
    total += v;
  }
  if (!(total > 0.0)) throw std::invalid_argument("density_moments: zero-sum density");

  Moments m;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) {
      const double w = density[i * y.size() + j] / total;
      m.mu_x += w * x[i];
      m.mu_y += w * y[j];
    }
  double cov = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) {
      const double w = density[i * y.size() + j] / total;
      const double dx = x[i] - m.mu_x;
      const double dy = y[j] - m.mu_y;
      m.var_x += w * dx * dx;
      m.var_y += w * dy * dy;
      cov += w * dx * dy;
    }
  const double denom = std::sqrt(m.var_x * m.var_y);
  m.rho = denom > 0.0 ? cov / denom : 0.0;
  return m;
}

nlohmann::json moments_to_json(const Moments& m) {
  return {{"mu_x", m.mu_x}, {"mu_y", m.mu_y}, {"var_x", m.var_x}, {"var_y", m.var_y}, {"rho", m.rho}};
}

nlohmann::json bandwidth_to_json(const BandwidthSelection& b) {
  nlohmann::json q = nlohmann::json::array();
  for (double v : b.q) q.push_back(std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr));
  return {{"h_grid", b.h_grid},          {"q", q},
          {"h_opt", b.h_opt},            {"q_opt", std::isfinite(b.q_opt) ? nlohmann::json(b.q_opt) : nlohmann::json()},
          {"at_boundary", b.at_boundary}, {"degenerate", b.degenerate}};
}

}  // namespace mvsp
