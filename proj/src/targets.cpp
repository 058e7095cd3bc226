#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mvsp/targets.hpp"

namespace mvsp {

namespace {

constexpr double kPi = std::numbers::pi;

struct Inverse2x2 {
  double a, b, d;  // symmetric inverse entries [[a, b], [b, d]]
  double det;
};

Inverse2x2 spd_inverse(std::span<const double> mu, std::span<const double> sigma, const char* who) {
  if (mu.size() != 2 || sigma.size() != 4)
    throw std::invalid_argument(std::string(who) + ": expects a 2-vector and a 2x2 matrix");
  if (!std::isfinite(mu[0]) || !std::isfinite(mu[1]))
    throw std::invalid_argument(std::string(who) + ": location is not finite");
  const double det = sigma[0] * sigma[3] - sigma[1] * sigma[2];
  if (sigma[1] != sigma[2] || !(sigma[0] > 0.0) || !(det > 0.0))
    throw std::invalid_argument(std::string(who) + ": matrix is not symmetric positive-definite");
  return {sigma[3] / det, -sigma[1] / det, sigma[0] / det, det};
}

}  // namespace

TargetFunction ricker2d(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("ricker2d: sigma must be positive");
  TargetFunction f;
  f.arity = 2;
  f.domain = DomainKind::symmetric_cube;
  const double s2 = sigma * sigma;
  const double pref = 1.0 / (kPi * s2 * s2);
  f.evaluate = [s2, pref](std::span<const double> x) {
    const double u = (x[0] * x[0] + x[1] * x[1]) / (2.0 * s2);
    return cplx(pref * (1.0 - u) * std::exp(-u));
  };
  return f;
}

TargetFunction student_t2d(std::span<const double> mu, std::span<const double> sigma) {
  const Inverse2x2 inv = spd_inverse(mu, sigma, "student_t2d");
  TargetFunction f;
  f.arity = 2;
  f.domain = DomainKind::unit_cube;
  const double pref = 1.0 / (2.0 * kPi * std::sqrt(inv.det));
  f.evaluate = [inv, pref, m0 = mu[0], m1 = mu[1]](std::span<const double> x) {
    const double dx = x[0] - m0;
    const double dy = x[1] - m1;
    const double q = inv.a * dx * dx + 2.0 * inv.b * dx * dy + inv.d * dy * dy;
    return cplx(pref * std::pow(1.0 + q, -1.5));
  };
  return f;
}

TargetFunction gaussian2d(std::span<const double> mu, std::span<const double> sigma) {
  const Inverse2x2 inv = spd_inverse(mu, sigma, "gaussian2d");
  TargetFunction f;
  f.arity = 2;
  f.domain = DomainKind::unit_cube;
  const double pref = 1.0 / (2.0 * kPi * std::sqrt(inv.det));
  f.evaluate = [inv, pref, m0 = mu[0], m1 = mu[1]](std::span<const double> x) {
    const double dx = x[0] - m0;
    const double dy = x[1] - m1;
    const double q = inv.a * dx * dx + 2.0 * inv.b * dx * dy + inv.d * dy * dy;
    return cplx(pref * std::exp(-0.5 * q));
  };
  return f;
}

std::array<double, 4> covariance_2d(double sigma_x, double sigma_y, double rho) {
  if (!(sigma_x > 0.0) || !(sigma_y > 0.0) || !(rho > -1.0 && rho < 1.0))
    throw std::invalid_argument("covariance_2d: need sigma > 0 and |rho| < 1");
  const double off = rho * sigma_x * sigma_y;
  return {sigma_x * sigma_x, off, off, sigma_y * sigma_y};
}

}  // namespace mvsp
