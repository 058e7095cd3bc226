#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "mvsp/series.hpp"

namespace mvsp {

/// (1/(pi s^4)) (1 - r^2/(2 s^2)) exp(-r^2/(2 s^2)) on [-1,1]^2.
TargetFunction ricker2d(double sigma);

/// Bivariate Student's t with one degree of freedom (bivariate Cauchy).
/// `sigma` is the row-major 2x2 scale matrix.
TargetFunction student_t2d(std::span<const double> mu, std::span<const double> sigma);

/// Bivariate normal density with covariance `sigma` (row-major 2x2).
TargetFunction gaussian2d(std::span<const double> mu, std::span<const double> sigma);

/// Row-major covariance from marginal deviations and correlation.
std::array<double, 4> covariance_2d(double sigma_x, double sigma_y, double rho);

struct Nucleus {
  std::array<double, 3> position{0.5, 0.5, 0.5};
  double weight = 1.0;
};

/// Single electron in a periodic cell with plane-wave modes
/// k in [-N/2, N/2 - 1]^3 (hbar = m = 1).
struct PlaneWaveProblem {
  int modes = 8;  // N, even
  std::vector<Nucleus> nuclei{Nucleus{}};
  int n_states = 2;
};

PlaneWaveProblem planewave_problem_from_json(const nlohmann::json& j);

/// Dense Hermitian matrix H_{k,k'} = -T_{k,k} delta_{k,k'} - U_{k,k'}, with the
/// k = k' potential term set to zero. Row/column order matches the row-major
/// coefficient tensor (k_x slowest).
Eigen::MatrixXcd planewave_hamiltonian(const PlaneWaveProblem& p);

struct PlaneWaveState {
  double energy = 0.0;
  SeriesApprox coeffs;  // Fourier series over [-N/2, N/2-1]^3, unit L2 norm
};

/// Lowest `n_states` eigenpairs, energies ascending. Each eigenvector's
/// largest-magnitude entry is made real-positive.
std::vector<PlaneWaveState> solve_coulomb_planewaves(const PlaneWaveProblem& p);

/// psi(r) = sum_k c_k exp(i pi k.r) at arbitrary points (no domain check).
std::vector<cplx> planewave_state(const SeriesApprox& coeffs, std::span<const std::vector<double>> points);

}  // namespace mvsp
