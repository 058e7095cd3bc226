#include <complex>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "mvsp/error.hpp"
#include "mvsp/targets.hpp"

namespace mvsp {

namespace {

constexpr double kPi = std::numbers::pi;

struct Mode {
  int x, y, z;
};

std::vector<Mode> enumerate_modes(int n) {
  std::vector<Mode> modes;
  modes.reserve(static_cast<std::size_t>(n) * n * n);
  const int lo = -n / 2;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int z = 0; z < n; ++z) modes.push_back({lo + x, lo + y, lo + z});
  return modes;
}

void validate(const PlaneWaveProblem& p) {
  if (p.modes < 2 || p.modes % 2 != 0) throw std::invalid_argument("plane-wave mode count N must be even and >= 2");
  if (p.modes > 16) throw ResourceLimitError("plane-wave mode count N > 16 is beyond the dense eigensolver limit");
  if (p.nuclei.empty()) throw std::invalid_argument("plane-wave problem needs at least one nucleus");
  for (const Nucleus& nu : p.nuclei) {
    for (double r : nu.position)
      if (!std::isfinite(r)) throw std::invalid_argument("nucleus position is not finite");
    if (!std::isfinite(nu.weight)) throw std::invalid_argument("nucleus weight is not finite");
  }
  const int dim = p.modes * p.modes * p.modes;
  if (p.n_states < 1 || p.n_states > dim) throw std::invalid_argument("n_states must lie in [1, N^3]");
}

}  // namespace

PlaneWaveProblem planewave_problem_from_json(const nlohmann::json& j) {
  try {
    PlaneWaveProblem p;
    p.modes = j.at("N").get<int>();
    p.n_states = j.value("n_states", 2);
    if (j.contains("nuclei")) {
      p.nuclei.clear();
      for (const auto& nj : j.at("nuclei")) {
        Nucleus nu;
        const auto r = nj.at("R").get<std::vector<double>>();
        if (r.size() != 3) throw std::invalid_argument("nucleus position R must have 3 components");
        nu.position = {r[0], r[1], r[2]};
        nu.weight = nj.value("w", 1.0);
        p.nuclei.push_back(nu);
      }
    }
    validate(p);
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed plane-wave problem: ") + e.what());
  }
}

Eigen::MatrixXcd planewave_hamiltonian(const PlaneWaveProblem& p) {
  validate(p);
  const std::vector<Mode> modes = enumerate_modes(p.modes);
  const auto dim = static_cast<Eigen::Index>(modes.size());
  Eigen::MatrixXcd h(dim, dim);

#pragma omp parallel for schedule(static)
  for (Eigen::Index r = 0; r < dim; ++r) {
    const Mode& k = modes[r];
    for (Eigen::Index c = 0; c < dim; ++c) {
      const Mode& kp = modes[c];
      if (r == c) {
        const double k2 = static_cast<double>(k.x * k.x + k.y * k.y + k.z * k.z);
        h(r, c) = -0.5 * kPi * kPi * k2;
        continue;
      }
      const int dx = kp.x - k.x;
      const int dy = kp.y - k.y;
      const int dz = kp.z - k.z;
      const double d2 = static_cast<double>(dx * dx + dy * dy + dz * dz);
      cplx u{};
      for (const Nucleus& nu : p.nuclei) {
        const double phase = kPi * (dx * nu.position[0] + dy * nu.position[1] + dz * nu.position[2]);
        u += nu.weight * std::polar(1.0, phase);
      }
      h(r, c) = -(4.0 / kPi) * u / d2;
    }
  }
  return h;
}

namespace {

// With a single nucleus, H = Phi H_r Phi^dag with Phi = diag(exp(-i pi k.R)) and
// H_r real symmetric, so the real solver applies.
Eigen::MatrixXd single_nucleus_real_hamiltonian(const PlaneWaveProblem& p) {
  const std::vector<Mode> modes = enumerate_modes(p.modes);
  const auto dim = static_cast<Eigen::Index>(modes.size());
  const double w = p.nuclei.front().weight;
  Eigen::MatrixXd h(dim, dim);
#pragma omp parallel for schedule(static)
  for (Eigen::Index r = 0; r < dim; ++r) {
    const Mode& k = modes[r];
    for (Eigen::Index c = 0; c < dim; ++c) {
      const Mode& kp = modes[c];
      const int dx = kp.x - k.x;
      const int dy = kp.y - k.y;
      const int dz = kp.z - k.z;
      const int d2 = dx * dx + dy * dy + dz * dz;
      h(r, c) = d2 == 0 ? -0.5 * kPi * kPi * (k.x * k.x + k.y * k.y + k.z * k.z) : -(4.0 / kPi) * w / d2;
    }
  }
  return h;
}

}  // namespace

std::vector<PlaneWaveState> solve_coulomb_planewaves(const PlaneWaveProblem& p) {
  validate(p);
  const lapack_int n = static_cast<lapack_int>(p.modes) * p.modes * p.modes;
  const lapack_int want = p.n_states;

  std::vector<double> w(static_cast<std::size_t>(n));
  Eigen::MatrixXcd z(n, want);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(want));
  lapack_int found = 0;
  lapack_int info = 0;
  if (p.nuclei.size() == 1) {
    Eigen::MatrixXd h = single_nucleus_real_hamiltonian(p);
    Eigen::MatrixXd zr(n, want);
    info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'U', n, h.data(), n, 0.0, 0.0, 1, want, 0.0, &found, w.data(),
                          zr.data(), n, support.data());
    const std::vector<Mode> modes = enumerate_modes(p.modes);
    const auto& r = p.nuclei.front().position;
    for (lapack_int i = 0; i < n; ++i) {
      const Mode& k = modes[static_cast<std::size_t>(i)];
      const cplx phi = std::polar(1.0, -kPi * (k.x * r[0] + k.y * r[1] + k.z * r[2]));
      for (lapack_int s = 0; s < want; ++s) z(i, s) = phi * zr(i, s);
    }
  } else {
    Eigen::MatrixXcd h = planewave_hamiltonian(p);
    info = LAPACKE_zheevr(LAPACK_COL_MAJOR, 'V', 'I', 'U', n, h.data(), n, 0.0, 0.0, 1, want, 0.0, &found, w.data(),
                          z.data(), n, support.data());
  }
  if (info != 0) throw NumericError("symmetric eigensolver failed with info = " + std::to_string(info));
  if (found != want) throw NumericError("eigensolver returned " + std::to_string(found) + " eigenpairs");

  std::vector<PlaneWaveState> states;
  for (lapack_int s = 0; s < found; ++s) {
    Eigen::VectorXcd v = z.col(s);
    Eigen::Index peak = 0;
    v.cwiseAbs().maxCoeff(&peak);
    v *= std::conj(v(peak)) / std::abs(v(peak));
    v /= v.norm();

    PlaneWaveState st;
    st.energy = w[s];
    st.coeffs = SeriesApprox::fourier_range({-p.modes / 2, -p.modes / 2, -p.modes / 2},
                                            {p.modes, p.modes, p.modes});
    for (Eigen::Index i = 0; i < v.size(); ++i) st.coeffs.coeffs()[static_cast<std::size_t>(i)] = v(i);
    states.push_back(std::move(st));
  }
  return states;
}

std::vector<cplx> planewave_state(const SeriesApprox& coeffs, std::span<const std::vector<double>> points) {
  if (coeffs.basis() != Basis::fourier) throw std::invalid_argument("planewave_state expects a Fourier series");
  const int dims = coeffs.dims();
  std::vector<cplx> out;
  out.reserve(points.size());
  std::vector<std::vector<cplx>> phi(dims);
  std::vector<cplx> work;
  for (const auto& r : points) {
    if (static_cast<int>(r.size()) != dims) throw std::invalid_argument("planewave_state: point dimension mismatch");
    for (int d = 0; d < dims; ++d) {
      phi[d].resize(coeffs.extent(d));
      for (int j = 0; j < coeffs.extent(d); ++j) phi[d][j] = std::polar(1.0, kPi * (coeffs.index_min(d) + j) * r[d]);
    }
    work.assign(coeffs.coeffs().begin(), coeffs.coeffs().end());
    std::size_t len = work.size();
    for (int d = dims - 1; d >= 0; --d) {
      const std::size_t ext = phi[d].size();
      const std::size_t outer = len / ext;
      for (std::size_t o = 0; o < outer; ++o) {
        cplx acc{};
        for (std::size_t j = 0; j < ext; ++j) acc += work[o * ext + j] * phi[d][j];
        work[o] = acc;
      }
      len = outer;
    }
    out.push_back(work[0]);
  }
  return out;
}

}  // namespace mvsp
