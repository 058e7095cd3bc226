#include "mvsp/series.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "fft.hpp"
#include "mvsp/error.hpp"

namespace mvsp {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDomainSlack = 1e-12;

std::size_t product(const std::vector<int>& v) {
  std::size_t p = 1;
  for (int x : v) p *= static_cast<std::size_t>(x);
  return p;
}

void check_degrees(std::span<const int> degrees) {
  if (degrees.empty()) throw std::invalid_argument("series needs at least one dimension");
  for (int d : degrees)
    if (d < 0) throw std::invalid_argument("series degree must be non-negative");
}

// Samples f on the tensor grid formed by per-axis node lists (axis 0 slowest).
std::vector<cplx> sample_tensor(const TargetFunction& f, const std::vector<std::vector<double>>& nodes) {
  const std::size_t dims = nodes.size();
  std::vector<int> shape(dims);
  for (std::size_t i = 0; i < dims; ++i) shape[i] = static_cast<int>(nodes[i].size());
  const std::size_t total = product(shape);

  std::vector<cplx> values(total);
  std::vector<double> x(dims);
  std::vector<int> idx(dims, 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    for (std::size_t i = 0; i < dims; ++i) x[i] = nodes[i][idx[i]];
    const cplx v = f(x);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      std::ostringstream msg;
      msg << "target function is not finite at node (";
      for (std::size_t i = 0; i < dims; ++i) msg << (i ? ", " : "") << x[i];
      msg << ")";
      throw NumericError(msg.str());
    }
    values[flat] = v;
    for (int i = static_cast<int>(dims) - 1; i >= 0; --i) {
      if (++idx[i] < shape[i]) break;
      idx[i] = 0;
    }
  }
  return values;
}

void check_in_domain(double x) {
  if (!(x >= -1.0 - kDomainSlack && x <= 1.0 + kDomainSlack)) {
    std::ostringstream msg;
    msg << "evaluation point " << x << " lies outside [-1, 1]";
    throw std::invalid_argument(msg.str());
  }
}

// Basis function values phi_s(x) for every storage index s of one axis.
std::vector<cplx> basis_values(const SeriesApprox& s, int axis, double x) {
  const int ext = s.extent(axis);
  std::vector<cplx> out(ext);
  if (s.basis() == Basis::chebyshev) {
    double t_prev = 1.0;
    double t_cur = x;
    for (int k = 0; k < ext; ++k) {
      if (k == 0) {
        out[k] = 1.0;
      } else if (k == 1) {
        out[k] = x;
      } else {
        const double t_next = 2.0 * x * t_cur - t_prev;
        t_prev = t_cur;
        t_cur = t_next;
        out[k] = t_cur;
      }
    }
  } else {
    const int lo = s.index_min(axis);
    for (int j = 0; j < ext; ++j) out[j] = std::polar(1.0, kPi * (lo + j) * x);
  }
  return out;
}

}  // namespace

SeriesApprox::SeriesApprox(Basis basis, std::vector<int> degrees) : basis_(basis) {
  check_degrees(degrees);
  for (int d : degrees) {
    if (basis == Basis::fourier) {
      index_min_.push_back(-d);
      extent_.push_back(2 * d + 1);
    } else {
      index_min_.push_back(0);
      extent_.push_back(d + 1);
    }
  }
  coeffs_.assign(product(extent_), cplx{});
}

SeriesApprox SeriesApprox::fourier_range(std::vector<int> index_min, std::vector<int> extent) {
  if (index_min.empty() || index_min.size() != extent.size())
    throw std::invalid_argument("fourier_range: index_min and extent must have equal, nonzero length");
  for (int e : extent)
    if (e < 1) throw std::invalid_argument("fourier_range: extent must be positive");
  SeriesApprox s;
  s.basis_ = Basis::fourier;
  s.index_min_ = std::move(index_min);
  s.extent_ = std::move(extent);
  s.coeffs_.assign(product(s.extent_), cplx{});
  return s;
}

std::vector<int> SeriesApprox::degrees() const {
  std::vector<int> out(dims());
  for (int i = 0; i < dims(); ++i) {
    const int hi = index_min_[i] + extent_[i] - 1;
    out[i] = std::max(std::abs(index_min_[i]), std::abs(hi));
  }
  return out;
}

bool SeriesApprox::has_standard_range() const {
  for (int i = 0; i < dims(); ++i) {
    if (basis_ == Basis::chebyshev) {
      if (index_min_[i] != 0) return false;
    } else if (extent_[i] % 2 == 0 || index_min_[i] != -(extent_[i] - 1) / 2) {
      return false;
    }
  }
  return true;
}

std::size_t SeriesApprox::flat_index(std::span<const int> k) const {
  if (static_cast<int>(k.size()) != dims()) throw std::invalid_argument("series index has wrong arity");
  std::size_t flat = 0;
  for (int i = 0; i < dims(); ++i) {
    const int s = k[i] - index_min_[i];
    if (s < 0 || s >= extent_[i]) throw std::out_of_range("series index out of range");
    flat = flat * static_cast<std::size_t>(extent_[i]) + static_cast<std::size_t>(s);
  }
  return flat;
}

cplx& SeriesApprox::at(std::span<const int> k) { return coeffs_[flat_index(k)]; }
const cplx& SeriesApprox::at(std::span<const int> k) const { return coeffs_[flat_index(k)]; }

double SeriesApprox::norm() const {
  double n = 0.0;
  for (const cplx& c : coeffs_) n += std::abs(c);
  return n;
}

std::vector<double> chebyshev_nodes(int count) {
  if (count < 1) throw std::invalid_argument("chebyshev_nodes: count must be >= 1");
  std::vector<double> x(count);
  for (int m = 0; m < count; ++m) x[m] = std::cos(kPi * (2.0 * m + 1.0) / (2.0 * count));
  // cos(pi/2) is 6e-17 in floating point; the middle root is exactly 0.
  if (count % 2 == 1) x[count / 2] = 0.0;
  return x;
}

SeriesApprox chebyshev_interpolate(const TargetFunction& f, std::span<const int> degrees) {
  check_degrees(degrees);
  if (f.arity != static_cast<int>(degrees.size()))
    throw std::invalid_argument("chebyshev_interpolate: arity does not match number of degrees");

  std::vector<std::vector<double>> nodes;
  for (int d : degrees) nodes.push_back(chebyshev_nodes(d + 1));
  std::vector<cplx> tensor = sample_tensor(f, nodes);

  std::vector<int> shape(degrees.begin(), degrees.end());
  for (int& s : shape) s += 1;
  for (int axis = 0; axis < static_cast<int>(shape.size()); ++axis) {
    tensor = detail::transform_axis(tensor, shape, axis, [](std::span<const cplx> line) {
      std::vector<cplx> c = detail::dct2(line);
      const double scale = 1.0 / static_cast<double>(line.size());
      for (cplx& v : c) v *= scale;
      c[0] *= 0.5;
      return c;
    });
  }

  SeriesApprox s(Basis::chebyshev, std::vector<int>(degrees.begin(), degrees.end()));
  std::copy(tensor.begin(), tensor.end(), s.coeffs().begin());
  return s;
}

SeriesApprox fourier_interpolate(const TargetFunction& f, std::span<const int> degrees) {
  check_degrees(degrees);
  if (f.arity != static_cast<int>(degrees.size()))
    throw std::invalid_argument("fourier_interpolate: arity does not match number of degrees");

  std::vector<std::vector<double>> nodes;
  for (int d : degrees) {
    const int m_count = 2 * d + 1;
    std::vector<double> x(m_count);
    for (int m = 0; m < m_count; ++m) {
      x[m] = 2.0 * m / m_count;
      if (x[m] > 1.0) x[m] -= 2.0;
    }
    nodes.push_back(std::move(x));
  }
  std::vector<cplx> tensor = sample_tensor(f, nodes);

  std::vector<int> shape;
  for (int d : degrees) shape.push_back(2 * d + 1);
  for (int axis = 0; axis < static_cast<int>(shape.size()); ++axis) {
    tensor = detail::transform_axis(tensor, shape, axis, [](std::span<const cplx> line) {
      const int m_count = static_cast<int>(line.size());
      const int d = (m_count - 1) / 2;
      std::vector<cplx> y(line.begin(), line.end());
      detail::fft_forward(y);
      std::vector<cplx> c(m_count);
      for (int s = 0; s < m_count; ++s) {
        const int k = s - d;
        c[s] = y[((k % m_count) + m_count) % m_count] / static_cast<double>(m_count);
      }
      return c;
    });
  }

  SeriesApprox s(Basis::fourier, std::vector<int>(degrees.begin(), degrees.end()));
  std::copy(tensor.begin(), tensor.end(), s.coeffs().begin());
  return s;
}

TargetFunction mirror_extend(TargetFunction f) {
  TargetFunction g;
  g.arity = f.arity;
  g.domain = DomainKind::periodic;
  g.evaluate = [inner = std::move(f.evaluate)](std::span<const double> x) {
    std::vector<double> y(x.begin(), x.end());
    for (double& v : y) {
      double r = std::fmod(v + 1.0, 2.0);
      if (r < 0.0) r += 2.0;
      v = std::abs(r - 1.0);
    }
    return inner(y);
  };
  return g;
}

SeriesApprox gaussian_fourier_coeffs(std::span<const double> mu, std::span<const double> sigma,
                                     int degree) {
  if (mu.size() != 2 || sigma.size() != 4)
    throw std::invalid_argument("gaussian_fourier_coeffs: expects a 2-vector mean and a 2x2 covariance");
  if (degree < 0) throw std::invalid_argument("gaussian_fourier_coeffs: degree must be non-negative");
  const double sxx = sigma[0];
  const double sxy = sigma[1];
  const double syy = sigma[3];
  if (std::abs(sigma[1] - sigma[2]) > 1e-14 * std::max(std::abs(sxx), std::abs(syy)) || !(sxx > 0.0) ||
      !(sxx * syy - sxy * sxy > 0.0))
    throw std::invalid_argument("gaussian_fourier_coeffs: covariance is not symmetric positive-definite");

  // Marginal tail mass is a lower bound on the mass outside the unit square.
  auto tail = [](double m, double sd) {
    return 0.5 * std::erfc(m / (sd * std::numbers::sqrt2)) + 0.5 * std::erfc((1.0 - m) / (sd * std::numbers::sqrt2));
  };
  const double outside = std::max(tail(mu[0], std::sqrt(sxx)), tail(mu[1], std::sqrt(syy)));
  if (outside > 1e-4) {
    std::ostringstream msg;
    msg << "Gaussian places at least " << outside
        << " of its mass outside [0,1]^2; characteristic-function coefficients neglect it";
    warn(msg.str());
  }

  SeriesApprox s(Basis::fourier, {degree, degree});
  for (int k = -degree; k <= degree; ++k) {
    for (int l = -degree; l <= degree; ++l) {
      const double wx = -kPi * k;
      const double wy = -kPi * l;
      const double quad = sxx * wx * wx + 2.0 * sxy * wx * wy + syy * wy * wy;
      const double phase = mu[0] * wx + mu[1] * wy;
      s.at({k, l}) = 0.25 * std::exp(-0.5 * quad) * std::polar(1.0, phase);
    }
  }
  return s;
}

std::vector<cplx> evaluate_series(const SeriesApprox& s, std::span<const std::vector<double>> points) {
  const int dims = s.dims();
  std::vector<cplx> out;
  out.reserve(points.size());
  std::vector<cplx> work;
  for (const auto& p : points) {
    if (static_cast<int>(p.size()) != dims)
      throw std::invalid_argument("evaluate_series: point has wrong dimension");
    for (double x : p) check_in_domain(x);
    work.assign(s.coeffs().begin(), s.coeffs().end());
    std::size_t len = work.size();
    for (int axis = dims - 1; axis >= 0; --axis) {
      const std::vector<cplx> phi = basis_values(s, axis, p[axis]);
      const std::size_t ext = phi.size();
      const std::size_t outer = len / ext;
      for (std::size_t o = 0; o < outer; ++o) {
        cplx acc{};
        for (std::size_t j = 0; j < ext; ++j) acc += work[o * ext + j] * phi[j];
        work[o] = acc;
      }
      len = outer;
    }
    out.push_back(work[0]);
  }
  return out;
}

std::vector<cplx> evaluate_on_grid(const SeriesApprox& s, std::span<const std::vector<double>> axes,
                                   bool check_domain) {
  if (static_cast<int>(axes.size()) != s.dims())
    throw std::invalid_argument("evaluate_on_grid: axis count does not match series dimension");
  std::vector<cplx> tensor(s.coeffs().begin(), s.coeffs().end());
  std::vector<int> shape = s.extents();
  for (int axis = 0; axis < s.dims(); ++axis) {
    const auto& xs = axes[axis];
    if (check_domain)
      for (double x : xs) check_in_domain(x);
    std::vector<std::vector<cplx>> phi;
    phi.reserve(xs.size());
    for (double x : xs) phi.push_back(basis_values(s, axis, x));
    tensor = detail::transform_axis(tensor, shape, axis, [&phi](std::span<const cplx> line) {
      std::vector<cplx> r(phi.size());
      for (std::size_t q = 0; q < phi.size(); ++q) {
        cplx acc{};
        for (std::size_t j = 0; j < line.size(); ++j) acc += line[j] * phi[q][j];
        r[q] = acc;
      }
      return r;
    });
  }
  return tensor;
}

SeriesFactorization factorize_series(const SeriesApprox& s, double tol) {
  SeriesFactorization result;
  if (s.dims() != 2) return result;
  const int rows = s.extent(0);
  const int cols = s.extent(1);
  Eigen::MatrixXcd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = s.coeffs()[static_cast<std::size_t>(r) * cols + c];

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) throw std::invalid_argument("factorize_series: all coefficients are zero");
  result.singular_ratio = sv.size() > 1 ? sv(1) / sv(0) : 0.0;
  result.separable = result.singular_ratio < tol;
  if (!result.separable) return result;

  const double root = std::sqrt(sv(0));
  auto make_factor = [&](int axis) {
    if (s.basis() == Basis::chebyshev) return SeriesApprox(Basis::chebyshev, {s.extent(axis) - 1});
    return SeriesApprox::fourier_range({s.index_min(axis)}, {s.extent(axis)});
  };
  SeriesApprox fx = make_factor(0);
  SeriesApprox fy = make_factor(1);
  for (int r = 0; r < rows; ++r) fx.coeffs()[r] = root * svd.matrixU()(r, 0);
  for (int c = 0; c < cols; ++c) fy.coeffs()[c] = root * std::conj(svd.matrixV()(c, 0));
  result.factors = {std::move(fx), std::move(fy)};
  return result;
}

std::string to_string(Basis b) { return b == Basis::fourier ? "fourier" : "chebyshev"; }

Basis basis_from_string(const std::string& s) {
  if (s == "fourier") return Basis::fourier;
  if (s == "chebyshev") return Basis::chebyshev;
  throw std::invalid_argument("unknown basis '" + s + "'");
}

nlohmann::json series_to_json(const SeriesApprox& s) {
  nlohmann::json j;
  j["basis"] = to_string(s.basis());
  j["D"] = s.dims();
  j["degrees"] = s.degrees();
  if (!s.has_standard_range()) {
    j["index_min"] = s.index_mins();
    j["extent"] = s.extents();
  }
  nlohmann::json coeffs = nlohmann::json::array();
  for (const cplx& c : s.coeffs()) coeffs.push_back({c.real(), c.imag()});
  j["coeffs"] = std::move(coeffs);
  return j;
}

SeriesApprox series_from_json(const nlohmann::json& j) {
  try {
    const Basis basis = basis_from_string(j.at("basis").get<std::string>());
    const int dims = j.at("D").get<int>();
    SeriesApprox s;
    if (j.contains("index_min")) {
      if (basis != Basis::fourier) throw std::invalid_argument("index_min is only valid for Fourier series");
      s = SeriesApprox::fourier_range(j.at("index_min").get<std::vector<int>>(),
                                      j.at("extent").get<std::vector<int>>());
    } else {
      s = SeriesApprox(basis, j.at("degrees").get<std::vector<int>>());
    }
    if (s.dims() != dims) throw std::invalid_argument("D does not match the degree list");
    const auto& coeffs = j.at("coeffs");
    if (coeffs.size() != s.size())
      throw std::invalid_argument("coefficient count " + std::to_string(coeffs.size()) + " does not match shape (" +
                                  std::to_string(s.size()) + ")");
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto& pair = coeffs[i];
      if (!pair.is_array() || pair.size() != 2) throw std::invalid_argument("coefficients must be [re, im] pairs");
      s.coeffs()[i] = cplx(pair[0].get<double>(), pair[1].get<double>());
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed series JSON: ") + e.what());
  }
}

}  // namespace mvsp
