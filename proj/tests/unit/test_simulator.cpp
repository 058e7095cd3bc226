#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "mvsp/error.hpp"
#include "mvsp/simulator.hpp"
#include "mvsp/synthesis.hpp"
#include "mvsp/targets.hpp"
#include "mvsp/verification.hpp"
#include "oracles.hpp"

using namespace mvsp;

namespace {

PreparationOutcome fixed_outcome(std::vector<cplx> amps, std::vector<int> qubits) {
  PreparationOutcome o;
  o.qubits = std::move(qubits);
  o.main_amplitudes = std::move(amps);
  o.p_success = 1.0;
  return o;
}

}  // namespace

TEST(Run, HadamardsGiveUniformAmplitudes) {
  for (int n = 1; n <= 6; ++n) {
    Circuit c;
    c.add_register("q", RegisterRole::main, 0, n);
    for (int i = 0; i < n; ++i) c.add(hadamard(i));
    const StateVector sv = run(c);
    ASSERT_EQ(sv.amps.size(), std::size_t{1} << n);
    for (const cplx& a : sv.amps) EXPECT_NEAR(std::abs(a - std::pow(2.0, -n / 2.0)), 0.0, 1e-15);
  }
}

TEST(Run, PhaseShiftOnZeroIsTrivial) {
  Circuit c;
  c.add_register("q", RegisterRole::main, 0, 1);
  c.add(phase_shift(0, 1.234));
  const StateVector sv = run(c);
  EXPECT_EQ(sv.amps[0], cplx(1.0));
  EXPECT_EQ(sv.amps[1], cplx(0.0));
}

TEST(Run, MatchesDenseUnitaryColumn) {
  std::vector<Circuit> circuits;
  circuits.push_back(build_controlled_powers(build_chebyshev_uv(3), 2, PowerMode::chebyshev));
  circuits.push_back(build_fourier_b(4, 3));
  for (Basis b : {Basis::fourier, Basis::chebyshev})
    circuits.push_back(
        assemble_state_prep(oracle::random_series(b, {3, 2}, 9), GridSpec(convention_for(b), {2, 3}), false));
  for (const Circuit& c : circuits) {
    ASSERT_LE(c.num_qubits(), 12);
    RunOptions opt;
    opt.check_norm = true;
    const StateVector sv = run(c, opt);
    const Eigen::MatrixXcd u = to_unitary(c);
    double worst = 0.0;
    for (std::size_t i = 0; i < sv.amps.size(); ++i) worst = std::max(worst, std::abs(sv.amps[i] - u(i, 0)));
    EXPECT_LT(worst, 1e-12);
    EXPECT_NEAR(sv.norm(), 1.0, 1e-12);
  }
}

TEST(Run, QubitCap) {
  Circuit c;
  c.add_register("q", RegisterRole::main, 0, 5);
  RunOptions opt;
  opt.qubit_cap = 4;
  EXPECT_THROW(run(c, opt), ResourceLimitError);
  opt.qubit_cap = 5;
  EXPECT_NO_THROW(run(c, opt));
}

TEST(Postselect, NoAncillas) {
  Circuit c;
  c.add_register("main_0", RegisterRole::main, 0, 2);
  c.add(hadamard(0));
  c.add(cx(0, 1));
  const StateVector sv = run(c);
  const PreparationOutcome o = postselect_zero_ancillas(sv, c);
  EXPECT_NEAR(o.p_success, 1.0, 1e-15);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(o.main_amplitudes[i] - sv.amps[i]), 0.0, 1e-15);
}

TEST(Postselect, ProjectsAncillaBlock) {
  Circuit c;
  c.add_register("main_0", RegisterRole::main, 0, 1);
  c.add_register("coeff_0", RegisterRole::coeff_ancilla, 0, 1);
  c.add(uniformly_controlled_ry({}, 1, {2 * std::acos(std::sqrt(0.3))}));
  c.add(hadamard(0));
  const PreparationOutcome o = postselect_zero_ancillas(run(c), c);
  EXPECT_NEAR(o.p_success, 0.3, 1e-14);
  EXPECT_NEAR(std::abs(o.main_amplitudes[0] - 1 / std::sqrt(2.0)), 0.0, 1e-14);
}

TEST(Postselect, Degenerate) {
  Circuit c;
  c.add_register("main_0", RegisterRole::main, 0, 1);
  c.add_register("coeff_0", RegisterRole::coeff_ancilla, 0, 1);
  c.add(pauli_x(1));
  EXPECT_THROW(postselect_zero_ancillas(run(c), c), DegeneratePostselectionError);
}

TEST(Postselect, RickerSuccessMatchesAnalytic) {
  const std::vector<int> deg{7, 7};
  const SeriesApprox s = chebyshev_interpolate(ricker2d(0.5), deg);
  const GridSpec g(GridConvention::chebyshev_symmetric, {4, 4});
  const Circuit c = assemble_state_prep(s, g);
  const PreparationOutcome o = postselect_zero_ancillas(run(c), c);
  EXPECT_NEAR(o.p_success, success_probability_analytic(s, g), 1e-10);
  double n2 = 0.0;
  for (const cplx& a : o.main_amplitudes) n2 += std::norm(a);
  EXPECT_NEAR(n2, 1.0, 1e-12);
}

TEST(Sampling, SingleState) {
  std::vector<cplx> amps(8, 0.0);
  amps[5] = cplx(0, 1);
  const auto counts = sample_shots(fixed_outcome(amps, {3}), 1000, 3);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(counts[i], i == 5 ? 1000u : 0u);
}

TEST(Sampling, BinomialBound) {
  const std::vector<cplx> amps(4, 0.5);
  const std::uint64_t shots = 40000;
  const double sigma = std::sqrt(shots * 0.25 * 0.75);
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 1234567ull}) {
    const auto counts = sample_shots(fixed_outcome(amps, {2}), shots, seed);
    std::uint64_t sum = 0;
    for (auto v : counts) {
      EXPECT_LT(std::abs(double(v) - 10000.0), 4 * sigma);
      sum += v;
    }
    EXPECT_EQ(sum, shots);
  }
}

TEST(Sampling, Deterministic) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  std::vector<cplx> amps(16);
  double n = 0;
  for (auto& a : amps) {
    a = cplx(nd(rng), nd(rng));
    n += std::norm(a);
  }
  for (auto& a : amps) a /= std::sqrt(n);
  const auto o = fixed_outcome(amps, {2, 2});
  EXPECT_EQ(sample_shots(o, 5000, 77), sample_shots(o, 5000, 77));
  EXPECT_NE(sample_shots(o, 5000, 77), sample_shots(o, 5000, 78));
}

TEST(Csv, CountsRoundTrip) {
  const GridSpec g(GridConvention::fourier_unit, {2, 3});
  std::vector<std::uint64_t> counts(g.total_points());
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] = (i * 7919) % 13;
  std::stringstream ss;
  write_counts_csv(ss, counts, g);
  EXPECT_EQ(read_counts_csv(ss, g), counts);
}

TEST(Csv, AmplitudeColumns) {
  const GridSpec g(GridConvention::chebyshev_symmetric, {1, 1});
  const auto o = fixed_outcome({0.5, cplx(0, 0.5), -0.5, 0.5}, {1, 1});
  std::ostringstream os;
  write_amplitudes_csv(os, o, g);
  std::istringstream is(os.str());
  std::string header, row;
  std::getline(is, header);
  EXPECT_EQ(header, "i0,i1,x0,x1,re,im,prob");
  std::getline(is, row);
  std::getline(is, row);
  EXPECT_EQ(row.substr(0, 4), "0,1,");
  EXPECT_NE(row.find(",-1,1,"), std::string::npos);
}

TEST(Indexing, UnflattenIsRowMajor) {
  const std::vector<int> q{2, 3};
  EXPECT_EQ(unflatten_index(0, q), (std::vector<int>{0, 0}));
  EXPECT_EQ(unflatten_index(1, q), (std::vector<int>{0, 1}));
  EXPECT_EQ(unflatten_index(8, q), (std::vector<int>{1, 0}));
  EXPECT_EQ(unflatten_index(31, q), (std::vector<int>{3, 7}));
}
