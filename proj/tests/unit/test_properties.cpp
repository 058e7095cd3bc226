#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace mvsp;

namespace {

void expect_pass(const props::Check& c) {
  EXPECT_TRUE(c.pass()) << c.name << ": worst " << c.worst << (c.exact ? " mismatches" : "") << ", tolerance "
                        << c.tolerance;
}

}  // namespace

TEST(Properties, LcuBlockIdentity) { expect_pass(props::lcu_block_identity()); }
TEST(Properties, QubitizationPowerLaw) { expect_pass(props::qubitization_power_law()); }
TEST(Properties, ControlElisionSoundness) { expect_pass(props::control_elision_soundness()); }
TEST(Properties, NormPreservation) { expect_pass(props::norm_preservation()); }
TEST(Properties, GateCountFormulas) { expect_pass(props::gate_count_formulas()); }
TEST(Properties, InterpolationNodes) { expect_pass(props::interpolation_nodes()); }
