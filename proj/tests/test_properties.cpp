#include <gtest/gtest.h>

#include "property_checks.hpp"

namespace {
constexpr int kSamples = 1000;
}

TEST(Properties, MultiplicityConservation) {
  const auto t = props::multiplicity(kSamples, 101);
  EXPECT_EQ(t.failures, 0);
  EXPECT_EQ(t.checked, kSamples);
}

TEST(Properties, ForwardBackwardDuality) {
  const auto t = props::duality(kSamples, 202);
  EXPECT_EQ(t.failures, 0);
  EXPECT_GT(t.checked, kSamples);
}

TEST(Properties, ChainRuleAgainstFiniteDifferences) {
  const auto t = props::chain_rule(kSamples, 303);
  EXPECT_EQ(t.failures, 0);
  EXPECT_GT(t.checked, kSamples / 2);
}

TEST(Properties, ChartIndependence) {
  const auto t = props::chart_independence(kSamples, 404);
  EXPECT_EQ(t.failures, 0);
  EXPECT_GT(t.checked, 1000);
}

TEST(Properties, RationalInverseDerivativeIdentity) {
  const auto t = props::inverse_identity(kSamples, 606);
  EXPECT_EQ(t.failures, 0);
  EXPECT_GT(t.checked, kSamples);
}

TEST(Properties, DifferentSeedsAlsoClean) {
  for (std::uint64_t seed : {7u, 8u, 9u}) {
    EXPECT_EQ(props::multiplicity(300, seed).failures, 0);
    EXPECT_EQ(props::duality(300, seed).failures, 0);
    EXPECT_EQ(props::chain_rule(300, seed).failures, 0);
    EXPECT_EQ(props::chart_independence(300, seed).failures, 0);
  }
}
