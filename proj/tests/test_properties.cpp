#include <gtest/gtest.h>

#include "properties.hpp"

using namespace admg;

TEST(Properties, ThousandRandomGraphs) {
  std::mt19937_64 rng(2718);
  testing_support::PropertyTally tally;
  for (int trial = 0; trial < 1000; ++trial) {
    Admg g = testing_support::random_admg(rng, 1, 10);
    auto failure = testing_support::property_failure(g, rng, tally);
    ASSERT_FALSE(failure) << *failure;
  }
  EXPECT_EQ(tally.graphs, 1000u);
  EXPECT_GT(tally.kernel_graphs, 300u);
  EXPECT_GT(tally.fix_orders, 1000u);
}

TEST(Properties, SparseAndDenseExtremes) {
  std::mt19937_64 rng(3141);
  testing_support::PropertyTally tally;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + trial % 10;
    for (auto [pd, pb] : {std::pair{0.0, 1.0}, std::pair{1.0, 0.0}, std::pair{0.9, 0.9}}) {
      Admg g = testing_support::random_admg(rng, n, pd, pb);
      auto failure = testing_support::property_failure(g, rng, tally);
      ASSERT_FALSE(failure) << *failure;
    }
  }
}
