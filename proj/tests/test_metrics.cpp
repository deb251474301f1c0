#include <gtest/gtest.h>

#include <cmath>

#include "aal/metrics.hpp"

using namespace aal;

namespace {

BudgetCurve doubling(double e, std::size_t points = 11) {
  BudgetCurve c;
  for (std::size_t q = 0; q < points; ++q) c.push_back({10u << q, 10u << q, e});
  return c;
}

// Two-point curve whose AUC is exactly a.
BudgetCurve flat(double a) { return {{10, 10, a}, {20, 20, a}}; }

// Two datasets, three permutations, baseline AUC 0.4 everywhere and an
// algorithm "x" with two settings.
ResultSet fixture() {
  ResultSet r;
  const std::map<std::pair<std::string, std::string>, std::vector<double>> aucs{
      {{"A", "p1"}, {0.2, 0.3, 0.1}},
      {{"A", "p2"}, {0.4, 0.36, 0.38}},
      {{"B", "p1"}, {0.44, 0.48, 0.4}},
      {{"B", "p2"}, {0.2, 0.28, 0.24}},
  };
  for (const auto& [dp, v] : aucs)
    for (std::size_t j = 1; j <= 3; ++j) {
      r[{"passive", "lr=0.4", dp.first, j}] = flat(0.4);
      r[{"x", dp.second, dp.first, j}] = flat(v[j - 1]);
    }
  return r;
}

}  // namespace

TEST(Auc, ConstantErrorOnDoublingQueries) {
  for (double e : {0.0, 0.125, 0.3, 0.5, 0.1, 0.07, 0.4321}) EXPECT_EQ(auc(doubling(e)), 10.0 * e) << e;
  for (int i = 1; i < 500; ++i) {
    const double e = i / 997.0;
    ASSERT_EQ(auc(doubling(e)), 10.0 * e) << e;
  }
}

TEST(Auc, HandTrapezoids) {
  const BudgetCurve c{{10, 10, 0.4}, {20, 20, 0.2}, {40, 40, 0.2}};
  EXPECT_NEAR(auc(c), 0.5, 1e-15);
}

TEST(Auc, ZeroWidthCheckpointAndPadding) {
  BudgetCurve c{{10, 10, 0.4}, {20, 20, 0.2}, {40, 33, 0.1}};
  const double a = auc(c);
  c.push_back({80, 33, 0.1});
  EXPECT_DOUBLE_EQ(auc(c), a);
  const BudgetCurve never{{10, 0, 0.5}, {20, 0, 0.5}, {40, 0, 0.5}};
  EXPECT_EQ(auc(never), 0.0);
  const BudgetCurve from_zero{{10, 0, 0.5}, {20, 2, 0.5}};
  EXPECT_DOUBLE_EQ(auc(from_zero), 0.5);  // log2(2 / 1)
  EXPECT_THROW(auc(BudgetCurve{{10, 10, 0.1}, {20, 9, 0.1}}), std::invalid_argument);
}

TEST(Quantile, Type7) {
  EXPECT_DOUBLE_EQ(median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_DOUBLE_EQ(median({4.0, 1.0, 2.0, 3.0}), 2.5);
  EXPECT_DOUBLE_EQ(quantile({1.0, 2.0, 3.0, 4.0, 5.0}, 0.25), 2.0);
  EXPECT_DOUBLE_EQ(quantile({1.0, 2.0, 3.0, 4.0}, 0.25), 1.75);
  EXPECT_THROW(median({}), std::invalid_argument);
}

TEST(AucGain, SelfComparisonIsZero) {
  ResultSet r;
  for (const std::string d : {"a", "b"})
    for (std::size_t j = 1; j <= 9; ++j) r[{"passive", "lr=0.4", d, j}] = doubling(0.1 + 0.01 * j);
  EXPECT_EQ(auc_gain_star(r, "passive"), 0.0);
  EXPECT_EQ(auc_gain(r, "passive"), 0.0);
}

TEST(AucGain, HandFixture) {
  const auto r = fixture();
  // medians: A p1 0.5, A p2 0.05, B p1 -0.1, B p2 0.4
  EXPECT_NEAR(auc_gain_star(r, "x"), (0.5 + 0.4) / 2.0, 1e-12);
  EXPECT_NEAR(auc_gain(r, "x"), (0.05 + 0.4) / 2.0, 1e-12);
  EXPECT_EQ(best_params(r, "x").first, "p2");
  EXPECT_LE(auc_gain(r, "x"), auc_gain_star(r, "x"));
}

TEST(AucGain, StrictlyBetterIsPositiveAndMissingCellsThrow) {
  ResultSet r;
  for (std::size_t j = 1; j <= 5; ++j) {
    r[{"passive", "lr=0.4", "d", j}] = doubling(0.3);
    r[{"y", "c=1", "d", j}] = doubling(0.2 + 0.001 * j);
  }
  EXPECT_GT(auc_gain_star(r, "y"), 0.0);
  EXPECT_GT(auc_gain(r, "y"), 0.0);
  r.erase({"y", "c=1", "d", 3});
  r[{"y", "c=2", "d", 3}] = doubling(0.1);
  EXPECT_THROW(auc_gain(r, "y"), std::out_of_range);
  EXPECT_THROW(auc_gain(r, "nothing"), std::out_of_range);
}

TEST(RelError, IdenticalAlgorithmsGiveZero) {
  ResultSet r;
  for (std::size_t j = 1; j <= 3; ++j) {
    r[{"passive", "lr=0.4", "d", j}] = doubling(0.2 + 0.01 * j);
    r[{"z", "k=1", "d", j}] = doubling(0.2 + 0.01 * j);
  }
  for (auto sel : {ParamSelection::global, ParamSelection::per_dataset})
    for (const auto& p : rel_error_curve(r, "z", sel)) EXPECT_EQ(p.value, 0.0);
}

TEST(RelError, HandTwoBudgets) {
  ResultSet r;
  for (std::size_t j = 1; j <= 3; ++j) {
    r[{"passive", "lr=0.4", "A", j}] = {{10, 10, 0.4}, {20, 20, 0.2}};
    r[{"passive", "lr=0.4", "B", j}] = {{10, 10, 0.4}, {20, 20, 0.2}};
    r[{"z", "k=1", "A", j}] = {{10, 10, 0.3}, {20, 20, 0.2}};
    r[{"z", "k=1", "B", j}] = {{10, 10, 0.2}, {20, 20, 0.1}};
  }
  const auto c = rel_error_curve(r, "z", ParamSelection::global, {}, 0.5, 1);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].budget, 10u);
  EXPECT_NEAR(c[0].value, (0.25 + 0.5) / 2.0, 1e-12);
  EXPECT_NEAR(c[1].value, (0.0 + 0.25) / 2.0, 1e-12);
  EXPECT_THROW(rel_error_curve(r, "z", ParamSelection::global, {}, 0.5, 5), std::out_of_range);
}

TEST(RelError, QuartilesBracketMedian) {
  ResultSet r;
  for (std::size_t j = 1; j <= 9; ++j) {
    r[{"passive", "lr=0.4", "d", j}] = doubling(0.3);
    auto c = doubling(0.3 - 0.02 * static_cast<double>(j % 5));
    r[{"z", "k=1", "d", j}] = c;
  }
  const auto lo = rel_error_curve(r, "z", ParamSelection::per_dataset, {}, 0.25);
  const auto mid = rel_error_curve(r, "z", ParamSelection::per_dataset, {}, 0.5);
  const auto hi = rel_error_curve(r, "z", ParamSelection::per_dataset, {}, 0.75);
  for (std::size_t q = 0; q < mid.size(); ++q) {
    EXPECT_LE(lo[q].value, mid[q].value);
    EXPECT_LE(mid[q].value, hi[q].value);
  }
}
