#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

#include "aal/core.hpp"
#include "aal/random.hpp"

using namespace aal;

namespace {

using Ex = WeightedExample<int>;
auto always_pos = [](int) { return Label::pos(); };
auto always_neg = [](int) { return Label::neg(); };

}  // namespace

TEST(Label, SignOfZeroIsPositive) {
  EXPECT_EQ(Label::sign(0.0), Label::pos());
  EXPECT_EQ(Label::sign(-1e-300), Label::neg());
  EXPECT_EQ(-Label::pos(), Label::neg());
  EXPECT_THROW(Label::from_int(0), std::invalid_argument);
}

TEST(SparseVector, RejectsUnsortedIndicesAndDropsZeros) {
  EXPECT_THROW((SparseVector{{3, 1.0}, {1, 2.0}}), std::invalid_argument);
  EXPECT_THROW((SparseVector{{1, 1.0}, {1, 2.0}}), std::invalid_argument);
  SparseVector v{{0, 0.0}, {2, 3.0}};
  EXPECT_EQ(v.nnz(), 1u);
  EXPECT_EQ(v.dimension(), 3u);
  EXPECT_THROW((SparseVector{{0, std::nan("")}}), std::invalid_argument);
}

TEST(SparseVector, DotIsSymmetric) {
  SparseVector a{{0, 1.0}, {3, 2.0}, {7, -1.0}};
  SparseVector b{{3, 4.0}, {5, 1.0}, {7, 2.0}};
  EXPECT_DOUBLE_EQ(a.dot(b), 6.0);
  EXPECT_DOUBLE_EQ(b.dot(a), a.dot(b));
  std::vector<double> dense{1.0, 0.0, 0.0, 0.5};
  EXPECT_DOUBLE_EQ(a.dot(dense), 2.0);
}

TEST(WeightedError, SymmetricTwoPoint) {
  std::vector<Ex> s{{0, Label::pos(), 1.0}, {0, Label::neg(), 1.0}};
  EXPECT_DOUBLE_EQ(weighted_error<int>(always_pos, s), 0.5);
}

TEST(WeightedError, ImportanceWeightAboveOne) {
  // 4 * 1 / 2
  std::vector<Ex> s{{0, Label::neg(), 4.0}, {0, Label::pos(), 0.0}};
  EXPECT_DOUBLE_EQ(weighted_error<int>(always_pos, s), 2.0);
}

TEST(WeightedError, PlaceholdersOnlyCount) {
  std::vector<Ex> s(5, Ex{0, Label::neg(), 0.0});
  EXPECT_DOUBLE_EQ(weighted_error<int>(always_pos, s), 0.0);
}

TEST(WeightedError, EmptySampleThrows) {
  std::vector<Ex> s;
  EXPECT_THROW(weighted_error<int>(always_pos, s), std::domain_error);
  EXPECT_THROW(empirical_regret<int>(always_pos, always_neg, s), std::domain_error);
}

TEST(WeightedError, PlaceholderRescalesExactly) {
  std::vector<Ex> s{{0, Label::neg(), 3.0}, {0, Label::pos(), 1.0}, {0, Label::neg(), 0.5}};
  const double before = weighted_error<int>(always_pos, s);
  s.push_back({0, Label::neg(), 0.0});
  EXPECT_DOUBLE_EQ(weighted_error<int>(always_pos, s), before * 3.0 / 4.0);
}

TEST(WeightedError, PermutationInvariant) {
  Rng rng(4);
  std::vector<Ex> s;
  for (int i = 0; i < 50; ++i) s.push_back({i, bernoulli(rng, 0.4) ? Label::pos() : Label::neg(), 5 * uniform01(rng)});
  auto h = [](int x) { return x % 3 == 0 ? Label::pos() : Label::neg(); };
  const double e = weighted_error<int>(h, s);
  shuffle(s, rng);
  EXPECT_NEAR(weighted_error<int>(h, s), e, 1e-12);
  EXPECT_GE(e, 0.0);
}

TEST(EmpiricalRegret, IdentityAndAntisymmetry) {
  std::vector<Ex> s{{0, Label::pos(), 1.0}, {0, Label::neg(), 1.0}};
  EXPECT_DOUBLE_EQ(empirical_regret<int>(always_pos, always_pos, s), 0.0);
  EXPECT_DOUBLE_EQ(empirical_regret<int>(always_pos, always_neg, s), 0.0);
}

TEST(EmpiricalRegret, FourPointSubtraction) {
  // h misses x = 0, 1, 2 (0.75); h_ref misses x = 3 (0.25)
  std::vector<Ex> s{{0, Label::neg(), 1}, {1, Label::neg(), 1}, {2, Label::neg(), 1}, {3, Label::neg(), 1}};
  auto h = [](int x) { return x < 3 ? Label::pos() : Label::neg(); };
  auto h_ref = [](int x) { return x == 3 ? Label::pos() : Label::neg(); };
  EXPECT_DOUBLE_EQ(empirical_regret<int>(h, h_ref, s), 0.5);
  EXPECT_DOUBLE_EQ(empirical_regret<int>(h_ref, h, s), -0.5);
}

TEST(ErrorAccumulator, RunningSums) {
  ErrorAccumulator a;
  EXPECT_THROW(a.value(), std::domain_error);
  a.add(true, 2.0);
  a.add(false, 7.0);
  EXPECT_DOUBLE_EQ(a.value(), 1.0);
}

TEST(Random, StreamsAreReproducible) {
  Rng a(99), b(99);
  for (int i = 0; i < 100; ++i) ASSERT_EQ(standard_normal(a), standard_normal(b));
  EXPECT_NE(hash_combine(1, 2), hash_combine(2, 1));
  std::vector<int> v{0, 1, 2, 3, 4, 5, 6, 7};
  Rng r(3);
  shuffle(v, r);
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(sorted, (std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7}));
}
