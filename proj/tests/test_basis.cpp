// Copyright 2026 The seqdim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include "seqdim/basis.hpp"

using namespace seqdim;

namespace {

std::size_t cardinality(const Scenario& sc, int d, int k, std::uint64_t seed) {
  Rng rng(seed);
  return build_basis(sc, d, k, rng).cardinality();
}

std::size_t oracle(const Scenario& sc, int d, int k, std::uint64_t seed, std::size_t extra = 20) {
  Rng rng(seed);
  const WordIndex idx(sc, k);
  return rank_oracle(sc, d, k, idx.size() * idx.size() + extra, rng);
}

}  // namespace

TEST(Basis, FirstCandidateRetained) {
  Rng rng(1);
  const Basis b = build_basis(Scenario{3, 2, 2}, 2, 1, rng);
  ASSERT_FALSE(b.norm_log.empty());
  EXPECT_TRUE(b.retained_log.front());
  EXPECT_NEAR(b.norm_log.front(), 1.0, 1e-12);
}

TEST(Basis, Orthonormal) {
  Rng rng(2);
  const Basis b = build_basis(Scenario{3, 2, 2}, 3, 1, rng);
  const RMatrix g = b.vectors.transpose() * b.vectors;
  EXPECT_LT((g - RMatrix::Identity(g.rows(), g.cols())).norm(), 1e-9);
}

TEST(Basis, SpansFreshMomentMatrices) {
  const Scenario sc{3, 2, 2};
  Rng rng(3);
  const Basis b = build_basis(sc, 2, 1, rng);
  Rng fresh(1234);
  for (int i = 0; i < 50; ++i) {
    const Realization re = random_realization(sc, 2, fresh);
    const MomentMatrix mm = moment_matrix(re.state, re.measurements, b.index);
    EXPECT_LT(b.residual(mm.entries), 1e-8);
  }
  // A qutrit moment matrix leaves the qubit span.
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const Realization re = random_realization(sc, 3, fresh);
    worst = std::max(worst, b.residual(moment_matrix(re.state, re.measurements, b.index).entries));
  }
  EXPECT_GT(worst, 1e-3);
}

TEST(Basis, MatchesRankOracle) {
  for (const char* s : {"3-2-2", "2-3-2", "2-2-3"}) {
    const Scenario sc = Scenario::parse(s);
    for (int d = 2; d <= 3; ++d) EXPECT_EQ(cardinality(sc, d, 1, 5), oracle(sc, d, 1, 6)) << s << " d=" << d;
  }
}

TEST(Basis, MatchesRankOracleLevelTwo) {
  const Scenario sc{3, 2, 2};
  EXPECT_EQ(cardinality(sc, 2, 2, 5), oracle(sc, 2, 2, 6));
}

TEST(Basis, NormDropIsSharp) {
  for (int d = 2; d <= 4; ++d) {
    Rng rng(7);
    const Basis b = build_basis(Scenario{3, 2, 2}, d, 1, rng);
    EXPECT_GE(b.min_retained_norm() / b.max_rejected_norm(), 1e6) << "d=" << d;
  }
}

TEST(Basis, SeedIndependentCardinality) {
  const Scenario sc{3, 2, 2};
  EXPECT_EQ(cardinality(sc, 2, 1, 1), cardinality(sc, 2, 1, 2));
}

TEST(Basis, Deterministic) {
  Rng a(11), b(11);
  const Basis x = build_basis(Scenario{3, 2, 2}, 2, 1, a);
  const Basis y = build_basis(Scenario{3, 2, 2}, 2, 1, b);
  EXPECT_EQ(x.vectors, y.vectors);
  EXPECT_EQ(x.norm_log, y.norm_log);
}

TEST(Basis, BudgetExhaustedThrows) {
  Rng rng(12);
  BasisOptions opt;
  opt.max_candidates = 5;
  EXPECT_THROW(build_basis(Scenario{3, 2, 2}, 3, 1, rng, opt), BasisBuildError);
}

TEST(Basis, RejectsBadArguments) {
  Rng rng(13);
  EXPECT_THROW(build_basis(Scenario{3, 2, 2}, 0, 1, rng), std::domain_error);
  EXPECT_THROW(build_basis(Scenario{3, 2, 2}, 2, 0, rng), std::domain_error);
}

TEST(RankOracle, TrivialScenario) {
  Rng rng(14);
  EXPECT_EQ(rank_oracle(Scenario{1, 1, 2}, 1, 1, 30, rng), 1u);
}

TEST(RankOracle, Saturates) {
  const Scenario sc{3, 2, 2};
  EXPECT_EQ(oracle(sc, 2, 1, 15, 20), oracle(sc, 2, 1, 16, 120));
}

TEST(Classify, ThreeTwoTwoGap) {
  const Scenario sc{3, 2, 2};
  const std::size_t c2 = cardinality(sc, 2, 1, 21), c3 = cardinality(sc, 3, 1, 21), c4 = cardinality(sc, 4, 1, 21);
  EXPECT_LT(c2, c3);
  EXPECT_EQ(c3, c4);
}

TEST(Classify, TwoThreeThreeGap) {
  const Scenario sc{2, 3, 3};
  const std::size_t c3 = cardinality(sc, 3, 1, 22), c4 = cardinality(sc, 4, 1, 22), c5 = cardinality(sc, 5, 1, 22);
  EXPECT_LT(c3, c4);
  EXPECT_EQ(c4, c5);
}

TEST(Classify, FlagsAndRatio) {
  const auto rows = classify({Scenario{3, 2, 2}, Scenario{4, 2, 2}}, {2, 3, 4}, 1, 23);
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& row : rows) {
    ASSERT_EQ(row.strict_increase.size(), 2u);
    EXPECT_TRUE(row.strict_increase[0]) << row.scenario.to_string();
    EXPECT_FALSE(row.strict_increase[1]) << row.scenario.to_string();
    ASSERT_TRUE(row.ratio_3_to_2.has_value());
    EXPECT_GT(*row.ratio_3_to_2, 1.0);
  }
  const auto flat = classify({Scenario{3, 2, 2}}, {3, 4}, 1, 24);
  EXPECT_FALSE(flat[0].any_gap());
}

TEST(Classify, EqualAboveQutrit) {
  for (int m = 3; m <= 5; ++m) {
    const Scenario sc{m, 2, 2};
    const std::size_t c3 = cardinality(sc, 3, 1, 25);
    EXPECT_EQ(cardinality(sc, 4, 1, 25), c3) << m;
    EXPECT_EQ(cardinality(sc, 5, 1, 25), c3) << m;
  }
}
