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

#include <atomic>
#include <random>

#include <gtest/gtest.h>

#include "seqdim/experiments.hpp"

using namespace seqdim;

namespace {

const Scenario k322{3, 2, 2};

// Shared qubit test set for 3-2-2 at level 1.
const TestSet& qubit_set() {
  static const TestSet set = make_test_set(k322, 2, 1, 7);
  return set;
}

// Real qubit strategy for GYNI: pure state at angle a, Pi_{0|s} projects
// onto the ray at angle t_s.
double gyni_qubit_value(double a, double t0, double t1) {
  const Scenario sc{2, 3, 2};
  CVector psi(2);
  psi << std::cos(a), std::sin(a);
  std::vector<CMatrix> us;
  for (double t : {t0, t1}) {
    CMatrix u(2, 2);
    u << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
    us.push_back(u);
  }
  const MeasurementSet ms = measurements_from(sc, us, {{{0}, {1}}, {{0}, {1}}});
  return gyni_objective().evaluate(pure_state(psi), ms);
}

// Grid search followed by shrinking coordinate steps.
double gyni_qubit_oracle() {
  const double pi = std::acos(-1.0);
  double best = -1.0, a = 0, b = 0, c = 0;
  const int n = 48;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double x = pi * i / n, y = pi * j / n, z = pi * k / n;
        const double v = gyni_qubit_value(x, y, z);
        if (v > best) best = v, a = x, b = y, c = z;
      }
  for (double h = pi / n; h > 1e-9; h *= 0.5) {
    bool moved = true;
    while (moved) {
      moved = false;
      for (int dim = 0; dim < 3; ++dim) {
        for (double sgn : {-1.0, 1.0}) {
          double p[3] = {a, b, c};
          p[dim] += sgn * h;
          const double v = gyni_qubit_value(p[0], p[1], p[2]);
          if (v > best + 1e-15) best = v, a = p[0], b = p[1], c = p[2], moved = true;
        }
      }
    }
  }
  return best;
}

class CountingSolver final : public ConicSolver {
 public:
  Solution solve(const ConicProblem& p, const Tolerances& tol) const override {
    ++calls;
    return default_solver().solve(p, tol);
  }
  mutable std::atomic<int> calls{0};
};

}  // namespace

TEST(Objective, GramOfEventsMatchesBorn) {
  const Objective g = gyni_objective();
  const auto idx = std::make_shared<const WordIndex>(g.scenario, 1);
  const RMatrix gamma = g.gram(*idx);
  Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    const Realization re = random_realization(g.scenario, 3, rng);
    const MomentMatrix mm = moment_matrix(re.state, re.measurements, idx);
    EXPECT_NEAR((gamma.array() * mm.entries.real().array()).sum(), g.evaluate(re.state, re.measurements), 1e-10);
  }
}

TEST(Objective, RejectsForeignWords) {
  Objective o{k322, {{Word::parse(k322, "0|0,0|1"), 1.0}}, {}};
  EXPECT_NO_THROW(o.gram(WordIndex(k322, 1)));
  o.words.push_back({Word::identity(k322), 1.0});
  EXPECT_THROW(o.gram(WordIndex(k322, 1)), std::domain_error);
}

TEST(Unrestricted, TrivialObjectives) {
  const Objective zero{k322, {}, {}};
  EXPECT_NEAR(max_unrestricted(k322, zero).value, 0.0, 1e-7);
  const Objective single{k322, {{Word::parse(k322, "0|1,0|2"), 1.0}}, {}};
  EXPECT_NEAR(max_unrestricted(k322, single).value, 1.0, 1e-6);
}

TEST(Unrestricted, UpperBoundsSampledValues) {
  Rng rng(2);
  std::normal_distribution<double> g;
  std::vector<std::pair<Word, double>> terms;
  for (const Word& w : behavior_words(k322)) terms.emplace_back(w, g(rng));
  const Objective obj{k322, terms, {}};
  const double bound = max_unrestricted(k322, obj).value;
  for (int i = 0; i < 200; ++i) {
    const Realization re = random_realization(k322, 2 + i % 3, rng);
    EXPECT_LE(obj.evaluate(re.state, re.measurements), bound + 1e-6);
  }
}

TEST(Gyni, ClassicalBoundIsOne) { EXPECT_NEAR(classical_maximum(gyni_objective()), 1.0, 1e-12); }

TEST(Gyni, QubitLevelOneMatchesAnalyticOptimum) {
  const Objective g = gyni_objective();
  const double oracle = gyni_qubit_oracle();
  EXPECT_NEAR(oracle, 1.1588, 0.0005);
  Rng rng(7);
  const Basis b = build_basis(g.scenario, 2, 1, rng);
  const double finite = max_finite(b, g).value;
  EXPECT_GE(finite, oracle - 1e-6);
  EXPECT_NEAR(finite, 1.1588, 0.003);
}

TEST(Gyni, RelaxationOrdering) {
  const Objective g = gyni_objective();
  Rng rng(7);
  const double finite = max_finite(build_basis(g.scenario, 2, 1, rng), g).value;
  const double unrestricted = max_unrestricted(g.scenario, g, 2).value;
  EXPECT_GE(unrestricted, finite - 1e-6);
}

TEST(Finite, BoundsSampledBehaviors) {
  Rng rng(3);
  std::normal_distribution<double> g;
  std::vector<std::pair<Word, double>> terms;
  for (const Word& w : behavior_words(k322)) terms.emplace_back(w, g(rng));
  const Objective obj{k322, terms, {}};
  const double bound = max_finite(*qubit_set().embedded, obj).value;
  for (int i = 0; i < 300; ++i) {
    const Realization re = random_realization(k322, 2, rng);
    EXPECT_LE(obj.evaluate(re.state, re.measurements), bound + 1e-6);
  }
}

TEST(Finite, LevelTwoIsTighter) {
  Rng rng(4);
  std::normal_distribution<double> g;
  const TestSet k2 = make_test_set(k322, 2, 2, 7);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<std::pair<Word, double>> terms;
    for (const Word& w : behavior_words(k322)) terms.emplace_back(w, g(rng));
    const Objective obj{k322, terms, {}};
    const double p1 = max_finite(*qubit_set().embedded, obj).value;
    const double p2 = max_finite(*k2.embedded, obj).value;
    EXPECT_LE(p2, p1 + 1e-6);
  }
}

TEST(EmbeddedBasis, FacialReductionLevelTwo) {
  const TestSet k2 = make_test_set(k322, 2, 2, 7);
  EXPECT_EQ(k2.embedded->kernel_dim(), 2u);
  EXPECT_EQ(qubit_set().embedded->kernel_dim(), 0u);
  // Fresh qubit moment matrices vanish on the dropped kernel.
  Rng rng(5);
  const Realization re = random_realization(k322, 2, rng);
  const CMatrix m = moment_matrix(re.state, re.measurements, k2.basis->index).entries;
  const CMatrix back = k2.embedded->range * k2.embedded->compress(m) * k2.embedded->range.adjoint();
  EXPECT_LT((back - m).norm(), 1e-8);
}

TEST(Robustness, OwnDimensionIsInside) {
  Rng rng(6);
  for (int i = 0; i < 10; ++i) {
    const Realization re = random_realization(k322, 2, rng);
    const RobustnessResult r = qubit_set().program->solve(behavior_from_realization(re.state, re.measurements));
    EXPECT_NEAR(r.nu, 1.0, 1e-5);
    EXPECT_FALSE(r.certified());
  }
}

TEST(Robustness, QutritCertifiedWithinTwentyDraws) {
  bool found = false;
  for (std::uint64_t i = 0; i < 20 && !found; ++i) {
    const RobustnessResult r = qubit_set().program->solve(sample_behavior(k322, 3, sample_seed(99, i)));
    found = r.certified();
  }
  EXPECT_TRUE(found);
}

TEST(Robustness, WitnessInvariants) {
  const auto check = sample_behaviors(k322, 2, 1000, 4242);
  int certified = 0;
  for (std::uint64_t i = 0; i < 30 && certified < 3; ++i) {
    const Behavior b = sample_behavior(k322, 3, sample_seed(7, i));
    const RobustnessResult r = qubit_set().program->solve(b);
    const Witness& w = r.witness;
    EXPECT_NEAR(w.value(b), r.nu - w.x - 1.0, 1e-5);
    EXPECT_NEAR(w.nu, r.nu, 1e-12);
    EXPECT_NEAR(w.x + w.r, r.nu, 1e-6);
    if (!r.certified()) continue;
    ++certified;
    EXPECT_LT(w.margin(b), 0.0);
    const WitnessReport rep = verify_witness(w, check);
    EXPECT_TRUE(rep.sound()) << rep.violators.size() << " violations, min margin " << rep.min_margin;
    EXPECT_EQ(rep.checked, 1000u);
    const Witness s = w.scaled(3.5);
    for (const Behavior& c : check) EXPECT_EQ(s.margin(c) >= -1e-6 * 3.5, w.margin(c) >= -1e-6);
    EXPECT_EQ(s.margin(b) < 0.0, w.margin(b) < 0.0);
  }
  EXPECT_EQ(certified, 3);
}

TEST(Robustness, LevelTwoIsPairedSubset) {
  const TestSet k2 = make_test_set(k322, 2, 2, 7);
  for (std::uint64_t i = 0; i < 15; ++i) {
    const Behavior b = sample_behavior(k322, 3, sample_seed(11, i));
    const double n1 = qubit_set().program->solve(b).nu;
    const double n2 = k2.program->solve(b).nu;
    EXPECT_LE(n2, n1 + 1e-6);
  }
}

TEST(Robustness, RejectsMismatchedBehavior) {
  Behavior b = sample_behavior(Scenario{2, 3, 2}, 2, 1);
  EXPECT_THROW(qubit_set().program->solve(b), std::domain_error);
  Behavior c = sample_behavior(k322, 2, 1);
  c.values.pop_back();
  c.words.pop_back();
  EXPECT_THROW(qubit_set().program->solve(c), std::domain_error);
}

TEST(Robustness, PluggableBackend) {
  CountingSolver counting;
  const Behavior b = sample_behavior(k322, 3, sample_seed(7, 0));
  const double a = qubit_set().program->solve(b).nu;
  const double c = qubit_set().program->solve(b, {}, counting).nu;
  EXPECT_EQ(counting.calls.load(), 1);
  EXPECT_NEAR(a, c, 1e-12);
}

TEST(DualDirect, MatchesPrimal) {
  for (std::uint64_t i = 0; i < 10; ++i) {
    const Behavior b = sample_behavior(k322, 3, sample_seed(21, i));
    const RobustnessResult r = qubit_set().program->solve(b);
    const Witness w = dual_direct(b, *qubit_set().basis);
    EXPECT_NEAR(w.x + w.r, r.nu, 1e-5);
    EXPECT_NEAR(w.value(b), w.nu - w.x - 1.0, 1e-5);
  }
}

TEST(DualDirect, InsideBehavior) {
  const Behavior b = sample_behavior(k322, 2, 5);
  const Witness w = dual_direct(b, *qubit_set().basis);
  EXPECT_NEAR(w.x + w.r, 1.0, 1e-5);
}

TEST(DualDirect, WitnessIsSound) {
  const auto check = sample_behaviors(k322, 2, 500, 777);
  for (std::uint64_t i = 0; i < 10; ++i) {
    const Behavior b = sample_behavior(k322, 3, sample_seed(23, i));
    const Witness w = dual_direct(b, *qubit_set().basis);
    if (w.nu >= 1.0 - kDecisionMargin) continue;
    EXPECT_TRUE(verify_witness(w, check).sound());
    EXPECT_LT(w.margin(b), 0.0);
  }
}
