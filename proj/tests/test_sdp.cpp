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

#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "seqdim/sdp.hpp"

using namespace seqdim;

namespace {

RMatrix m2(double a, double b, double c, double d) {
  RMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

ConicProblem unit_disc() {
  ConicProblem p;
  p.objective = RVector::Ones(1);
  p.blocks.push_back({RMatrix::Identity(2, 2), {m2(0, 1, 1, 0)}});
  p.eq_matrix = RMatrix(0, 1);
  p.eq_rhs = RVector(0);
  return p;
}

RMatrix random_symmetric(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  RMatrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = g(rng);
  return (a + a.transpose()) * 0.5;
}

// Largest feasible step along D from a strictly feasible F by bisection.
double bisect_edge(const RMatrix& f, const RMatrix& dir) {
  double lo = 0.0, hi = 1.0;
  while (min_eigenvalue(RMatrix(f + hi * dir)) >= 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) return hi;
  }
  for (int i = 0; i < 200 && hi - lo > 1e-13 * (1.0 + hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    (min_eigenvalue(RMatrix(f + mid * dir)) >= 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

void check_kkt(const ConicProblem& p, const Solution& s) {
  ASSERT_TRUE(s.ok()) << s.message;
  const auto n = static_cast<Eigen::Index>(p.num_vars());
  RVector grad = p.objective;
  double inner = 0.0, dual = 0.0;
  for (std::size_t b = 0; b < p.blocks.size(); ++b) {
    const RMatrix& z = s.z[b];
    EXPECT_GT(min_eigenvalue(z), -1e-8);
    EXPECT_GT(min_eigenvalue(p.lmi_value(b, s.x)), -1e-7);
    inner += (z.array() * p.lmi_value(b, s.x).array()).sum();
    dual += (z.array() * p.blocks[b].constant.array()).sum();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (p.blocks[b].touches(static_cast<std::size_t>(i))) {
        grad(i) += (z.array() * p.blocks[b].coeffs[static_cast<std::size_t>(i)].array()).sum();
      }
    }
  }
  if (p.eq_matrix.rows() > 0) {
    grad -= p.eq_matrix.transpose() * s.y;
    dual += s.y.dot(p.eq_rhs);
    EXPECT_LT((p.eq_matrix * s.x - p.eq_rhs).norm(), 1e-7);
  }
  EXPECT_LT(grad.norm(), 1e-6 * (1.0 + p.objective.norm()));
  EXPECT_LT(std::abs(inner), kComplementarity);
  EXPECT_NEAR(dual, s.dual_objective, 1e-6 * (1.0 + std::abs(dual)));
  // Weak duality for a maximization: primal <= dual.
  EXPECT_LE(s.objective, s.dual_objective + 1e-7 * (1.0 + std::abs(s.objective)));
  EXPECT_LT(std::abs(s.objective - s.dual_objective), 1e-7 * (1.0 + std::abs(s.objective)));
}

}  // namespace

TEST(Sdp, UnitDisc) {
  const ConicProblem p = unit_disc();
  const Solution s = solve(p);
  ASSERT_TRUE(s.ok()) << s.message;
  EXPECT_NEAR(s.x(0), 1.0, 1e-6);
  EXPECT_NEAR(s.objective, 1.0, 1e-6);
  check_kkt(p, s);
}

TEST(Sdp, EqualityPins) {
  ConicProblem p = unit_disc();
  p.eq_matrix = RMatrix::Ones(1, 1);
  p.eq_rhs = RVector::Constant(1, 0.3);
  const Solution s = solve(p);
  ASSERT_TRUE(s.ok()) << s.message;
  EXPECT_NEAR(s.objective, 0.3, 1e-7);
  check_kkt(p, s);
}

TEST(Sdp, Infeasible) {
  // x >= 1 and x <= 0.
  ConicProblem p;
  p.objective = RVector::Ones(1);
  p.blocks.push_back({RMatrix::Constant(1, 1, -1.0), {RMatrix::Ones(1, 1)}});
  p.blocks.push_back({RMatrix::Zero(1, 1), {-RMatrix::Ones(1, 1)}});
  EXPECT_EQ(solve(p).status, SolveStatus::infeasible);
}

TEST(Sdp, InconsistentEqualities) {
  ConicProblem p = unit_disc();
  p.eq_matrix = RMatrix::Ones(2, 1);
  p.eq_rhs = RVector(2);
  p.eq_rhs << 0.1, 0.2;
  EXPECT_EQ(solve(p).status, SolveStatus::infeasible);
}

TEST(Sdp, Unbounded) {
  ConicProblem p;
  p.objective = RVector::Ones(1);
  p.blocks.push_back({RMatrix::Zero(1, 1), {RMatrix::Ones(1, 1)}});
  EXPECT_EQ(solve(p).status, SolveStatus::unbounded);
}

TEST(Sdp, UnboundedAlongUnconstrainedDirection) {
  ConicProblem p = unit_disc();
  p.objective = RVector::Ones(2);
  p.blocks[0].coeffs.push_back(RMatrix());
  EXPECT_EQ(solve(p).status, SolveStatus::unbounded);
}

TEST(Sdp, FreeDirectionWithZeroCostIsHarmless) {
  ConicProblem p = unit_disc();
  p.objective = RVector(2);
  p.objective << 1.0, 0.0;
  p.blocks[0].coeffs.push_back(RMatrix());
  const Solution s = solve(p);
  ASSERT_TRUE(s.ok()) << s.message;
  EXPECT_NEAR(s.objective, 1.0, 1e-6);
}

TEST(Sdp, ObjectiveScaling) {
  ConicProblem p = unit_disc();
  p.objective *= 1e3;
  const Solution s = solve(p);
  ASSERT_TRUE(s.ok()) << s.message;
  EXPECT_NEAR(s.objective, 1e3, 1e-3);
  EXPECT_NEAR(s.x(0), 1.0, 1e-6);
}

TEST(Sdp, MultipleBlocks) {
  // |x| <= 1 and x <= 0.5 from a second block.
  ConicProblem p = unit_disc();
  p.blocks.push_back({RMatrix::Constant(1, 1, 0.5), {-RMatrix::Ones(1, 1)}});
  const Solution s = solve(p);
  ASSERT_TRUE(s.ok()) << s.message;
  EXPECT_NEAR(s.objective, 0.5, 1e-6);
  check_kkt(p, s);
}

TEST(Sdp, RejectsMalformed) {
  ConicProblem p = unit_disc();
  p.blocks[0].constant(0, 1) = 1.0;
  EXPECT_THROW(solve(p), std::domain_error);
  ConicProblem q = unit_disc();
  q.blocks[0].coeffs[0] = RMatrix::Ones(3, 3);
  EXPECT_THROW(solve(q), std::domain_error);
  ConicProblem big;
  big.objective = RVector::Ones(1);
  big.blocks.push_back({RMatrix::Identity(5, 5), {RMatrix::Identity(5, 5)}});
  Tolerances tight;
  tight.max_block_size = 4;
  EXPECT_THROW(default_solver().solve(big, tight), std::domain_error);
}

TEST(Sdp, DumpFormat) {
  std::ostringstream os;
  unit_disc().dump(os);
  const std::string text = os.str();
  EXPECT_EQ(text.rfind("# seqdim conic problem v1\n", 0), 0u);
  EXPECT_NE(text.find("entry 0 0 1 1"), std::string::npos);
}

// Random instances restricted to a line by equalities; the optimum is the
// edge of the feasible interval, located independently by bisection.
TEST(Sdp, LineSectionOracle) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> size_dist(2, 8), var_dist(2, 4);
  std::normal_distribution<double> g;
  int done = 0;
  while (done < 50) {
    const int n = size_dist(rng), nv = var_dist(rng);
    ConicProblem p;
    p.objective = RVector(nv);
    for (int i = 0; i < nv; ++i) p.objective(i) = g(rng);
    RMatrix base = random_symmetric(n, rng);
    base += (1.0 - min_eigenvalue(base)) * RMatrix::Identity(n, n);
    LmiBlock blk{base, {}};
    for (int i = 0; i < nv; ++i) blk.coeffs.push_back(random_symmetric(n, rng));
    p.blocks.push_back(blk);
    // x = t * dir: nv - 1 equalities orthogonal to dir.
    RVector dir(nv);
    for (int i = 0; i < nv; ++i) dir(i) = g(rng);
    dir.normalize();
    Eigen::HouseholderQR<RMatrix> qr(dir);
    const RMatrix q = qr.householderQ();
    p.eq_matrix = q.rightCols(nv - 1).transpose();
    p.eq_rhs = RVector::Zero(nv - 1);
    RMatrix d = RMatrix::Zero(n, n);
    for (int i = 0; i < nv; ++i) d += dir(i) * blk.coeffs[static_cast<std::size_t>(i)];
    const double slope = p.objective.dot(dir);
    if (std::abs(slope) < 1e-3) continue;
    const RMatrix step = slope > 0 ? d : RMatrix(-d);
    const double t = bisect_edge(base, step);
    if (t > 1e6) continue;
    const double expected = std::abs(slope) * t;
    const Solution s = solve(p);
    ASSERT_TRUE(s.ok()) << s.message << " instance " << done;
    EXPECT_NEAR(s.objective, expected, 1e-5 * (1.0 + std::abs(expected))) << "instance " << done;
    check_kkt(p, s);
    ++done;
  }
}

// Random full-dimensional instances: KKT conditions at the reported optimum.
TEST(Sdp, RandomKkt) {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 3 + trial % 5, nv = 2 + trial % 4;
    ConicProblem p;
    p.objective = RVector(nv);
    RMatrix base = random_symmetric(n, rng);
    base += (1.0 - min_eigenvalue(base)) * RMatrix::Identity(n, n);
    LmiBlock blk{base, {}};
    // Bounded: the objective is minus a trace pairing with a PD matrix.
    RMatrix w = random_symmetric(n, rng);
    w += (0.5 - min_eigenvalue(w)) * RMatrix::Identity(n, n);
    for (int i = 0; i < nv; ++i) {
      blk.coeffs.push_back(random_symmetric(n, rng));
      p.objective(i) = -(w.array() * blk.coeffs.back().array()).sum();
    }
    p.blocks.push_back(blk);
    const Solution s = solve(p);
    check_kkt(p, s);
  }
}

TEST(Embedding, Identity) {
  EXPECT_EQ(embed_hermitian(CMatrix::Identity(2, 2)), RMatrix::Identity(4, 4));
}

TEST(Embedding, PauliY) {
  CMatrix y(2, 2);
  y << cplx(0, 0), cplx(0, 1), cplx(0, -1), cplx(0, 0);
  Eigen::SelfAdjointEigenSolver<RMatrix> es(embed_hermitian(y));
  const RVector ev = es.eigenvalues();
  EXPECT_NEAR(ev(0), -1.0, 1e-12);
  EXPECT_NEAR(ev(1), -1.0, 1e-12);
  EXPECT_NEAR(ev(2), 1.0, 1e-12);
  EXPECT_NEAR(ev(3), 1.0, 1e-12);
}

TEST(Embedding, MinEigenvalueMatches) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 7;
    CMatrix a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = cplx(g(rng), g(rng));
    const CMatrix h = (a + a.adjoint()) * 0.5;
    EXPECT_NEAR(min_eigenvalue(embed_hermitian(h)), min_eigenvalue(h), 1e-10);
  }
}

TEST(Embedding, RejectsNonHermitian) {
  CMatrix a = CMatrix::Zero(2, 2);
  a(0, 1) = 1.0;
  EXPECT_THROW(embed_hermitian(a), std::domain_error);
}

TEST(Embedding, HermitianCoordinates) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g;
  CMatrix a(4, 4), b(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      a(i, j) = cplx(g(rng), g(rng));
      b(i, j) = cplx(g(rng), g(rng));
    }
  const CMatrix ha = (a + a.adjoint()) * 0.5, hb = (b + b.adjoint()) * 0.5;
  EXPECT_LT((vector_to_hermitian(hermitian_to_vector(ha), 4) - ha).norm(), 1e-12);
  EXPECT_NEAR(hermitian_to_vector(ha).dot(hermitian_to_vector(hb)), hs_inner(ha, hb), 1e-10);
}
