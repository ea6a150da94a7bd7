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

#pragma once

// Dense quantum simulation: Haar sampling, binned projective measurements,
// Born-rule probabilities and moment matrices.

#include <algorithm>
#include <cstdint>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "seqdim/linalg.hpp"
#include "seqdim/words.hpp"

namespace seqdim {

using Rng = std::mt19937_64;

/// Haar-random d x d unitary: QR of a complex Ginibre matrix with the phases
/// of R's diagonal moved into Q.
inline CMatrix haar_unitary(int d, Rng& rng) {
  if (d < 1) throw std::domain_error("haar_unitary: dimension must be >= 1");
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix z(d, d);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      z(i, j) = cplx(re, im) / std::sqrt(2.0);
    }
  }
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ();
  const CMatrix& r = qr.matrixQR();
  for (int i = 0; i < d; ++i) {
    const double mag = std::abs(r(i, i));
    const cplx phase = mag > 0.0 ? r(i, i) / mag : cplx(1.0, 0.0);
    q.col(i) *= phase;
  }
  return q;
}

struct StatePrep {
  CMatrix rho;

  int dim() const { return static_cast<int>(rho.rows()); }

  /// Throws unless rho is a density operator (Hermitian, unit trace, PSD).
  void validate(double tol = 1e-10) const {
    if (rho.rows() != rho.cols() || rho.rows() == 0) throw std::domain_error("state: rho must be square");
    if (!is_hermitian(rho, tol)) throw std::domain_error("state: rho is not Hermitian");
    if (std::abs(rho.trace() - cplx(1.0, 0.0)) > tol) throw std::domain_error("state: trace(rho) != 1");
    if (min_eigenvalue(rho) < -tol) throw std::domain_error("state: rho is not positive semidefinite");
  }
};

inline StatePrep pure_state(const CVector& psi) {
  const CVector unit = psi / psi.norm();
  return {unit * unit.adjoint()};
}

/// rho = U |0><0| U^dagger for Haar-random U.
inline StatePrep random_state(int d, Rng& rng) {
  const CMatrix u = haar_unitary(d, rng);
  return pure_state(u.col(0));
}

struct MeasurementSet {
  Scenario scenario;
  int dim = 0;
  /// projectors[s][r] for every setting and full outcome r in 0..o-1.
  std::vector<std::vector<CMatrix>> projectors;
  /// bins[s][r] lists the basis indices assigned to outcome r of setting s.
  std::vector<std::vector<std::vector<int>>> bins;
  /// True when some outcome received an empty bin (possible only for d < o).
  bool has_zero_projector = false;

  const CMatrix& projector(int r, int s) const { return projectors.at(s).at(r); }
};

/// Pi_{r|s} = sum_{j in B_{r|s}} U_s |j><j| U_s^dagger.
inline MeasurementSet measurements_from(const Scenario& sc, const std::vector<CMatrix>& unitaries,
                                        const std::vector<std::vector<std::vector<int>>>& bins) {
  if (static_cast<int>(unitaries.size()) != sc.m || static_cast<int>(bins.size()) != sc.m) {
    throw std::domain_error("measurements: need one unitary and one binning per setting");
  }
  MeasurementSet ms;
  ms.scenario = sc;
  ms.dim = static_cast<int>(unitaries.front().rows());
  ms.bins = bins;
  ms.projectors.resize(sc.m);
  for (int s = 0; s < sc.m; ++s) {
    const CMatrix& u = unitaries[s];
    if (u.rows() != ms.dim || u.cols() != ms.dim) throw std::domain_error("measurements: unitary size mismatch");
    if (static_cast<int>(bins[s].size()) != sc.o) throw std::domain_error("measurements: need one bin per outcome");
    std::vector<int> seen(ms.dim, 0);
    for (int r = 0; r < sc.o; ++r) {
      CMatrix p = CMatrix::Zero(ms.dim, ms.dim);
      for (int j : bins[s][r]) {
        if (j < 0 || j >= ms.dim || seen[j]++) throw std::domain_error("measurements: bins must partition 0..d-1");
        p += u.col(j) * u.col(j).adjoint();
      }
      if (bins[s][r].empty()) ms.has_zero_projector = true;
      ms.projectors[s].push_back(std::move(p));
    }
    for (int j = 0; j < ms.dim; ++j) {
      if (!seen[j]) throw std::domain_error("measurements: bins must cover 0..d-1");
    }
  }
  return ms;
}

/// How projector ranks are drawn when d >= o.
enum class BinningRule {
  /// Each basis index picks an outcome uniformly; resampled until no bin is empty.
  per_index,
  /// Rank profile uniform over compositions of d into o positive parts.
  per_rank,
};

/// Partition of the basis indices {0..d-1} among the o outcomes. For d < o
/// outcome r < d gets index r and the remaining outcomes are empty.
inline std::vector<std::vector<int>> random_binning(int d, int o, Rng& rng,
                                                    BinningRule rule = BinningRule::per_rank) {
  std::vector<std::vector<int>> bins(o);
  if (d < o) {
    for (int j = 0; j < d; ++j) bins[j].push_back(j);
    return bins;
  }
  if (rule == BinningRule::per_rank) {
    // o-1 distinct cut points in 1..d-1, uniformly.
    std::vector<int> cuts(d - 1);
    for (int i = 0; i < d - 1; ++i) cuts[i] = i + 1;
    std::shuffle(cuts.begin(), cuts.end(), rng);
    cuts.resize(o - 1);
    std::sort(cuts.begin(), cuts.end());
    cuts.push_back(d);
    int start = 0;
    for (int r = 0; r < o; ++r) {
      for (int j = start; j < cuts[r]; ++j) bins[r].push_back(j);
      start = cuts[r];
    }
    return bins;
  }
  std::uniform_int_distribution<int> pick(0, o - 1);
  for (;;) {
    for (auto& b : bins) b.clear();
    for (int j = 0; j < d; ++j) bins[pick(rng)].push_back(j);
    bool all = true;
    for (const auto& b : bins) all = all && !b.empty();
    if (all) return bins;
  }
}

inline MeasurementSet random_measurements(const Scenario& sc, int d, Rng& rng,
                                          BinningRule rule = BinningRule::per_rank) {
  if (d < 1) throw std::domain_error("random_measurements: dimension must be >= 1");
  std::vector<CMatrix> unitaries;
  std::vector<std::vector<std::vector<int>>> bins;
  for (int s = 0; s < sc.m; ++s) {
    unitaries.push_back(haar_unitary(d, rng));
    bins.push_back(random_binning(d, sc.o, rng, rule));
  }
  return measurements_from(sc, unitaries, bins);
}

/// Pi_w = Pi_{l_n} ... Pi_{l_1}; identity for the empty word, zero for ZERO.
inline CMatrix sequence_operator(const MeasurementSet& ms, const Word& w) {
  if (w.is_zero()) return CMatrix::Zero(ms.dim, ms.dim);
  CMatrix op = CMatrix::Identity(ms.dim, ms.dim);
  for (const Letter& l : w.letters()) op = ms.projector(l.r, l.s) * op;
  return op;
}

/// Pi for a full-outcome event (outcome o-1 allowed).
inline CMatrix event_operator(const MeasurementSet& ms, const Event& e) {
  CMatrix op = CMatrix::Identity(ms.dim, ms.dim);
  for (const Letter& l : e.letters) op = ms.projector(l.r, l.s) * op;
  return op;
}

/// Born rule Tr[Pi_w rho Pi_w^dagger].
inline double born_probability(const StatePrep& state, const MeasurementSet& ms, const Word& w) {
  if (w.is_zero()) return 0.0;
  const CMatrix op = sequence_operator(ms, w);
  return (op * state.rho * op.adjoint()).trace().real();
}

inline double born_probability(const StatePrep& state, const MeasurementSet& ms, const Event& e) {
  const CMatrix op = event_operator(ms, e);
  return (op * state.rho * op.adjoint()).trace().real();
}

/// Lueders update rho -> Pi rho Pi / Tr[Pi rho Pi]. Returns the probability.
inline double lueders_update(StatePrep& state, const CMatrix& projector) {
  CMatrix post = projector * state.rho * projector.adjoint();
  const double p = post.trace().real();
  if (p > 0.0) state.rho = post / p;
  return p;
}

/// Hermitian matrix of Tr[Pi_u^dagger Pi_v rho] over a word index.
struct MomentMatrix {
  std::shared_ptr<const WordIndex> index;
  CMatrix entries;

  std::size_t size() const { return static_cast<std::size_t>(entries.rows()); }
  cplx entry(const Word& u, const Word& v) const {
    return entries(static_cast<Eigen::Index>(*index->position(u)), static_cast<Eigen::Index>(*index->position(v)));
  }
};

inline MomentMatrix moment_matrix(const StatePrep& state, const MeasurementSet& ms,
                                  std::shared_ptr<const WordIndex> index) {
  if (state.dim() != ms.dim) throw std::domain_error("moment_matrix: state and measurement dimensions differ");
  if (!(index->scenario() == ms.scenario)) throw std::domain_error("moment_matrix: scenario mismatch");
  // rho = B B^dagger, then M(u, v) = Tr[(Pi_u B)^dagger (Pi_v B)].
  Eigen::SelfAdjointEigenSolver<CMatrix> es(state.rho);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    if (es.eigenvalues()(i) > 1e-15) keep.push_back(i);
  }
  const Eigen::Index d = ms.dim;
  const Eigen::Index rank = static_cast<Eigen::Index>(keep.size());
  CMatrix factor(d, rank);
  for (Eigen::Index c = 0; c < rank; ++c) {
    factor.col(c) = es.eigenvectors().col(keep[c]) * std::sqrt(es.eigenvalues()(keep[c]));
  }
  const std::size_t n = index->size();
  CMatrix stacked(d * rank, static_cast<Eigen::Index>(n));
  std::vector<CMatrix> images(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Word& w = (*index)[i];
    if (w.is_identity()) {
      images[i] = factor;
    } else {
      // Prefixes of canonical words are canonical and precede them in the index.
      std::vector<Letter> prefix(w.letters().begin(), w.letters().end() - 1);
      const std::size_t p = *index->position(simplify(w.scenario(), prefix));
      const Letter& last = w.letters().back();
      images[i] = ms.projector(last.r, last.s) * images[p];
    }
    stacked.col(static_cast<Eigen::Index>(i)) = Eigen::Map<const CVector>(images[i].data(), d * rank);
  }
  CMatrix m = stacked.adjoint() * stacked;
  m = (m + m.adjoint()).eval() * 0.5;
  return {std::move(index), std::move(m)};
}

/// Probabilities of the observable words (length 1..l, reduced outcomes).
struct Behavior {
  Scenario scenario;
  std::vector<Word> words;
  std::vector<double> values;

  std::size_t size() const { return words.size(); }
  double value(const Word& w) const {
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (words[i] == w) return values[i];
    }
    throw std::out_of_range("behavior: no entry for word " + w.to_string());
  }
};

inline Behavior behavior_of(const MomentMatrix& mm) {
  Behavior b;
  b.scenario = mm.index->scenario();
  for (std::size_t i : mm.index->behavior_positions()) {
    b.words.push_back((*mm.index)[i]);
    const auto k = static_cast<Eigen::Index>(i);
    b.values.push_back(mm.entries(k, k).real());
  }
  return b;
}

/// Words of length 1..l in index order; the layout every Behavior uses.
inline std::vector<Word> behavior_words(const Scenario& sc) {
  const WordIndex idx(sc, 1);
  std::vector<Word> out;
  for (std::size_t i : idx.behavior_positions()) out.push_back(idx[i]);
  return out;
}

inline Behavior behavior_from_realization(const StatePrep& state, const MeasurementSet& ms) {
  Behavior b;
  b.scenario = ms.scenario;
  b.words = behavior_words(ms.scenario);
  for (const Word& w : b.words) b.values.push_back(born_probability(state, ms, w));
  return b;
}

/// One sampled d-dimensional realization: the state is drawn first, then one
/// unitary and one binning per setting.
struct Realization {
  StatePrep state;
  MeasurementSet measurements;
};

inline Realization random_realization(const Scenario& sc, int d, Rng& rng,
                                      BinningRule rule = BinningRule::per_rank) {
  StatePrep state = random_state(d, rng);
  MeasurementSet ms = random_measurements(sc, d, rng, rule);
  return {std::move(state), std::move(ms)};
}

}  // namespace seqdim
