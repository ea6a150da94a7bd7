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

// Certification programs over moment matrices: the unrestricted-dimension
// bound, the level-k finite-dimension bound, and the generalized robustness
// with its dual witness.

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "seqdim/basis.hpp"
#include "seqdim/quantum.hpp"
#include "seqdim/sdp.hpp"
#include "seqdim/words.hpp"

namespace seqdim {

/// Verdict threshold: a behavior is certified only when nu < 1 - margin.
inline constexpr double kDecisionMargin = 1e-4;

/// Thrown when a certification program does not reach an optimal solution.
class CertificationError : public std::runtime_error {
 public:
  CertificationError(const std::string& what, Solution sol) : std::runtime_error(what), solution(std::move(sol)) {}
  Solution solution;
};

/// Linear functional on a behavior. Terms on reduced words read the
/// diagonal entry M(w, w); events over the full outcome set are expanded
/// into reduced words first.
struct Objective {
  Scenario scenario;
  std::vector<std::pair<Word, double>> words;
  std::vector<std::pair<Event, double>> events;

  /// Real symmetric Gamma with value(M) = sum_uv Gamma_uv Re M_uv.
  RMatrix gram(const WordIndex& index) const { return gram(index.words()); }

  RMatrix gram(const std::vector<Word>& index) const {
    const auto n = static_cast<Eigen::Index>(index.size());
    RMatrix g = RMatrix::Zero(n, n);
    std::map<Word, Eigen::Index> pos;
    for (std::size_t i = 0; i < index.size(); ++i) pos.emplace(index[i], static_cast<Eigen::Index>(i));
    auto locate = [&](const Word& w) {
      auto it = pos.find(w);
      if (it == pos.end()) throw std::domain_error("objective: word " + w.to_string() + " not in the moment index");
      return it->second;
    };
    for (const auto& [w, coeff] : words) {
      if (w.size() < 1 || w.size() > static_cast<std::size_t>(scenario.l)) {
        throw std::domain_error("objective: word " + w.to_string() + " is not a behavior word");
      }
      const auto p = locate(w);
      g(p, p) += coeff;
    }
    for (const auto& [e, coeff] : events) {
      const auto terms = expand_event(e);
      for (const auto& [u, cu] : terms) {
        for (const auto& [v, cv] : terms) g(locate(u), locate(v)) += coeff * cu * cv;
      }
    }
    return (g + g.transpose()) * 0.5;
  }

  /// Value on a concrete realization, computed from Born probabilities.
  double evaluate(const StatePrep& state, const MeasurementSet& ms) const {
    double acc = 0.0;
    for (const auto& [w, c] : words) acc += c * born_probability(state, ms, w);
    for (const auto& [e, c] : events) acc += c * born_probability(state, ms, e);
    return acc;
  }
};

/// Guess-your-neighbour's-input functional in 2-3-2; classical bound 1.
inline Objective gyni_objective() {
  const Scenario sc{2, 3, 2};
  Objective obj{sc, {}, {}};
  for (const char* e : {"000|000", "110|011", "011|101", "101|110"}) obj.events.emplace_back(Event::parse(sc, e), 1.0);
  return obj;
}

struct OptimumResult {
  double value = 0.0;
  Solution solution;
};

namespace detail {

inline void require_optimal(const Solution& sol, const std::string& what) {
  if (!sol.ok()) {
    throw CertificationError(what + ": solver returned " + std::string(to_string(sol.status)) + " (" + sol.message + ")",
                             sol);
  }
}

inline RMatrix corner_unit(Eigen::Index n) {
  RMatrix e = RMatrix::Zero(2 * n, 2 * n);
  e(0, 0) = 1.0;
  e(n, n) = 1.0;
  return e;
}

}  // namespace detail

/// Moment-matrix SDP with entries tied by word-product classes; no
/// dimension constraint. `level` sets the word length l + level - 1.
inline OptimumResult max_unrestricted(const std::vector<Word>& index, const Objective& objective,
                                      const Tolerances& tol = {}, const ConicSolver& solver = default_solver()) {
  if (index.empty() || !index[0].is_identity()) throw std::domain_error("max_unrestricted: index must start with 1");
  const auto n = static_cast<Eigen::Index>(index.size());
  const RMatrix gamma = objective.gram(index);

  // class id per (u, v); -1 = zero, -2 = identity. Orientation +1 when the
  // key is the class representative, -1 when it is its reverse.
  std::map<Word, int> classes;
  std::vector<bool> palindromic;
  std::vector<int> cls(static_cast<std::size_t>(n * n));
  std::vector<int> orient(static_cast<std::size_t>(n * n), 1);
  for (Eigen::Index u = 0; u < n; ++u) {
    for (Eigen::Index v = 0; v < n; ++v) {
      const Word key = product(index[static_cast<std::size_t>(u)], index[static_cast<std::size_t>(v)]);
      const auto at = static_cast<std::size_t>(u * n + v);
      if (key.is_zero()) {
        cls[at] = -1;
        continue;
      }
      if (key.is_identity()) {
        cls[at] = -2;
        continue;
      }
      const Word rev = key.reversed();
      const Word& rep = rev < key ? rev : key;
      auto it = classes.find(rep);
      if (it == classes.end()) {
        it = classes.emplace(rep, static_cast<int>(palindromic.size())).first;
        palindromic.push_back(rev == key);
      }
      cls[at] = it->second;
      orient[at] = (key == rep) ? 1 : -1;
    }
  }

  // Variables: Re part of each class, plus Im part of each non-palindromic one.
  std::vector<int> re_var(palindromic.size()), im_var(palindromic.size(), -1);
  int nvar = 0;
  for (std::size_t c = 0; c < palindromic.size(); ++c) {
    re_var[c] = nvar++;
    if (!palindromic[c]) im_var[c] = nvar++;
  }
  std::vector<CMatrix> coeff(static_cast<std::size_t>(nvar), CMatrix::Zero(n, n));
  CMatrix constant = CMatrix::Zero(n, n);
  for (Eigen::Index u = 0; u < n; ++u) {
    for (Eigen::Index v = 0; v < n; ++v) {
      const auto at = static_cast<std::size_t>(u * n + v);
      if (cls[at] == -1) continue;
      if (cls[at] == -2) {
        constant(u, v) = 1.0;
        continue;
      }
      const auto c = static_cast<std::size_t>(cls[at]);
      coeff[static_cast<std::size_t>(re_var[c])](u, v) = 1.0;
      if (im_var[c] >= 0) coeff[static_cast<std::size_t>(im_var[c])](u, v) = cplx(0.0, orient[at]);
    }
  }

  ConicProblem prob;
  prob.objective = RVector::Zero(nvar);
  LmiBlock blk;
  blk.constant = embed_hermitian(constant);
  for (int i = 0; i < nvar; ++i) {
    const CMatrix& f = coeff[static_cast<std::size_t>(i)];
    prob.objective(i) = (gamma.array() * f.real().array()).sum();
    blk.coeffs.push_back(embed_hermitian(f));
  }
  prob.blocks.push_back(std::move(blk));
  const double offset = (gamma.array() * constant.real().array()).sum();

  Solution sol = solver.solve(prob, tol);
  detail::require_optimal(sol, "max_unrestricted");
  return {sol.objective + offset, std::move(sol)};
}

inline OptimumResult max_unrestricted(const Scenario& sc, const Objective& objective, int level = 1,
                                      const Tolerances& tol = {}, const ConicSolver& solver = default_solver()) {
  return max_unrestricted(WordIndex(sc, level).words(), objective, tol, solver);
}

/// Basis elements with the real embeddings used in LMI blocks.
///
/// Every element of the span may share a kernel (for example qubit
/// identities at level 2). The LMI is then posed on the common range V:
/// M >= 0 iff V^dagger M V >= 0, which restores a strictly feasible point.
struct EmbeddedBasis {
  std::shared_ptr<const Basis> basis;
  std::vector<CMatrix> elements;
  CMatrix range;
  std::vector<RMatrix> embedded;

  explicit EmbeddedBasis(std::shared_ptr<const Basis> b) : basis(std::move(b)) {
    const Eigen::Index n = static_cast<Eigen::Index>(basis->matrix_size());
    CMatrix acc = CMatrix::Zero(n, n);
    for (std::size_t i = 0; i < basis->cardinality(); ++i) {
      elements.push_back(basis->element(i));
      acc += elements.back() * elements.back();
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(acc);
    const double top = es.eigenvalues().maxCoeff();
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (es.eigenvalues()(i) > kRangeThreshold * top) keep.push_back(i);
    }
    range.resize(n, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) range.col(static_cast<Eigen::Index>(j)) = es.eigenvectors().col(keep[j]);
    for (const CMatrix& m : elements) embedded.push_back(embed_hermitian(compress(m)));
  }

  std::size_t size() const { return elements.size(); }
  Eigen::Index n() const { return static_cast<Eigen::Index>(basis->matrix_size()); }
  /// Size of the compressed Hermitian block.
  Eigen::Index block() const { return range.cols(); }
  std::size_t kernel_dim() const { return static_cast<std::size_t>(n() - block()); }

  CMatrix compress(const CMatrix& m) const {
    CMatrix c = range.adjoint() * m * range;
    return (c + c.adjoint()) * 0.5;
  }

  static constexpr double kRangeThreshold = 1e-10;
};

/// Level-k finite-dimension bound over span{M_i}.
inline OptimumResult max_finite(const EmbeddedBasis& eb, const Objective& objective, const Tolerances& tol = {},
                                const ConicSolver& solver = default_solver()) {
  if (!(objective.scenario == eb.basis->scenario)) throw std::domain_error("max_finite: scenario mismatch");
  const RMatrix gamma = objective.gram(*eb.basis->index);
  const auto card = static_cast<Eigen::Index>(eb.size());
  ConicProblem prob;
  prob.objective.resize(card);
  prob.eq_matrix.resize(1, card);
  prob.eq_rhs = RVector::Ones(1);
  LmiBlock blk;
  blk.constant = RMatrix::Zero(2 * eb.block(), 2 * eb.block());
  for (Eigen::Index i = 0; i < card; ++i) {
    const CMatrix& m = eb.elements[static_cast<std::size_t>(i)];
    prob.objective(i) = (gamma.array() * m.real().array()).sum();
    prob.eq_matrix(0, i) = m(0, 0).real();
    blk.coeffs.push_back(eb.embedded[static_cast<std::size_t>(i)]);
  }
  prob.blocks.push_back(std::move(blk));
  Solution sol = solver.solve(prob, tol);
  detail::require_optimal(sol, "max_finite");
  return {sol.objective, std::move(sol)};
}

inline OptimumResult max_finite(const Basis& basis, const Objective& objective, const Tolerances& tol = {},
                                const ConicSolver& solver = default_solver()) {
  return max_finite(EmbeddedBasis(std::make_shared<const Basis>(basis)), objective, tol, solver);
}

/// Linear functional with certified bound sum gamma P >= -x on Q_d^k.
struct Witness {
  Scenario scenario;
  int d = 0;
  int k = 1;
  std::vector<Word> words;
  std::vector<double> gamma;
  double x = 0.0;
  double r = 0.0;
  double nu = 1.0;

  double value(const Behavior& b) const {
    if (b.words.size() != words.size()) throw std::domain_error("witness: behavior layout mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (!(b.words[i] == words[i])) throw std::domain_error("witness: behavior layout mismatch");
      acc += gamma[i] * b.values[i];
    }
    return acc;
  }
  /// value + x; negative means the behavior violates the witness.
  double margin(const Behavior& b) const { return value(b) + x; }

  Witness scaled(double lambda) const {
    Witness w = *this;
    for (double& g : w.gamma) g *= lambda;
    w.x *= lambda;
    w.r *= lambda;
    return w;
  }
};

struct RobustnessResult {
  double nu = 1.0;
  double eta = 1.0;
  Witness witness;
  SolveStatus status = SolveStatus::numerical_failure;
  int iterations = 0;
  double gap = 0.0;
  double primal_value = 0.0;
  double dual_value = 0.0;

  bool certified() const { return nu < 1.0 - kDecisionMargin; }
};

namespace detail {

inline void check_behavior(const Behavior& b, const WordIndex& index) {
  const auto positions = index.behavior_positions();
  if (!(b.scenario == index.scenario())) throw std::domain_error("behavior scenario does not match the basis");
  if (b.words.size() != positions.size() || b.values.size() != positions.size()) {
    throw std::domain_error("behavior must list exactly the " + std::to_string(positions.size()) +
                            " words of length 1.." + std::to_string(index.scenario().l));
  }
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (!(b.words[i] == index[positions[i]])) {
      throw std::domain_error("behavior word " + b.words[i].to_string() + " out of place; expected " +
                              index[positions[i]].to_string());
    }
  }
}

}  // namespace detail

/// Generalized robustness against Q_d^k with the basis held in `eb`.
/// Variables [eta, alpha_1..n, beta_1..n]; X = sum alpha M_i, R = sum beta M_i.
class RobustnessProgram {
 public:
  explicit RobustnessProgram(std::shared_ptr<const EmbeddedBasis> eb) : eb_(std::move(eb)) {
    const auto card = static_cast<Eigen::Index>(eb_->size());
    const Eigen::Index nvar = 1 + 2 * card;
    positions_ = eb_->basis->index->behavior_positions();
    const auto nw = static_cast<Eigen::Index>(positions_.size());
    template_.objective = RVector::Zero(nvar);
    template_.objective(0) = 1.0;
    const Eigen::Index s = 2 * eb_->block();
    LmiBlock bx, br;
    bx.constant = RMatrix::Zero(s, s);
    br.constant = RMatrix::Zero(s, s);
    bx.coeffs.assign(static_cast<std::size_t>(nvar), RMatrix());
    br.coeffs.assign(static_cast<std::size_t>(nvar), RMatrix());
    template_.eq_matrix = RMatrix::Zero(nw + 2, nvar);
    template_.eq_rhs = RVector::Zero(nw + 2);
    for (Eigen::Index i = 0; i < card; ++i) {
      const CMatrix& m = eb_->elements[static_cast<std::size_t>(i)];
      bx.coeffs[static_cast<std::size_t>(1 + i)] = eb_->embedded[static_cast<std::size_t>(i)];
      br.coeffs[static_cast<std::size_t>(1 + card + i)] = eb_->embedded[static_cast<std::size_t>(i)];
      for (Eigen::Index w = 0; w < nw; ++w) {
        const auto p = static_cast<Eigen::Index>(positions_[static_cast<std::size_t>(w)]);
        template_.eq_matrix(w, 1 + i) = -m(p, p).real();
        template_.eq_matrix(w, 1 + card + i) = m(p, p).real();
      }
      template_.eq_matrix(nw, 1 + i) = m(0, 0).real();
      template_.eq_matrix(nw + 1, 1 + card + i) = m(0, 0).real();
    }
    template_.eq_matrix(nw + 1, 0) = 1.0;
    template_.eq_rhs(nw) = 1.0;
    template_.eq_rhs(nw + 1) = 1.0;
    template_.blocks.push_back(std::move(bx));
    template_.blocks.push_back(std::move(br));
  }

  const EmbeddedBasis& basis() const { return *eb_; }

  ConicProblem problem(const Behavior& b) const {
    detail::check_behavior(b, *eb_->basis->index);
    ConicProblem p = template_;
    for (std::size_t w = 0; w < positions_.size(); ++w) p.eq_matrix(static_cast<Eigen::Index>(w), 0) = b.values[w];
    return p;
  }

  RobustnessResult solve(const Behavior& b, const Tolerances& tol = {},
                         const ConicSolver& solver = default_solver()) const {
    const Solution sol = solver.solve(problem(b), tol);
    if (!sol.ok()) {
      throw CertificationError("robustness: solver returned " + std::string(to_string(sol.status)) + " (" +
                                   sol.message + ")",
                               sol);
    }
    const auto nw = static_cast<Eigen::Index>(positions_.size());
    RobustnessResult res;
    res.eta = sol.x(0);
    res.nu = sol.x(0);
    res.status = sol.status;
    res.iterations = sol.iterations;
    res.gap = sol.gap;
    res.primal_value = sol.objective;
    res.dual_value = sol.dual_objective;
    Witness& w = res.witness;
    w.scenario = b.scenario;
    w.d = eb_->basis->d;
    w.k = eb_->basis->k;
    w.words = b.words;
    w.gamma.resize(positions_.size());
    for (Eigen::Index i = 0; i < nw; ++i) w.gamma[static_cast<std::size_t>(i)] = -sol.y(i);
    w.x = sol.y(nw);
    w.r = sol.y(nw + 1);
    w.nu = res.nu;
    return res;
  }

 private:
  std::shared_ptr<const EmbeddedBasis> eb_;
  std::vector<std::size_t> positions_;
  ConicProblem template_;
};

inline RobustnessResult robustness(const Behavior& b, const Basis& basis, const Tolerances& tol = {},
                                   const ConicSolver& solver = default_solver()) {
  const RobustnessProgram prog(std::make_shared<const EmbeddedBasis>(std::make_shared<const Basis>(basis)));
  return prog.solve(b, tol, solver);
}

struct WitnessReport {
  std::size_t checked = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> violators;

  bool sound() const { return violators.empty(); }
};

/// Checks sum gamma P >= -x - slack on every behavior.
inline WitnessReport verify_witness(const Witness& w, const std::vector<Behavior>& behaviors, double slack = 1e-6) {
  WitnessReport rep;
  for (std::size_t i = 0; i < behaviors.size(); ++i) {
    const double m = w.margin(behaviors[i]);
    rep.min_margin = std::min(rep.min_margin, m);
    if (m < -slack) rep.violators.push_back(i);
    ++rep.checked;
  }
  return rep;
}

/// Orthonormal basis of the complement of span{M_i} in hermitian_to_vector
/// coordinates.
inline RMatrix complement_basis(const Basis& basis) {
  const Eigen::Index dim = basis.vectors.rows();
  const Eigen::Index card = basis.vectors.cols();
  Eigen::HouseholderQR<RMatrix> qr(basis.vectors);
  const RMatrix q = qr.householderQ();
  return q.rightCols(dim - card);
}

/// Solves the dual of the robustness program directly:
/// minimize x + r  s.t.  r - sum gamma P = 1,  D_gamma + x E00 - A >= 0,
/// -D_gamma + r E00 - B >= 0,  A, B orthogonal to every M_i.
inline Witness dual_direct(const Behavior& b, const Basis& basis, const Tolerances& tol = {},
                           const ConicSolver& solver = default_solver()) {
  const WordIndex& index = *basis.index;
  detail::check_behavior(b, index);
  const auto positions = index.behavior_positions();
  const auto nw = static_cast<Eigen::Index>(positions.size());
  const RMatrix comp = complement_basis(basis);
  const Eigen::Index nc = comp.cols();
  const auto n = static_cast<Eigen::Index>(index.size());
  // Variables [gamma (nw), x, r, a (nc), b (nc)].
  const Eigen::Index ix = nw, ir = nw + 1, ia = nw + 2, ib = nw + 2 + nc;
  const Eigen::Index nvar = nw + 2 + 2 * nc;
  ConicProblem p;
  p.objective = RVector::Zero(nvar);
  p.objective(ix) = -1.0;
  p.objective(ir) = -1.0;
  LmiBlock b1, b2;
  b1.constant = RMatrix::Zero(2 * n, 2 * n);
  b2.constant = RMatrix::Zero(2 * n, 2 * n);
  b1.coeffs.assign(static_cast<std::size_t>(nvar), RMatrix());
  b2.coeffs.assign(static_cast<std::size_t>(nvar), RMatrix());
  for (Eigen::Index w = 0; w < nw; ++w) {
    CMatrix e = CMatrix::Zero(n, n);
    const auto pos = static_cast<Eigen::Index>(positions[static_cast<std::size_t>(w)]);
    e(pos, pos) = 1.0;
    b1.coeffs[static_cast<std::size_t>(w)] = embed_hermitian(e);
    b2.coeffs[static_cast<std::size_t>(w)] = -embed_hermitian(e);
  }
  b1.coeffs[static_cast<std::size_t>(ix)] = detail::corner_unit(n);
  b2.coeffs[static_cast<std::size_t>(ir)] = detail::corner_unit(n);
  for (Eigen::Index j = 0; j < nc; ++j) {
    const RMatrix e = embed_hermitian(vector_to_hermitian(comp.col(j), n));
    b1.coeffs[static_cast<std::size_t>(ia + j)] = -e;
    b2.coeffs[static_cast<std::size_t>(ib + j)] = -e;
  }
  p.blocks.push_back(std::move(b1));
  p.blocks.push_back(std::move(b2));
  p.eq_matrix = RMatrix::Zero(1, nvar);
  p.eq_matrix(0, ir) = 1.0;
  for (Eigen::Index w = 0; w < nw; ++w) p.eq_matrix(0, w) = -b.values[static_cast<std::size_t>(w)];
  p.eq_rhs = RVector::Ones(1);
  const Solution sol = solver.solve(p, tol);
  detail::require_optimal(sol, "dual_direct");
  Witness out;
  out.scenario = b.scenario;
  out.d = basis.d;
  out.k = basis.k;
  out.words = b.words;
  out.gamma.assign(sol.x.data(), sol.x.data() + nw);
  out.x = sol.x(ix);
  out.r = sol.x(ir);
  out.nu = out.x + out.r;
  return out;
}

}  // namespace seqdim
