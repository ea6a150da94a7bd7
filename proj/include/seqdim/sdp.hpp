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

// Dense semidefinite programming.
//
// User form (maximization):
//
//   maximize  c^T x
//   s.t.      F0_b + sum_i x_i F_ib  >= 0    for every block b
//             G x = h
//
// The bundled solver works on the standard pair
//
//   (P) min <C, X> + h^T u   s.t. A(X) + G^T u = b,  X >= 0
//   (D) max b^T y            s.t. A^T(y) + S = C,    G y = h,  S >= 0
//
// with y = x, b = c, C = F0, A_i = -F_i, so S = F(x) and X is the dual
// matrix Z of the user problem. Equalities are handled by keeping y on the
// affine set {G y = h} and solving the Newton system in its null space.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "seqdim/linalg.hpp"

namespace seqdim {

/// One symmetric LMI block F0 + sum_i x_i F_i. Empty coefficient matrices
/// stand for zero.
struct LmiBlock {
  RMatrix constant;
  std::vector<RMatrix> coeffs;

  Eigen::Index size() const { return constant.rows(); }
  bool touches(std::size_t i) const { return i < coeffs.size() && coeffs[i].size() > 0; }
};

struct ConicProblem {
  RVector objective;
  std::vector<LmiBlock> blocks;
  RMatrix eq_matrix;
  RVector eq_rhs;

  std::size_t num_vars() const { return static_cast<std::size_t>(objective.size()); }

  /// Value of block b at x.
  RMatrix lmi_value(std::size_t b, const RVector& x) const {
    const LmiBlock& blk = blocks[b];
    RMatrix out = blk.constant;
    for (std::size_t i = 0; i < blk.coeffs.size(); ++i) {
      if (blk.touches(i) && x(static_cast<Eigen::Index>(i)) != 0.0) out += x(static_cast<Eigen::Index>(i)) * blk.coeffs[i];
    }
    return out;
  }

  void validate(std::size_t max_block_size = 200) const {
    const std::size_t n = num_vars();
    if (blocks.empty()) throw std::domain_error("conic problem: at least one LMI block required");
    for (const auto& blk : blocks) {
      if (blk.constant.rows() != blk.constant.cols()) throw std::domain_error("conic problem: F0 not square");
      if (static_cast<std::size_t>(blk.constant.rows()) > max_block_size) {
        throw std::domain_error("conic problem: PSD block of size " + std::to_string(blk.constant.rows()) +
                                " exceeds the cap of " + std::to_string(max_block_size));
      }
      if ((blk.constant - blk.constant.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
        throw std::domain_error("conic problem: F0 not symmetric");
      }
      if (blk.coeffs.size() > n) throw std::domain_error("conic problem: more coefficient matrices than variables");
      for (const auto& f : blk.coeffs) {
        if (f.size() == 0) continue;
        if (f.rows() != blk.size() || f.cols() != blk.size()) throw std::domain_error("conic problem: F_i size mismatch");
        if ((f - f.transpose()).cwiseAbs().maxCoeff() > 1e-10) throw std::domain_error("conic problem: F_i not symmetric");
      }
    }
    if (eq_matrix.rows() != eq_rhs.size()) throw std::domain_error("conic problem: equality rows/rhs mismatch");
    if (eq_matrix.rows() > 0 && static_cast<std::size_t>(eq_matrix.cols()) != n) {
      throw std::domain_error("conic problem: equality matrix has wrong column count");
    }
  }

  /// Self-describing text dump for cross-checking with external solvers.
  void dump(std::ostream& os) const {
    os.precision(17);
    os << "# seqdim conic problem v1\n";
    os << "# maximize c^T x  s.t.  F0_b + sum_i x_i F_ib >= 0,  G x = h\n";
    os << "vars " << num_vars() << "\n";
    os << "objective";
    for (Eigen::Index i = 0; i < objective.size(); ++i) os << ' ' << objective(i);
    os << "\nblocks " << blocks.size() << "\n";
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const auto& blk = blocks[b];
      os << "block " << b << " size " << blk.size() << "\n";
      auto emit = [&](const RMatrix& m, long var) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
          for (Eigen::Index j = i; j < m.cols(); ++j) {
            if (m(i, j) != 0.0) os << "entry " << var << ' ' << i << ' ' << j << ' ' << m(i, j) << "\n";
          }
        }
      };
      emit(blk.constant, -1);
      for (std::size_t i = 0; i < blk.coeffs.size(); ++i) {
        if (blk.touches(i)) emit(blk.coeffs[i], static_cast<long>(i));
      }
    }
    os << "equalities " << eq_matrix.rows() << "\n";
    for (Eigen::Index r = 0; r < eq_matrix.rows(); ++r) {
      os << "eq";
      for (Eigen::Index c = 0; c < eq_matrix.cols(); ++c) os << ' ' << eq_matrix(r, c);
      os << " = " << eq_rhs(r) << "\n";
    }
  }
};

enum class SolveStatus { optimal, infeasible, unbounded, numerical_failure };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::numerical_failure: return "numerical-failure";
  }
  return "unknown";
}

struct Tolerances {
  double feasibility = 1e-8;
  double gap = 1e-7;
  int max_iterations = 200;
  std::size_t max_block_size = 200;
};

struct IterationRecord {
  int iteration = 0;
  double primal_objective = 0.0;  // user objective c^T x
  double dual_objective = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  double mu = 0.0;
  double step_primal = 0.0;
  double step_dual = 0.0;
};

struct Solution {
  SolveStatus status = SolveStatus::numerical_failure;
  RVector x;
  double objective = 0.0;
  double dual_objective = 0.0;
  /// Dual PSD matrix per LMI block.
  std::vector<RMatrix> z;
  /// Multipliers y for G x = h, in the convention
  /// L = c^T x + sum_b <Z_b, F_b(x)> + y^T (h - G x).
  RVector y;
  double gap = 0.0;
  double lmi_min_eigenvalue = 0.0;
  double equality_residual = 0.0;
  int iterations = 0;
  std::vector<IterationRecord> trace;
  std::string message;

  bool ok() const { return status == SolveStatus::optimal; }
};

/// Backend interface; any conforming solver can replace the bundled one.
class ConicSolver {
 public:
  virtual ~ConicSolver() = default;
  virtual Solution solve(const ConicProblem& problem, const Tolerances& tol) const = 0;
};

class InteriorPointSolver final : public ConicSolver {
 public:
  Solution solve(const ConicProblem& problem, const Tolerances& tol) const override;
};

inline const ConicSolver& default_solver() {
  static const InteriorPointSolver solver;
  return solver;
}

inline Solution solve(const ConicProblem& problem, const Tolerances& tol = {}) {
  return default_solver().solve(problem, tol);
}

/// Bound on <Z, F(x)> at a reported optimum.
inline constexpr double kComplementarity = 1e-6;

namespace detail {

// Nesterov-Todd scaling of one block: W = G G^T with G^{-1} X G^{-T} =
// G^T S G = diag(lambda).
struct NtScaling {
  RMatrix g;
  RMatrix g_inv;
  RVector lambda;
  RMatrix w;
};

inline bool nt_scaling(const RMatrix& x, const RMatrix& s, NtScaling& out) {
  Eigen::LLT<RMatrix> lx(x), ls(s);
  if (lx.info() != Eigen::Success || ls.info() != Eigen::Success) return false;
  const RMatrix l = lx.matrixL();
  const RMatrix r = ls.matrixL();
  Eigen::JacobiSVD<RMatrix> svd(r.transpose() * l, Eigen::ComputeFullU | Eigen::ComputeFullV);
  out.lambda = svd.singularValues();
  if (out.lambda.minCoeff() <= 0.0) return false;
  const RVector inv_sqrt = out.lambda.cwiseSqrt().cwiseInverse();
  out.g = l * svd.matrixV() * inv_sqrt.asDiagonal();
  // G^{-1} = Lambda^{-1/2} U^T R^T, free of triangular inverses.
  out.g_inv = inv_sqrt.asDiagonal() * svd.matrixU().transpose() * r.transpose();
  out.w = out.g * out.g.transpose();
  out.w = (out.w + out.w.transpose()).eval() * 0.5;
  return true;
}

// Largest alpha <= inf with lambda + alpha * d >= 0 (d symmetric, scaled).
inline double max_step(const RVector& lambda, const RMatrix& d) {
  const RVector inv_sqrt = lambda.cwiseSqrt().cwiseInverse();
  RMatrix t = inv_sqrt.asDiagonal() * d * inv_sqrt.asDiagonal();
  t = (t + t.transpose()).eval() * 0.5;
  const double mn = min_eigenvalue(t);
  return mn < 0.0 ? -1.0 / mn : std::numeric_limits<double>::infinity();
}

inline RMatrix unvec(const RVector& v, Eigen::Index s) { return Eigen::Map<const RMatrix>(v.data(), s, s); }

}  // namespace detail

inline Solution InteriorPointSolver::solve(const ConicProblem& prob, const Tolerances& tol) const {
  prob.validate(tol.max_block_size);
  Solution sol;
  const Eigen::Index n = static_cast<Eigen::Index>(prob.num_vars());
  const Eigen::Index meq = prob.eq_matrix.rows();
  const std::size_t nb = prob.blocks.size();
  const RVector& c = prob.objective;

  // Equality preprocessing: particular solution and orthonormal null space.
  RVector y_p = RVector::Zero(n);
  RMatrix null_basis;
  Eigen::ColPivHouseholderQR<RMatrix> gt_qr;
  if (meq > 0) {
    gt_qr.setThreshold(1e-11);
    gt_qr.compute(prob.eq_matrix.transpose());
    Eigen::CompleteOrthogonalDecomposition<RMatrix> cod(prob.eq_matrix);
    cod.setThreshold(1e-11);
    y_p = cod.solve(prob.eq_rhs);
    const double eq_res = (prob.eq_matrix * y_p - prob.eq_rhs).norm();
    if (eq_res > 1e-9 * (1.0 + prob.eq_rhs.norm())) {
      sol.status = SolveStatus::infeasible;
      sol.message = "equality constraints are inconsistent (residual " + std::to_string(eq_res) + ")";
      return sol;
    }
    const Eigen::Index rank = gt_qr.rank();
    const RMatrix q = gt_qr.householderQ();
    null_basis = q.rightCols(n - rank);
  } else {
    null_basis = RMatrix::Identity(n, n);
  }

  // Per-block data: variable lists and vectorized coefficient matrices.
  struct BlockData {
    Eigen::Index s = 0;
    std::vector<Eigen::Index> vars;
    RMatrix va;  // columns vec(A_i) = -vec(F_i)
    RMatrix c;
  };
  std::vector<BlockData> bd(nb);
  Eigen::Index total_size = 0;
  for (std::size_t b = 0; b < nb; ++b) {
    const LmiBlock& blk = prob.blocks[b];
    bd[b].s = blk.size();
    bd[b].c = blk.constant;
    total_size += blk.size();
    for (std::size_t i = 0; i < blk.coeffs.size(); ++i) {
      if (blk.touches(i) && blk.coeffs[i].cwiseAbs().maxCoeff() > 0.0) bd[b].vars.push_back(static_cast<Eigen::Index>(i));
    }
    bd[b].va.resize(bd[b].s * bd[b].s, static_cast<Eigen::Index>(bd[b].vars.size()));
    for (std::size_t j = 0; j < bd[b].vars.size(); ++j) {
      bd[b].va.col(static_cast<Eigen::Index>(j)) =
          -Eigen::Map<const RVector>(blk.coeffs[static_cast<std::size_t>(bd[b].vars[j])].data(), bd[b].s * bd[b].s);
    }
  }

  // Drop null-space directions that leave every block unchanged.
  {
    RMatrix gram = RMatrix::Zero(n, n);
    for (const auto& d : bd) {
      const RMatrix local = d.va.transpose() * d.va;
      for (std::size_t i = 0; i < d.vars.size(); ++i) {
        for (std::size_t j = 0; j < d.vars.size(); ++j) {
          gram(d.vars[i], d.vars[j]) += local(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
      }
    }
    const RMatrix reduced = null_basis.transpose() * gram * null_basis;
    Eigen::SelfAdjointEigenSolver<RMatrix> es;
    if (reduced.size() > 0) es.compute(reduced);
    const double top = reduced.size() > 0 ? std::max(es.eigenvalues().maxCoeff(), 0.0) : 0.0;
    std::vector<Eigen::Index> keep, drop;
    const Eigen::Index nev = reduced.size() > 0 ? es.eigenvalues().size() : 0;
    for (Eigen::Index i = 0; i < nev; ++i) {
      (es.eigenvalues()(i) > 1e-10 * std::max(top, 1e-300) && top > 0.0 ? keep : drop).push_back(i);
    }
    for (Eigen::Index i : drop) {
      const RVector dir = null_basis * es.eigenvectors().col(i);
      if (std::abs(c.dot(dir)) > 1e-9 * (1.0 + c.norm())) {
        sol.status = SolveStatus::unbounded;
        sol.message = "objective improves along a direction that leaves the LMI unchanged";
        return sol;
      }
    }
    RMatrix nb_new(n, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) {
      nb_new.col(static_cast<Eigen::Index>(j)) = null_basis * es.eigenvectors().col(keep[j]);
    }
    null_basis = nb_new;
  }
  const Eigen::Index nred = null_basis.cols();

  auto a_op = [&](const std::vector<RMatrix>& x) {  // A(X)
    RVector out = RVector::Zero(n);
    for (std::size_t b = 0; b < nb; ++b) {
      const RVector local = bd[b].va.transpose() * Eigen::Map<const RVector>(x[b].data(), bd[b].s * bd[b].s);
      for (std::size_t j = 0; j < bd[b].vars.size(); ++j) out(bd[b].vars[j]) += local(static_cast<Eigen::Index>(j));
    }
    return out;
  };
  auto at_op = [&](const RVector& y, std::size_t b) {  // A^T(y) restricted to block b
    RVector local(static_cast<Eigen::Index>(bd[b].vars.size()));
    for (std::size_t j = 0; j < bd[b].vars.size(); ++j) local(static_cast<Eigen::Index>(j)) = y(bd[b].vars[j]);
    RMatrix out = detail::unvec(bd[b].va * local, bd[b].s);
    return RMatrix((out + out.transpose()) * 0.5);
  };
  auto eq_mult = [&](const RVector& resid) -> RVector {  // least-squares u with G^T u ~ resid
    if (meq == 0) return RVector();
    return gt_qr.solve(resid);
  };
  auto finish = [&](Solution& out, const RVector& y, const std::vector<RMatrix>& x) {
    out.x = y;
    out.objective = c.dot(y);
    out.z = x;
    const RVector ax = a_op(x);
    out.y = meq ? eq_mult(c - ax) : RVector();
    double pobj = 0.0;
    for (std::size_t b = 0; b < nb; ++b) pobj += (bd[b].c.array() * x[b].array()).sum();
    if (meq) pobj += prob.eq_rhs.dot(out.y);
    out.dual_objective = pobj;
    out.gap = std::abs(pobj - out.objective);
    double mn = std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < nb; ++b) mn = std::min(mn, min_eigenvalue(prob.lmi_value(b, y)));
    out.lmi_min_eigenvalue = mn;
    out.equality_residual = meq ? (prob.eq_matrix * y - prob.eq_rhs).cwiseAbs().maxCoeff() : 0.0;
  };

  RVector y = y_p;
  if (nred == 0) {
    // Nothing to optimize: the equalities pin x.
    std::vector<RMatrix> x(nb);
    for (std::size_t b = 0; b < nb; ++b) x[b] = RMatrix::Zero(bd[b].s, bd[b].s);
    finish(sol, y, x);
    sol.status = sol.lmi_min_eigenvalue >= -tol.feasibility ? SolveStatus::optimal : SolveStatus::infeasible;
    sol.gap = 0.0;
    sol.dual_objective = sol.objective;
    sol.message = "feasible set is a single point";
    return sol;
  }

  // Initial point.
  const double c_norm = [&] {
    double acc = 0.0;
    for (const auto& d : bd) acc += d.c.squaredNorm();
    return std::sqrt(acc);
  }();
  const RVector b_red = null_basis.transpose() * c;
  std::vector<RMatrix> xm(nb), sm(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    const double s = static_cast<double>(bd[b].s);
    double max_a = 0.0, xi_ratio = 0.0;
    for (std::size_t j = 0; j < bd[b].vars.size(); ++j) {
      const double an = bd[b].va.col(static_cast<Eigen::Index>(j)).norm();
      max_a = std::max(max_a, an);
      xi_ratio = std::max(xi_ratio, (1.0 + std::abs(c(bd[b].vars[j]))) / (1.0 + an));
    }
    const double xi = std::max({10.0, std::sqrt(s), s * xi_ratio});
    const double eta = std::max({10.0, std::sqrt(s), (1.0 + std::max(max_a, bd[b].c.norm())) / std::sqrt(s)});
    xm[b] = xi * RMatrix::Identity(bd[b].s, bd[b].s);
    sm[b] = eta * RMatrix::Identity(bd[b].s, bd[b].s);
  }

  std::vector<detail::NtScaling> nt(nb);
  std::vector<RMatrix> rd(nb);
  const double b_scale = 1.0 + c.norm();
  const double c_scale = 1.0 + c_norm;

  for (int iter = 0; iter <= tol.max_iterations; ++iter) {
    const RVector ax = a_op(xm);
    const RVector r_red = null_basis.transpose() * (c - ax);
    const RVector u = eq_mult(c - ax);
    double pobj = 0.0, xs = 0.0, rd_norm2 = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
      pobj += (bd[b].c.array() * xm[b].array()).sum();
      xs += (xm[b].array() * sm[b].array()).sum();
      rd[b] = bd[b].c - sm[b] - at_op(y, b);
      rd_norm2 += rd[b].squaredNorm();
    }
    if (meq) pobj += prob.eq_rhs.dot(u);
    const double dobj = c.dot(y);
    const double pinf = r_red.norm() / b_scale;
    const double dinf = std::sqrt(rd_norm2) / c_scale;
    const double mu = xs / static_cast<double>(total_size);

    IterationRecord rec;
    rec.iteration = iter;
    rec.primal_objective = dobj;
    rec.dual_objective = pobj;
    rec.primal_infeasibility = dinf;
    rec.dual_infeasibility = pinf;
    rec.mu = mu;

    const double gap_target = 0.5 * tol.gap * (1.0 + std::abs(dobj));
    auto lmi_ok = [&] {
      // S drifts from F(y) by roundoff; the certificate only needs F(y) >= 0.
      if (dinf < 0.5 * tol.feasibility) return true;
      if (dinf > 1e-5) return false;
      for (std::size_t b = 0; b < nb; ++b) {
        if (min_eigenvalue(prob.lmi_value(b, y)) < -0.9 * tol.feasibility) return false;
      }
      return true;
    };
    if (pinf < tol.feasibility && std::abs(pobj - dobj) < gap_target && xs < 0.5 * kComplementarity && lmi_ok()) {
      sol.trace.push_back(rec);
      finish(sol, y, xm);
      sol.status = SolveStatus::optimal;
      sol.iterations = iter;
      sol.message = "converged";
      return sol;
    }

    // Infeasibility certificates.
    if (iter > 5) {
      double trace_x = 0.0;
      for (const auto& x : xm) trace_x += x.trace();
      if (trace_x > 1e8) {
        std::vector<RMatrix> ray(nb);
        for (std::size_t b = 0; b < nb; ++b) ray[b] = xm[b] / trace_x;
        const RVector aray = a_op(ray);
        const RVector ur = eq_mult(-aray);
        double val = 0.0;
        for (std::size_t b = 0; b < nb; ++b) val += (bd[b].c.array() * ray[b].array()).sum();
        if (meq) val += prob.eq_rhs.dot(ur);
        const double res = (null_basis.transpose() * aray).norm();
        if (val < 0.0 && res < 1e-6 * std::abs(val)) {
          sol.trace.push_back(rec);
          finish(sol, y, xm);
          sol.status = SolveStatus::infeasible;
          sol.iterations = iter;
          sol.message = "LMI infeasible: primal ray certificate";
          return sol;
        }
      }
      const RVector ray = y - y_p;
      const double rn = ray.norm();
      if (rn > 1e8) {
        const RVector dir = ray / rn;
        double mn = std::numeric_limits<double>::infinity(), fn = 0.0;
        for (std::size_t b = 0; b < nb; ++b) {
          RMatrix lin = prob.lmi_value(b, dir) - prob.blocks[b].constant;
          mn = std::min(mn, min_eigenvalue(lin));
          fn = std::max(fn, lin.norm());
        }
        if (c.dot(dir) > 0.0 && mn > -1e-6 * std::max(fn, 1e-12)) {
          sol.trace.push_back(rec);
          finish(sol, y, xm);
          sol.status = SolveStatus::unbounded;
          sol.iterations = iter;
          sol.message = "objective unbounded: recession direction certificate";
          return sol;
        }
      }
    }
    if (iter == tol.max_iterations) {
      sol.trace.push_back(rec);
      break;
    }

    bool scaled = true;
    for (std::size_t b = 0; b < nb; ++b) scaled = scaled && detail::nt_scaling(xm[b], sm[b], nt[b]);
    if (!scaled) {
      sol.trace.push_back(rec);
      finish(sol, y, xm);
      sol.status = SolveStatus::numerical_failure;
      sol.iterations = iter;
      sol.message = "lost positive definiteness of iterates";
      return sol;
    }

    // Schur complement M_ij = <A_i, W A_j W>.
    RMatrix schur = RMatrix::Zero(n, n);
    for (std::size_t b = 0; b < nb; ++b) {
      const auto& d = bd[b];
      if (d.vars.empty()) continue;
      RMatrix wa(d.s * d.s, static_cast<Eigen::Index>(d.vars.size()));
      for (std::size_t j = 0; j < d.vars.size(); ++j) {
        const RMatrix aj = detail::unvec(d.va.col(static_cast<Eigen::Index>(j)), d.s);
        const RMatrix t = nt[b].w * aj * nt[b].w;
        wa.col(static_cast<Eigen::Index>(j)) = Eigen::Map<const RVector>(t.data(), d.s * d.s);
      }
      const RMatrix local = d.va.transpose() * wa;
      for (std::size_t i = 0; i < d.vars.size(); ++i) {
        for (std::size_t j = 0; j < d.vars.size(); ++j) {
          schur(d.vars[i], d.vars[j]) += local(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
      }
    }
    RMatrix schur_red = null_basis.transpose() * schur * null_basis;
    schur_red = (schur_red + schur_red.transpose()).eval() * 0.5;
    Eigen::LLT<RMatrix> chol(schur_red);
    for (double rel = 1e-14; chol.info() != Eigen::Success && rel < 1e-7; rel *= 10.0) {
      const double shift = rel * std::max(1.0, schur_red.diagonal().cwiseAbs().maxCoeff());
      chol.compute(schur_red + shift * RMatrix::Identity(nred, nred));
    }
    if (chol.info() != Eigen::Success) {
      sol.trace.push_back(rec);
      finish(sol, y, xm);
      sol.status = SolveStatus::numerical_failure;
      sol.iterations = iter;
      sol.message = "Schur complement is not positive definite";
      return sol;
    }

    // Newton direction for a scaled complementarity target T:
    // Lambda o (dX~ + dS~) = T  =>  dX + W dS W = G H G^T.
    struct Direction {
      RVector dy;
      std::vector<RMatrix> dx, ds, dx_s, ds_s;
    };
    auto direction = [&](const std::vector<RMatrix>& target) {
      Direction dir;
      std::vector<RMatrix> k(nb);
      std::vector<RMatrix> kk(nb);
      for (std::size_t b = 0; b < nb; ++b) {
        const RVector& lam = nt[b].lambda;
        RMatrix h(bd[b].s, bd[b].s);
        for (Eigen::Index i = 0; i < bd[b].s; ++i) {
          for (Eigen::Index j = 0; j < bd[b].s; ++j) h(i, j) = 2.0 * target[b](i, j) / (lam(i) + lam(j));
        }
        k[b] = nt[b].g * h * nt[b].g.transpose();
        kk[b] = k[b] - nt[b].w * rd[b] * nt[b].w;
      }
      const RVector rhs = r_red - null_basis.transpose() * a_op(kk);
      RVector dz = chol.solve(rhs);
      dir.dx.resize(nb);
      dir.ds.resize(nb);
      dir.dx_s.resize(nb);
      dir.ds_s.resize(nb);
      auto build = [&] {
        dir.dy = null_basis * dz;
        for (std::size_t b = 0; b < nb; ++b) {
          dir.ds[b] = rd[b] - at_op(dir.dy, b);
          RMatrix dx = k[b] - nt[b].w * dir.ds[b] * nt[b].w;
          dir.dx[b] = (dx + dx.transpose()) * 0.5;
        }
      };
      build();
      // Iterative refinement against the primal equation N^T A(dX) = r.
      for (int pass = 0; pass < 2; ++pass) {
        const RVector res = r_red - null_basis.transpose() * a_op(dir.dx);
        if (res.norm() <= 1e-14 * (1.0 + r_red.norm())) break;
        dz += chol.solve(res);
        build();
      }
      for (std::size_t b = 0; b < nb; ++b) {
        RMatrix xs_ = nt[b].g_inv * dir.dx[b] * nt[b].g_inv.transpose();
        RMatrix ss_ = nt[b].g.transpose() * dir.ds[b] * nt[b].g;
        dir.dx_s[b] = (xs_ + xs_.transpose()) * 0.5;
        dir.ds_s[b] = (ss_ + ss_.transpose()) * 0.5;
      }
      return dir;
    };
    auto steps = [&](const Direction& dir, double& ap, double& ad) {
      ap = ad = std::numeric_limits<double>::infinity();
      for (std::size_t b = 0; b < nb; ++b) {
        ap = std::min(ap, detail::max_step(nt[b].lambda, dir.dx_s[b]));
        ad = std::min(ad, detail::max_step(nt[b].lambda, dir.ds_s[b]));
      }
    };

    std::vector<RMatrix> target(nb);
    for (std::size_t b = 0; b < nb; ++b) target[b] = -RMatrix(nt[b].lambda.array().square().matrix().asDiagonal());
    const Direction aff = direction(target);
    double ap = 0.0, ad = 0.0;
    steps(aff, ap, ad);
    ap = std::min(1.0, ap);
    ad = std::min(1.0, ad);
    double xs_aff = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
      const RMatrix xa = RMatrix(nt[b].lambda.asDiagonal()) + ap * aff.dx_s[b];
      const RMatrix sa = RMatrix(nt[b].lambda.asDiagonal()) + ad * aff.ds_s[b];
      xs_aff += (xa.array() * sa.array()).sum();
    }
    const double mu_aff = xs_aff / static_cast<double>(total_size);
    double sigma = std::pow(std::max(0.0, std::min(1.0, mu_aff / mu)), 3.0);
    // Keep some centering while infeasibility dominates.
    if (std::max(pinf, dinf) > 1e-2 * std::max(1.0, mu)) sigma = std::max(sigma, 0.1);

    for (std::size_t b = 0; b < nb; ++b) {
      const RMatrix cross = aff.dx_s[b] * aff.ds_s[b];
      target[b] = -RMatrix(nt[b].lambda.array().square().matrix().asDiagonal()) +
                  sigma * mu * RMatrix::Identity(bd[b].s, bd[b].s) - (cross + cross.transpose()) * 0.5;
    }
    const Direction dir = direction(target);
    steps(dir, ap, ad);
    const double tau = (mu < 1e-4) ? 0.99 : 0.95;
    ap = std::min(1.0, tau * ap);
    ad = std::min(1.0, tau * ad);
    rec.step_primal = ad;
    rec.step_dual = ap;
    sol.trace.push_back(rec);

    // Back off if roundoff pushes the new iterate out of the cone.
    std::vector<RMatrix> xn(nb), sn(nb);
    for (int tries = 0;; ++tries) {
      bool pd = true;
      for (std::size_t b = 0; b < nb && pd; ++b) {
        xn[b] = xm[b] + ap * dir.dx[b];
        sn[b] = sm[b] + ad * dir.ds[b];
        xn[b] = (xn[b] + xn[b].transpose()).eval() * 0.5;
        sn[b] = (sn[b] + sn[b].transpose()).eval() * 0.5;
        pd = Eigen::LLT<RMatrix>(xn[b]).info() == Eigen::Success && Eigen::LLT<RMatrix>(sn[b]).info() == Eigen::Success;
      }
      if (pd) break;
      if (tries == 30) {
        finish(sol, y, xm);
        sol.status = SolveStatus::numerical_failure;
        sol.iterations = iter;
        sol.message = "lost positive definiteness of iterates";
        return sol;
      }
      ap *= 0.5;
      ad *= 0.5;
    }
    rec.step_primal = ad;
    rec.step_dual = ap;
    sol.trace.back() = rec;
    xm.swap(xn);
    sm.swap(sn);
    y += ad * dir.dy;
    if (ap < 1e-10 && ad < 1e-10) {
      finish(sol, y, xm);
      sol.status = SolveStatus::numerical_failure;
      sol.iterations = iter + 1;
      sol.message = "step lengths collapsed";
      return sol;
    }
  }
  finish(sol, y, xm);
  sol.status = SolveStatus::numerical_failure;
  sol.iterations = tol.max_iterations;
  sol.message = "iteration limit reached";
  return sol;
}

}  // namespace seqdim
