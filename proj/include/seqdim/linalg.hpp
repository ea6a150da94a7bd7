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

#include <cmath>
#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

namespace seqdim {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using CVector = Eigen::VectorXcd;

inline bool is_hermitian(const CMatrix& h, double tol = 1e-10) {
  return h.rows() == h.cols() && (h - h.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

/// Real symmetric embedding [[Re H, -Im H], [Im H, Re H]]. PSD iff H is PSD.
inline RMatrix embed_hermitian(const CMatrix& h) {
  if (h.rows() != h.cols()) throw std::domain_error("embed_hermitian: matrix is not square");
  if (h.size() > 0 && !is_hermitian(h)) throw std::domain_error("embed_hermitian: matrix is not Hermitian");
  const Eigen::Index n = h.rows();
  RMatrix out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = h.real();
  out.bottomRightCorner(n, n) = h.real();
  out.topRightCorner(n, n) = -h.imag();
  out.bottomLeftCorner(n, n) = h.imag();
  // Exact symmetry for the solver.
  return (out + out.transpose()) * 0.5;
}

// Hermitian N x N matrices form a real vector space of dimension N^2. These
// coordinates are orthonormal for <A, B> = Re Tr(A^dagger B): diagonal reals,
// then sqrt(2) Re and sqrt(2) Im of each strictly upper entry.
inline RVector hermitian_to_vector(const CMatrix& h) {
  const Eigen::Index n = h.rows();
  RVector v(n * n);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) v(k++) = h(i, i).real();
  const double root2 = std::sqrt(2.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      v(k++) = root2 * h(i, j).real();
      v(k++) = root2 * h(i, j).imag();
    }
  }
  return v;
}

inline CMatrix vector_to_hermitian(const RVector& v, Eigen::Index n) {
  if (v.size() != n * n) throw std::domain_error("vector_to_hermitian: size mismatch");
  CMatrix h(n, n);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) h(i, i) = v(k++);
  const double inv = 1.0 / std::sqrt(2.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double re = v(k++) * inv;
      const double im = v(k++) * inv;
      h(i, j) = cplx(re, im);
      h(j, i) = cplx(re, -im);
    }
  }
  return h;
}

/// Hilbert-Schmidt inner product Re Tr(A^dagger B).
inline double hs_inner(const CMatrix& a, const CMatrix& b) {
  return (a.conjugate().array() * b.array()).real().sum();
}

inline double min_eigenvalue(const CMatrix& h) {
  if (h.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

inline double min_eigenvalue(const RMatrix& s) {
  if (s.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<RMatrix> es(s, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace seqdim
