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

// Randomized basis of the real linear span of d-dimensional moment matrices,
// built by Gram-Schmidt with a norm-drop stopping rule.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "seqdim/linalg.hpp"
#include "seqdim/quantum.hpp"
#include "seqdim/words.hpp"

namespace seqdim {

struct BasisOptions {
  int stop_window = 20;
  double drop_threshold = 1e-7;
  /// Candidate budget; 0 means N^2 + 10 * stop_window.
  std::size_t max_candidates = 0;
};

/// Orthonormal basis {M_i} of span(M_d^k). Elements are stored as columns of
/// `vectors` in the coordinates of hermitian_to_vector.
struct Basis {
  Scenario scenario;
  int d = 0;
  int k = 1;
  std::shared_ptr<const WordIndex> index;
  RMatrix vectors;
  std::vector<double> norm_log;
  std::vector<bool> retained_log;

  std::size_t cardinality() const { return static_cast<std::size_t>(vectors.cols()); }
  std::size_t matrix_size() const { return index->size(); }

  CMatrix element(std::size_t i) const {
    return vector_to_hermitian(vectors.col(static_cast<Eigen::Index>(i)), static_cast<Eigen::Index>(matrix_size()));
  }

  /// Residual norm of h after projection onto the span.
  double residual(const CMatrix& h) const {
    const RVector v = hermitian_to_vector(h);
    return (v - vectors * (vectors.transpose() * v)).norm();
  }

  double min_retained_norm() const {
    double out = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < norm_log.size(); ++i) {
      if (retained_log[i]) out = std::min(out, norm_log[i]);
    }
    return out;
  }
  double max_rejected_norm() const {
    double out = 0.0;
    for (std::size_t i = 0; i < norm_log.size(); ++i) {
      if (!retained_log[i]) out = std::max(out, norm_log[i]);
    }
    return out;
  }
};

class BasisBuildError : public std::runtime_error {
 public:
  BasisBuildError(const std::string& what, std::vector<double> log)
      : std::runtime_error(what), norm_log(std::move(log)) {}
  std::vector<double> norm_log;
};

inline RVector sampled_moment_vector(const Scenario& sc, int d, const std::shared_ptr<const WordIndex>& index,
                                     Rng& rng) {
  const Realization real = random_realization(sc, d, rng);
  return hermitian_to_vector(moment_matrix(real.state, real.measurements, index).entries);
}

inline Basis build_basis(const Scenario& sc, int d, int k, Rng& rng, const BasisOptions& opt = {}) {
  if (d < 1) throw std::domain_error("build_basis: d must be >= 1");
  if (k < 1) throw std::domain_error("build_basis: k must be >= 1");
  Basis basis;
  basis.scenario = sc;
  basis.d = d;
  basis.k = k;
  basis.index = std::make_shared<const WordIndex>(sc, k);
  const Eigen::Index dim = static_cast<Eigen::Index>(basis.index->size() * basis.index->size());
  const std::size_t budget =
      opt.max_candidates ? opt.max_candidates : static_cast<std::size_t>(dim) + 10 * static_cast<std::size_t>(opt.stop_window);

  RMatrix q(dim, std::min<Eigen::Index>(dim, 64));
  Eigen::Index count = 0;
  int rejections = 0;
  for (std::size_t iter = 0; iter < budget; ++iter) {
    RVector v = sampled_moment_vector(sc, d, basis.index, rng);
    v /= v.norm();
    // Modified Gram-Schmidt, applied twice.
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index j = 0; j < count; ++j) v -= q.col(j).dot(v) * q.col(j);
    }
    const double residual = v.norm();
    basis.norm_log.push_back(residual);
    const bool keep = residual >= opt.drop_threshold && count < dim;
    basis.retained_log.push_back(keep);
    if (keep) {
      if (count == q.cols()) q.conservativeResize(Eigen::NoChange, std::min<Eigen::Index>(dim, 2 * q.cols()));
      q.col(count++) = v / residual;
      rejections = 0;
    } else if (++rejections >= opt.stop_window) {
      basis.vectors = q.leftCols(count);
      return basis;
    }
  }
  throw BasisBuildError("build_basis: no norm drop observed for " + sc.to_string() + " d=" + std::to_string(d) +
                            " k=" + std::to_string(k) + " within " + std::to_string(budget) + " candidates",
                        basis.norm_log);
}

/// Numerical rank (singular values above 1e-7 times the largest) of stacked
/// vectorized moment matrices. Independent cross-check for build_basis.
inline std::size_t rank_oracle(const Scenario& sc, int d, int k, std::size_t n_samples, Rng& rng) {
  auto index = std::make_shared<const WordIndex>(sc, k);
  const Eigen::Index dim = static_cast<Eigen::Index>(index->size() * index->size());
  RMatrix rows(static_cast<Eigen::Index>(n_samples), dim);
  for (std::size_t i = 0; i < n_samples; ++i) {
    rows.row(static_cast<Eigen::Index>(i)) = sampled_moment_vector(sc, d, index, rng).transpose();
  }
  Eigen::BDCSVD<RMatrix> svd(rows);
  const RVector& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  std::size_t rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > 1e-7 * sv(0)) ++rank;
  }
  return rank;
}

struct CardinalityCell {
  int d = 0;
  std::optional<std::size_t> cardinality;
  std::string error;
};

struct CardinalityRow {
  Scenario scenario;
  std::vector<CardinalityCell> cells;
  /// cardinality(d=3) / cardinality(d=2) when both are present.
  std::optional<double> ratio_3_to_2;
  /// flags[i] is set when cells[i+1] has strictly more elements than cells[i].
  std::vector<bool> strict_increase;

  bool any_gap() const { return std::find(strict_increase.begin(), strict_increase.end(), true) != strict_increase.end(); }
};

inline std::vector<CardinalityRow> classify(const std::vector<Scenario>& scenarios, std::vector<int> dims, int k,
                                            std::uint64_t seed, const BasisOptions& opt = {}) {
  std::sort(dims.begin(), dims.end());
  std::vector<CardinalityRow> table;
  for (const Scenario& sc : scenarios) {
    CardinalityRow row;
    row.scenario = sc;
    for (int d : dims) {
      CardinalityCell cell;
      cell.d = d;
      try {
        Rng rng(seed ^ (static_cast<std::uint64_t>(d) * 0x9E3779B97F4A7C15ULL));
        cell.cardinality = build_basis(sc, d, k, rng, opt).cardinality();
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
      row.cells.push_back(cell);
    }
    std::optional<std::size_t> c2, c3;
    for (const auto& cell : row.cells) {
      if (cell.d == 2) c2 = cell.cardinality;
      if (cell.d == 3) c3 = cell.cardinality;
    }
    if (c2 && c3 && *c2 > 0) row.ratio_3_to_2 = static_cast<double>(*c3) / static_cast<double>(*c2);
    for (std::size_t i = 0; i + 1 < row.cells.size(); ++i) {
      const auto& a = row.cells[i].cardinality;
      const auto& b = row.cells[i + 1].cardinality;
      row.strict_increase.push_back(a && b && *b > *a);
    }
    table.push_back(std::move(row));
  }
  return table;
}

}  // namespace seqdim
