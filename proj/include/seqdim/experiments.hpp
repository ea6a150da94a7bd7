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

// Monte Carlo campaigns: random behaviors from one dimension tested against
// the level-k relaxation of a smaller one.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "seqdim/basis.hpp"
#include "seqdim/certify.hpp"
#include "seqdim/quantum.hpp"

namespace seqdim {

/// splitmix64 finalizer over (master, index); order-independent per-sample seeds.
inline std::uint64_t sample_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Runs body(i) for i in [0, n) on `threads` workers. Results must be
/// written to per-index slots; the schedule does not affect them.
inline void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

inline unsigned default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

struct CampaignConfig {
  Scenario scenario{3, 2, 2};
  int d_sample = 3;
  int d_test = 2;
  std::vector<int> levels{1};
  std::size_t n_samples = 2000;
  std::uint64_t master_seed = 1;
  unsigned threads = 1;
  double margin = kDecisionMargin;
  BinningRule binning = BinningRule::per_rank;
};

struct SampleRecord {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  /// One entry per tested level, aligned with CampaignConfig::levels.
  std::vector<double> nu;
  std::vector<bool> certified;
  std::vector<bool> failed;
  std::vector<std::string> error;
};

struct CampaignResult {
  CampaignConfig config;
  std::vector<SampleRecord> records;
};

inline Behavior sample_behavior(const Scenario& sc, int d, std::uint64_t seed, Realization* out = nullptr,
                                BinningRule rule = BinningRule::per_rank) {
  Rng rng(seed);
  Realization re = random_realization(sc, d, rng, rule);
  Behavior b = behavior_from_realization(re.state, re.measurements);
  if (out) *out = std::move(re);
  return b;
}

/// Each sample draws one behavior and solves it against every program, so
/// per-level verdicts are paired.
inline CampaignResult run_campaign(const CampaignConfig& cfg, const std::vector<const RobustnessProgram*>& programs,
                                   const std::function<void(std::size_t, std::size_t)>& progress = {},
                                   const Tolerances& tol = {}) {
  if (cfg.n_samples < 1) throw std::invalid_argument("campaign: n_samples must be >= 1");
  if (programs.size() != cfg.levels.size()) throw std::invalid_argument("campaign: one program per level required");
  CampaignResult res{cfg, std::vector<SampleRecord>(cfg.n_samples)};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mu;
  parallel_for(cfg.n_samples, cfg.threads, [&](std::size_t i) {
    SampleRecord& rec = res.records[i];
    rec.index = i;
    rec.seed = sample_seed(cfg.master_seed, i);
    const Behavior b = sample_behavior(cfg.scenario, cfg.d_sample, rec.seed, nullptr, cfg.binning);
    for (const RobustnessProgram* prog : programs) {
      try {
        const RobustnessResult r = prog->solve(b, tol);
        rec.nu.push_back(r.nu);
        rec.certified.push_back(r.nu < 1.0 - cfg.margin);
        rec.failed.push_back(false);
        rec.error.emplace_back();
      } catch (const CertificationError& e) {
        rec.nu.push_back(std::nan(""));
        rec.certified.push_back(false);
        rec.failed.push_back(true);
        rec.error.emplace_back(e.what());
      }
    }
    const std::size_t n = ++done;
    if (progress) {
      std::lock_guard<std::mutex> lock(progress_mu);
      progress(n, cfg.n_samples);
    }
  });
  return res;
}

struct ProbabilityEstimate {
  std::size_t n_total = 0;
  std::size_t n_certified = 0;
  std::size_t n_failed = 0;
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;

  double failure_rate() const {
    const std::size_t all = n_total + n_failed;
    return all ? static_cast<double>(n_failed) / static_cast<double>(all) : 0.0;
  }
};

/// Wilson score interval at z = 1.96.
inline std::pair<double, double> wilson_interval(std::size_t successes, std::size_t n, double z = 1.959963984540054) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double denom = 1.0 + z * z / nn;
  const double centre = (p + z * z / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z * z / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

/// Failed solves are excluded from both counts and reported separately.
inline ProbabilityEstimate estimate_probability(const CampaignResult& c, std::size_t level_slot = 0) {
  ProbabilityEstimate e;
  for (const auto& r : c.records) {
    if (r.failed.at(level_slot)) {
      ++e.n_failed;
      continue;
    }
    ++e.n_total;
    if (r.certified.at(level_slot)) ++e.n_certified;
  }
  e.p_hat = e.n_total ? static_cast<double>(e.n_certified) / static_cast<double>(e.n_total) : 0.0;
  std::tie(e.ci_low, e.ci_high) = wilson_interval(e.n_certified, e.n_total);
  return e;
}

struct VisibilityStats {
  std::size_t n = 0;
  double mean = 0.0;
  double stddev = 0.0;
  std::vector<std::size_t> histogram;  // kHistogramBins bins on [0, 1]

  static constexpr std::size_t kHistogramBins = 50;
};

inline VisibilityStats visibility_distribution(const CampaignResult& c, std::size_t level_slot = 0) {
  VisibilityStats s;
  s.histogram.assign(VisibilityStats::kHistogramBins, 0);
  double sum = 0.0, sq = 0.0;
  for (const auto& r : c.records) {
    if (r.failed.at(level_slot)) continue;
    const double nu = r.nu.at(level_slot);
    ++s.n;
    sum += nu;
    sq += nu * nu;
    const double clamped = std::clamp(nu, 0.0, 1.0);
    auto bin = static_cast<std::size_t>(clamped * VisibilityStats::kHistogramBins);
    s.histogram[std::min(bin, VisibilityStats::kHistogramBins - 1)]++;
  }
  if (s.n) {
    s.mean = sum / static_cast<double>(s.n);
    s.stddev = s.n > 1 ? std::sqrt(std::max(0.0, (sq - sum * s.mean) / static_cast<double>(s.n - 1))) : 0.0;
  }
  return s;
}

/// Counts samples certified at level slot `hi` but not at `lo`, and the
/// reverse; nested relaxations must give zero for the reverse count.
struct PairedComparison {
  std::size_t only_first = 0;
  std::size_t only_second = 0;
  std::size_t count_first = 0;
  std::size_t count_second = 0;
};

inline PairedComparison paired_counts(const CampaignResult& c, std::size_t first, std::size_t second) {
  PairedComparison p;
  for (const auto& r : c.records) {
    if (r.failed.at(first) || r.failed.at(second)) continue;
    const bool a = r.certified.at(first), b = r.certified.at(second);
    p.count_first += a;
    p.count_second += b;
    p.only_first += a && !b;
    p.only_second += b && !a;
  }
  return p;
}

/// Basis plus robustness program for one (scenario, d, k).
struct TestSet {
  std::shared_ptr<const Basis> basis;
  std::shared_ptr<const EmbeddedBasis> embedded;
  std::shared_ptr<const RobustnessProgram> program;
};

inline TestSet make_test_set(Basis basis) {
  TestSet t;
  t.basis = std::make_shared<const Basis>(std::move(basis));
  t.embedded = std::make_shared<const EmbeddedBasis>(t.basis);
  t.program = std::make_shared<const RobustnessProgram>(t.embedded);
  return t;
}

inline TestSet make_test_set(const Scenario& sc, int d, int k, std::uint64_t seed, const BasisOptions& opt = {}) {
  Rng rng(seed);
  return make_test_set(build_basis(sc, d, k, rng, opt));
}

struct CurvePoint {
  Scenario scenario;
  ProbabilityEstimate estimate;
  VisibilityStats stats;
};

/// Certification probability across scenarios with the other parameters fixed.
inline std::vector<CurvePoint> probability_curve(const std::vector<Scenario>& scenarios, CampaignConfig cfg,
                                                 std::uint64_t basis_seed,
                                                 const std::function<void(const CurvePoint&)>& on_point = {}) {
  std::vector<CurvePoint> out;
  for (const Scenario& sc : scenarios) {
    cfg.scenario = sc;
    std::vector<TestSet> sets;
    std::vector<const RobustnessProgram*> progs;
    for (int k : cfg.levels) sets.push_back(make_test_set(sc, cfg.d_test, k, basis_seed));
    for (const auto& s : sets) progs.push_back(s.program.get());
    const CampaignResult c = run_campaign(cfg, progs);
    out.push_back({sc, estimate_probability(c), visibility_distribution(c)});
    if (on_point) on_point(out.back());
  }
  return out;
}

/// Largest value of the objective over deterministic noncontextual
/// assignments (outcome a function of the setting only).
inline double classical_maximum(const Objective& obj) {
  const Scenario& sc = obj.scenario;
  std::vector<int> f(static_cast<std::size_t>(sc.m), 0);
  double best = -std::numeric_limits<double>::infinity();
  std::size_t total = 1;
  for (int s = 0; s < sc.m; ++s) total *= static_cast<std::size_t>(sc.o);
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t rest = code;
    for (int s = 0; s < sc.m; ++s) {
      f[static_cast<std::size_t>(s)] = static_cast<int>(rest % static_cast<std::size_t>(sc.o));
      rest /= static_cast<std::size_t>(sc.o);
    }
    double v = 0.0;
    auto hit = [&](const std::vector<Letter>& ls) {
      return std::all_of(ls.begin(), ls.end(), [&](const Letter& l) { return f[static_cast<std::size_t>(l.s)] == l.r; });
    };
    for (const auto& [w, c] : obj.words) v += hit(w.letters()) ? c : 0.0;
    for (const auto& [e, c] : obj.events) v += hit(e.letters) ? c : 0.0;
    best = std::max(best, v);
  }
  return best;
}

struct GyniReport {
  double unrestricted = 0.0;
  int unrestricted_level = 1;
  double finite = 0.0;
  std::size_t finite_cardinality = 0;
  double classical = 0.0;
  Solution unrestricted_solution;
  Solution finite_solution;
};

inline GyniReport gyni_report(std::uint64_t basis_seed = 7, int unrestricted_level = 3) {
  const Objective g = gyni_objective();
  GyniReport rep;
  rep.unrestricted_level = unrestricted_level;
  OptimumResult u = max_unrestricted(g.scenario, g, unrestricted_level);
  rep.unrestricted = u.value;
  rep.unrestricted_solution = std::move(u.solution);
  Rng rng(basis_seed);
  const Basis b = build_basis(g.scenario, 2, 1, rng);
  rep.finite_cardinality = b.cardinality();
  OptimumResult f = max_finite(b, g);
  rep.finite = f.value;
  rep.finite_solution = std::move(f.solution);
  rep.classical = classical_maximum(g);
  return rep;
}

struct HuntResult {
  bool found = false;
  std::size_t samples_used = 0;
  std::size_t index = 0;
  std::uint64_t seed = 0;
  Realization realization;
  Behavior behavior;
  RobustnessResult robustness;
  std::vector<double> nus;
};

/// Draws d_sample behaviors until one is certified against `program`.
inline HuntResult ququart_hunt(const RobustnessProgram& program, int d_sample, std::size_t n_max,
                               std::uint64_t master_seed, double margin = kDecisionMargin) {
  HuntResult h;
  const Scenario sc = program.basis().basis->scenario;
  for (std::size_t i = 0; i < n_max; ++i) {
    const std::uint64_t seed = sample_seed(master_seed, i);
    Realization re;
    const Behavior b = sample_behavior(sc, d_sample, seed, &re);
    ++h.samples_used;
    RobustnessResult r;
    try {
      r = program.solve(b);
    } catch (const CertificationError&) {
      h.nus.push_back(std::nan(""));
      continue;
    }
    h.nus.push_back(r.nu);
    if (r.nu < 1.0 - margin) {
      h.found = true;
      h.index = i;
      h.seed = seed;
      h.realization = std::move(re);
      h.behavior = b;
      h.robustness = std::move(r);
      break;
    }
  }
  return h;
}

/// n behaviors drawn from dimension d with seeds derived from `master`.
inline std::vector<Behavior> sample_behaviors(const Scenario& sc, int d, std::size_t n, std::uint64_t master,
                                              unsigned threads = 1) {
  std::vector<Behavior> out(n);
  parallel_for(n, threads, [&](std::size_t i) { out[i] = sample_behavior(sc, d, sample_seed(master, i)); });
  return out;
}

}  // namespace seqdim
