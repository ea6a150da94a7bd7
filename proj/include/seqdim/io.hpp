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

// JSON persistence for words, moment matrices, behaviors, witnesses, bases
// and campaign outputs. Complex numbers are [re, im] pairs; words use the
// "r|s,r|s" form with "1" for the identity.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "seqdim/basis.hpp"
#include "seqdim/certify.hpp"
#include "seqdim/experiments.hpp"
#include "seqdim/quantum.hpp"

#ifndef SEQDIM_VERSION
#define SEQDIM_VERSION "0.1.0"
#endif

namespace seqdim {

using json = nlohmann::json;

inline constexpr const char* kVersion = SEQDIM_VERSION;
inline constexpr int kBasisFormat = 1;

/// Malformed or inconsistent input data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline json provenance(const json& config, std::uint64_t seed) {
  return {{"tool", "seqdim"}, {"version", kVersion}, {"seed", seed}, {"config", config}};
}

inline json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline json matrix_to_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline CMatrix matrix_from_json(const json& j) {
  if (!j.is_array()) throw DataError("matrix: expected an array of rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  CMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) throw DataError("matrix: rows must be square");
    for (Eigen::Index k = 0; k < n; ++k) {
      const json& z = row[static_cast<std::size_t>(k)];
      if (!z.is_array() || z.size() != 2) throw DataError("matrix: entries must be [re, im] pairs");
      m(i, k) = cplx(z[0].get<double>(), z[1].get<double>());
    }
  }
  return m;
}

inline json words_to_json(const std::vector<Word>& words) {
  json out = json::array();
  for (const Word& w : words) out.push_back(w.to_string());
  return out;
}

inline json to_json(const MomentMatrix& mm) {
  return {{"scenario", mm.index->scenario().to_string()},
          {"level", mm.index->level()},
          {"index", words_to_json(mm.index->words())},
          {"entries", matrix_to_json(mm.entries)}};
}

inline json to_json(const Behavior& b) {
  json probs = json::object();
  for (std::size_t i = 0; i < b.words.size(); ++i) probs[b.words[i].to_string()] = b.values[i];
  return {{"scenario", b.scenario.to_string()}, {"probabilities", probs}};
}

/// Reads {"scenario": "m-l-o", "probabilities": {word: p}}. Every behavior
/// word must appear exactly once and each p must lie in [0, 1].
inline Behavior behavior_from_json(const json& j, std::optional<Scenario> expected = std::nullopt) {
  if (!j.is_object() || !j.contains("scenario") || !j.contains("probabilities")) {
    throw DataError("behavior: expected keys 'scenario' and 'probabilities'");
  }
  Scenario sc;
  try {
    sc = Scenario::parse(j.at("scenario").get<std::string>());
  } catch (const std::exception& e) {
    throw DataError(std::string("behavior: ") + e.what());
  }
  if (expected && !(*expected == sc)) {
    throw DataError("behavior: scenario " + sc.to_string() + " does not match " + expected->to_string());
  }
  const json& probs = j.at("probabilities");
  if (!probs.is_object()) throw DataError("behavior: 'probabilities' must be an object");
  Behavior b;
  b.scenario = sc;
  b.words = behavior_words(sc);
  std::map<std::string, double> given;
  for (auto it = probs.begin(); it != probs.end(); ++it) {
    Word w = Word::identity(sc);
    try {
      w = Word::parse(sc, it.key());
    } catch (const std::exception& e) {
      throw DataError("behavior: bad word '" + it.key() + "': " + e.what());
    }
    if (!it.value().is_number()) throw DataError("behavior: value for '" + it.key() + "' is not a number");
    const double p = it.value().get<double>();
    if (!std::isfinite(p) || p < -1e-9 || p > 1.0 + 1e-9) {
      throw DataError("behavior: probability for '" + it.key() + "' is outside [0, 1]");
    }
    given[w.to_string()] = p;
  }
  for (const Word& w : b.words) {
    auto it = given.find(w.to_string());
    if (it == given.end()) throw DataError("behavior: missing word '" + w.to_string() + "'");
    b.values.push_back(it->second);
    given.erase(it);
  }
  if (!given.empty()) throw DataError("behavior: word '" + given.begin()->first + "' is not a behavior word");
  return b;
}

inline json to_json(const Witness& w) {
  json gamma = json::object();
  for (std::size_t i = 0; i < w.words.size(); ++i) gamma[w.words[i].to_string()] = w.gamma[i];
  return {{"scenario", w.scenario.to_string()},
          {"d", w.d},
          {"k", w.k},
          {"gamma", gamma},
          {"x", w.x},
          {"r", w.r},
          {"nu", w.nu}};
}

inline Witness witness_from_json(const json& j) {
  try {
    Witness w;
    w.scenario = Scenario::parse(j.at("scenario").get<std::string>());
    w.d = j.at("d").get<int>();
    w.k = j.at("k").get<int>();
    w.x = j.at("x").get<double>();
    w.r = j.value("r", 0.0);
    w.nu = j.value("nu", 1.0);
    w.words = behavior_words(w.scenario);
    const json& gamma = j.at("gamma");
    for (const Word& word : w.words) {
      const std::string key = word.to_string();
      w.gamma.push_back(gamma.contains(key) ? gamma.at(key).get<double>() : 0.0);
    }
    for (auto it = gamma.begin(); it != gamma.end(); ++it) {
      const Word word = Word::parse(w.scenario, it.key());
      if (word.size() < 1 || word.size() > static_cast<std::size_t>(w.scenario.l)) {
        throw DataError("witness: '" + it.key() + "' is not a behavior word");
      }
    }
    return w;
  } catch (const DataError&) {
    throw;
  } catch (const std::exception& e) {
    throw DataError(std::string("witness: ") + e.what());
  }
}

inline std::string basis_id(const Scenario& sc, int d, int k, std::uint64_t seed) {
  return "basis_" + sc.to_string() + "_d" + std::to_string(d) + "_k" + std::to_string(k) + "_s" +
         std::to_string(seed) + "_v" + kVersion + "_f" + std::to_string(kBasisFormat);
}

inline json to_json(const Basis& b, std::uint64_t seed) {
  json vectors = json::array();
  for (Eigen::Index c = 0; c < b.vectors.cols(); ++c) {
    json col = json::array();
    for (Eigen::Index r = 0; r < b.vectors.rows(); ++r) col.push_back(b.vectors(r, c));
    vectors.push_back(std::move(col));
  }
  json retained = json::array();
  for (bool x : b.retained_log) retained.push_back(x);
  return {{"format", kBasisFormat},
          {"id", basis_id(b.scenario, b.d, b.k, seed)},
          {"scenario", b.scenario.to_string()},
          {"d", b.d},
          {"k", b.k},
          {"seed", seed},
          {"version", kVersion},
          {"cardinality", b.cardinality()},
          {"index", words_to_json(b.index->words())},
          {"coordinates", "hermitian: diagonal, then sqrt2*Re and sqrt2*Im of each upper entry, row-major"},
          {"vectors", vectors},
          {"norm_log", b.norm_log},
          {"retained_log", retained}};
}

inline Basis basis_from_json(const json& j) {
  try {
    if (j.at("format").get<int>() != kBasisFormat) throw DataError("basis: unsupported format");
    Basis b;
    b.scenario = Scenario::parse(j.at("scenario").get<std::string>());
    b.d = j.at("d").get<int>();
    b.k = j.at("k").get<int>();
    b.index = std::make_shared<const WordIndex>(b.scenario, b.k);
    const auto n = static_cast<Eigen::Index>(b.index->size());
    const json& vectors = j.at("vectors");
    b.vectors.resize(n * n, static_cast<Eigen::Index>(vectors.size()));
    for (std::size_t c = 0; c < vectors.size(); ++c) {
      if (static_cast<Eigen::Index>(vectors[c].size()) != n * n) throw DataError("basis: vector length mismatch");
      for (Eigen::Index r = 0; r < n * n; ++r) {
        b.vectors(r, static_cast<Eigen::Index>(c)) = vectors[c][static_cast<std::size_t>(r)].get<double>();
      }
    }
    b.norm_log = j.at("norm_log").get<std::vector<double>>();
    b.retained_log = j.at("retained_log").get<std::vector<bool>>();
    return b;
  } catch (const DataError&) {
    throw;
  } catch (const std::exception& e) {
    throw DataError(std::string("basis: ") + e.what());
  }
}

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

inline void write_json_file(const std::filesystem::path& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

/// Loads the cached basis for (scenario, d, k, seed, version) or builds and
/// stores it. An empty cache directory disables caching.
inline Basis load_or_build_basis(const Scenario& sc, int d, int k, std::uint64_t seed,
                                 const std::filesystem::path& cache_dir, const BasisOptions& opt = {},
                                 bool* from_cache = nullptr) {
  if (from_cache) *from_cache = false;
  std::filesystem::path file;
  if (!cache_dir.empty()) {
    file = cache_dir / (basis_id(sc, d, k, seed) + ".json");
    if (std::filesystem::exists(file)) {
      if (from_cache) *from_cache = true;
      return basis_from_json(read_json_file(file));
    }
  }
  Rng rng(seed);
  Basis b = build_basis(sc, d, k, rng, opt);
  if (!file.empty()) write_json_file(file, to_json(b, seed));
  return b;
}

inline std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

/// Per-sample CSV: index, seed, then nu and verdict per level.
inline std::string campaign_csv(const CampaignResult& c) {
  std::ostringstream os;
  os << "index,seed";
  for (int k : c.config.levels) os << ",nu_k" << k << ",verdict_k" << k;
  os << "\n";
  for (const auto& r : c.records) {
    os << r.index << ',' << r.seed;
    for (std::size_t l = 0; l < r.nu.size(); ++l) {
      os << ',' << (r.failed[l] ? std::string("nan") : format_double(r.nu[l])) << ','
         << (r.failed[l] ? "failed" : (r.certified[l] ? "certified" : "inside"));
    }
    os << "\n";
  }
  return os.str();
}

inline std::string histogram_csv(const VisibilityStats& s) {
  std::ostringstream os;
  os << "bin,lower,upper,count\n";
  const double width = 1.0 / static_cast<double>(VisibilityStats::kHistogramBins);
  for (std::size_t i = 0; i < s.histogram.size(); ++i) {
    os << i << ',' << format_double(static_cast<double>(i) * width) << ','
       << format_double(static_cast<double>(i + 1) * width) << ',' << s.histogram[i] << "\n";
  }
  return os.str();
}

inline json to_json(const ProbabilityEstimate& e) {
  return {{"n_total", e.n_total},   {"n_certified", e.n_certified}, {"n_failed", e.n_failed},
          {"p_hat", e.p_hat},       {"ci95_low", e.ci_low},         {"ci95_high", e.ci_high},
          {"failure_rate", e.failure_rate()}};
}

inline json to_json(const VisibilityStats& s) {
  return {{"n", s.n}, {"mean", s.mean}, {"stddev", s.stddev}, {"bins", VisibilityStats::kHistogramBins}};
}

inline json to_json(const Realization& re) {
  json proj = json::array();
  for (const auto& setting : re.measurements.projectors) {
    json outs = json::array();
    for (const auto& p : setting) outs.push_back(matrix_to_json(p));
    proj.push_back(std::move(outs));
  }
  return {{"dimension", re.state.dim()},
          {"state", matrix_to_json(re.state.rho)},
          {"bins", re.measurements.bins},
          {"projectors", proj}};
}

inline const char* to_string(BinningRule r) { return r == BinningRule::per_rank ? "rank" : "index"; }

inline BinningRule parse_binning(const std::string& s) {
  if (s == "rank") return BinningRule::per_rank;
  if (s == "index") return BinningRule::per_index;
  throw std::invalid_argument("binning must be 'rank' or 'index', got '" + s + "'");
}

/// Parameters shared by every command. Serialized into each output file.
struct RunConfig {
  std::string command;
  std::string scenario = "3-2-2";
  int d = 2;
  int k = 1;
  int d_sample = 3;
  std::vector<int> levels{1};
  std::uint64_t seed = 7;
  std::uint64_t basis_seed = 7;
  std::size_t n_samples = 2000;
  unsigned threads = 1;
  double margin = kDecisionMargin;
  std::string binning = "rank";
  Tolerances tolerances;
  std::string cache_dir = ".seqdim-cache";
  std::string out_dir = ".";
  std::vector<std::string> scenarios;
  std::vector<int> dims{2, 3, 4};

  Scenario parsed_scenario() const { return parse_field_scenario("scenario", scenario); }

  /// Throws std::invalid_argument naming the offending field.
  void validate() const {
    parsed_scenario();
    for (const auto& s : scenarios) parse_field_scenario("scenarios", s);
    if (d < 1) throw std::invalid_argument("d: must be >= 1");
    if (k < 1) throw std::invalid_argument("k: must be >= 1");
    if (d_sample < 1) throw std::invalid_argument("d_sample: must be >= 1");
    if (levels.empty()) throw std::invalid_argument("levels: at least one level required");
    for (int l : levels) {
      if (l < 1) throw std::invalid_argument("levels: must be >= 1");
    }
    if (n_samples < 1) throw std::invalid_argument("n_samples: must be >= 1");
    if (threads < 1) throw std::invalid_argument("threads: must be >= 1");
    if (!(margin >= 0.0 && margin < 1.0)) throw std::invalid_argument("margin: must lie in [0, 1)");
    if (binning != "rank" && binning != "index") throw std::invalid_argument("binning: must be 'rank' or 'index'");
    if (!(tolerances.feasibility > 0.0)) throw std::invalid_argument("feasibility: must be positive");
    if (!(tolerances.gap > 0.0)) throw std::invalid_argument("gap: must be positive");
    if (tolerances.max_iterations < 1) throw std::invalid_argument("max_iterations: must be >= 1");
    for (int x : dims) {
      if (x < 1) throw std::invalid_argument("dims: must be >= 1");
    }
  }

  static Scenario parse_field_scenario(const std::string& field, const std::string& text) {
    try {
      return Scenario::parse(text);
    } catch (const std::exception& e) {
      throw std::invalid_argument(field + ": " + e.what());
    }
  }
};

inline json to_json(const RunConfig& c) {
  return {{"command", c.command},
          {"scenario", c.scenario},
          {"d", c.d},
          {"k", c.k},
          {"d_sample", c.d_sample},
          {"levels", c.levels},
          {"seed", c.seed},
          {"basis_seed", c.basis_seed},
          {"n_samples", c.n_samples},
          {"threads", c.threads},
          {"margin", c.margin},
          {"binning", c.binning},
          {"feasibility", c.tolerances.feasibility},
          {"gap", c.tolerances.gap},
          {"max_iterations", c.tolerances.max_iterations},
          {"cache_dir", c.cache_dir},
          {"out_dir", c.out_dir},
          {"scenarios", c.scenarios},
          {"dims", c.dims}};
}

/// Overwrites the fields present in `j`; unknown keys are rejected.
inline void apply_config(RunConfig& c, const json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    const json& v = it.value();
    try {
      if (key == "command") c.command = v.get<std::string>();
      else if (key == "scenario") c.scenario = v.get<std::string>();
      else if (key == "d") c.d = v.get<int>();
      else if (key == "k") c.k = v.get<int>();
      else if (key == "d_sample") c.d_sample = v.get<int>();
      else if (key == "levels") c.levels = v.get<std::vector<int>>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "basis_seed") c.basis_seed = v.get<std::uint64_t>();
      else if (key == "n_samples") c.n_samples = v.get<std::size_t>();
      else if (key == "threads") c.threads = v.get<unsigned>();
      else if (key == "margin") c.margin = v.get<double>();
      else if (key == "binning") c.binning = v.get<std::string>();
      else if (key == "feasibility") c.tolerances.feasibility = v.get<double>();
      else if (key == "gap") c.tolerances.gap = v.get<double>();
      else if (key == "max_iterations") c.tolerances.max_iterations = v.get<int>();
      else if (key == "cache_dir") c.cache_dir = v.get<std::string>();
      else if (key == "out_dir") c.out_dir = v.get<std::string>();
      else if (key == "scenarios") c.scenarios = v.get<std::vector<std::string>>();
      else if (key == "dims") c.dims = v.get<std::vector<int>>();
      else throw std::invalid_argument(key + ": unknown config key");
    } catch (const json::exception& e) {
      throw std::invalid_argument(key + ": " + e.what());
    }
  }
}

inline RunConfig run_config_from_json(const json& j) {
  RunConfig c;
  apply_config(c, j);
  return c;
}

}  // namespace seqdim
