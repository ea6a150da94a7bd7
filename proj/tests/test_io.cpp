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

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "seqdim/io.hpp"

using namespace seqdim;
namespace fs = std::filesystem;

namespace {

const Scenario k322{3, 2, 2};

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("seqdim_test_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST(Json, MatrixRoundTrip) {
  Rng rng(1);
  const Realization re = random_realization(k322, 3, rng);
  const MomentMatrix mm = moment_matrix(re.state, re.measurements, std::make_shared<const WordIndex>(k322, 1));
  const json j = to_json(mm);
  EXPECT_EQ(j["scenario"], "3-2-2");
  EXPECT_EQ(j["index"][0], "1");
  EXPECT_EQ(j["entries"][0][0].size(), 2u);
  const CMatrix back = matrix_from_json(json::parse(j.dump())["entries"]);
  EXPECT_EQ(back, mm.entries);
}

TEST(Json, BehaviorRoundTrip) {
  Rng rng(2);
  const Realization re = random_realization(k322, 3, rng);
  const Behavior b = behavior_from_realization(re.state, re.measurements);
  const json j = json::parse(to_json(b).dump());
  EXPECT_TRUE(j["probabilities"].contains("0|0,0|1"));
  const Behavior c = behavior_from_json(j, k322);
  EXPECT_EQ(c.words, b.words);
  EXPECT_EQ(c.values, b.values);
}

TEST(Json, BehaviorValidation) {
  Rng rng(3);
  const Realization re = random_realization(k322, 2, rng);
  const json good = to_json(behavior_from_realization(re.state, re.measurements));
  json bad = good;
  bad["probabilities"]["0|0"] = 1.2;
  EXPECT_THROW(behavior_from_json(bad), DataError);
  bad = good;
  bad["probabilities"].erase("0|1");
  EXPECT_THROW(behavior_from_json(bad), DataError);
  bad = good;
  bad["probabilities"]["0|0,0|1,0|2"] = 0.1;
  EXPECT_THROW(behavior_from_json(bad), DataError);
  bad = good;
  bad["probabilities"]["0|0,0|0"] = 0.1;
  EXPECT_THROW(behavior_from_json(bad), DataError);
  bad = good;
  bad["probabilities"]["0|0"] = "x";
  EXPECT_THROW(behavior_from_json(bad), DataError);
  EXPECT_THROW(behavior_from_json(good, Scenario{4, 2, 2}), DataError);
  bad = good;
  bad["scenario"] = "3-2";
  EXPECT_THROW(behavior_from_json(bad), DataError);
  EXPECT_THROW(behavior_from_json(json::array()), DataError);
}

TEST(Json, WitnessRoundTrip) {
  Witness w;
  w.scenario = k322;
  w.d = 2;
  w.k = 1;
  w.words = behavior_words(k322);
  for (std::size_t i = 0; i < w.words.size(); ++i) w.gamma.push_back(0.25 * static_cast<double>(i) - 1.0);
  w.x = 0.3;
  w.r = 0.6;
  w.nu = 0.9;
  const Witness v = witness_from_json(json::parse(to_json(w).dump()));
  EXPECT_EQ(v.words, w.words);
  EXPECT_EQ(v.gamma, w.gamma);
  EXPECT_EQ(v.x, w.x);
  EXPECT_EQ(v.r, w.r);
  EXPECT_EQ(v.nu, w.nu);
  json bad = to_json(w);
  bad["gamma"]["0|0,0|1,0|2"] = 1.0;
  EXPECT_THROW(witness_from_json(bad), DataError);
  bad = to_json(w);
  bad.erase("x");
  EXPECT_THROW(witness_from_json(bad), DataError);
}

TEST(Json, BasisRoundTrip) {
  Rng rng(4);
  const Basis b = build_basis(k322, 2, 1, rng);
  const Basis c = basis_from_json(json::parse(to_json(b, 4).dump()));
  EXPECT_EQ(c.vectors, b.vectors);
  EXPECT_EQ(c.norm_log, b.norm_log);
  EXPECT_EQ(c.retained_log, b.retained_log);
  EXPECT_EQ(c.index->words(), b.index->words());
  EXPECT_EQ(c.d, 2);
}

TEST(Cache, ReusesAndIsByteIdentical) {
  const fs::path dir = scratch("cache");
  bool cached = true;
  const Basis a = load_or_build_basis(k322, 2, 1, 9, dir, {}, &cached);
  EXPECT_FALSE(cached);
  const fs::path file = dir / (basis_id(k322, 2, 1, 9) + ".json");
  ASSERT_TRUE(fs::exists(file));
  const std::string first = slurp(file);
  const Basis b = load_or_build_basis(k322, 2, 1, 9, dir, {}, &cached);
  EXPECT_TRUE(cached);
  EXPECT_EQ(a.vectors, b.vectors);
  // Rebuilding from scratch writes the same bytes.
  fs::remove(file);
  load_or_build_basis(k322, 2, 1, 9, dir, {}, &cached);
  EXPECT_FALSE(cached);
  EXPECT_EQ(slurp(file), first);
  fs::remove_all(dir);
}

TEST(Cache, KeyedByParameters) {
  EXPECT_NE(basis_id(k322, 2, 1, 9), basis_id(k322, 2, 1, 10));
  EXPECT_NE(basis_id(k322, 2, 1, 9), basis_id(k322, 3, 1, 9));
  EXPECT_NE(basis_id(k322, 2, 1, 9), basis_id(k322, 2, 2, 9));
  EXPECT_NE(basis_id(k322, 2, 1, 9).find(kVersion), std::string::npos);
}

TEST(Csv, CampaignAndHistogram) {
  CampaignResult c;
  c.config.levels = {1, 2};
  SampleRecord r;
  r.index = 0;
  r.seed = 17;
  r.nu = {0.5, std::nan("")};
  r.certified = {true, false};
  r.failed = {false, true};
  c.records.push_back(r);
  const std::string csv = campaign_csv(c);
  EXPECT_EQ(csv, "index,seed,nu_k1,verdict_k1,nu_k2,verdict_k2\n0,17,0.5,certified,nan,failed\n");
  VisibilityStats s;
  s.histogram.assign(VisibilityStats::kHistogramBins, 0);
  const std::string h = histogram_csv(s);
  EXPECT_EQ(h.rfind("bin,lower,upper,count\n0,0,0.02,0\n", 0), 0u);
  EXPECT_EQ(std::count(h.begin(), h.end(), '\n'), 51);
}

TEST(RunConfig, RoundTrip) {
  RunConfig c;
  c.command = "sample";
  c.scenario = "4-2-2";
  c.levels = {1, 2};
  c.seed = 123456789012345ULL;
  c.tolerances.gap = 3e-8;
  c.scenarios = {"3-2-2", "5-2-2"};
  const json j = to_json(c);
  EXPECT_EQ(to_json(run_config_from_json(json::parse(j.dump()))), j);
}

TEST(RunConfig, ValidationNamesField) {
  RunConfig c;
  c.scenario = "3-2";
  try {
    c.validate();
    FAIL() << "expected rejection";
  } catch (const std::invalid_argument& e) {
    EXPECT_EQ(std::string(e.what()).rfind("scenario:", 0), 0u) << e.what();
  }
  RunConfig n;
  n.n_samples = 0;
  EXPECT_THROW(n.validate(), std::invalid_argument);
  RunConfig b;
  b.binning = "bogus";
  EXPECT_THROW(b.validate(), std::invalid_argument);
  EXPECT_THROW(run_config_from_json({{"no_such_key", 1}}), std::invalid_argument);
  EXPECT_THROW(run_config_from_json({{"d", "two"}}), std::invalid_argument);
}

TEST(RunConfig, ConfigOverrides) {
  RunConfig c;
  c.d = 5;
  apply_config(c, {{"d", 3}});
  EXPECT_EQ(c.d, 3);
  EXPECT_EQ(c.k, 1);
}

TEST(Provenance, CarriesVersionAndSeed) {
  const json p = provenance(to_json(RunConfig{}), 77);
  EXPECT_EQ(p["version"], kVersion);
  EXPECT_EQ(p["seed"], 77);
  EXPECT_TRUE(p["config"].contains("scenario"));
}

TEST(Binning, Names) {
  EXPECT_EQ(parse_binning("rank"), BinningRule::per_rank);
  EXPECT_EQ(parse_binning("index"), BinningRule::per_index);
  EXPECT_STREQ(to_string(BinningRule::per_rank), "rank");
  EXPECT_THROW(parse_binning("x"), std::invalid_argument);
}
