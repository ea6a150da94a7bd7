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

// seqdim command-line tool. Machine-readable results go to stdout as JSON,
// diagnostics and progress to stderr.
//
// Exit codes: 0 ok, 2 oracle mismatch or failed check, 64 usage, 65 data,
// 70 solver.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "seqdim/io.hpp"

namespace fs = std::filesystem;
using namespace seqdim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitMismatch = 2;
constexpr int kExitUsage = 64;
constexpr int kExitData = 65;
constexpr int kExitSolver = 70;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Command {
  RunConfig cfg;
  std::string config_file;
  std::string behavior_file;
  std::string witness_file;
  std::string behaviors_file;
  std::string output;
  std::size_t n_check = 1000;
  int check_d = 2;
  bool scenario_given = false;
};

void add_common(CLI::App* sub, Command& c) {
  sub->add_option("--config", c.config_file, "JSON config file; its values override flags")->check(CLI::ExistingFile);
  sub->add_option("--scenario", c.cfg.scenario, "scenario m-l-o");
  sub->add_option("--seed", c.cfg.seed, "seed (master seed for campaigns)");
  sub->add_option("--basis-seed", c.cfg.basis_seed, "seed of the randomized basis build");
  sub->add_option("--cache-dir", c.cfg.cache_dir, "basis cache directory (empty disables)");
  sub->add_option("--out-dir", c.cfg.out_dir, "output directory");
  sub->add_option("--feasibility", c.cfg.tolerances.feasibility, "solver feasibility tolerance");
  sub->add_option("--gap", c.cfg.tolerances.gap, "solver relative gap tolerance");
  sub->add_option("--max-iterations", c.cfg.tolerances.max_iterations, "solver iteration limit");
  sub->add_option("--threads", c.cfg.threads, "worker threads");
}

void add_campaign(CLI::App* sub, Command& c) {
  sub->add_option("--d-sample", c.cfg.d_sample, "dimension the behaviors are sampled from");
  sub->add_option("--d-test,--d", c.cfg.d, "dimension tested against");
  sub->add_option("--k", c.cfg.levels, "hierarchy level(s); repeat for paired levels");
  sub->add_option("--n", c.cfg.n_samples, "number of samples");
  sub->add_option("--margin", c.cfg.margin, "certification margin on nu");
  sub->add_option("--binning", c.cfg.binning, "rank assignment rule: rank or index");
}

/// Applies the config file over the parsed flags and validates.
void finalize(Command& c, const std::string& name) {
  if (!c.config_file.empty()) {
    try {
      apply_config(c.cfg, read_json_file(c.config_file));
    } catch (const DataError& e) {
      throw UsageError(e.what());
    }
  }
  c.cfg.command = name;
  try {
    c.cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

json prov(const RunConfig& cfg) { return provenance(to_json(cfg), cfg.seed); }

void emit(const json& j) { std::cout << j.dump(2) << std::endl; }

Basis get_basis(const RunConfig& cfg, const Scenario& sc, int d, int k) {
  bool cached = false;
  Basis b = load_or_build_basis(sc, d, k, cfg.basis_seed, cfg.cache_dir, {}, &cached);
  std::cerr << (cached ? "loaded" : "built") << " basis " << basis_id(sc, d, k, cfg.basis_seed) << " ("
            << b.cardinality() << " elements)\n";
  return b;
}

std::function<void(std::size_t, std::size_t)> progress_bar(const std::string& label) {
  return [label](std::size_t done, std::size_t total) {
    const std::size_t step = std::max<std::size_t>(1, total / 100);
    if (done % step == 0 || done == total) {
      std::cerr << "\r" << label << " " << done << "/" << total << std::flush;
      if (done == total) std::cerr << "\n";
    }
  };
}

std::size_t oracle_samples(const Scenario& sc, int k) {
  const WordIndex idx(sc, k);
  return idx.size() * idx.size() + 20;
}

int cmd_basis(Command& c) {
  const RunConfig& cfg = c.cfg;
  const Scenario sc = cfg.parsed_scenario();
  const Basis b = get_basis(cfg, sc, cfg.d, cfg.k);
  Rng rng(cfg.basis_seed ^ 0xA5A5A5A5A5A5A5A5ULL);
  const std::size_t oracle = rank_oracle(sc, cfg.d, cfg.k, oracle_samples(sc, cfg.k), rng);
  json art = to_json(b, cfg.basis_seed);
  art["provenance"] = prov(cfg);
  const fs::path file = c.output.empty() ? fs::path(cfg.out_dir) / (art["id"].get<std::string>() + ".json")
                                         : fs::path(c.output);
  write_json_file(file, art);
  emit({{"scenario", sc.to_string()},
        {"d", cfg.d},
        {"k", cfg.k},
        {"cardinality", b.cardinality()},
        {"rank_oracle", oracle},
        {"min_retained_residual", b.min_retained_norm()},
        {"max_rejected_residual", b.max_rejected_norm()},
        {"file", file.string()},
        {"provenance", prov(cfg)}});
  if (oracle != b.cardinality()) {
    std::cerr << "oracle mismatch: build_basis " << b.cardinality() << " vs rank_oracle " << oracle << "\n";
    return kExitMismatch;
  }
  return kExitOk;
}

int cmd_classify(Command& c) {
  const RunConfig& cfg = c.cfg;
  std::vector<Scenario> scs;
  if (cfg.scenarios.empty()) {
    scs.push_back(cfg.parsed_scenario());
  } else {
    for (const auto& s : cfg.scenarios) scs.push_back(Scenario::parse(s));
  }
  json rows = json::array();
  std::ostringstream csv;
  csv << "scenario,d,cardinality,rank_oracle\n";
  bool mismatch = false;
  for (const Scenario& sc : scs) {
    json row = {{"scenario", sc.to_string()}, {"cells", json::array()}};
    std::optional<std::size_t> prev;
    json increases = json::array();
    for (int d : cfg.dims) {
      json cell = {{"d", d}};
      try {
        const Basis b = get_basis(cfg, sc, d, cfg.k);
        Rng rng(cfg.basis_seed ^ (0xA5A5A5A5A5A5A5A5ULL + static_cast<std::uint64_t>(d)));
        const std::size_t oracle = rank_oracle(sc, d, cfg.k, oracle_samples(sc, cfg.k), rng);
        cell["cardinality"] = b.cardinality();
        cell["rank_oracle"] = oracle;
        mismatch = mismatch || oracle != b.cardinality();
        csv << sc.to_string() << ',' << d << ',' << b.cardinality() << ',' << oracle << "\n";
        if (prev) increases.push_back(b.cardinality() > *prev);
        prev = b.cardinality();
      } catch (const BasisBuildError& e) {
        cell["error"] = e.what();
        csv << sc.to_string() << ',' << d << ",,\n";
        if (prev) increases.push_back(false);
        prev.reset();
      }
      row["cells"].push_back(cell);
    }
    row["strict_increase"] = increases;
    rows.push_back(row);
  }
  const json out = {{"k", cfg.k}, {"rows", rows}, {"provenance", prov(cfg)}};
  write_json_file(fs::path(cfg.out_dir) / "classify.json", out);
  write_text_file(fs::path(cfg.out_dir) / "classify.csv", csv.str());
  emit(out);
  return mismatch ? kExitMismatch : kExitOk;
}

int cmd_certify(Command& c) {
  const RunConfig& cfg = c.cfg;
  if (c.behavior_file.empty()) throw UsageError("certify: --behavior is required");
  const json input = read_json_file(c.behavior_file);
  // The behavior file names its scenario unless one is given explicitly.
  Scenario sc = cfg.parsed_scenario();
  if (!c.scenario_given && input.is_object() && input.contains("scenario") && input["scenario"].is_string()) {
    try {
      sc = Scenario::parse(input["scenario"].get<std::string>());
    } catch (const std::exception& e) {
      throw DataError(std::string("behavior: ") + e.what());
    }
  }
  const Behavior b = behavior_from_json(input, sc);
  const Basis basis = get_basis(cfg, sc, cfg.d, cfg.k);
  const TestSet set = make_test_set(basis);
  const RobustnessResult r = set.program->solve(b, cfg.tolerances);
  const bool certified = r.nu < 1.0 - cfg.margin;
  const std::string id = basis_id(sc, cfg.d, cfg.k, cfg.basis_seed);
  json wj = to_json(r.witness);
  wj["provenance"] = prov(cfg);
  wj["basis_id"] = id;
  const fs::path file = c.output.empty() ? fs::path(cfg.out_dir) / "witness.json" : fs::path(c.output);
  write_json_file(file, wj);
  std::cerr << (certified ? "no " + std::to_string(cfg.d) + "-dimensional projective realization"
                          : "consistent with level " + std::to_string(cfg.k) + " of dimension " + std::to_string(cfg.d))
            << "\n";
  emit({{"nu", r.nu},
        {"certified", certified},
        {"verdict", certified ? "no " + std::to_string(cfg.d) + "-dimensional projective realization"
                              : "inside level-" + std::to_string(cfg.k) + " relaxation"},
        {"margin", cfg.margin},
        {"status", to_string(r.status)},
        {"iterations", r.iterations},
        {"gap", r.gap},
        {"basis_id", id},
        {"witness_file", file.string()},
        {"behavior_file", c.behavior_file},
        {"provenance", prov(cfg)}});
  return kExitOk;
}

std::vector<Behavior> load_behaviors(const std::string& path, const Scenario& sc) {
  const json j = read_json_file(path);
  std::vector<Behavior> out;
  if (j.is_array()) {
    for (const auto& item : j) out.push_back(behavior_from_json(item, sc));
  } else if (j.contains("behaviors")) {
    for (const auto& item : j.at("behaviors")) out.push_back(behavior_from_json(item, sc));
  } else {
    out.push_back(behavior_from_json(j, sc));
  }
  return out;
}

int cmd_witness_check(Command& c) {
  const RunConfig& cfg = c.cfg;
  if (c.witness_file.empty()) throw UsageError("witness-check: --witness is required");
  const Witness w = witness_from_json(read_json_file(c.witness_file));
  std::vector<Behavior> behaviors;
  std::string source;
  if (!c.behaviors_file.empty()) {
    behaviors = load_behaviors(c.behaviors_file, w.scenario);
    source = c.behaviors_file;
  } else {
    behaviors = sample_behaviors(w.scenario, c.check_d, c.n_check, cfg.seed, cfg.threads);
    source = "sampled d=" + std::to_string(c.check_d);
  }
  const WitnessReport rep = verify_witness(w, behaviors);
  emit({{"checked", rep.checked},
        {"source", source},
        {"min_margin", rep.min_margin},
        {"violations", rep.violators.size()},
        {"violators", rep.violators},
        {"sound", rep.sound()},
        {"provenance", prov(cfg)}});
  return rep.sound() ? kExitOk : kExitMismatch;
}

CampaignConfig campaign_config(const RunConfig& cfg) {
  CampaignConfig cc;
  cc.scenario = cfg.parsed_scenario();
  cc.d_sample = cfg.d_sample;
  cc.d_test = cfg.d;
  cc.levels = cfg.levels;
  cc.n_samples = cfg.n_samples;
  cc.master_seed = cfg.seed;
  cc.threads = cfg.threads;
  cc.margin = cfg.margin;
  cc.binning = parse_binning(cfg.binning);
  return cc;
}

json campaign_meta(const RunConfig& cfg) {
  return {{"counting_rule", "nu < 1 - margin"},
          {"margin", cfg.margin},
          {"failures", "excluded from both counts and reported separately"},
          {"binning", cfg.binning}};
}

int run_and_write(Command& c, const std::string& prefix) {
  const RunConfig& cfg = c.cfg;
  const CampaignConfig cc = campaign_config(cfg);
  std::vector<TestSet> sets;
  std::vector<const RobustnessProgram*> progs;
  for (int k : cfg.levels) sets.push_back(make_test_set(get_basis(cfg, cc.scenario, cfg.d, k)));
  for (const auto& s : sets) progs.push_back(s.program.get());
  const CampaignResult res = run_campaign(cc, progs, progress_bar(prefix), cfg.tolerances);

  json levels = json::array();
  double worst_failure = 0.0;
  const fs::path dir(cfg.out_dir);
  for (std::size_t slot = 0; slot < cfg.levels.size(); ++slot) {
    const ProbabilityEstimate e = estimate_probability(res, slot);
    const VisibilityStats s = visibility_distribution(res, slot);
    worst_failure = std::max(worst_failure, e.failure_rate());
    const std::string hist = prefix + "_histogram_k" + std::to_string(cfg.levels[slot]) + ".csv";
    write_text_file(dir / hist, histogram_csv(s));
    levels.push_back({{"k", cfg.levels[slot]},
                      {"basis_id", basis_id(cc.scenario, cfg.d, cfg.levels[slot], cfg.basis_seed)},
                      {"estimate", to_json(e)},
                      {"visibility", to_json(s)},
                      {"histogram_file", hist}});
  }
  json summary = {{"scenario", cc.scenario.to_string()},
                  {"d_sample", cfg.d_sample},
                  {"d_test", cfg.d},
                  {"n_samples", cfg.n_samples},
                  {"levels", levels},
                  {"metadata", campaign_meta(cfg)},
                  {"samples_file", prefix + "_samples.csv"},
                  {"provenance", prov(cfg)}};
  if (cfg.levels.size() >= 2) {
    json pairs = json::array();
    for (std::size_t a = 0; a + 1 < cfg.levels.size(); ++a) {
      const PairedComparison p = paired_counts(res, a, a + 1);
      pairs.push_back({{"first_k", cfg.levels[a]},
                       {"second_k", cfg.levels[a + 1]},
                       {"count_first", p.count_first},
                       {"count_second", p.count_second},
                       {"only_first", p.only_first},
                       {"only_second", p.only_second}});
    }
    summary["paired"] = pairs;
  }
  write_text_file(dir / (prefix + "_samples.csv"), campaign_csv(res));
  write_json_file(dir / (prefix + "_summary.json"), summary);
  emit(summary);
  if (worst_failure > 0.01) {
    std::cerr << "solver failure rate " << worst_failure << " exceeds 1%\n";
    return kExitSolver;
  }
  return kExitOk;
}

int cmd_curve(Command& c) {
  const RunConfig& cfg = c.cfg;
  if (cfg.scenarios.empty()) throw UsageError("curve: --scenarios is required");
  CampaignConfig cc = campaign_config(cfg);
  std::vector<Scenario> scs;
  for (const auto& s : cfg.scenarios) scs.push_back(Scenario::parse(s));
  std::ostringstream csv;
  csv << "scenario,n_total,n_certified,n_failed,p_hat,ci95_low,ci95_high,mean_nu,stddev_nu\n";
  json points = json::array();
  double worst_failure = 0.0;
  for (const Scenario& sc : scs) {
    cc.scenario = sc;
    std::vector<TestSet> sets;
    std::vector<const RobustnessProgram*> progs;
    for (int k : cfg.levels) sets.push_back(make_test_set(get_basis(cfg, sc, cfg.d, k)));
    for (const auto& s : sets) progs.push_back(s.program.get());
    const CampaignResult res = run_campaign(cc, progs, progress_bar(sc.to_string()), cfg.tolerances);
    const ProbabilityEstimate e = estimate_probability(res);
    const VisibilityStats s = visibility_distribution(res);
    worst_failure = std::max(worst_failure, e.failure_rate());
    csv << sc.to_string() << ',' << e.n_total << ',' << e.n_certified << ',' << e.n_failed << ','
        << format_double(e.p_hat) << ',' << format_double(e.ci_low) << ',' << format_double(e.ci_high) << ','
        << format_double(s.mean) << ',' << format_double(s.stddev) << "\n";
    points.push_back({{"scenario", sc.to_string()}, {"estimate", to_json(e)}, {"visibility", to_json(s)}});
  }
  const json out = {{"points", points}, {"metadata", campaign_meta(cfg)}, {"provenance", prov(cfg)}};
  write_text_file(fs::path(cfg.out_dir) / "curve.csv", csv.str());
  write_json_file(fs::path(cfg.out_dir) / "curve.json", out);
  emit(out);
  return worst_failure > 0.01 ? kExitSolver : kExitOk;
}

int cmd_gyni(Command& c) {
  const RunConfig& cfg = c.cfg;
  const GyniReport g = gyni_report(cfg.basis_seed, cfg.k);
  const json out = {{"scenario", "2-3-2"},
                    {"unrestricted", g.unrestricted},
                    {"unrestricted_level", g.unrestricted_level},
                    {"qubit_level1", g.finite},
                    {"qubit_basis_cardinality", g.finite_cardinality},
                    {"classical", g.classical},
                    {"provenance", prov(cfg)}};
  std::cerr << "unrestricted quantum maximum " << g.unrestricted << "\n"
            << "qubit level-1 bound          " << g.finite << "\n"
            << "classical maximum            " << g.classical << "\n";
  write_json_file(fs::path(cfg.out_dir) / "gyni.json", out);
  emit(out);
  return kExitOk;
}

int cmd_hunt(Command& c) {
  const RunConfig& cfg = c.cfg;
  const Scenario sc = cfg.parsed_scenario();
  const TestSet set = make_test_set(get_basis(cfg, sc, cfg.d, cfg.k));
  const HuntResult h = ququart_hunt(*set.program, cfg.d_sample, cfg.n_samples, cfg.seed, cfg.margin);
  json out = {{"scenario", sc.to_string()},
              {"d_sample", cfg.d_sample},
              {"d_test", cfg.d},
              {"k", cfg.k},
              {"found", h.found},
              {"samples_used", h.samples_used},
              {"provenance", prov(cfg)}};
  if (h.found) {
    const auto check = sample_behaviors(sc, cfg.d, c.n_check, cfg.seed ^ 0x5DEECE66DULL, cfg.threads);
    const WitnessReport rep = verify_witness(h.robustness.witness, check);
    json wj = to_json(h.robustness.witness);
    wj["basis_id"] = basis_id(sc, cfg.d, cfg.k, cfg.basis_seed);
    out["index"] = h.index;
    out["sample_seed"] = h.seed;
    out["nu"] = h.robustness.nu;
    out["behavior"] = to_json(h.behavior);
    out["realization"] = to_json(h.realization);
    out["witness"] = wj;
    out["witness_check"] = {{"checked", rep.checked},
                            {"dimension", cfg.d},
                            {"min_margin", rep.min_margin},
                            {"violations", rep.violators.size()}};
    if (!rep.sound()) {
      write_json_file(fs::path(cfg.out_dir) / "hunt.json", out);
      emit(out);
      return kExitMismatch;
    }
  }
  write_json_file(fs::path(cfg.out_dir) / "hunt.json", out);
  emit(out);
  return h.found ? kExitOk : kExitMismatch;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"seqdim: Hilbert-space dimension certification from sequential measurements"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::map<std::string, Command> cmds;
  auto make = [&](const std::string& name, const std::string& help) {
    Command& c = cmds[name];
    c.cfg.command = name;
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, c);
    return std::pair<CLI::App*, Command*>{sub, &c};
  };

  {
    auto [sub, c] = make("basis", "build (or load) a basis and cross-check its cardinality");
    sub->add_option("--d", c->cfg.d, "Hilbert-space dimension");
    sub->add_option("--k", c->cfg.k, "hierarchy level");
    sub->add_option("--output,-o", c->output, "basis file (default: <out-dir>/<basis id>.json)");
  }
  {
    auto [sub, c] = make("classify", "basis cardinality per dimension for one or more scenarios");
    sub->add_option("--scenarios", c->cfg.scenarios, "scenarios m-l-o");
    sub->add_option("--dims", c->cfg.dims, "dimensions");
    sub->add_option("--k", c->cfg.k, "hierarchy level");
  }
  {
    auto [sub, c] = make("certify", "visibility and witness of a behavior against dimension d");
    sub->add_option("--behavior,-b", c->behavior_file, "behavior JSON file")->required();
    sub->add_option("--d", c->cfg.d, "tested dimension");
    sub->add_option("--k", c->cfg.k, "hierarchy level");
    sub->add_option("--margin", c->cfg.margin, "certification margin on nu");
    sub->add_option("--output,-o", c->output, "witness file (default: <out-dir>/witness.json)");
  }
  {
    auto [sub, c] = make("witness-check", "evaluate a witness on behaviors from a file or sampled");
    sub->add_option("--witness,-w", c->witness_file, "witness JSON file")->required();
    sub->add_option("--behaviors", c->behaviors_file, "behavior file (object, array or {behaviors: [...]})");
    sub->add_option("--d", c->check_d, "dimension to sample from when no file is given");
    sub->add_option("--n", c->n_check, "number of sampled behaviors")->check(CLI::PositiveNumber);
  }
  for (const char* name : {"sample", "distribution"}) {
    auto [sub, c] = make(name, std::string(name) == "sample" ? "certification probability campaign"
                                                                : "visibility distribution campaign");
    add_campaign(sub, *c);
  }
  {
    auto [sub, c] = make("curve", "certification probability across scenarios");
    add_campaign(sub, *c);
    sub->add_option("--scenarios", c->cfg.scenarios, "scenarios m-l-o")->required();
  }
  {
    auto [sub, c] = make("gyni", "quantum, qubit and classical maxima of the GYNI functional");
    c->cfg.k = 3;
    sub->add_option("--k", c->cfg.k, "level of the unrestricted relaxation");
  }
  {
    auto [sub, c] = make("ququart-hunt", "sample until a behavior beats the tested dimension");
    c->cfg.scenario = "2-3-3";
    c->cfg.d = 3;
    c->cfg.d_sample = 4;
    c->cfg.n_samples = 500;
    sub->add_option("--d-sample", c->cfg.d_sample, "dimension the behaviors are sampled from");
    sub->add_option("--d-test,--d", c->cfg.d, "tested dimension");
    sub->add_option("--k", c->cfg.k, "hierarchy level");
    sub->add_option("--n", c->cfg.n_samples, "sample budget");
    sub->add_option("--n-check", c->n_check, "behaviors of the tested dimension used to check the witness");
    sub->add_option("--margin", c->cfg.margin, "certification margin on nu");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  Command& c = cmds.at(name);
  c.scenario_given = app.get_subcommands().front()->count("--scenario") > 0;
  try {
    finalize(c, name);
    const json file_cfg = c.config_file.empty() ? json::object() : read_json_file(c.config_file);
    if (file_cfg.contains("scenario")) c.scenario_given = true;
    // basis and classify take their build seed from --seed.
    if ((name == "basis" || name == "classify") && !app.get_subcommands().front()->count("--basis-seed") &&
        !file_cfg.contains("basis_seed")) {
      c.cfg.basis_seed = c.cfg.seed;
    }
    if (name == "basis") return cmd_basis(c);
    if (name == "classify") return cmd_classify(c);
    if (name == "certify") return cmd_certify(c);
    if (name == "witness-check") return cmd_witness_check(c);
    if (name == "sample" || name == "distribution") return run_and_write(c, name);
    if (name == "curve") return cmd_curve(c);
    if (name == "gyni") return cmd_gyni(c);
    if (name == "ququart-hunt") return cmd_hunt(c);
    throw UsageError("unknown command " + name);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const CertificationError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const BasisBuildError& e) {
    std::cerr << "basis error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::domain_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  }
}
