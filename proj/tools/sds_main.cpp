// Copyright 2026 The sdsbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// sds: generate / solve / evaluate / passk / tournament / audit / reward.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 data error,
// 3 internal error. The SDS_SEED environment variable supplies the default
// seed; flags beat config-file values, which beat built-in defaults.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sds/audit.hpp"
#include "sds/core.hpp"
#include "sds/eval.hpp"
#include "sds/generate.hpp"
#include "sds/reward.hpp"
#include "sds/sandbox.hpp"
#include "sds/solvers.hpp"
#include "sds/templates.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

struct GlobalOptions {
  std::uint64_t seed = 0;
  bool seed_given = false;
  int workers = 0;
  bool workers_given = false;
  std::string config_path;
  bool print_config = false;
  bool validate = false;
  json config = json::object();
};

int default_workers() {
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::min(hw == 0 ? 1u : hw, 32u));
}

void load_config(GlobalOptions& global) {
  if (global.config_path.empty()) return;
  std::ifstream in(global.config_path);
  if (!in) throw sds::ParseError("cannot open config " + global.config_path);
  try {
    in >> global.config;
  } catch (const json::exception& e) {
    throw sds::ParseError("config " + global.config_path + ": " + e.what());
  }
}

// flag > config file > default.
template <typename T>
T resolved(const GlobalOptions& global, bool flag_given, T flag_value,
           const char* key, T fallback) {
  if (flag_given) return flag_value;
  if (global.config.contains(key)) return global.config[key].get<T>();
  return fallback;
}

std::uint64_t resolve_seed(const GlobalOptions& global) {
  std::uint64_t env_default = 0;
  if (const char* env = std::getenv("SDS_SEED")) {
    env_default = std::strtoull(env, nullptr, 10);
  }
  return resolved<std::uint64_t>(global, global.seed_given, global.seed, "seed",
                                 env_default);
}

int resolve_workers(const GlobalOptions& global) {
  const int w = resolved<int>(global, global.workers_given, global.workers,
                              "workers", default_workers());
  if (w < 1) throw sds::ContractViolation("workers must be >= 1");
  return w;
}

std::vector<std::string> split_command(const std::string& command) {
  std::istringstream stream(command);
  std::vector<std::string> tokens;
  std::string token;
  while (stream >> token) tokens.push_back(token);
  return tokens;
}

// --------------------------------------------------------------------------
// Family parameter (de)serialization for mixture configs.
// --------------------------------------------------------------------------

sds::gen::FamilyParams params_from_json(const json& doc,
                                        sds::gen::FamilyParams base) {
  auto load = [&](const char* key, auto& slot) {
    if (doc.contains(key)) slot = doc[key].get<std::decay_t<decltype(slot)>>();
  };
  load("n_min", base.n_min);
  load("n_max", base.n_max);
  load("density", base.density);
  load("weight_lo", base.weight_lo);
  load("weight_hi", base.weight_hi);
  load("interaction_lo", base.interaction_lo);
  load("interaction_hi", base.interaction_hi);
  load("mutex_rate", base.mutex_rate);
  load("precedence_rate", base.precedence_rate);
  load("group_rate", base.group_rate);
  load("group_size_min", base.group_size_min);
  load("group_size_max", base.group_size_max);
  load("upper_frac", base.upper_frac);
  load("lower_target", base.lower_target);
  if (doc.contains("lower_fixed")) base.lower_fixed = doc["lower_fixed"].get<int>();
  load("chain_min", base.chain_min);
  load("chain_max", base.chain_max);
  load("bait_weight", base.bait_weight);
  load("trap_interaction", base.trap_interaction);
  load("blocks", base.blocks);
  load("cliques", base.cliques);
  load("signal", base.signal);
  load("noise", base.noise);
  load("edge_prob", base.edge_prob);
  load("weight_scale", base.weight_scale);
  load("pair_scale", base.pair_scale);
  return base;
}

ordered_json params_to_json(const sds::gen::FamilyParams& p) {
  ordered_json doc;
  doc["n_min"] = p.n_min;
  doc["n_max"] = p.n_max;
  doc["density"] = p.density;
  doc["weight_lo"] = p.weight_lo;
  doc["weight_hi"] = p.weight_hi;
  doc["interaction_lo"] = p.interaction_lo;
  doc["interaction_hi"] = p.interaction_hi;
  doc["mutex_rate"] = p.mutex_rate;
  doc["precedence_rate"] = p.precedence_rate;
  doc["group_rate"] = p.group_rate;
  doc["group_size_min"] = p.group_size_min;
  doc["group_size_max"] = p.group_size_max;
  doc["upper_frac"] = p.upper_frac;
  doc["lower_target"] = p.lower_target;
  if (p.lower_fixed) doc["lower_fixed"] = *p.lower_fixed;
  doc["chain_min"] = p.chain_min;
  doc["chain_max"] = p.chain_max;
  doc["bait_weight"] = p.bait_weight;
  doc["trap_interaction"] = p.trap_interaction;
  doc["blocks"] = p.blocks;
  doc["cliques"] = p.cliques;
  doc["signal"] = p.signal;
  doc["noise"] = p.noise;
  doc["edge_prob"] = p.edge_prob;
  doc["weight_scale"] = p.weight_scale;
  doc["pair_scale"] = p.pair_scale;
  return doc;
}

std::vector<sds::gen::GenSpec> mixture_from_json(const json& doc,
                                                 std::uint64_t seed) {
  const json& list = doc.is_array() ? doc : doc.at("mixture");
  std::vector<sds::gen::GenSpec> specs;
  for (const auto& entry : list) {
    const auto name = entry.at("family").get<std::string>();
    const auto family = sds::family_from_name(name);
    if (!family) throw sds::ParseError("unknown family \"" + name + "\"");
    sds::gen::GenSpec spec = sds::gen::GenSpec::of(*family, 1.0, seed);
    if (entry.contains("weight")) spec.weight = entry["weight"].get<double>();
    if (entry.contains("params")) {
      spec.params = params_from_json(entry["params"], spec.params);
    }
    specs.push_back(std::move(spec));
  }
  return specs;
}

ordered_json mixture_to_json(const std::vector<sds::gen::GenSpec>& specs) {
  ordered_json list = ordered_json::array();
  for (const auto& spec : specs) {
    ordered_json entry;
    entry["family"] = sds::family_name(spec.family);
    entry["weight"] = spec.weight;
    entry["params"] = params_to_json(spec.params);
    list.push_back(std::move(entry));
  }
  return list;
}

// --------------------------------------------------------------------------
// solve helpers
// --------------------------------------------------------------------------

double quantize_elapsed(double seconds) {
  // Records round wall-clock to 10ms so repeated runs of deterministic
  // solvers produce byte-identical CSVs.
  return std::round(seconds * 100.0) / 100.0;
}

sds::eval::MethodRow row_from_solve(const sds::Instance& inst,
                                    const sds::solvers::SolveResult& result) {
  sds::eval::MethodRow row;
  row.uuid = inst.uuid();
  row.feasible = result.feasible;
  // Built-in solvers either pass or fail to produce a valid solution; the
  // coarse non-pass bucket is "constraint".
  row.error = result.feasible ? sds::sandbox::Outcome::kValid
                              : sds::sandbox::Outcome::kConstraintViolation;
  row.score = result.feasible ? result.score : sds::eval::kInfeasibleScore;
  row.elapsed_sec = quantize_elapsed(result.elapsed_sec);
  return row;
}

sds::eval::MethodRow row_from_candidate(const sds::sandbox::CandidateRun& run,
                                        const std::string& code_hash) {
  sds::eval::MethodRow row;
  row.uuid = run.instance_uuid;
  row.feasible = run.outcome == sds::sandbox::Outcome::kValid;
  row.error = run.outcome;
  row.score = row.feasible ? *run.score : sds::eval::kInfeasibleScore;
  row.elapsed_sec = quantize_elapsed(run.elapsed_sec);
  row.code_hash = code_hash;
  return row;
}

using SolverFn = sds::solvers::SolveResult (*)(const sds::Instance&, double,
                                               std::uint64_t);

std::optional<SolverFn> builtin_solver(const std::string& method) {
  if (method == "greedy") return &sds::solvers::greedy_marginal;
  if (method == "ls") return &sds::solvers::local_search_1flip;
  if (method == "bnb") return &sds::solvers::branch_and_bound;
  if (method == "sa") {
    return +[](const sds::Instance& inst, double budget, std::uint64_t seed) {
      return sds::solvers::simulated_annealing(inst, budget, seed, {});
    };
  }
  if (method == "sa-bug") {
    return +[](const sds::Instance& inst, double budget, std::uint64_t seed) {
      sds::solvers::SAConfig cfg;
      cfg.acceptance = sds::solvers::SaAcceptance::kGlobalBestBug;
      return sds::solvers::simulated_annealing(inst, budget, seed, cfg);
    };
  }
  if (method == "exhaustive") {
    return +[](const sds::Instance& inst, double, std::uint64_t) {
      return sds::solvers::exhaustive(inst);
    };
  }
  return std::nullopt;
}

sds::eval::MethodRecord solve_builtin(const std::vector<sds::Instance>& dataset,
                                      SolverFn solver, const std::string& name,
                                      double budget, std::uint64_t seed,
                                      int workers) {
  std::vector<sds::eval::MethodRow> rows(dataset.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string error_message;
  std::mutex error_mutex;
  auto work = [&] {
    while (!failed.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= dataset.size()) return;
      try {
        const auto result = solver(
            dataset[i], budget, sds::derive_seed(seed, static_cast<std::uint64_t>(i)));
        rows[i] = row_from_solve(dataset[i], result);
      } catch (const std::exception& e) {
        std::lock_guard lock(error_mutex);
        error_message = e.what();
        failed.store(true);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int threads = std::min<int>(workers, static_cast<int>(dataset.size()));
  for (int t = 0; t < std::max(1, threads); ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (failed.load()) throw sds::ContractViolation(error_message);

  sds::eval::MethodRecord record;
  record.method = name;
  record.rows = std::move(rows);
  return record;
}

std::vector<sds::eval::MethodRecord> read_all_records(
    const std::vector<std::string>& paths) {
  std::vector<sds::eval::MethodRecord> records;
  for (const auto& path : paths) {
    for (auto& record : sds::eval::read_records_csv(path)) {
      records.push_back(std::move(record));
    }
  }
  if (records.empty()) throw sds::ParseError("no record rows found");
  return records;
}

std::vector<fs::path> sorted_files(const fs::path& dir) {
  if (!fs::exists(dir)) throw sds::ParseError("no such path: " + dir.string());
  std::vector<fs::path> files;
  if (fs::is_regular_file(dir)) {
    files.push_back(dir);
    return files;
  }
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw sds::ParseError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

sds::sandbox::RunnerConfig runner_from_flags(const GlobalOptions& global,
                                             const std::string& runner_flag,
                                             const std::string& compile_flag,
                                             bool no_compile) {
  sds::sandbox::RunnerConfig runner = sds::sandbox::RunnerConfig::python3();
  if (global.config.contains("runner")) {
    runner.run_cmd = split_command(global.config["runner"].get<std::string>());
  }
  if (global.config.contains("compile_cmd")) {
    runner.compile_cmd =
        split_command(global.config["compile_cmd"].get<std::string>());
  }
  if (!runner_flag.empty()) runner.run_cmd = split_command(runner_flag);
  if (!compile_flag.empty()) runner.compile_cmd = split_command(compile_flag);
  if (no_compile) runner.compile_cmd.clear();
  if (global.config.contains("memory_limit_mb")) {
    runner.memory_limit_bytes =
        global.config["memory_limit_mb"].get<std::uint64_t>() << 20;
  }
  return runner;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SDS benchmark and verification suite"};
  app.require_subcommand(1);
  app.fallthrough(true);  // global flags may follow the subcommand

  GlobalOptions global;
  app.add_option("--seed", global.seed, "Default PRNG seed (also: SDS_SEED)")
      ->each([&](const std::string&) { global.seed_given = true; });
  app.add_option("--workers", global.workers, "Worker pool size (default: CPUs, max 32)")
      ->each([&](const std::string&) { global.workers_given = true; });
  app.add_option("--config", global.config_path, "JSON config file");
  app.add_flag("--print-config", global.print_config,
               "Print the fully resolved configuration and continue");
  app.add_flag("--validate", global.validate,
               "Re-read every file written and verify it");

  // ---- generate ----
  auto* cmd_generate = app.add_subcommand("generate", "Generate a JSONL dataset");
  int gen_count = 0;
  std::string gen_out;
  std::string gen_mixture_path;
  std::string gen_family;
  cmd_generate->add_option("--count", gen_count, "Number of instances")->required();
  cmd_generate->add_option("--out", gen_out, "Output JSONL path")->required();
  cmd_generate->add_option("--mixture", gen_mixture_path,
                           "Mixture config JSON (family/weight/params entries)");
  cmd_generate->add_option("--family", gen_family,
                           "Generate a single family instead of a mixture");

  // ---- solve ----
  auto* cmd_solve = app.add_subcommand("solve", "Run a solver over a dataset");
  std::string solve_dataset, solve_method, solve_source, solve_out;
  std::string solve_method_name;
  double solve_budget = 5.0;
  double solve_timeout = 5.0;
  std::string solve_runner_flag, solve_compile_flag;
  bool solve_no_compile = false;
  cmd_solve->add_option("--dataset", solve_dataset, "Input JSONL")->required();
  cmd_solve
      ->add_option("--method", solve_method,
                   "greedy|ls|bnb|sa|sa-bug|exhaustive|external:<cmd>")
      ->required();
  cmd_solve->add_option("--source", solve_source,
                        "Candidate source file (external methods)");
  cmd_solve->add_option("--budget", solve_budget, "Per-instance budget seconds");
  cmd_solve->add_option("--timeout", solve_timeout,
                        "Per-instance timeout for external candidates");
  cmd_solve->add_option("--out", solve_out, "Output records CSV")->required();
  cmd_solve->add_option("--method-name", solve_method_name,
                        "Method column value (defaults to the method token)");
  cmd_solve->add_option("--runner", solve_runner_flag,
                        "Run command template, e.g. \"python3 {file}\"");
  cmd_solve->add_option("--compile-cmd", solve_compile_flag,
                        "Compile-phase command template");
  cmd_solve->add_flag("--no-compile-phase", solve_no_compile,
                      "Disable the compile phase (maps syntax errors to runtime)");

  // ---- evaluate ----
  auto* cmd_evaluate = app.add_subcommand("evaluate", "Compute VBS, gaps and reports");
  std::vector<std::string> eval_records;
  std::string eval_out, eval_greedy = "greedy";
  cmd_evaluate->add_option("--records", eval_records, "Records CSV file(s)")
      ->required()
      ->expected(-1);
  cmd_evaluate->add_option("--out", eval_out, "Output directory")->required();
  cmd_evaluate->add_option("--greedy-method", eval_greedy,
                           "Method used as the hardness baseline");

  // ---- passk ----
  auto* cmd_passk = app.add_subcommand("passk", "Bootstrap best-of-k estimates");
  std::string passk_samples, passk_out;
  std::vector<int> passk_ks{1, 2, 4, 8, 16, 32, 64};
  int passk_bootstrap = 500;
  std::vector<std::string> passk_extra_records;
  cmd_passk->add_option("--samples", passk_samples,
                        "Directory of per-sample records CSVs")->required();
  cmd_passk->add_option("--k", passk_ks, "k values")->expected(-1);
  cmd_passk->add_option("--B", passk_bootstrap, "Bootstrap iterations");
  cmd_passk->add_option("--records", passk_extra_records,
                        "Extra records CSVs included in the VBS reference");
  cmd_passk->add_option("--out", passk_out, "Output CSV")->required();

  // ---- tournament ----
  auto* cmd_tournament =
      app.add_subcommand("tournament", "Two-stage candidate tournament");
  std::string tour_pool, tour_dataset, tour_out, tour_reference = "greedy";
  std::vector<std::string> tour_records;
  int tour_probes = 30, tour_survivors = 10;
  double tour_hardest = 0.6, tour_timeout = 5.0;
  std::string tour_runner_flag, tour_compile_flag;
  bool tour_no_compile = false;
  cmd_tournament->add_option("--pool", tour_pool, "Candidate sources directory")
      ->required();
  cmd_tournament->add_option("--dataset", tour_dataset, "Test set JSONL")->required();
  cmd_tournament->add_option("--records", tour_records,
                             "Reference records CSV(s) for VBS")
      ->required()
      ->expected(-1);
  cmd_tournament->add_option("--out", tour_out, "Output report JSON")->required();
  cmd_tournament->add_option("--probes", tour_probes, "Stage-1 probe count");
  cmd_tournament->add_option("--hardest-frac", tour_hardest,
                             "Fraction of probes taken from hardest instances");
  cmd_tournament->add_option("--survivors", tour_survivors, "Stage-2 size");
  cmd_tournament->add_option("--timeout", tour_timeout, "Per-run timeout seconds");
  cmd_tournament->add_option("--reference-method", tour_reference,
                             "Method ranking the hardest probes");
  cmd_tournament->add_option("--runner", tour_runner_flag, "Run command template");
  cmd_tournament->add_option("--compile-cmd", tour_compile_flag,
                             "Compile-phase command template");
  cmd_tournament->add_flag("--no-compile-phase", tour_no_compile,
                           "Disable the compile phase");

  // ---- audit ----
  auto* cmd_audit = app.add_subcommand("audit", "Static classification of candidates");
  std::string audit_pool, audit_out, audit_patterns_path;
  bool audit_dump_patterns = false;
  cmd_audit->add_option("--pool", audit_pool, "Candidate file or directory");
  cmd_audit->add_option("--out", audit_out, "Output report JSON");
  cmd_audit->add_option("--patterns", audit_patterns_path,
                        "Override detector patterns (JSON)");
  cmd_audit->add_flag("--dump-patterns", audit_dump_patterns,
                      "Print the default detector patterns and exit");

  // ---- reward ----
  auto* cmd_reward = app.add_subcommand("reward", "Score one generation text");
  std::string reward_generation, reward_dataset, reward_uuid, reward_gate = "hard";
  std::string reward_out;
  int reward_index = 0;
  double reward_progress = 0.0, reward_timeout = 5.0;
  std::string reward_runner_flag, reward_compile_flag;
  bool reward_no_compile = false;
  cmd_reward->add_option("--generation", reward_generation,
                         "Generation text file (<think>/<code> blocks)")
      ->required();
  cmd_reward->add_option("--dataset", reward_dataset, "Instance JSONL")->required();
  cmd_reward->add_option("--uuid", reward_uuid, "Instance uuid (default: --index)");
  cmd_reward->add_option("--index", reward_index, "Instance index in the dataset");
  cmd_reward->add_option("--progress", reward_progress,
                         "Normalized training progress t in [0,1]");
  cmd_reward->add_option("--gate", reward_gate, "hard|soft");
  cmd_reward->add_option("--timeout", reward_timeout, "Execution timeout seconds");
  cmd_reward->add_option("--out", reward_out, "Also write the report JSON here");
  cmd_reward->add_option("--runner", reward_runner_flag, "Run command template");
  cmd_reward->add_option("--compile-cmd", reward_compile_flag,
                         "Compile-phase command template");
  cmd_reward->add_flag("--no-compile-phase", reward_no_compile,
                       "Disable the compile phase");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    load_config(global);
    const std::uint64_t seed = resolve_seed(global);
    const int workers = resolve_workers(global);

    // ---- generate ----
    if (cmd_generate->parsed()) {
      std::vector<sds::gen::GenSpec> specs;
      if (!gen_family.empty()) {
        const auto family = sds::family_from_name(gen_family);
        if (!family) throw sds::ContractViolation("unknown family " + gen_family);
        specs = {sds::gen::GenSpec::of(*family, 1.0, seed)};
      } else if (!gen_mixture_path.empty()) {
        specs = mixture_from_json(json::parse(read_file(gen_mixture_path)), seed);
      } else if (global.config.contains("mixture")) {
        specs = mixture_from_json(global.config["mixture"], seed);
      } else {
        specs = sds::gen::default_mixture(seed);
      }
      if (global.print_config) {
        ordered_json cfg;
        cfg["seed"] = seed;
        cfg["count"] = gen_count;
        cfg["out"] = gen_out;
        cfg["mixture"] = mixture_to_json(specs);
        std::cout << cfg.dump(2) << "\n";
      }
      const auto dataset = sds::gen::generate_mixture(specs, gen_count, seed);
      sds::gen::write_jsonl(dataset, gen_out);

      std::map<std::string, int> histogram;
      for (const auto& inst : dataset) {
        ++histogram[sds::family_name(inst.problem_type())];
      }
      std::cout << "wrote " << dataset.size() << " instances to " << gen_out << "\n";
      for (const auto& [family, count] : histogram) {
        std::cout << "  " << family << ": " << count << "\n";
      }
      if (global.validate) {
        const auto reread = sds::gen::read_jsonl(gen_out);
        if (reread.size() != dataset.size()) {
          throw std::runtime_error("validation failed: instance count mismatch");
        }
        for (std::size_t i = 0; i < reread.size(); ++i) {
          if (sds::gen::to_json_line(reread[i]) !=
              sds::gen::to_json_line(dataset[i])) {
            throw std::runtime_error("validation failed: line " +
                                     std::to_string(i + 1) + " differs");
          }
        }
        std::cout << "validated " << gen_out << "\n";
      }
      return 0;
    }

    // ---- solve ----
    if (cmd_solve->parsed()) {
      const auto dataset = sds::gen::read_jsonl(solve_dataset);
      sds::eval::MethodRecord record;
      if (const auto solver = builtin_solver(solve_method)) {
        const std::string name =
            solve_method_name.empty() ? solve_method : solve_method_name;
        if (global.print_config) {
          ordered_json cfg;
          cfg["method"] = solve_method;
          cfg["budget_sec"] = solve_budget;
          cfg["seed"] = seed;
          cfg["workers"] = workers;
          std::cout << cfg.dump(2) << "\n";
        }
        record = solve_builtin(dataset, *solver, name, solve_budget, seed, workers);
      } else if (solve_method.rfind("external:", 0) == 0) {
        if (solve_source.empty()) {
          throw sds::ContractViolation("external methods require --source");
        }
        auto runner = runner_from_flags(global, solve_runner_flag,
                                        solve_compile_flag, solve_no_compile);
        const std::string cmd = solve_method.substr(9);
        if (!cmd.empty()) runner.run_cmd = split_command(cmd);
        const auto cand =
            sds::sandbox::Candidate::of(read_file(solve_source), solve_source);
        const auto runs = sds::sandbox::run_batch(cand, dataset, solve_timeout,
                                                  workers, runner);
        record.method =
            solve_method_name.empty() ? std::string("external") : solve_method_name;
        for (const auto& run : runs) {
          record.rows.push_back(row_from_candidate(run, cand.source_hash));
        }
      } else {
        throw sds::ContractViolation("unknown method " + solve_method);
      }
      sds::eval::write_records_csv(record, solve_out);
      std::cout << "wrote " << record.rows.size() << " rows to " << solve_out << "\n";
      if (global.validate) {
        const auto reread = sds::eval::read_records_csv(solve_out);
        std::size_t rows = 0;
        for (const auto& r : reread) rows += r.rows.size();
        if (rows != record.rows.size()) {
          throw std::runtime_error("validation failed: row count mismatch");
        }
        std::cout << "validated " << solve_out << "\n";
      }
      return 0;
    }

    // ---- evaluate ----
    if (cmd_evaluate->parsed()) {
      const auto records = read_all_records(eval_records);
      const auto verdicts = sds::eval::judge(records, eval_greedy);
      fs::create_directories(eval_out);
      const fs::path metrics_path = fs::path(eval_out) / "metrics_final.csv";
      const fs::path summary_path = fs::path(eval_out) / "summary.json";
      sds::eval::write_metrics_csv(records, verdicts, metrics_path);
      write_file(summary_path, sds::eval::summary_json(records, verdicts));
      std::cout << "wrote " << metrics_path.string() << " and "
                << summary_path.string() << "\n";
      if (global.validate) {
        const auto rows = sds::eval::read_metrics_csv(metrics_path);
        std::size_t expected = 0;
        for (const auto& r : records) expected += r.rows.size();
        if (rows.size() != expected) {
          throw std::runtime_error("validation failed: metrics row count");
        }
        const auto summary = json::parse(read_file(summary_path));
        if (!summary.contains("methods")) {
          throw std::runtime_error("validation failed: summary has no methods");
        }
        std::cout << "validated outputs\n";
      }
      return 0;
    }

    // ---- passk ----
    if (cmd_passk->parsed()) {
      std::vector<sds::eval::MethodRecord> samples;
      for (const auto& file : sorted_files(passk_samples)) {
        if (file.extension() != ".csv") continue;
        for (auto& record : sds::eval::read_records_csv(file)) {
          samples.push_back(std::move(record));
        }
      }
      if (samples.empty()) throw sds::ParseError("no sample CSVs in " + passk_samples);
      std::vector<sds::eval::MethodRecord> reference = samples;
      for (const auto& path : passk_extra_records) {
        for (auto& record : sds::eval::read_records_csv(path)) {
          reference.push_back(std::move(record));
        }
      }
      // Instance list from the first sample; every sample must cover it.
      std::vector<std::vector<sds::eval::SampleOutcome>> pools;
      for (const auto& row : samples.front().rows) {
        const double vbs = sds::eval::compute_vbs(reference, row.uuid);
        std::vector<sds::eval::SampleOutcome> pool;
        for (const auto& sample : samples) {
          const auto* sample_row = sample.find(row.uuid);
          if (!sample_row) {
            throw sds::ParseError("sample " + sample.method + " misses uuid " +
                                  row.uuid);
          }
          sds::eval::SampleOutcome outcome;
          outcome.feasible = sample_row->feasible;
          outcome.gap = *sds::eval::gap(vbs, sample_row->score, sample_row->feasible,
                                        sds::eval::GapMode::kUnconditionalInfeasibleIsOne);
          pool.push_back(outcome);
        }
        pools.push_back(std::move(pool));
      }
      std::ofstream out(passk_out);
      if (!out) throw std::runtime_error("cannot open " + passk_out);
      out << "k,pass_mean,pass_std,gap_mean,gap_std\n";
      std::cout << "k  pass          gap\n";
      for (int k : passk_ks) {
        const auto est = sds::eval::pass_at_k(pools, k, passk_bootstrap, seed);
        out << k << ',' << est.pass_mean << ',' << est.pass_std << ','
            << est.gap_mean << ',' << est.gap_std << "\n";
        std::cout << k << "  " << est.pass_mean << " +/- " << est.pass_std
                  << "  " << est.gap_mean << " +/- " << est.gap_std << "\n";
      }
      return 0;
    }

    // ---- tournament ----
    if (cmd_tournament->parsed()) {
      std::vector<sds::sandbox::Candidate> pool;
      std::vector<std::string> origins;
      for (const auto& file : sorted_files(tour_pool)) {
        pool.push_back(
            sds::sandbox::Candidate::of(read_file(file), file.filename().string()));
        origins.push_back(file.filename().string());
      }
      const auto test_set = sds::gen::read_jsonl(tour_dataset);
      const auto reference = read_all_records(tour_records);
      sds::eval::TournamentConfig config;
      config.probe_count = tour_probes;
      config.hardest_frac = tour_hardest;
      config.survivors = tour_survivors;
      config.timeout_sec = tour_timeout;
      config.workers = workers;
      config.seed = seed;
      config.reference_method = tour_reference;
      config.runner = runner_from_flags(global, tour_runner_flag,
                                        tour_compile_flag, tour_no_compile);
      const auto result = sds::eval::tournament(pool, test_set, reference, config);

      ordered_json report;
      report["pool_size"] = pool.size();
      report["stage1_survivors"] = result.stage1_survivors;
      report["eliminated"] = ordered_json::array();
      for (int idx : result.eliminated_pool_indices) {
        report["eliminated"].push_back(origins[static_cast<std::size_t>(idx)]);
      }
      report["ranking"] = ordered_json::array();
      int rank = 1;
      for (const auto& survivor : result.ranking) {
        ordered_json entry;
        entry["rank"] = rank++;
        entry["source"] = origins[static_cast<std::size_t>(survivor.pool_index)];
        entry["hash"] = survivor.source_hash;
        entry["probe_mean_gap"] = survivor.probe_mean_gap;
        entry["full_mean_gap"] = survivor.full_mean_gap;
        entry["feasible_rate"] = survivor.feasible_rate;
        entry["timeout_rate"] = survivor.timeout_rate;
        report["ranking"].push_back(std::move(entry));
      }
      write_file(tour_out, report.dump(2));
      std::cout << "stage 1 kept " << result.stage1_survivors << "/" << pool.size()
                << "; report at " << tour_out << "\n";
      return 0;
    }

    // ---- audit ----
    if (cmd_audit->parsed()) {
      sds::audit::AuditPatterns patterns = sds::audit::AuditPatterns::defaults();
      if (!audit_patterns_path.empty()) {
        patterns = sds::audit::AuditPatterns::from_json(read_file(audit_patterns_path));
      }
      if (audit_dump_patterns) {
        std::cout << patterns.to_json() << "\n";
        return 0;
      }
      if (audit_pool.empty()) {
        throw sds::ContractViolation("audit requires --pool (or --dump-patterns)");
      }
      std::vector<sds::audit::CodeAudit> audits;
      for (const auto& file : sorted_files(audit_pool)) {
        audits.push_back(sds::audit::audit_code(read_file(file),
                                                file.filename().string(), patterns));
      }
      const std::string report = sds::audit::audit_report_json(audits);
      if (audit_out.empty()) {
        std::cout << report << "\n";
      } else {
        write_file(audit_out, report);
        std::cout << "wrote " << audit_out << "\n";
      }
      return 0;
    }

    // ---- reward ----
    if (cmd_reward->parsed()) {
      const auto dataset = sds::gen::read_jsonl(reward_dataset);
      const sds::Instance* inst = nullptr;
      if (!reward_uuid.empty()) {
        for (const auto& candidate : dataset) {
          if (candidate.uuid() == reward_uuid) inst = &candidate;
        }
        if (!inst) throw sds::ParseError("uuid " + reward_uuid + " not in dataset");
      } else {
        if (reward_index < 0 || static_cast<std::size_t>(reward_index) >= dataset.size()) {
          throw sds::ContractViolation("--index out of range");
        }
        inst = &dataset[static_cast<std::size_t>(reward_index)];
      }
      const std::string generation = read_file(reward_generation);
      const auto gate = reward_gate == "soft" ? sds::reward::GateMode::kSoft
                                              : sds::reward::GateMode::kHard;

      sds::sandbox::CandidateRun run;
      run.instance_uuid = inst->uuid();
      run.outcome = sds::sandbox::Outcome::kRuntimeError;
      if (const auto cand = sds::sandbox::extract_code_block(generation)) {
        const auto runner = runner_from_flags(global, reward_runner_flag,
                                              reward_compile_flag, reward_no_compile);
        run = sds::sandbox::run_candidate(*cand, *inst, reward_timeout, runner);
      }
      const auto breakdown = sds::reward::compute_breakdown(
          *inst, generation, run, sds::reward::TrainingProgress::of(reward_progress),
          gate);
      const std::string report = sds::reward::breakdown_to_json(breakdown);
      std::cout << report << "\n";
      if (!reward_out.empty()) write_file(reward_out, report);
      return 0;
    }

    return 1;  // unreachable: a subcommand is required
  } catch (const sds::ParseError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const sds::GenerationError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const sds::HarnessError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 1;
  } catch (const sds::ContractViolation& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
