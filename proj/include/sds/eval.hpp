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

#ifndef SDS_EVAL_HPP_
#define SDS_EVAL_HPP_

#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sds/core.hpp"
#include "sds/sandbox.hpp"

namespace sds::eval {

inline constexpr double kInfeasibleScore =
    -std::numeric_limits<double>::infinity();

// One row of a solver-or-candidate evaluation record.
struct MethodRow {
  std::string uuid;
  bool feasible = false;
  sandbox::Outcome error = sandbox::Outcome::kValid;  // "none" when feasible
  double score = kInfeasibleScore;  // -inf sentinel for infeasible rows
  double elapsed_sec = 0.0;
  std::string code_hash;  // empty for built-in solvers
};

// One method's rows over a dataset; one row per (method, uuid).
struct MethodRecord {
  std::string method;
  std::vector<MethodRow> rows;

  const MethodRow* find(const std::string& uuid) const;
};

enum class Difficulty { kTrivial, kModerate, kHard };
const char* difficulty_name(Difficulty d);

// Per-instance judgment against the virtual best solver.
struct InstanceVerdict {
  std::string uuid;
  double vbs = kInfeasibleScore;
  double hardness = 1.0;
  Difficulty difficulty = Difficulty::kHard;
  std::map<std::string, double> gap_by_method;  // conditional; feasible rows only
};

// Maximum feasible score over all methods for one instance; -inf when none.
// Throws ContractViolation for a uuid absent from every record.
double compute_vbs(const std::vector<MethodRecord>& records,
                   const std::string& uuid);

enum class GapMode {
  kConditionalFeasible,        // infeasible rows yield nullopt
  kUnconditionalInfeasibleIsOne,  // infeasible rows yield 1.0
};

// Gap to the virtual best solver, clipped to [0, 1]:
//   (vbs - max(0, score)) / vbs for feasible rows when vbs > 0.
// Feasible rows against a nonpositive vbs gap to 0 when score >= vbs, else 1.
std::optional<double> gap(double vbs, double score, bool feasible, GapMode mode);

// Hardness of an instance relative to the greedy baseline and its difficulty
// stratum: hardness < 0.01 Trivial, < 0.10 Moderate, otherwise Hard.
std::pair<double, Difficulty> classify_difficulty(double vbs,
                                                  double greedy_score,
                                                  bool greedy_feasible);

// Builds verdicts for every uuid appearing in `records`. Hardness uses the
// record named `greedy_method` as the baseline (all-fail hardness when that
// method is absent for an instance).
std::vector<InstanceVerdict> judge(const std::vector<MethodRecord>& records,
                                   const std::string& greedy_method = "greedy");

// --------------------------------------------------------------------------
// Pass@k bootstrap
// --------------------------------------------------------------------------

// One sample's outcome on one instance; `gap` is the unconditional gap
// (infeasible samples carry 1.0).
struct SampleOutcome {
  bool feasible = false;
  double gap = 1.0;
};

struct PassKEstimate {
  int k = 0;
  double pass_mean = 0.0;
  double pass_std = 0.0;
  double gap_mean = 1.0;
  double gap_std = 0.0;
};

// Bootstrap best-of-k estimate over a fixed pool of N samples per instance:
// per iteration and instance, draw k of N without replacement; pass is "any
// feasible in the draw", gap is the minimum unconditional gap (1.0 when the
// draw has no feasible sample). Means aggregate over instances; mean/std are
// reported over the B bootstrap iterations (population std).
PassKEstimate pass_at_k(
    const std::vector<std::vector<SampleOutcome>>& per_instance_samples, int k,
    int bootstrap_iterations, std::uint64_t seed);

// Collapses N sample records into one best-of-N record: per instance the
// feasible sample with the lowest gap wins (ties to the lowest sample index);
// instances with no feasible sample keep the first sample's row.
MethodRecord best_of_n_collapse(const std::vector<MethodRecord>& samples,
                                const std::vector<MethodRecord>& vbs_reference,
                                const std::string& method_name = "best_of_n");

// --------------------------------------------------------------------------
// Two-stage candidate tournament
// --------------------------------------------------------------------------

struct TournamentConfig {
  int probe_count = 30;
  double hardest_frac = 0.6;  // probes taken from the reference's worst gaps
  int survivors = 10;
  double timeout_sec = 5.0;
  int workers = 8;
  std::uint64_t seed = 0;
  std::string reference_method = "greedy";  // ranks "hardest" probes
  sandbox::RunnerConfig runner;
};

struct SurvivorReport {
  int pool_index = -1;
  std::string source_hash;
  double probe_mean_gap = 1.0;
  double full_mean_gap = 1.0;
  double feasible_rate = 0.0;
  double timeout_rate = 0.0;
};

struct TournamentResult {
  int stage1_survivors = 0;
  std::vector<int> eliminated_pool_indices;      // failed a probe in stage 1
  std::vector<SurvivorReport> ranking;           // stage 2, best first
};

// Stage 1 probes every candidate on `probe_count` instances (hardest_frac by
// the reference method's unconditional gap, the rest drawn uniformly) and
// keeps only candidates Valid on every probe. The top `survivors` by mean
// probe gap advance to stage 2, a full-set evaluation ranked by mean
// unconditional gap. `reference_records` provide the per-uuid VBS.
TournamentResult tournament(const std::vector<sandbox::Candidate>& pool,
                            const std::vector<Instance>& test_set,
                            const std::vector<MethodRecord>& reference_records,
                            const TournamentConfig& config);

// --------------------------------------------------------------------------
// Reports
// --------------------------------------------------------------------------

// Records CSV (one method's raw rows):
//   uuid,method,feasible,error_type,score,elapsed_sec,code_hash
void write_records_csv(const MethodRecord& record,
                       const std::filesystem::path& path);
std::vector<MethodRecord> read_records_csv(const std::filesystem::path& path);

// Full metrics CSV, one row per (method, uuid):
//   uuid,method,feasible,error_type,score,gap_conditional,gap_unconditional,
//   hardness,difficulty,elapsed_sec,code_hash
// Floats use shortest round-trip formatting, so read-back reproduces every
// aggregate bit-for-bit.
void write_metrics_csv(const std::vector<MethodRecord>& records,
                       const std::vector<InstanceVerdict>& verdicts,
                       const std::filesystem::path& path);

struct MetricsRow {
  std::string uuid;
  std::string method;
  bool feasible = false;
  std::string error_type;
  double score = kInfeasibleScore;
  std::optional<double> gap_conditional;
  double gap_unconditional = 1.0;
  double hardness = 1.0;
  std::string difficulty;
  double elapsed_sec = 0.0;
  std::string code_hash;
};

std::vector<MetricsRow> read_metrics_csv(const std::filesystem::path& path);

// Per-method summary (pass rate, conditional/unconditional gap mean and std,
// per-row mean time and cumulative time), serialized with 6 significant
// digits. Mirrors the headline results table shape.
std::string summary_json(const std::vector<MethodRecord>& records,
                         const std::vector<InstanceVerdict>& verdicts);

}  // namespace sds::eval

#endif  // SDS_EVAL_HPP_
