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

#ifndef SDS_REWARD_HPP_
#define SDS_REWARD_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "sds/core.hpp"
#include "sds/sandbox.hpp"

namespace sds::reward {

// Composite weights: 0.10 * format + 0.20 * exec + 0.70 * nominal.
inline constexpr double kFormatWeight = 0.10;
inline constexpr double kExecWeight = 0.20;
inline constexpr double kNominalWeight = 0.70;

// Normalized training progress in [0, 1]; values outside are clamped.
struct TrainingProgress {
  double t = 0.0;
  static TrainingProgress of(double t);
};

// Structural-bonus schedule: 1.0 before 40% progress, 0.2 after.
double curriculum_alpha(TrainingProgress progress);

// 1 iff the generation contains exactly one <think> block and exactly one
// <code> block, with the think block first.
int format_reward(std::string_view generation_text);

struct StructureSignals {
  int graph_indicator = 0;  // any graph-awareness keyword present
  int lazy_sort_flag = 0;   // sorts by weight while ignoring interactions
};

// Keyword heuristics over the lowercased code text.
StructureSignals structure_indicator(std::string_view code_text);

// Execution reward components. For failed executions (timeout / syntax /
// runtime) everything is zero. Otherwise:
//   syntax      = 0.1
//   schema      = 0.1 * [selection parsed]
//   structure   = 0.2 * alpha(t) * [graph keyword]
//   feasibility = 0.3 * [n_vio = 0] - min(0.2, 0.03 * n_vio) * [n_vio > 0]
//   lazy        = -0.2 when the lazy-sort flag fires
// and total = their sum, ranging over [-0.4, 0.7].
struct ExecReward {
  double syntax = 0.0;
  double schema = 0.0;
  double structure = 0.0;
  double feasibility = 0.0;
  double lazy_penalty = 0.0;
  double total = 0.0;
};

ExecReward exec_reward(const sandbox::CandidateRun& run,
                       std::string_view code_text, TrainingProgress progress);

enum class NormalizationVariant {
  kMeanPositiveInteractions,  // I_max = mean(I+) * min(|I+|, U(U-1)/2)
  kTopPositiveInteractions,   // I_max = sum of that many largest I+
};

// Maps a raw objective value toward [0, 1] without knowing the optimum.
// Case 1 (meaningful structure): s / (W_max + I_max), falling back to
// absolute normalization when the estimate degenerates. Case 2 (all-zero
// objective): a sigmoid-like map with Normalize(0) = 0.5. Output is
// intentionally unclamped; the gates clamp.
double normalize_score(
    const Instance& inst, double raw_score,
    NormalizationVariant variant = NormalizationVariant::kMeanPositiveInteractions);

enum class GateMode { kHard, kSoft };

// Feasibility-gated nominal reward in [0, 1].
//   Hard: clamp(Normalize(s)) when n_vio = 0, else exactly 0.
//   Soft: max(0, min(1, Normalize(s) - 0.15 * n_vio)).
// Runs without a parsed selection score as raw 0.
double nominal_reward(
    const Instance& inst, const sandbox::CandidateRun& run, GateMode gate,
    NormalizationVariant variant = NormalizationVariant::kMeanPositiveInteractions);

// Intermediate clamped score: max(0, min(1, Normalize(s) - min(n_vio, 1))).
// Inspectable shaping value; the hard gate above stays authoritative.
double intermediate_score(
    const Instance& inst, double raw_score, int n_vio,
    NormalizationVariant variant = NormalizationVariant::kMeanPositiveInteractions);

// Relative-to-greedy anchoring term:
//   1.0 + 10.0 * delta  when delta >  0.001
//   0.0                 when |delta| <= 0.001
//  -0.5                 when delta < -0.001
double oracle_anchor_reward(double delta_norm);

// Per-code mean pairwise Jaccard similarity of whitespace-token 4-grams
// against the rest of the group. Identical codes score 1, disjoint 0;
// singleton groups return {0} by convention.
std::vector<double> diversity_penalty(const std::vector<std::string>& group_codes);

// Three-tier fallback reward: 1.0 valid feasible, 0.5 executed but
// constraint-violating, 0.1 executed with wrong schema, 0.0 otherwise.
double minimal_feasibility_reward(const sandbox::CandidateRun& run);

// Per-sample reward report.
struct RewardBreakdown {
  int r_format = 0;
  ExecReward exec;
  double r_nominal = 0.0;
  double composite = 0.0;
  GateMode gate = GateMode::kHard;
  double progress_t = 0.0;
};

double composite_reward(int r_format, double r_exec, double r_nominal);

// Full pipeline for one generation: format check, code extraction already
// reflected in `run`, execution components, gated nominal, composite.
RewardBreakdown compute_breakdown(
    const Instance& inst, std::string_view generation_text,
    const sandbox::CandidateRun& run, TrainingProgress progress,
    GateMode gate = GateMode::kHard,
    NormalizationVariant variant = NormalizationVariant::kMeanPositiveInteractions);

// Stable JSON serialization of a breakdown (see README for the schema).
std::string breakdown_to_json(const RewardBreakdown& breakdown);

}  // namespace sds::reward

#endif  // SDS_REWARD_HPP_
