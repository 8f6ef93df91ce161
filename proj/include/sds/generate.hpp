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

#ifndef SDS_GENERATE_HPP_
#define SDS_GENERATE_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sds/core.hpp"

namespace sds::gen {

// Per-family generation parameters. `default_params` fills the documented
// defaults for each family; any field can be overridden afterwards (the CLI
// exposes them through the mixture config file).
struct FamilyParams {
  int n_min = 20;
  int n_max = 60;

  // Interaction graph density (fraction of pairs carrying an interaction).
  double density = 0.5;
  double weight_lo = -2.0;
  double weight_hi = 2.0;
  double interaction_lo = -20.0;
  double interaction_hi = 20.0;

  // Constraint sprinkling: counts are round(rate * n).
  double mutex_rate = 0.10;
  double precedence_rate = 0.10;
  double group_rate = 0.05;
  int group_size_min = 2;
  int group_size_max = 4;

  // Cardinality: U = max(2, round(n * upper_frac)), or n when upper_frac <= 0.
  // The lower bound is drawn uniformly from [0, lower_target] and then lowered
  // to the constructive witness size if the witness cannot reach it.
  double upper_frac = 0.4;
  int lower_target = 0;
  // When set, L is pinned; generation fails if no witness of that size exists.
  std::optional<int> lower_fixed;

  // structural_trap: precedence chain of `chain` members, head carries the
  // bait weight, chain edges carry the trap interaction.
  int chain_min = 4;
  int chain_max = 7;
  double bait_weight = 100.0;
  double trap_interaction = -10.0;
  double chain_member_weight_lo = 4.0;
  double chain_member_weight_hi = 9.0;

  int blocks = 4;           // decomposable: disjoint clusters
  int cliques = 3;          // local_optima: planted cliques
  double clique_interaction_lo = 3.0;
  double clique_interaction_hi = 8.0;
  double signal = 5.0;      // planted_qubo
  double noise = 2.0;       // planted_qubo
  double edge_prob = 0.6;   // maxcut_qubo
  double weight_scale = 5.0;   // tree_structured: w_i in [-scale, scale]
  double pair_scale = 15.0;    // tree_structured: edge W in [-scale, scale]
};

FamilyParams default_params(Family family);

// One component of a generation mixture.
struct GenSpec {
  Family family = Family::kDenseDeceptive;
  double weight = 1.0;  // sampling probability within a mixture
  FamilyParams params;
  std::uint64_t seed = 0;

  static GenSpec of(Family family, double weight = 1.0, std::uint64_t seed = 0) {
    return GenSpec{family, weight, default_params(family), seed};
  }
};

// The default benchmark mixture:
// dense_deceptive 20%, structural_trap 15%, bnb_showcase 15%, random_sds 5%,
// tree_structured 5%, greedy_easy 5%, decomposable 10%, local_optima 10%,
// planted_qubo 10%, maxcut_qubo 5%.
std::vector<GenSpec> default_mixture(std::uint64_t seed = 0);

// Generates `count` instances of one family. Deterministic in (spec, seed):
// instance i uses the sub-seed derive_seed(spec.seed, i). Every emitted
// instance carries a generation-time feasible witness check; unsatisfiable
// parameter combinations raise GenerationError naming the family.
std::vector<Instance> generate(const GenSpec& spec, int count);

// Generates `total` instances from a weighted family mixture. Family choice
// for slot i and the instance itself both derive deterministically from
// (seed, i), so datasets are byte-stable and order-independent to produce.
// Weights must sum to 1 within 1e-9.
std::vector<Instance> generate_mixture(const std::vector<GenSpec>& specs,
                                       int total, std::uint64_t seed);

// JSONL (de)serialization. One instance per line:
//   {"uuid": ..., "problem_type": ...,
//    "requirements": {"n_variables", "cardinality_bounds", "precedence",
//                     "mutex", "groups"},
//    "catalog": {"variables": [{"weight": w}, ...],
//                "interactions": {"i,j": W, ...}}}
// The requirements/catalog pair is exactly the payload piped to candidate
// solver programs, so a dataset line can be replayed verbatim.
std::string to_json_line(const Instance& inst);
Instance from_json_line(const std::string& line, std::size_t line_no = 0);

void write_jsonl(const std::vector<Instance>& dataset,
                 const std::filesystem::path& path);
std::vector<Instance> read_jsonl(const std::filesystem::path& path);

// The {"requirements": ..., "catalog": ...} object fed to candidates.
std::string candidate_payload(const Instance& inst);

}  // namespace sds::gen

#endif  // SDS_GENERATE_HPP_
