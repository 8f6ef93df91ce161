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

#ifndef SDS_SOLVERS_HPP_
#define SDS_SOLVERS_HPP_

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sds/core.hpp"
#include "sds/rng.hpp"

namespace sds::solvers {

inline constexpr double kNoSolutionScore =
    -std::numeric_limits<double>::infinity();

// Unified solver output. When `selection` is present, `score` is the exact
// core score of that selection and `feasible` reflects its violation count;
// otherwise score is the -inf sentinel. `trace` records (elapsed_sec, score)
// whenever the incumbent improves. `meta` carries solver counters:
//   greedy:        (none)
//   local search:  "restarts", "min_restart_improvement"
//   branch&bound:  "complete" (1 when the search space was exhausted under
//                  the bound, i.e. the result is proven optimal), "nodes"
//   annealing:     "steps", "skipped_steps"
struct SolveResult {
  std::optional<Selection> selection;
  double score = kNoSolutionScore;
  bool feasible = false;
  double elapsed_sec = 0.0;
  std::vector<std::pair<double, double>> trace;
  std::map<std::string, double> meta;
};

enum class SaAcceptance {
  kCurrentState,    // Metropolis against the current state's score
  kGlobalBestBug,   // faulty rule: Metropolis against the running best score
};

enum class SaGuard {
  kRetryLoop,          // keep mutating the proposal until it is feasible
  kRejectAndContinue,  // skip infeasible proposals but cool anyway
};

enum class SaMove {
  kBitFlip,    // toggle one uniformly chosen variable
  kAddRemove,  // coin-flip between adding and removing within [L, U]
};

struct SAConfig {
  double t0 = 1000.0;
  double cooling = 0.99;
  // Fixed step count, or nullopt for dynamic termination (run while T > t_min).
  std::optional<int> fixed_iterations = 1000;
  double t_min = 1.0;
  SaAcceptance acceptance = SaAcceptance::kCurrentState;
  SaGuard guard = SaGuard::kRetryLoop;
  SaMove move = SaMove::kBitFlip;
  // Termination caps; the reference loops are unbounded but a harness must
  // finish. Exceeding them degrades gracefully (skip step / sentinel result).
  int retry_cap = 10000;
  int init_attempt_cap = 50000;
};

// Marginal-gain construction. Phase 1 repeatedly adds the feasibility-
// preserving variable (lower bound excluded) of maximum positive gain, ties
// to the lowest index; phase 2 tops up with any feasibility-preserving
// variable until the lower cardinality bound holds. Deterministic; `seed`
// is accepted for API uniformity.
SolveResult greedy_marginal(const Instance& inst, double budget_sec,
                            std::uint64_t seed);

// Best-improvement 1-flip hill climbing with random restarts. Restart count
// scales with the budget: max(1, round(20 * budget_sec / 2.0)). Each restart
// starts from a shuffled-order greedy construction and runs up to 2000
// accepted moves, taking the best feasible improving flip (gain > 1e-12).
SolveResult local_search_1flip(const Instance& inst, double budget_sec,
                               std::uint64_t seed);

// Depth-first branch and bound over variables ordered by interaction degree
// (descending). The optimistic bound adds, to the current score, every
// undecided variable's nonnegative gain against the current selection plus
// all nonnegative interactions among undecided pairs; branches are pruned
// when bound <= best + 1e-12. Anytime: the incumbent is usable whenever the
// budget expires; meta["complete"] reports proof of optimality.
SolveResult branch_and_bound(const Instance& inst, double budget_sec,
                             std::uint64_t seed);

// Simulated annealing per SAConfig. Starts from a rejection-sampled random
// feasible selection; proposes single flips (or add/remove moves); the guard
// decides how infeasible proposals are treated; acceptance follows the
// configured Metropolis rule; temperature decays multiplicatively each step.
// The best feasible state seen is tracked and returned.
SolveResult simulated_annealing(const Instance& inst, double budget_sec,
                                std::uint64_t seed, const SAConfig& cfg = {});

// Enumerates all 2^n selections (n <= 24; larger instances are refused with
// ContractViolation). Returns the best feasible selection, ties broken toward
// the lexicographically smallest variable list, or the sentinel when no
// feasible selection exists. Test oracle; not budgeted.
SolveResult exhaustive(const Instance& inst);

namespace detail {

// Incremental bookkeeping shared by the constructive solvers: selection mask,
// per-variable gain (weight + interactions with the selected set) and
// constraint-aware add/remove tests.
class SelectionState {
 public:
  explicit SelectionState(const Instance& inst);

  bool selected(int i) const { return mask_[static_cast<std::size_t>(i)] != 0; }
  int size() const { return size_; }
  double current_score() const { return score_; }
  double gain_add(int i) const { return contrib_[static_cast<std::size_t>(i)]; }
  double gain_remove(int i) const { return -contrib_[static_cast<std::size_t>(i)]; }

  // Feasibility-preserving tests. can_add ignores the lower bound; can_remove
  // enforces it plus precedence on selected dependents.
  bool can_add(int i) const;
  bool can_remove(int i) const;

  void add(int i);
  void remove(int i);

  Selection to_selection() const;

 private:
  const Instance& inst_;
  std::vector<char> mask_;
  std::vector<double> contrib_;
  std::vector<int> group_load_;
  int size_ = 0;
  double score_ = 0.0;
};

// Mask-level bookkeeping with incremental violation counters. Unlike
// SelectionState it represents arbitrary (possibly infeasible) states, which
// is what annealing proposals and the exhaustive Gray-code sweep need.
class FlipState {
 public:
  explicit FlipState(const Instance& inst);

  int n() const { return inst_->n(); }
  bool selected(int v) const { return mask_[static_cast<std::size_t>(v)] != 0; }
  int card() const { return card_; }
  double score() const { return score_; }
  bool feasible() const;
  const std::vector<char>& mask() const { return mask_; }

  void flip(int v);
  void assign(const std::vector<int>& vars);  // reset to exactly these

 private:
  const Instance* inst_;
  std::vector<char> mask_;
  std::vector<double> contrib_;
  std::vector<int> group_count_;
  int card_ = 0;
  double score_ = 0.0;
  int prec_viol_ = 0;
  int mutex_viol_ = 0;
  int group_over_ = 0;
};

// One guarded bit-flip proposal: flips a random variable, then keeps flipping
// until the state is feasible or `retry_cap` mutations were spent. Returns
// whether a feasible neighbor was produced. Exposed for direct testing of the
// guard contract.
bool guarded_bitflip_proposal(FlipState& neighbor, Rng& rng, int retry_cap);

}  // namespace detail

}  // namespace sds::solvers

#endif  // SDS_SOLVERS_HPP_
