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

#include "sds/solvers.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>

#include "sds/rng.hpp"

namespace sds::solvers {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double exact_score_of_mask(const Instance& inst, const std::vector<char>& mask) {
  double total = 0.0;
  for (int v = 0; v < inst.n(); ++v) {
    if (!mask[static_cast<std::size_t>(v)]) continue;
    total += inst.weight(v);
    for (const auto& [nb, w] : inst.neighbors(v)) {
      if (nb > v && mask[static_cast<std::size_t>(nb)]) total += w;
    }
  }
  return total;
}

Selection mask_to_selection(const std::vector<char>& mask) {
  std::vector<int> vars;
  for (int v = 0; v < static_cast<int>(mask.size()); ++v) {
    if (mask[static_cast<std::size_t>(v)]) vars.push_back(v);
  }
  return Selection::of(std::move(vars));
}

// Fills result fields from a final selection, recomputing score and
// feasibility through core so every solver's triple stays consistent.
void finalize(const Instance& inst, Selection sel, SolveResult& result) {
  result.score = score(inst, sel);
  result.feasible = check_feasibility(inst, sel).n_vio() == 0;
  result.selection = std::move(sel);
}

}  // namespace

namespace detail {

SelectionState::SelectionState(const Instance& inst)
    : inst_(inst),
      mask_(static_cast<std::size_t>(inst.n()), 0),
      contrib_(inst.weights()),
      group_load_(static_cast<std::size_t>(inst.group_count()), 0) {}

bool SelectionState::can_add(int i) const {
  if (selected(i)) return false;
  if (size_ + 1 > inst_.cardinality_hi()) return false;
  for (int pre : inst_.prerequisites_of(i)) {
    if (!selected(pre)) return false;
  }
  for (int m : inst_.mutex_partners(i)) {
    if (selected(m)) return false;
  }
  for (int g : inst_.group_ids_of(i)) {
    if (group_load_[static_cast<std::size_t>(g)] > 0) return false;
  }
  return true;
}

bool SelectionState::can_remove(int i) const {
  if (!selected(i)) return false;
  if (size_ - 1 < inst_.cardinality_lo()) return false;
  for (int dep : inst_.dependents_of(i)) {
    if (selected(dep)) return false;
  }
  return true;
}

void SelectionState::add(int i) {
  mask_[static_cast<std::size_t>(i)] = 1;
  ++size_;
  score_ += contrib_[static_cast<std::size_t>(i)];
  for (const auto& [nb, w] : inst_.neighbors(i)) {
    contrib_[static_cast<std::size_t>(nb)] += w;
  }
  for (int g : inst_.group_ids_of(i)) {
    ++group_load_[static_cast<std::size_t>(g)];
  }
}

void SelectionState::remove(int i) {
  mask_[static_cast<std::size_t>(i)] = 0;
  --size_;
  for (const auto& [nb, w] : inst_.neighbors(i)) {
    contrib_[static_cast<std::size_t>(nb)] -= w;
  }
  score_ -= contrib_[static_cast<std::size_t>(i)];
  for (int g : inst_.group_ids_of(i)) {
    --group_load_[static_cast<std::size_t>(g)];
  }
}

Selection SelectionState::to_selection() const { return mask_to_selection(mask_); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Greedy
// ---------------------------------------------------------------------------

SolveResult greedy_marginal(const Instance& inst, double budget_sec,
                            std::uint64_t /*seed*/) {
  const auto start = Clock::now();
  SolveResult result;
  detail::SelectionState state(inst);

  // Phase 1: take the best positive marginal gain while room remains.
  while (state.size() < inst.cardinality_hi()) {
    int best_var = -1;
    double best_gain = 0.0;
    for (int i = 0; i < inst.n(); ++i) {
      if (!state.can_add(i)) continue;
      const double gain = state.gain_add(i);
      if (gain > best_gain) {
        best_gain = gain;
        best_var = i;
      }
    }
    if (best_var < 0) break;
    state.add(best_var);
    if (budget_sec > 0 && seconds_since(start) > budget_sec) break;
  }
  // Phase 2: top up with any feasibility-preserving variable until the lower
  // bound holds.
  while (state.size() < inst.cardinality_lo()) {
    int pick = -1;
    for (int i = 0; i < inst.n(); ++i) {
      if (state.can_add(i)) {
        pick = i;
        break;
      }
    }
    if (pick < 0) break;
    state.add(pick);
  }

  const Selection sel = state.to_selection();
  if (check_feasibility(inst, sel).n_vio() == 0) {
    finalize(inst, sel, result);
    result.trace.push_back({seconds_since(start), result.score});
  }
  result.elapsed_sec = seconds_since(start);
  return result;
}

// ---------------------------------------------------------------------------
// Local search
// ---------------------------------------------------------------------------

SolveResult local_search_1flip(const Instance& inst, double budget_sec,
                               std::uint64_t seed) {
  if (budget_sec <= 0) throw ContractViolation("local_search: budget must be > 0");
  const auto start = Clock::now();
  constexpr int kMaxIterations = 2000;
  constexpr double kMinGain = 1e-12;
  const int restarts =
      std::max(1, static_cast<int>(std::lround(20.0 * budget_sec / 2.0)));

  SolveResult result;
  double best_score = kNoSolutionScore;
  std::optional<Selection> best_sel;
  double min_improvement = std::numeric_limits<double>::infinity();
  int attempted = 0;

  for (int r = 0; r < restarts; ++r) {
    if (seconds_since(start) > budget_sec) break;
    ++attempted;
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));

    // Random feasible start: greedy construction over a shuffled variable
    // order, accepting any feasibility-preserving item.
    detail::SelectionState state(inst);
    std::vector<int> order(static_cast<std::size_t>(inst.n()));
    for (int i = 0; i < inst.n(); ++i) order[static_cast<std::size_t>(i)] = i;
    rng.shuffle(order);
    bool progress = true;
    while (state.size() < inst.cardinality_hi() && progress) {
      progress = false;
      for (int v : order) {
        if (state.size() >= inst.cardinality_hi()) break;
        if (state.can_add(v)) {
          state.add(v);
          progress = true;
        }
      }
    }
    if (state.size() < inst.cardinality_lo()) continue;  // no feasible start

    const double initial = state.current_score();
    int iterations = 0;
    while (iterations < kMaxIterations) {
      if (seconds_since(start) > budget_sec) break;
      int move_var = -1;
      double move_gain = kMinGain;
      for (int i = 0; i < inst.n(); ++i) {
        const bool in = state.selected(i);
        if (in ? !state.can_remove(i) : !state.can_add(i)) continue;
        const double gain = in ? state.gain_remove(i) : state.gain_add(i);
        if (gain > move_gain) {
          move_gain = gain;
          move_var = i;
        }
      }
      if (move_var < 0) break;
      if (state.selected(move_var)) {
        state.remove(move_var);
      } else {
        state.add(move_var);
      }
      ++iterations;
    }

    const Selection sel = state.to_selection();
    const double restart_score = score(inst, sel);
    min_improvement = std::min(min_improvement, restart_score - initial);
    if (restart_score > best_score) {
      best_score = restart_score;
      best_sel = sel;
      result.trace.push_back({seconds_since(start), restart_score});
    }
  }

  result.meta["restarts"] = attempted;
  if (min_improvement != std::numeric_limits<double>::infinity()) {
    result.meta["min_restart_improvement"] = min_improvement;
  }
  if (best_sel) finalize(inst, *best_sel, result);
  result.elapsed_sec = seconds_since(start);
  return result;
}

// ---------------------------------------------------------------------------
// Branch and bound
// ---------------------------------------------------------------------------

SolveResult branch_and_bound(const Instance& inst, double budget_sec,
                             std::uint64_t /*seed*/) {
  if (budget_sec <= 0) throw ContractViolation("branch_and_bound: budget must be > 0");
  const auto start = Clock::now();
  const int n = inst.n();
  constexpr double kPruneEps = 1e-12;

  // High-connectivity variables first, refined so prerequisites are decided
  // before their dependents: otherwise an included dependent can strand the
  // search in subtrees with no feasible completion. Cyclic precedence
  // leftovers are appended by degree and handled by the feasibility checks.
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(n));
  {
    std::vector<int> waiting(static_cast<std::size_t>(n));
    std::vector<char> placed(static_cast<std::size_t>(n), 0);
    for (int v = 0; v < n; ++v) {
      waiting[static_cast<std::size_t>(v)] =
          static_cast<int>(inst.prerequisites_of(v).size());
    }
    while (static_cast<int>(order.size()) < n) {
      int pick = -1;
      for (int v = 0; v < n; ++v) {
        if (placed[static_cast<std::size_t>(v)] ||
            waiting[static_cast<std::size_t>(v)] > 0) {
          continue;
        }
        if (pick < 0 || inst.degree(v) > inst.degree(pick)) pick = v;
      }
      if (pick < 0) {  // precedence cycle: order the rest by degree
        std::vector<int> rest;
        for (int v = 0; v < n; ++v) {
          if (!placed[static_cast<std::size_t>(v)]) rest.push_back(v);
        }
        std::sort(rest.begin(), rest.end(), [&](int a, int b) {
          const int da = inst.degree(a);
          const int db = inst.degree(b);
          return da != db ? da > db : a < b;
        });
        order.insert(order.end(), rest.begin(), rest.end());
        break;
      }
      placed[static_cast<std::size_t>(pick)] = 1;
      order.push_back(pick);
      for (int dep : inst.dependents_of(pick)) {
        --waiting[static_cast<std::size_t>(dep)];
      }
    }
  }
  std::vector<int> pos_of(static_cast<std::size_t>(n));
  for (int p = 0; p < n; ++p) pos_of[static_cast<std::size_t>(order[static_cast<std::size_t>(p)])] = p;

  // Suffix sums of positive interactions whose endpoints are both still
  // undecided at position p; part of the optimistic bound.
  std::vector<double> undecided_pos_pairs(static_cast<std::size_t>(n) + 1, 0.0);
  for (int p = n - 1; p >= 0; --p) {
    double acc = undecided_pos_pairs[static_cast<std::size_t>(p) + 1];
    const int v = order[static_cast<std::size_t>(p)];
    for (const auto& [nb, w] : inst.neighbors(v)) {
      if (pos_of[static_cast<std::size_t>(nb)] > p && w > 0) acc += w;
    }
    undecided_pos_pairs[static_cast<std::size_t>(p)] = acc;
  }

  std::vector<char> mask(static_cast<std::size_t>(n), 0);
  std::vector<double> contrib(inst.weights());
  std::vector<int> group_load(static_cast<std::size_t>(inst.group_count()), 0);
  int card = 0;
  double inc_score = 0.0;

  auto include_feasible = [&](int v, int pos) {
    if (card + 1 > inst.cardinality_hi()) return false;
    for (int pre : inst.prerequisites_of(v)) {
      if (pos_of[static_cast<std::size_t>(pre)] < pos &&
          !mask[static_cast<std::size_t>(pre)])
        return false;
    }
    for (int m : inst.mutex_partners(v)) {
      if (mask[static_cast<std::size_t>(m)]) return false;
    }
    for (int g : inst.group_ids_of(v)) {
      if (group_load[static_cast<std::size_t>(g)] > 0) return false;
    }
    return true;
  };
  auto exclude_feasible = [&](int v) {
    for (int dep : inst.dependents_of(v)) {
      if (mask[static_cast<std::size_t>(dep)]) return false;  // dep needs v
    }
    return true;
  };
  auto do_include = [&](int v) {
    mask[static_cast<std::size_t>(v)] = 1;
    ++card;
    inc_score += contrib[static_cast<std::size_t>(v)];
    for (const auto& [nb, w] : inst.neighbors(v)) {
      contrib[static_cast<std::size_t>(nb)] += w;
    }
    for (int g : inst.group_ids_of(v)) ++group_load[static_cast<std::size_t>(g)];
  };
  auto undo_include = [&](int v) {
    for (const auto& [nb, w] : inst.neighbors(v)) {
      contrib[static_cast<std::size_t>(nb)] -= w;
    }
    inc_score -= contrib[static_cast<std::size_t>(v)];
    mask[static_cast<std::size_t>(v)] = 0;
    --card;
    for (int g : inst.group_ids_of(v)) --group_load[static_cast<std::size_t>(g)];
  };

  SolveResult result;
  double best_score = kNoSolutionScore;
  std::vector<char> best_mask;
  std::uint64_t nodes = 0;
  bool complete = true;

  struct Frame {
    int pos;
    int stage;  // 0 enter, 1 first child done, 2 second child done
    bool include_first;
    bool include_applied;
  };
  std::vector<Frame> stack;
  stack.push_back({0, 0, false, false});

  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.stage == 0) {
      ++nodes;
      if (seconds_since(start) > budget_sec) {
        complete = false;
        break;
      }
      if (f.pos == n) {
        if (card >= inst.cardinality_lo() && inc_score > best_score + kPruneEps) {
          const double exact = exact_score_of_mask(inst, mask);
          if (exact > best_score) {
            best_score = exact;
            best_mask = mask;
            result.trace.push_back({seconds_since(start), exact});
          }
        }
        stack.pop_back();
        continue;
      }
      if (card + (n - f.pos) < inst.cardinality_lo()) {  // lower bound dead
        stack.pop_back();
        continue;
      }
      double bound = inc_score;
      if (card < inst.cardinality_hi()) {
        for (int q = f.pos; q < n; ++q) {
          const double g = contrib[static_cast<std::size_t>(order[static_cast<std::size_t>(q)])];
          if (g > 0) bound += g;
        }
        bound += undecided_pos_pairs[static_cast<std::size_t>(f.pos)];
      }
      if (bound <= best_score + kPruneEps) {
        stack.pop_back();
        continue;
      }
      const int v = order[static_cast<std::size_t>(f.pos)];
      // Descend toward promising assignments first so the anytime incumbent
      // is usable early.
      f.include_first = contrib[static_cast<std::size_t>(v)] > 0;
      f.stage = 1;
      if (f.include_first) {
        if (include_feasible(v, f.pos)) {
          do_include(v);
          f.include_applied = true;
          stack.push_back({f.pos + 1, 0, false, false});
        }
      } else if (exclude_feasible(v)) {
        stack.push_back({f.pos + 1, 0, false, false});
      }
      continue;
    }
    if (f.stage == 1) {
      const int v = order[static_cast<std::size_t>(f.pos)];
      f.stage = 2;
      if (f.include_first) {
        if (f.include_applied) {
          undo_include(v);
          f.include_applied = false;
        }
        if (exclude_feasible(v)) {
          stack.push_back({f.pos + 1, 0, false, false});
        }
      } else if (include_feasible(v, f.pos)) {
        do_include(v);
        f.include_applied = true;
        stack.push_back({f.pos + 1, 0, false, false});
      }
      continue;
    }
    if (f.include_applied) undo_include(order[static_cast<std::size_t>(f.pos)]);
    stack.pop_back();
  }

  result.meta["nodes"] = static_cast<double>(nodes);
  result.meta["complete"] = complete ? 1.0 : 0.0;
  if (best_score != kNoSolutionScore) {
    finalize(inst, mask_to_selection(best_mask), result);
  }
  result.elapsed_sec = seconds_since(start);
  return result;
}

// ---------------------------------------------------------------------------
// Flip-state bookkeeping shared by annealing and exhaustive enumeration.
// ---------------------------------------------------------------------------

namespace detail {

FlipState::FlipState(const Instance& inst)
    : inst_(&inst),
      mask_(static_cast<std::size_t>(inst.n()), 0),
      contrib_(inst.weights()),
      group_count_(static_cast<std::size_t>(inst.group_count()), 0) {}

void FlipState::flip(int v) {
  const auto sv = static_cast<std::size_t>(v);
  const bool now = !mask_[sv];
  mask_[sv] = now;
  card_ += now ? 1 : -1;

  if (now) {
    score_ += contrib_[sv];
    for (const auto& [nb, w] : inst_->neighbors(v)) {
      contrib_[static_cast<std::size_t>(nb)] += w;
    }
  } else {
    for (const auto& [nb, w] : inst_->neighbors(v)) {
      contrib_[static_cast<std::size_t>(nb)] -= w;
    }
    score_ -= contrib_[sv];
  }

  const int delta = now ? 1 : -1;
  // v as prerequisite: pairs (v, dep) are violated iff dep in, v out.
  for (int dep : inst_->dependents_of(v)) {
    if (mask_[static_cast<std::size_t>(dep)]) prec_viol_ -= delta;
  }
  // v as dependent: pairs (pre, v) are violated iff v in, pre out.
  for (int pre : inst_->prerequisites_of(v)) {
    if (!mask_[static_cast<std::size_t>(pre)]) prec_viol_ += delta;
  }
  for (int m : inst_->mutex_partners(v)) {
    if (mask_[static_cast<std::size_t>(m)]) mutex_viol_ += delta;
  }
  for (int g : inst_->group_ids_of(v)) {
    int& cnt = group_count_[static_cast<std::size_t>(g)];
    const int before = cnt;
    cnt += delta;
    group_over_ += (cnt > 1) - (before > 1);
  }
}

bool FlipState::feasible() const {
  return prec_viol_ == 0 && mutex_viol_ == 0 && group_over_ == 0 &&
         card_ >= inst_->cardinality_lo() && card_ <= inst_->cardinality_hi();
}

void FlipState::assign(const std::vector<int>& vars) {
  for (int v = 0; v < inst_->n(); ++v) {
    if (mask_[static_cast<std::size_t>(v)]) flip(v);
  }
  for (int v : vars) {
    if (!mask_[static_cast<std::size_t>(v)]) flip(v);
  }
}

bool guarded_bitflip_proposal(FlipState& neighbor, Rng& rng, int retry_cap) {
  const int n = neighbor.n();
  neighbor.flip(static_cast<int>(rng.uniform_int(0, n - 1)));
  int attempts = 1;
  // The retry loop keeps mutating the same proposal until it is feasible, so
  // the guarded walk can drift several flips away from the current state.
  while (!neighbor.feasible() && attempts < retry_cap) {
    neighbor.flip(static_cast<int>(rng.uniform_int(0, n - 1)));
    ++attempts;
  }
  return neighbor.feasible();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Simulated annealing
// ---------------------------------------------------------------------------

namespace {

bool quick_feasible(const Instance& inst, const std::vector<int>& vars) {
  const auto report = check_feasibility(inst, Selection::of(vars));
  return report.n_vio() == 0;
}

// Rejection-sampled random feasible start: draw a uniform size in [L, U],
// draw that many distinct variables, retry until feasible.
std::optional<std::vector<int>> random_feasible_start(const Instance& inst,
                                                      Rng& rng, int attempt_cap) {
  for (int attempt = 0; attempt < attempt_cap; ++attempt) {
    const int k = static_cast<int>(
        rng.uniform_int(inst.cardinality_lo(), inst.cardinality_hi()));
    std::vector<int> vars = rng.sample_indices(inst.n(), k);
    if (quick_feasible(inst, vars)) return vars;
  }
  return std::nullopt;
}

}  // namespace

SolveResult simulated_annealing(const Instance& inst, double budget_sec,
                                std::uint64_t seed, const SAConfig& cfg) {
  if (cfg.t0 <= 0) throw ContractViolation("simulated_annealing: t0 must be > 0");
  if (cfg.cooling <= 0 || cfg.cooling >= 1) {
    throw ContractViolation("simulated_annealing: cooling must be in (0, 1)");
  }
  if (cfg.fixed_iterations && *cfg.fixed_iterations < 0) {
    throw ContractViolation("simulated_annealing: negative iteration count");
  }

  const auto start = Clock::now();
  Rng rng(seed);
  SolveResult result;

  const auto init = random_feasible_start(inst, rng, cfg.init_attempt_cap);
  if (!init) {
    result.meta["steps"] = 0;
    result.elapsed_sec = seconds_since(start);
    return result;  // sentinel: no feasible starting point found
  }

  detail::FlipState current(inst);
  current.assign(*init);
  double current_score = current.score();
  std::vector<char> best_mask(current.mask().begin(), current.mask().end());
  double best_score = current_score;
  result.trace.push_back({seconds_since(start), best_score});

  double temperature = cfg.t0;
  long steps = 0;
  long skipped = 0;

  auto propose_add_remove = [&](detail::FlipState& neighbor) {
    // Coin-flip between growing and shrinking, respecting the bounds.
    if (rng.uniform01() < 0.5 && neighbor.card() < inst.cardinality_hi()) {
      const int unselected = inst.n() - neighbor.card();
      if (unselected == 0) return false;
      int pick = static_cast<int>(rng.uniform_int(0, unselected - 1));
      for (int v = 0; v < inst.n(); ++v) {
        if (!neighbor.selected(v) && pick-- == 0) {
          neighbor.flip(v);
          return true;
        }
      }
    } else if (neighbor.card() > inst.cardinality_lo()) {
      int pick = static_cast<int>(rng.uniform_int(0, neighbor.card() - 1));
      for (int v = 0; v < inst.n(); ++v) {
        if (neighbor.selected(v) && pick-- == 0) {
          neighbor.flip(v);
          return true;
        }
      }
    }
    return false;
  };

  while (true) {
    if (cfg.fixed_iterations) {
      if (steps >= *cfg.fixed_iterations) break;
    } else if (temperature <= cfg.t_min) {
      break;
    }
    if (budget_sec > 0 && seconds_since(start) > budget_sec) break;
    ++steps;

    detail::FlipState neighbor = current;
    bool have_feasible = false;
    if (cfg.move == SaMove::kBitFlip) {
      if (cfg.guard == SaGuard::kRetryLoop) {
        have_feasible = detail::guarded_bitflip_proposal(neighbor, rng, cfg.retry_cap);
      } else {
        neighbor.flip(static_cast<int>(rng.uniform_int(0, inst.n() - 1)));
        have_feasible = neighbor.feasible();
      }
    } else {
      if (cfg.guard == SaGuard::kRetryLoop) {
        for (int attempt = 0; attempt < cfg.retry_cap; ++attempt) {
          neighbor = current;
          if (propose_add_remove(neighbor) && neighbor.feasible()) {
            have_feasible = true;
            break;
          }
        }
      } else {
        have_feasible = propose_add_remove(neighbor) && neighbor.feasible();
      }
    }

    if (!have_feasible) {
      // Infeasible proposals are never evaluated. Under the retry guard this
      // only happens when the cap runs out; under reject-and-continue it is
      // the normal path for unlucky flips. Either way the schedule cools.
      ++skipped;
      temperature *= cfg.cooling;
      continue;
    }

    const double neighbor_score = neighbor.score();
    const double reference = cfg.acceptance == SaAcceptance::kCurrentState
                                 ? current_score
                                 : best_score;
    const double delta = neighbor_score - reference;
    const bool accept =
        delta > 0 || rng.uniform01() < std::exp(delta / temperature);
    if (accept) {
      current = std::move(neighbor);
      current_score = neighbor_score;
      if (current_score > best_score) {
        best_score = current_score;
        best_mask.assign(current.mask().begin(), current.mask().end());
        result.trace.push_back({seconds_since(start), best_score});
      }
    }
    temperature *= cfg.cooling;
  }

  result.meta["steps"] = static_cast<double>(steps);
  result.meta["skipped_steps"] = static_cast<double>(skipped);
  finalize(inst, mask_to_selection(best_mask), result);
  result.elapsed_sec = seconds_since(start);
  return result;
}

// ---------------------------------------------------------------------------
// Exhaustive enumeration (test oracle)
// ---------------------------------------------------------------------------

namespace {

// True when mask a, read as a sorted index list, precedes mask b.
bool lex_less(const std::vector<char>& a, const std::vector<char>& b) {
  const int n = static_cast<int>(a.size());
  for (int i = 0; i < n; ++i) {
    if (a[static_cast<std::size_t>(i)] == b[static_cast<std::size_t>(i)]) continue;
    if (a[static_cast<std::size_t>(i)]) {
      for (int j = i + 1; j < n; ++j) {
        if (b[static_cast<std::size_t>(j)]) return true;  // b continues later
      }
      return false;  // b is a strict prefix of a
    }
    for (int j = i + 1; j < n; ++j) {
      if (a[static_cast<std::size_t>(j)]) return false;
    }
    return true;  // a is a strict prefix of b
  }
  return false;
}

}  // namespace

SolveResult exhaustive(const Instance& inst) {
  const int n = inst.n();
  if (n > 24) {
    throw ContractViolation("exhaustive: n = " + std::to_string(n) +
                            " exceeds the n <= 24 enumeration guard");
  }
  const auto start = Clock::now();
  SolveResult result;

  detail::FlipState state(inst);
  double best_score = kNoSolutionScore;
  std::vector<char> best_mask;

  auto consider = [&]() {
    if (!state.feasible()) return;
    // Incremental scores drift; recompute exactly near the incumbent so both
    // the winner and its lexicographic tie-break are exact.
    if (state.score() <= best_score - 1e-7) return;
    const std::vector<char> mask(state.mask().begin(), state.mask().end());
    const double exact = exact_score_of_mask(inst, mask);
    if (exact > best_score ||
        (exact == best_score && lex_less(mask, best_mask))) {
      best_score = exact;
      best_mask = mask;
    }
  };

  consider();  // empty selection
  const std::uint64_t limit = 1ull << n;
  for (std::uint64_t g = 1; g < limit; ++g) {
    state.flip(std::countr_zero(g));  // Gray-code step: one variable flips
    consider();
  }

  if (best_score != kNoSolutionScore) {
    finalize(inst, mask_to_selection(best_mask), result);
  }
  result.elapsed_sec = seconds_since(start);
  return result;
}

}  // namespace sds::solvers
