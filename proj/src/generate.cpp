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

#include "sds/generate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "sds/rng.hpp"

namespace sds::gen {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string random_uuid(Rng& rng) {
  char buf[33];
  std::snprintf(buf, sizeof(buf), "%016llx%016llx",
                static_cast<unsigned long long>(rng.next_u64()),
                static_cast<unsigned long long>(rng.next_u64()));
  return buf;
}

int rounded_count(double rate, int n) {
  return static_cast<int>(std::lround(rate * n));
}

// Erdos-Renyi interaction graph over all pairs i < j. `skip` suppresses pairs
// that carry structural interactions placed by the family builder.
void add_er_interactions(
    Rng& rng, InstanceData& data, int lo_var, int hi_var, double density,
    double w_lo, double w_hi,
    const std::function<bool(int, int)>& skip = nullptr) {
  for (int i = lo_var; i < hi_var; ++i) {
    for (int j = i + 1; j < hi_var; ++j) {
      if (skip && skip(i, j)) continue;
      if (rng.bernoulli(density)) {
        data.interactions.push_back({{i, j}, rng.uniform_real(w_lo, w_hi)});
      }
    }
  }
}

// Random mutex pairs, precedence pairs and disjoint groups. `protect` marks
// pairs whose structure must not be disturbed by a mutex.
void sprinkle_constraints(Rng& rng, InstanceData& data, const FamilyParams& p,
                          const std::function<bool(int, int)>& protect = nullptr) {
  const int n = data.n_variables;
  std::set<std::pair<int, int>> mutex_seen(data.mutex.begin(), data.mutex.end());
  const int mutex_count = rounded_count(p.mutex_rate, n);
  for (int k = 0; k < mutex_count; ++k) {
    for (int attempt = 0; attempt < 20; ++attempt) {
      int a = static_cast<int>(rng.uniform_int(0, n - 1));
      int b = static_cast<int>(rng.uniform_int(0, n - 1));
      if (a == b) continue;
      if (a > b) std::swap(a, b);
      if (protect && protect(a, b)) continue;
      if (!mutex_seen.insert({a, b}).second) continue;
      data.mutex.push_back({a, b});
      break;
    }
  }

  std::set<std::pair<int, int>> prec_seen(data.precedence.begin(),
                                          data.precedence.end());
  const int prec_count = rounded_count(p.precedence_rate, n);
  for (int k = 0; k < prec_count; ++k) {
    for (int attempt = 0; attempt < 20; ++attempt) {
      const int pre = static_cast<int>(rng.uniform_int(0, n - 1));
      const int dep = static_cast<int>(rng.uniform_int(0, n - 1));
      if (pre == dep) continue;
      if (!prec_seen.insert({pre, dep}).second) continue;
      data.precedence.push_back({pre, dep});
      break;
    }
  }

  const int group_count = rounded_count(p.group_rate, n);
  if (group_count > 0) {
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    rng.shuffle(order);
    std::size_t cursor = 0;
    for (int g = 0; g < group_count; ++g) {
      const int size =
          static_cast<int>(rng.uniform_int(p.group_size_min, p.group_size_max));
      if (cursor + static_cast<std::size_t>(size) > order.size()) break;
      std::vector<int> members(order.begin() + static_cast<long>(cursor),
                               order.begin() + static_cast<long>(cursor) + size);
      std::sort(members.begin(), members.end());
      cursor += static_cast<std::size_t>(size);
      data.groups["g" + std::to_string(g)] = std::move(members);
    }
  }
}

int upper_bound_for(const FamilyParams& p, int n) {
  if (p.upper_frac <= 0.0) return n;
  return std::min(n, std::max(2, static_cast<int>(std::lround(p.upper_frac * n))));
}

// ---------------------------------------------------------------------------
// Family builders. Each fills everything except uuid and cardinality_lo; the
// caller finishes with the witness construction.
// ---------------------------------------------------------------------------

void build_random_background(Rng& rng, InstanceData& data, const FamilyParams& p) {
  const int n = data.n_variables;
  data.weights.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    data.weights.push_back(rng.uniform_real(p.weight_lo, p.weight_hi));
  }
  add_er_interactions(rng, data, 0, n, p.density, p.interaction_lo,
                      p.interaction_hi);
  data.cardinality_hi = upper_bound_for(p, n);
  sprinkle_constraints(rng, data, p);
}

void build_structural_trap(Rng& rng, InstanceData& data, const FamilyParams& p) {
  const int n = data.n_variables;
  const int chain_len = static_cast<int>(
      rng.uniform_int(p.chain_min, std::min(p.chain_max, n - 1)));
  const std::vector<int> chain = rng.sample_indices(n, chain_len);

  data.weights.assign(static_cast<std::size_t>(n), 0.0);
  std::vector<char> in_chain(static_cast<std::size_t>(n), 0);
  for (int v : chain) in_chain[static_cast<std::size_t>(v)] = 1;
  for (int i = 0; i < n; ++i) {
    data.weights[static_cast<std::size_t>(i)] =
        rng.uniform_real(p.weight_lo, p.weight_hi);
  }
  // The chain head is bait; deeper members look tempting on their own but
  // each chain edge carries the trap interaction.
  data.weights[static_cast<std::size_t>(chain[0])] = p.bait_weight;
  for (int k = 1; k < chain_len; ++k) {
    data.weights[static_cast<std::size_t>(chain[k])] =
        rng.uniform_real(p.chain_member_weight_lo, p.chain_member_weight_hi);
  }
  std::set<std::pair<int, int>> chain_edges;
  for (int k = 0; k + 1 < chain_len; ++k) {
    const int a = std::min(chain[k], chain[k + 1]);
    const int b = std::max(chain[k], chain[k + 1]);
    chain_edges.insert({a, b});
    data.interactions.push_back({{a, b}, p.trap_interaction});
    data.precedence.push_back({chain[k], chain[k + 1]});
  }
  add_er_interactions(rng, data, 0, n, p.density, p.interaction_lo,
                      p.interaction_hi, [&](int a, int b) {
                        return chain_edges.count({a, b}) > 0;
                      });
  data.cardinality_hi = std::max(chain_len + 2, upper_bound_for(p, n));
  data.cardinality_hi = std::min(data.cardinality_hi, n);
  sprinkle_constraints(rng, data, p, [&](int a, int b) {
    return in_chain[static_cast<std::size_t>(a)] &&
           in_chain[static_cast<std::size_t>(b)];
  });
}

void build_tree_structured(Rng& rng, InstanceData& data, const FamilyParams& p) {
  const int n = data.n_variables;
  for (int i = 0; i < n; ++i) {
    data.weights.push_back(rng.uniform_real(-p.weight_scale, p.weight_scale));
  }
  // Random recursive tree: each vertex attaches to a uniform earlier one.
  for (int v = 1; v < n; ++v) {
    const int parent = static_cast<int>(rng.uniform_int(0, v - 1));
    data.interactions.push_back(
        {{parent, v}, rng.uniform_real(-p.pair_scale, p.pair_scale)});
  }
  data.cardinality_hi = upper_bound_for(p, n);
}

void build_greedy_easy(Rng& rng, InstanceData& data, const FamilyParams& p) {
  const int n = data.n_variables;
  // Positive weights and sparse positive synergies, no side constraints:
  // selecting everything is optimal and marginal-gain greedy finds it.
  for (int i = 0; i < n; ++i) {
    data.weights.push_back(rng.uniform_real(p.weight_lo, p.weight_hi));
  }
  add_er_interactions(rng, data, 0, n, p.density, p.interaction_lo,
                      p.interaction_hi);
  data.cardinality_hi = data.n_variables;
}

void build_decomposable(Rng& rng, InstanceData& data, const FamilyParams& p) {
  const int n = data.n_variables;
  const int blocks = std::max(1, p.blocks);
  data.weights.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    data.weights.push_back(rng.uniform_real(p.weight_lo, p.weight_hi));
  }
  int group_id = 0;
  for (int b = 0; b < blocks; ++b) {
    const int lo = b * n / blocks;
    const int hi = (b + 1) * n / blocks;
    add_er_interactions(rng, data, lo, hi, p.density, p.interaction_lo,
                        p.interaction_hi);
    // Light constraints, kept inside the block so clusters stay independent.
    const int block_n = hi - lo;
    const int mutex_count = rounded_count(p.mutex_rate, block_n);
    std::set<std::pair<int, int>> seen;
    for (int k = 0; k < mutex_count; ++k) {
      int a = lo + static_cast<int>(rng.uniform_int(0, block_n - 1));
      int c = lo + static_cast<int>(rng.uniform_int(0, block_n - 1));
      if (a == c) continue;
      if (a > c) std::swap(a, c);
      if (seen.insert({a, c}).second) data.mutex.push_back({a, c});
    }
    const int prec_count = rounded_count(p.precedence_rate, block_n);
    for (int k = 0; k < prec_count; ++k) {
      const int pre = lo + static_cast<int>(rng.uniform_int(0, block_n - 1));
      const int dep = lo + static_cast<int>(rng.uniform_int(0, block_n - 1));
      if (pre != dep) data.precedence.push_back({pre, dep});
    }
    if (block_n >= p.group_size_min + 1 && rng.bernoulli(0.5)) {
      const int size = static_cast<int>(
          rng.uniform_int(p.group_size_min, std::min(p.group_size_max, block_n)));
      std::vector<int> members = rng.sample_indices(block_n, size);
      for (int& m : members) m += lo;
      std::sort(members.begin(), members.end());
      data.groups["g" + std::to_string(group_id++)] = std::move(members);
    }
  }
  std::set<std::pair<int, int>> prec_dedupe(data.precedence.begin(),
                                            data.precedence.end());
  data.precedence.assign(prec_dedupe.begin(), prec_dedupe.end());
  data.cardinality_hi = upper_bound_for(p, n);
}

void build_local_optima(Rng& rng, InstanceData& data, const FamilyParams& p) {
  const int n = data.n_variables;
  for (int i = 0; i < n; ++i) {
    data.weights.push_back(rng.uniform_real(p.weight_lo, p.weight_hi));
  }
  data.cardinality_hi = std::max(4, upper_bound_for(p, n));

  const int clique_size = static_cast<int>(
      rng.uniform_int(3, std::min(6, data.cardinality_hi)));
  const int cliques = std::max(2, p.cliques);
  const std::vector<int> members = rng.sample_indices(n, cliques * clique_size);
  std::vector<std::vector<int>> clique(static_cast<std::size_t>(cliques));
  for (int c = 0; c < cliques; ++c) {
    for (int k = 0; k < clique_size; ++k) {
      clique[static_cast<std::size_t>(c)].push_back(
          members[static_cast<std::size_t>(c * clique_size + k)]);
    }
  }
  std::set<std::pair<int, int>> structural;
  for (int c = 0; c < cliques; ++c) {
    const auto& cl = clique[static_cast<std::size_t>(c)];
    for (std::size_t a = 0; a < cl.size(); ++a) {
      // The first clique is strictly richer, making it the unique basin the
      // others merely imitate.
      data.weights[static_cast<std::size_t>(cl[a])] =
          rng.uniform_real(0.5, 1.5) + (c == 0 ? 1.0 : 0.0);
      for (std::size_t b = a + 1; b < cl.size(); ++b) {
        const int lo_v = std::min(cl[a], cl[b]);
        const int hi_v = std::max(cl[a], cl[b]);
        structural.insert({lo_v, hi_v});
        data.interactions.push_back(
            {{lo_v, hi_v},
             rng.uniform_real(p.clique_interaction_lo, p.clique_interaction_hi)});
      }
    }
  }
  // Cliques are pairwise exclusive: every cross pair is a mutex.
  for (int c1 = 0; c1 < cliques; ++c1) {
    for (int c2 = c1 + 1; c2 < cliques; ++c2) {
      for (int a : clique[static_cast<std::size_t>(c1)]) {
        for (int b : clique[static_cast<std::size_t>(c2)]) {
          data.mutex.push_back({std::min(a, b), std::max(a, b)});
          structural.insert({std::min(a, b), std::max(a, b)});
        }
      }
    }
  }
  add_er_interactions(rng, data, 0, n, p.density, p.interaction_lo,
                      p.interaction_hi, [&](int a, int b) {
                        return structural.count({a, b}) > 0;
                      });
}

void build_planted_qubo(Rng& rng, InstanceData& data, const FamilyParams& p) {
  const int n = data.n_variables;
  for (int i = 0; i < n; ++i) {
    data.weights.push_back(rng.uniform_real(p.weight_lo, p.weight_hi));
  }
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  rng.shuffle(order);
  std::vector<char> planted(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n / 2; ++i) {
    planted[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = 1;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (!rng.bernoulli(p.density)) continue;
      double base = 0.0;
      const bool a = planted[static_cast<std::size_t>(i)];
      const bool b = planted[static_cast<std::size_t>(j)];
      if (a && b) base = p.signal;          // synergy inside the planted set
      else if (a != b) base = -p.signal;    // crossing pairs are penalized
      data.interactions.push_back(
          {{i, j}, base + rng.uniform_real(-p.noise, p.noise)});
    }
  }
  data.cardinality_hi = upper_bound_for(p, n);
}

void build_maxcut_qubo(Rng& rng, InstanceData& data, const FamilyParams& p) {
  const int n = data.n_variables;
  // Standard Max-Cut as a selection objective: w_i = deg(i), W_ij = -2 per
  // edge, so score(S) equals the cut value of (S, V\S).
  std::vector<int> degree(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (rng.bernoulli(p.edge_prob)) {
        data.interactions.push_back({{i, j}, -2.0});
        ++degree[static_cast<std::size_t>(i)];
        ++degree[static_cast<std::size_t>(j)];
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    data.weights.push_back(static_cast<double>(degree[static_cast<std::size_t>(i)]));
  }
  data.cardinality_hi = n;
}

// ---------------------------------------------------------------------------
// Witness construction and assembly.
// ---------------------------------------------------------------------------

struct ConstraintView {
  std::vector<std::vector<int>> prereqs;
  std::vector<std::vector<int>> mutex_partners;
  std::vector<std::vector<int>> groups_of;  // group ids per variable
  int group_count = 0;

  explicit ConstraintView(const InstanceData& d) {
    const auto n = static_cast<std::size_t>(d.n_variables);
    prereqs.resize(n);
    mutex_partners.resize(n);
    groups_of.resize(n);
    for (const auto& [pre, dep] : d.precedence) {
      prereqs[static_cast<std::size_t>(dep)].push_back(pre);
    }
    for (const auto& [a, b] : d.mutex) {
      mutex_partners[static_cast<std::size_t>(a)].push_back(b);
      mutex_partners[static_cast<std::size_t>(b)].push_back(a);
    }
    for (const auto& [id, members] : d.groups) {
      for (int v : members) groups_of[static_cast<std::size_t>(v)].push_back(group_count);
      ++group_count;
    }
  }
};

// Builds a feasible witness of up to `target` variables and returns it. The
// witness respects every constraint (upper cardinality included); precedence
// forces multi-pass growth so prerequisites can land before dependents.
std::vector<int> build_witness(Rng& rng, const InstanceData& data, int target) {
  const int n = data.n_variables;
  const ConstraintView view(data);
  std::vector<char> mask(static_cast<std::size_t>(n), 0);
  std::vector<char> group_used(static_cast<std::size_t>(view.group_count), 0);
  std::vector<int> chosen;
  if (target <= 0) return chosen;

  auto can_add = [&](int v) {
    if (mask[static_cast<std::size_t>(v)]) return false;
    if (static_cast<int>(chosen.size()) + 1 > data.cardinality_hi) return false;
    for (int pre : view.prereqs[static_cast<std::size_t>(v)]) {
      if (!mask[static_cast<std::size_t>(pre)]) return false;
    }
    for (int m : view.mutex_partners[static_cast<std::size_t>(v)]) {
      if (mask[static_cast<std::size_t>(m)]) return false;
    }
    for (int g : view.groups_of[static_cast<std::size_t>(v)]) {
      if (group_used[static_cast<std::size_t>(g)]) return false;
    }
    return true;
  };

  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  rng.shuffle(order);

  bool progress = true;
  while (static_cast<int>(chosen.size()) < target && progress) {
    progress = false;
    for (int v : order) {
      if (static_cast<int>(chosen.size()) >= target) break;
      if (!can_add(v)) continue;
      mask[static_cast<std::size_t>(v)] = 1;
      for (int g : view.groups_of[static_cast<std::size_t>(v)]) {
        group_used[static_cast<std::size_t>(g)] = 1;
      }
      chosen.push_back(v);
      progress = true;
    }
  }
  return chosen;
}

Instance finish_instance(Rng& rng, InstanceData data, const FamilyParams& p) {
  int target = 0;
  if (p.lower_fixed) {
    target = *p.lower_fixed;
  } else if (p.lower_target > 0) {
    target = static_cast<int>(rng.uniform_int(0, p.lower_target));
  }
  const std::vector<int> witness = build_witness(rng, data, target);
  if (p.lower_fixed && static_cast<int>(witness.size()) < *p.lower_fixed) {
    throw GenerationError(std::string("family ") + family_name(data.problem_type) +
                          ": no feasible selection of size " +
                          std::to_string(*p.lower_fixed) + " exists");
  }
  data.cardinality_lo = static_cast<int>(witness.size());
  data.uuid = random_uuid(rng);

  Instance inst(std::move(data));
  const auto report = check_feasibility(inst, Selection::of(witness));
  if (report.n_vio() != 0) {
    throw GenerationError(std::string("family ") + family_name(inst.problem_type()) +
                          ": generated witness is infeasible");
  }
  return inst;
}

Instance generate_one(Family family, const FamilyParams& p, std::uint64_t seed) {
  Rng rng(seed);
  InstanceData data;
  data.problem_type = family;
  data.n_variables = static_cast<int>(rng.uniform_int(p.n_min, p.n_max));
  switch (family) {
    case Family::kDenseDeceptive:
    case Family::kBnbShowcase:
    case Family::kRandomSds:
      build_random_background(rng, data, p);
      break;
    case Family::kStructuralTrap:
      build_structural_trap(rng, data, p);
      break;
    case Family::kTreeStructured:
      build_tree_structured(rng, data, p);
      break;
    case Family::kGreedyEasy:
      build_greedy_easy(rng, data, p);
      break;
    case Family::kDecomposable:
      build_decomposable(rng, data, p);
      break;
    case Family::kLocalOptima:
      build_local_optima(rng, data, p);
      break;
    case Family::kPlantedQubo:
      build_planted_qubo(rng, data, p);
      break;
    case Family::kMaxCutQubo:
      build_maxcut_qubo(rng, data, p);
      break;
  }
  return finish_instance(rng, std::move(data), p);
}

}  // namespace

FamilyParams default_params(Family family) {
  FamilyParams p;
  switch (family) {
    case Family::kDenseDeceptive:
      break;  // the baseline defaults are this family's parameters
    case Family::kStructuralTrap:
      p.density = 0.15;
      p.interaction_lo = -5.0;
      p.interaction_hi = 5.0;
      p.mutex_rate = 0.05;
      p.precedence_rate = 0.0;
      p.group_rate = 0.0;
      break;
    case Family::kBnbShowcase:
      p.density = 0.4;
      p.weight_lo = -1.0;
      p.weight_hi = 1.0;
      p.interaction_lo = -25.0;
      p.interaction_hi = 25.0;
      p.mutex_rate = 0.05;
      p.precedence_rate = 0.05;
      p.group_rate = 0.02;
      break;
    case Family::kRandomSds:
      p.n_min = 50;
      p.n_max = 100;
      p.density = 0.3;
      p.weight_lo = -5.0;
      p.weight_hi = 5.0;
      p.interaction_lo = -10.0;
      p.interaction_hi = 10.0;
      p.mutex_rate = 0.08;
      p.precedence_rate = 0.08;
      p.group_rate = 0.04;
      p.upper_frac = 0.35;
      p.lower_target = 3;
      break;
    case Family::kTreeStructured:
      p.density = 0.0;
      p.mutex_rate = 0.0;
      p.precedence_rate = 0.0;
      p.group_rate = 0.0;
      p.upper_frac = 0.0;  // U = n
      break;
    case Family::kGreedyEasy:
      p.density = 0.1;
      p.weight_lo = 0.5;
      p.weight_hi = 10.0;
      p.interaction_lo = 0.5;
      p.interaction_hi = 5.0;
      p.mutex_rate = 0.0;
      p.precedence_rate = 0.0;
      p.group_rate = 0.0;
      p.upper_frac = 0.0;
      break;
    case Family::kDecomposable:
      p.mutex_rate = 0.08;
      p.precedence_rate = 0.08;
      break;
    case Family::kLocalOptima:
      p.density = 0.1;
      p.weight_lo = -1.0;
      p.weight_hi = 1.0;
      p.interaction_lo = -3.0;
      p.interaction_hi = 3.0;
      p.mutex_rate = 0.0;
      p.precedence_rate = 0.0;
      p.group_rate = 0.0;
      p.upper_frac = 0.3;
      break;
    case Family::kPlantedQubo:
      p.weight_lo = -1.0;
      p.weight_hi = 1.0;
      p.mutex_rate = 0.0;
      p.precedence_rate = 0.0;
      p.group_rate = 0.0;
      p.upper_frac = 0.0;
      break;
    case Family::kMaxCutQubo:
      p.mutex_rate = 0.0;
      p.precedence_rate = 0.0;
      p.group_rate = 0.0;
      p.upper_frac = 0.0;
      break;
  }
  return p;
}

std::vector<GenSpec> default_mixture(std::uint64_t seed) {
  std::vector<GenSpec> specs;
  specs.push_back(GenSpec::of(Family::kDenseDeceptive, 0.20, seed));
  specs.push_back(GenSpec::of(Family::kStructuralTrap, 0.15, seed));
  specs.push_back(GenSpec::of(Family::kBnbShowcase, 0.15, seed));
  specs.push_back(GenSpec::of(Family::kRandomSds, 0.05, seed));
  specs.push_back(GenSpec::of(Family::kTreeStructured, 0.05, seed));
  specs.push_back(GenSpec::of(Family::kGreedyEasy, 0.05, seed));
  specs.push_back(GenSpec::of(Family::kDecomposable, 0.10, seed));
  specs.push_back(GenSpec::of(Family::kLocalOptima, 0.10, seed));
  specs.push_back(GenSpec::of(Family::kPlantedQubo, 0.10, seed));
  specs.push_back(GenSpec::of(Family::kMaxCutQubo, 0.05, seed));
  return specs;
}

std::vector<Instance> generate(const GenSpec& spec, int count) {
  if (count < 0) throw ContractViolation("generate: count must be >= 0");
  std::vector<Instance> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    out.push_back(generate_one(spec.family, spec.params,
                               derive_seed(spec.seed, static_cast<std::uint64_t>(i))));
  }
  return out;
}

std::vector<Instance> generate_mixture(const std::vector<GenSpec>& specs,
                                       int total, std::uint64_t seed) {
  if (specs.empty()) throw ContractViolation("generate_mixture: empty spec list");
  double weight_sum = 0.0;
  for (const auto& s : specs) weight_sum += s.weight;
  if (std::abs(weight_sum - 1.0) > 1e-9) {
    throw ContractViolation("generate_mixture: weights must sum to 1");
  }
  std::vector<Instance> out;
  out.reserve(static_cast<std::size_t>(total));
  for (int i = 0; i < total; ++i) {
    const std::uint64_t sub_seed = derive_seed(seed, static_cast<std::uint64_t>(i));
    // First draw of the per-item stream picks the family; the same stream
    // then drives the instance, so slot i is independent of every other slot.
    Rng pick(splitmix64(sub_seed));
    const double u = pick.uniform01();
    double acc = 0.0;
    std::size_t chosen = specs.size() - 1;
    for (std::size_t s = 0; s < specs.size(); ++s) {
      acc += specs[s].weight;
      if (u < acc) {
        chosen = s;
        break;
      }
    }
    out.push_back(generate_one(specs[chosen].family, specs[chosen].params, sub_seed));
  }
  return out;
}

std::string to_json_line(const Instance& inst) {
  ordered_json req;
  req["n_variables"] = inst.n();
  req["cardinality_bounds"] = {inst.cardinality_lo(), inst.cardinality_hi()};
  req["precedence"] = json::array();
  for (const auto& [pre, dep] : inst.precedence()) {
    req["precedence"].push_back({pre, dep});
  }
  req["mutex"] = json::array();
  for (const auto& [a, b] : inst.mutex()) {
    req["mutex"].push_back({a, b});
  }
  req["groups"] = json::object();
  for (const auto& [id, members] : inst.groups()) {
    req["groups"][id] = members;
  }

  ordered_json catalog;
  catalog["variables"] = json::array();
  for (double w : inst.weights()) {
    catalog["variables"].push_back({{"weight", w}});
  }
  catalog["interactions"] = json::object();
  for (const auto& [pair, w] : inst.interactions()) {
    catalog["interactions"]
           [std::to_string(pair.first) + "," + std::to_string(pair.second)] = w;
  }

  ordered_json line;
  line["uuid"] = inst.uuid();
  line["problem_type"] = family_name(inst.problem_type());
  line["requirements"] = std::move(req);
  line["catalog"] = std::move(catalog);
  return line.dump();
}

std::string candidate_payload(const Instance& inst) {
  const auto full = ordered_json::parse(to_json_line(inst));
  ordered_json payload;
  payload["requirements"] = full["requirements"];
  payload["catalog"] = full["catalog"];
  return payload.dump();
}

namespace {

// Parses one JSON document while rejecting duplicate object keys anywhere in
// the line (a silently merged interaction key would corrupt scores).
json parse_strict(const std::string& text, std::size_t line_no) {
  std::vector<std::set<std::string>> scopes;
  json::parser_callback_t cb = [&](int /*depth*/, json::parse_event_t event,
                                   json& parsed) {
    switch (event) {
      case json::parse_event_t::object_start:
        scopes.emplace_back();
        break;
      case json::parse_event_t::object_end:
        scopes.pop_back();
        break;
      case json::parse_event_t::key: {
        const auto key = parsed.get<std::string>();
        if (!scopes.back().insert(key).second) {
          throw ParseError("duplicate key \"" + key + "\"", line_no);
        }
        break;
      }
      default:
        break;
    }
    return true;
  };
  try {
    return json::parse(text, cb);
  } catch (const json::exception& e) {
    throw ParseError(e.what(), line_no);
  }
}

std::pair<int, int> parse_interaction_key(const std::string& key,
                                          std::size_t line_no) {
  const auto comma = key.find(',');
  if (comma == std::string::npos) {
    throw ParseError("interaction key \"" + key + "\" is not \"i,j\"", line_no);
  }
  try {
    return {std::stoi(key.substr(0, comma)), std::stoi(key.substr(comma + 1))};
  } catch (const std::exception&) {
    throw ParseError("interaction key \"" + key + "\" is not \"i,j\"", line_no);
  }
}

}  // namespace

Instance from_json_line(const std::string& line, std::size_t line_no) {
  const json doc = parse_strict(line, line_no);
  try {
    InstanceData data;
    data.uuid = doc.at("uuid").get<std::string>();
    const auto type_name = doc.at("problem_type").get<std::string>();
    const auto family = family_from_name(type_name);
    if (!family) {
      throw ParseError("unknown problem_type \"" + type_name + "\"", line_no);
    }
    data.problem_type = *family;

    const json& req = doc.at("requirements");
    data.n_variables = req.at("n_variables").get<int>();
    const json& bounds = req.at("cardinality_bounds");
    data.cardinality_lo = bounds.at(0).get<int>();
    data.cardinality_hi = bounds.at(1).get<int>();
    for (const auto& p : req.at("precedence")) {
      data.precedence.push_back({p.at(0).get<int>(), p.at(1).get<int>()});
    }
    for (const auto& m : req.at("mutex")) {
      data.mutex.push_back({m.at(0).get<int>(), m.at(1).get<int>()});
    }
    for (const auto& [id, members] : req.at("groups").items()) {
      data.groups[id] = members.get<std::vector<int>>();
    }

    const json& catalog = doc.at("catalog");
    for (const auto& v : catalog.at("variables")) {
      data.weights.push_back(v.at("weight").get<double>());
    }
    for (const auto& [key, w] : catalog.at("interactions").items()) {
      data.interactions.push_back(
          {parse_interaction_key(key, line_no), w.get<double>()});
    }
    return Instance(std::move(data));
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseError(e.what(), line_no);
  }
}

void write_jsonl(const std::vector<Instance>& dataset,
                 const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  for (const auto& inst : dataset) {
    out << to_json_line(inst) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<Instance> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::vector<Instance> dataset;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    dataset.push_back(from_json_line(line, line_no));
  }
  return dataset;
}

}  // namespace sds::gen
