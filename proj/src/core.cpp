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

#include "sds/core.hpp"

#include <algorithm>
#include <unordered_set>

namespace sds {
namespace {

constexpr const char* kFamilyNames[kFamilyCount] = {
    "dense_deceptive", "structural_trap", "bnb_showcase",  "random_sds",
    "tree_structured", "greedy_easy",     "decomposable",  "local_optima",
    "planted_qubo",    "maxcut_qubo",
};

void require(bool ok, const std::string& what) {
  if (!ok) throw ContractViolation(what);
}

std::uint64_t pair_key(int i, int j) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(i)) << 32) |
         static_cast<std::uint32_t>(j);
}

}  // namespace

const char* family_name(Family f) {
  return kFamilyNames[static_cast<int>(f)];
}

std::optional<Family> family_from_name(const std::string& name) {
  for (int i = 0; i < kFamilyCount; ++i) {
    if (name == kFamilyNames[i]) return static_cast<Family>(i);
  }
  return std::nullopt;
}

Selection Selection::of(std::vector<int> indices) {
  for (int v : indices) require(v >= 0, "selection index must be nonnegative");
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  Selection s;
  s.vars_ = std::move(indices);
  return s;
}

bool Selection::contains(int i) const {
  return std::binary_search(vars_.begin(), vars_.end(), i);
}

Instance::Instance(InstanceData data)
    : uuid_(std::move(data.uuid)),
      problem_type_(data.problem_type),
      n_(data.n_variables),
      weights_(std::move(data.weights)),
      cardinality_lo_(data.cardinality_lo),
      cardinality_hi_(data.cardinality_hi),
      precedence_(std::move(data.precedence)),
      mutex_(std::move(data.mutex)),
      groups_(std::move(data.groups)) {
  require(n_ >= 1, "instance needs at least one variable");
  require(static_cast<int>(weights_.size()) == n_,
          "weights size must equal n_variables");
  require(cardinality_lo_ >= 0, "cardinality lower bound must be >= 0");
  require(cardinality_lo_ <= cardinality_hi_ && cardinality_hi_ <= n_,
          "cardinality bounds must satisfy 0 <= L <= U <= n");

  auto check_index = [&](int v, const char* where) {
    require(v >= 0 && v < n_, std::string(where) + ": index out of range");
  };

  adjacency_.resize(static_cast<std::size_t>(n_));
  interactions_.reserve(data.interactions.size());
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(data.interactions.size() * 2);
  for (auto& [pair, w] : data.interactions) {
    auto [a, b] = pair;
    check_index(a, "interaction");
    check_index(b, "interaction");
    require(a != b, "interaction: self-pair not allowed");
    const int i = std::min(a, b);
    const int j = std::max(a, b);
    if (!seen.insert(pair_key(i, j)).second) {
      throw ParseError("duplicate interaction key " + std::to_string(i) + "," +
                       std::to_string(j));
    }
    interactions_.push_back({{i, j}, w});
  }
  std::sort(interactions_.begin(), interactions_.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  for (const auto& [pair, w] : interactions_) {
    adjacency_[static_cast<std::size_t>(pair.first)].push_back({pair.second, w});
    adjacency_[static_cast<std::size_t>(pair.second)].push_back({pair.first, w});
  }

  prereqs_.resize(static_cast<std::size_t>(n_));
  dependents_.resize(static_cast<std::size_t>(n_));
  for (const auto& [pre, dep] : precedence_) {
    check_index(pre, "precedence");
    check_index(dep, "precedence");
    require(pre != dep, "precedence: self-pair not allowed");
    prereqs_[static_cast<std::size_t>(dep)].push_back(pre);
    dependents_[static_cast<std::size_t>(pre)].push_back(dep);
  }

  mutex_partners_.resize(static_cast<std::size_t>(n_));
  for (const auto& [a, b] : mutex_) {
    check_index(a, "mutex");
    check_index(b, "mutex");
    require(a != b, "mutex: self-pair not allowed");
    mutex_partners_[static_cast<std::size_t>(a)].push_back(b);
    mutex_partners_[static_cast<std::size_t>(b)].push_back(a);
  }

  var_groups_.resize(static_cast<std::size_t>(n_));
  group_members_.reserve(groups_.size());
  for (const auto& [id, members] : groups_) {
    const int gid = static_cast<int>(group_members_.size());
    for (int v : members) {
      check_index(v, ("group " + id).c_str());
      var_groups_[static_cast<std::size_t>(v)].push_back(gid);
    }
    group_members_.push_back(members);
  }
}

double Instance::interaction(int i, int j) const {
  if (i == j) return 0.0;
  const int a = std::min(i, j);
  const int b = std::max(i, j);
  for (const auto& [nb, w] : neighbors(a)) {
    if (nb == b) return w;
  }
  return 0.0;
}

namespace {

std::vector<char> selection_mask(const Instance& inst, const Selection& sel) {
  std::vector<char> mask(static_cast<std::size_t>(inst.n()), 0);
  for (int v : sel.variables()) {
    if (v < 0 || v >= inst.n()) {
      throw ContractViolation("selection index " + std::to_string(v) +
                              " out of range for instance " + inst.uuid());
    }
    mask[static_cast<std::size_t>(v)] = 1;
  }
  return mask;
}

}  // namespace

double score(const Instance& inst, const Selection& sel) {
  const auto mask = selection_mask(inst, sel);
  double total = 0.0;
  for (int v : sel.variables()) {
    total += inst.weight(v);
    for (const auto& [nb, w] : inst.neighbors(v)) {
      if (nb > v && mask[static_cast<std::size_t>(nb)]) total += w;
    }
  }
  return total;
}

ViolationReport check_feasibility(const Instance& inst, const Selection& sel) {
  const auto mask = selection_mask(inst, sel);
  ViolationReport report;

  const int size = static_cast<int>(sel.size());
  if (size < inst.cardinality_lo()) ++report.cardinality;
  if (size > inst.cardinality_hi()) ++report.cardinality;

  for (const auto& [pre, dep] : inst.precedence()) {
    if (mask[static_cast<std::size_t>(dep)] && !mask[static_cast<std::size_t>(pre)])
      ++report.precedence;
  }
  for (const auto& [a, b] : inst.mutex()) {
    if (mask[static_cast<std::size_t>(a)] && mask[static_cast<std::size_t>(b)])
      ++report.mutex;
  }
  for (int gid = 0; gid < inst.group_count(); ++gid) {
    int selected = 0;
    for (int v : inst.group_members(gid)) {
      selected += mask[static_cast<std::size_t>(v)];
    }
    if (selected > 1) ++report.group;
  }
  return report;
}

double marginal_gain(const Instance& inst, const Selection& sel, int i) {
  if (i < 0 || i >= inst.n()) {
    throw ContractViolation("marginal_gain: index out of range");
  }
  if (sel.contains(i)) {
    throw ContractViolation("marginal_gain: variable already selected");
  }
  const auto mask = selection_mask(inst, sel);
  double gain = inst.weight(i);
  for (const auto& [nb, w] : inst.neighbors(i)) {
    if (mask[static_cast<std::size_t>(nb)]) gain += w;
  }
  return gain;
}

}  // namespace sds
