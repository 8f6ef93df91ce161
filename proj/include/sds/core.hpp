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

#ifndef SDS_CORE_HPP_
#define SDS_CORE_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sds/errors.hpp"

namespace sds {

// The ten benchmark problem families.
enum class Family {
  kDenseDeceptive,
  kStructuralTrap,
  kBnbShowcase,
  kRandomSds,
  kTreeStructured,
  kGreedyEasy,
  kDecomposable,
  kLocalOptima,
  kPlantedQubo,
  kMaxCutQubo,
};

inline constexpr int kFamilyCount = 10;

const char* family_name(Family f);
std::optional<Family> family_from_name(const std::string& name);

// A sorted, duplicate-free set of selected variable indices.
class Selection {
 public:
  Selection() = default;

  // Canonicalizes: sorts and removes duplicates. Negative indices are a
  // contract violation; upper-bound validity is checked against an Instance
  // by the operations that take one.
  static Selection of(std::vector<int> indices);

  const std::vector<int>& variables() const noexcept { return vars_; }
  std::size_t size() const noexcept { return vars_.size(); }
  bool empty() const noexcept { return vars_.empty(); }
  bool contains(int i) const;

  friend bool operator==(const Selection&, const Selection&) = default;

 private:
  std::vector<int> vars_;
};

// Per-constraint-family violation counts. Cardinality counts one violation
// per violated bound side; groups count one violation per over-full group.
struct ViolationReport {
  int cardinality = 0;
  int precedence = 0;
  int mutex = 0;
  int group = 0;

  int n_vio() const noexcept { return cardinality + precedence + mutex + group; }
  friend bool operator==(const ViolationReport&, const ViolationReport&) = default;
};

// Plain aggregate used to build an Instance. Interaction pairs may come in
// either orientation; the Instance constructor canonicalizes them to i < j
// and rejects duplicates (including (i,j)/(j,i) collisions).
struct InstanceData {
  std::string uuid;
  Family problem_type = Family::kRandomSds;
  int n_variables = 0;
  std::vector<double> weights;
  std::vector<std::pair<std::pair<int, int>, double>> interactions;
  int cardinality_lo = 0;
  int cardinality_hi = 0;
  std::vector<std::pair<int, int>> precedence;  // (prerequisite, dependent)
  std::vector<std::pair<int, int>> mutex;       // unordered conflict pairs
  std::map<std::string, std::vector<int>> groups;
};

// One SDS problem instance. Immutable after construction; all accessors and
// the free operations below are pure and safe to use from concurrent workers.
class Instance {
 public:
  // Validates invariants (index ranges, L <= U <= n, no self-pairs, unique
  // canonical interaction keys) and precomputes adjacency. Throws ParseError
  // on duplicate interaction keys and ContractViolation on other breaches.
  explicit Instance(InstanceData data);

  const std::string& uuid() const noexcept { return uuid_; }
  Family problem_type() const noexcept { return problem_type_; }
  int n() const noexcept { return n_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  double weight(int i) const { return weights_.at(static_cast<std::size_t>(i)); }

  // Canonical (i < j) interaction pairs, sorted by key.
  const std::vector<std::pair<std::pair<int, int>, double>>& interactions()
      const noexcept {
    return interactions_;
  }
  // 0.0 when the pair carries no interaction. Accepts either orientation.
  double interaction(int i, int j) const;

  int cardinality_lo() const noexcept { return cardinality_lo_; }
  int cardinality_hi() const noexcept { return cardinality_hi_; }
  const std::vector<std::pair<int, int>>& precedence() const noexcept {
    return precedence_;
  }
  const std::vector<std::pair<int, int>>& mutex() const noexcept { return mutex_; }
  const std::map<std::string, std::vector<int>>& groups() const noexcept {
    return groups_;
  }

  // Per-variable derived views.
  const std::vector<std::pair<int, double>>& neighbors(int i) const {
    return adjacency_.at(static_cast<std::size_t>(i));
  }
  const std::vector<int>& prerequisites_of(int i) const {
    return prereqs_.at(static_cast<std::size_t>(i));
  }
  const std::vector<int>& dependents_of(int i) const {
    return dependents_.at(static_cast<std::size_t>(i));
  }
  const std::vector<int>& mutex_partners(int i) const {
    return mutex_partners_.at(static_cast<std::size_t>(i));
  }
  // Indices into group_members(); a variable may belong to several groups.
  const std::vector<int>& group_ids_of(int i) const {
    return var_groups_.at(static_cast<std::size_t>(i));
  }
  int group_count() const noexcept { return static_cast<int>(group_members_.size()); }
  const std::vector<int>& group_members(int gid) const {
    return group_members_.at(static_cast<std::size_t>(gid));
  }

  // Count of distinct interaction partners (used for search orderings).
  int degree(int i) const {
    return static_cast<int>(adjacency_.at(static_cast<std::size_t>(i)).size());
  }

 private:
  std::string uuid_;
  Family problem_type_;
  int n_;
  std::vector<double> weights_;
  std::vector<std::pair<std::pair<int, int>, double>> interactions_;
  int cardinality_lo_;
  int cardinality_hi_;
  std::vector<std::pair<int, int>> precedence_;
  std::vector<std::pair<int, int>> mutex_;
  std::map<std::string, std::vector<int>> groups_;

  std::vector<std::vector<std::pair<int, double>>> adjacency_;
  std::vector<std::vector<int>> prereqs_;
  std::vector<std::vector<int>> dependents_;
  std::vector<std::vector<int>> mutex_partners_;
  std::vector<std::vector<int>> var_groups_;
  std::vector<std::vector<int>> group_members_;
};

// Objective value: sum of selected weights plus interactions of selected
// pairs. Pure in the selected set; order-independent.
double score(const Instance& inst, const Selection& sel);

// Counts violated constraints. n_vio() == 0 iff `sel` is feasible.
ViolationReport check_feasibility(const Instance& inst, const Selection& sel);

// Gain of adding unselected variable `i` to `sel`:
// weight(i) + sum of interactions between i and selected variables.
// Throws ContractViolation when i is already selected or out of range.
double marginal_gain(const Instance& inst, const Selection& sel, int i);

}  // namespace sds

#endif  // SDS_CORE_HPP_
