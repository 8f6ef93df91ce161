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

#ifndef SDS_TEMPLATES_HPP_
#define SDS_TEMPLATES_HPP_

#include <string_view>

namespace sds::templates {

// Built-in Python candidate sources implementing the stdin/stdout contract.
// They serve as tournament seeds, audit fixtures and executable references
// for the annealing variants the harness models.

// Structurally complete simulated annealing: retry-loop constraint guard,
// current-state Metropolis acceptance, best-solution tracking, bit-flip
// moves, T0=1000, cooling 0.99, 1000 fixed iterations.
std::string_view reference_sa_source();

// Same scaffold with the faulty acceptance rule that compares proposals
// against the running best score instead of the current state.
std::string_view global_best_bug_sa_source();

// Same scaffold with passive constraint filtering: infeasible proposals are
// discarded while the temperature keeps cooling (dynamic termination).
std::string_view passive_filter_sa_source();

// Weight-descending greedy that never looks at pairwise terms.
std::string_view weight_sort_greedy_source();

}  // namespace sds::templates

#endif  // SDS_TEMPLATES_HPP_
