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

#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "sds/generate.hpp"
#include "sds/solvers.hpp"

using namespace sds;
using test::make_instance;

namespace {

double gap_to(double optimum, const solvers::SolveResult& r) {
  if (!r.feasible) return 1.0;
  if (optimum <= 0) return r.score >= optimum ? 0.0 : 1.0;
  return std::max(0.0, std::min(1.0, (optimum - std::max(0.0, r.score)) / optimum));
}

void check_consistency(const Instance& inst, const solvers::SolveResult& r) {
  if (r.selection) {
    CHECK(r.score == score(inst, *r.selection));
    CHECK(r.feasible == (check_feasibility(inst, *r.selection).n_vio() == 0));
  } else {
    CHECK(r.score == solvers::kNoSolutionScore);
    CHECK(!r.feasible);
  }
}

}  // namespace

TEST_SUITE_BEGIN("solvers");

TEST_CASE("greedy stops when no positive gain remains") {
  const auto inst = make_instance({.n = 3, .weights = {-1.0, -2.0, -0.5}});
  const auto r = solvers::greedy_marginal(inst, 1.0, 0);
  REQUIRE(r.feasible);
  CHECK(r.selection->empty());
  CHECK(r.score == 0.0);
}

TEST_CASE("greedy respects mutex under a tight upper bound") {
  const auto inst = make_instance(
      {.n = 2, .weights = {5.0, 1.0}, .hi = 1, .mutex = {{0, 1}}});
  const auto r = solvers::greedy_marginal(inst, 1.0, 0);
  REQUIRE(r.feasible);
  CHECK(r.selection->variables() == std::vector<int>{0});
  CHECK(r.score == 5.0);
}

TEST_CASE("greedy tops up to the lower cardinality bound") {
  const auto inst =
      make_instance({.n = 4, .weights = {-1, -1, -1, -1}, .lo = 2, .hi = 4});
  const auto r = solvers::greedy_marginal(inst, 1.0, 0);
  REQUIRE(r.feasible);
  CHECK(r.selection->size() == 2);
}

TEST_CASE("greedy never beats the exhaustive oracle") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto inst = test::random_small_instance(seed, 12, 12);
    const auto greedy = solvers::greedy_marginal(inst, 1.0, 0);
    const auto optimum = solvers::exhaustive(inst);
    if (greedy.feasible) {
      REQUIRE(optimum.feasible);
      CHECK(greedy.score <= optimum.score + 1e-9);
    }
    check_consistency(inst, greedy);
  }
}

TEST_CASE("local search scales restarts with the budget") {
  const auto inst = test::random_small_instance(3, 10, 10);
  const auto r = solvers::local_search_1flip(inst, 2.0, 1);
  CHECK(r.meta.at("restarts") == 20.0);
  CHECK(r.meta.at("min_restart_improvement") >= 0.0);
  CHECK(solvers::local_search_1flip(inst, 0.1, 1).meta.at("restarts") == 1.0);
  CHECK_THROWS_AS(solvers::local_search_1flip(inst, 0.0, 1), ContractViolation);
}

TEST_CASE("local search beats greedy on average against the oracle") {
  double greedy_gap = 0.0;
  double ls_gap = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto inst = test::random_small_instance(seed + 1000, 12, 12);
    const auto optimum = solvers::exhaustive(inst);
    REQUIRE(optimum.feasible);
    greedy_gap += gap_to(optimum.score, solvers::greedy_marginal(inst, 1.0, 0));
    ls_gap += gap_to(optimum.score, solvers::local_search_1flip(inst, 0.4, 9));
  }
  CHECK(ls_gap / 100.0 <= greedy_gap / 100.0);
}

TEST_CASE("local search is deterministic when the budget does not bind") {
  const auto inst = test::random_small_instance(8, 14, 14);
  const auto a = solvers::local_search_1flip(inst, 0.5, 42);
  const auto b = solvers::local_search_1flip(inst, 0.5, 42);
  REQUIRE(a.selection.has_value());
  CHECK(a.selection->variables() == b.selection->variables());
}

TEST_CASE("branch and bound proves optimality on small instances") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto inst = test::random_small_instance(seed + 50, 8, 14);
    const auto bnb = solvers::branch_and_bound(inst, 60.0, 0);
    const auto optimum = solvers::exhaustive(inst);
    REQUIRE(bnb.meta.at("complete") == 1.0);
    if (optimum.feasible) {
      REQUIRE(bnb.feasible);
      CHECK(std::abs(bnb.score - optimum.score) <=
            1e-9 * std::max(1.0, std::abs(optimum.score)));
    } else {
      CHECK(!bnb.feasible);
    }
    check_consistency(inst, bnb);
  }
}

TEST_CASE("branch and bound prunes an all-nonpositive instance immediately") {
  const auto inst = make_instance(
      {.n = 6,
       .weights = {-1, -2, 0, -0.5, -3, -1},
       .interactions = {{{0, 1}, -4.0}, {{2, 3}, -1.0}}});
  const auto r = solvers::branch_and_bound(inst, 5.0, 0);
  REQUIRE(r.feasible);
  CHECK(r.selection->empty());
  CHECK(r.score == 0.0);
  CHECK(r.meta.at("complete") == 1.0);
}

TEST_CASE("branch and bound respects a tiny budget") {
  gen::GenSpec spec = gen::GenSpec::of(Family::kRandomSds, 1.0, 12);
  spec.params.n_min = 100;
  spec.params.n_max = 100;
  const auto inst = gen::generate(spec, 1).front();
  const auto r = solvers::branch_and_bound(inst, 0.001, 0);
  CHECK(r.elapsed_sec <= 0.06);  // budget plus one expansion granule
  CHECK(r.meta.at("complete") == 0.0);
  check_consistency(inst, r);
}

TEST_CASE("branch and bound trace is nondecreasing") {
  const auto inst = test::random_small_instance(99, 14, 14);
  const auto r = solvers::branch_and_bound(inst, 5.0, 0);
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    CHECK(r.trace[i].second >= r.trace[i - 1].second);
    CHECK(r.trace[i].first >= r.trace[i - 1].first);
  }
}

TEST_CASE("guarded proposals only ever surface feasible neighbors") {
  const auto inst = make_instance({.n = 8,
                                   .weights = {1, 1, 1, 1, 1, 1, 1, 1},
                                   .lo = 1,
                                   .hi = 3,
                                   .precedence = {{0, 1}, {1, 2}},
                                   .mutex = {{3, 4}},
                                   .groups = {{"g", {5, 6, 7}}}});
  solvers::detail::FlipState start(inst);
  start.assign({0});
  REQUIRE(start.feasible());
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    solvers::detail::FlipState neighbor = start;
    const bool ok = solvers::detail::guarded_bitflip_proposal(neighbor, rng, 10000);
    REQUIRE(ok);
    CHECK(neighbor.feasible());
  }
}

TEST_CASE("annealing dynamic mode runs the geometric step count") {
  const auto inst = test::random_small_instance(4, 10, 10);
  solvers::SAConfig cfg;
  cfg.fixed_iterations.reset();  // dynamic: run while T > 1
  const auto r = solvers::simulated_annealing(inst, 30.0, 2, cfg);
  // ceil(log(1/1000) / log(0.99)) = 688
  CHECK(r.meta.at("steps") == 688.0);
}

TEST_CASE("annealing is deterministic given the seed") {
  const auto inst = test::random_small_instance(21, 14, 14);
  const auto a = solvers::simulated_annealing(inst, 30.0, 77, {});
  const auto b = solvers::simulated_annealing(inst, 30.0, 77, {});
  REQUIRE(a.selection.has_value());
  CHECK(a.selection->variables() == b.selection->variables());
  CHECK(a.score == b.score);
  check_consistency(inst, a);
}

TEST_CASE("annealing config validation") {
  const auto inst = test::random_small_instance(1, 8, 8);
  solvers::SAConfig bad;
  bad.t0 = 0.0;
  CHECK_THROWS_AS(solvers::simulated_annealing(inst, 1.0, 0, bad),
                  ContractViolation);
  bad = {};
  bad.cooling = 1.0;
  CHECK_THROWS_AS(solvers::simulated_annealing(inst, 1.0, 0, bad),
                  ContractViolation);
}

TEST_CASE("annealing returns the sentinel when no feasible start exists") {
  const auto inst = make_instance({.n = 3,
                                   .weights = {1, 1, 1},
                                   .lo = 2,
                                   .hi = 2,
                                   .mutex = {{0, 1}, {0, 2}, {1, 2}}});
  solvers::SAConfig cfg;
  cfg.init_attempt_cap = 2000;
  const auto r = solvers::simulated_annealing(inst, 1.0, 0, cfg);
  CHECK(!r.feasible);
  CHECK(!r.selection.has_value());
  CHECK(r.score == solvers::kNoSolutionScore);
}

TEST_CASE("the global-best acceptance bug hurts on deceptive instances") {
  gen::GenSpec spec = gen::GenSpec::of(Family::kDenseDeceptive, 1.0, 2024);
  spec.params.n_min = 14;
  spec.params.n_max = 16;
  const auto instances = gen::generate(spec, 30);
  double current_total = 0.0;
  double bug_total = 0.0;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto optimum = solvers::exhaustive(instances[i]);
    REQUIRE(optimum.feasible);
    solvers::SAConfig current;
    solvers::SAConfig bug;
    bug.acceptance = solvers::SaAcceptance::kGlobalBestBug;
    const auto seed = derive_seed(7, i);
    current_total +=
        gap_to(optimum.score, solvers::simulated_annealing(instances[i], 5.0, seed, current));
    bug_total +=
        gap_to(optimum.score, solvers::simulated_annealing(instances[i], 5.0, seed, bug));
  }
  CHECK(bug_total > current_total);
}

TEST_CASE("annealing add/remove move kind stays within bounds") {
  const auto inst = make_instance(
      {.n = 10, .weights = {1, 2, 3, 4, 5, -1, -2, -3, -4, -5}, .lo = 2, .hi = 5});
  solvers::SAConfig cfg;
  cfg.move = solvers::SaMove::kAddRemove;
  const auto r = solvers::simulated_annealing(inst, 5.0, 3, cfg);
  REQUIRE(r.feasible);
  CHECK(r.selection->size() >= 2);
  CHECK(r.selection->size() <= 5);
}

TEST_CASE("exhaustive oracle basics") {
  SUBCASE("single positive item") {
    const auto inst = make_instance({.n = 1, .weights = {2.0}});
    const auto r = solvers::exhaustive(inst);
    REQUIRE(r.feasible);
    CHECK(r.selection->variables() == std::vector<int>{1 - 1});
    CHECK(r.score == 2.0);
  }
  SUBCASE("no feasible selection yields the sentinel") {
    const auto inst = make_instance(
        {.n = 2, .weights = {1, 1}, .lo = 2, .hi = 2, .mutex = {{0, 1}}});
    const auto r = solvers::exhaustive(inst);
    CHECK(!r.feasible);
    CHECK(r.score == solvers::kNoSolutionScore);
  }
  SUBCASE("ties break toward the lexicographically smallest selection") {
    const auto inst =
        make_instance({.n = 3, .weights = {1.0, 1.0, 1.0}, .lo = 1, .hi = 1});
    const auto r = solvers::exhaustive(inst);
    CHECK(r.selection->variables() == std::vector<int>{0});
  }
  SUBCASE("size guard") {
    const auto inst = make_instance({.n = 25, .weights = std::vector<double>(25, 1.0)});
    CHECK_THROWS_AS(solvers::exhaustive(inst), ContractViolation);
  }
}

TEST_CASE("budgeted solvers finish near their budget") {
  gen::GenSpec spec = gen::GenSpec::of(Family::kDenseDeceptive, 1.0, 5);
  spec.params.n_min = 60;
  spec.params.n_max = 60;
  const auto inst = gen::generate(spec, 1).front();
  for (double budget : {0.02, 0.05}) {
    CHECK(solvers::branch_and_bound(inst, budget, 0).elapsed_sec <= budget + 0.05);
    CHECK(solvers::local_search_1flip(inst, budget, 0).elapsed_sec <= budget + 0.05);
  }
}

TEST_SUITE_END();
