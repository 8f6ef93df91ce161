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

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "sds/reward.hpp"
#include "sds/rng.hpp"

using namespace sds;
using test::make_instance;

namespace {

sandbox::CandidateRun fake_run(sandbox::Outcome outcome,
                               std::optional<double> score = std::nullopt,
                               int n_vio = 0) {
  sandbox::CandidateRun run;
  run.instance_uuid = "fake";
  run.outcome = outcome;
  run.n_vio = n_vio;
  run.score = score;
  if (score) run.selection = Selection::of({0});
  return run;
}

// Independent translation of the normalization definition, kept separate
// from the implementation it checks.
double normalize_oracle(std::vector<double> weights,
                        std::vector<double> interactions, int upper, double s) {
  double abs_w = 0.0;
  double abs_i = 0.0;
  for (double w : weights) abs_w += std::fabs(w);
  for (double w : interactions) abs_i += std::fabs(w);
  if (abs_w <= 1e-9 && abs_i <= 1e-9) {
    if (std::fabs(s) <= 1e-9) return 0.5;
    return 0.5 * (1.0 + s / (1.0 + std::fabs(s)));
  }
  std::vector<double> pos_w;
  for (double w : weights) {
    if (w > 0) pos_w.push_back(w);
  }
  std::sort(pos_w.begin(), pos_w.end(), std::greater<>());
  double w_max = 0.0;
  for (std::size_t i = 0; i < std::min<std::size_t>(pos_w.size(), upper); ++i) {
    w_max += pos_w[i];
  }
  std::vector<double> pos_i;
  for (double w : interactions) {
    if (w > 0) pos_i.push_back(w);
  }
  double i_max = 0.0;
  if (!pos_i.empty()) {
    double mean = 0.0;
    for (double w : pos_i) mean += w;
    mean /= static_cast<double>(pos_i.size());
    const std::size_t pairs =
        std::min<std::size_t>(pos_i.size(), static_cast<std::size_t>(upper) *
                                                (upper - 1) / 2);
    i_max = mean * static_cast<double>(pairs);
  }
  const double baseline = w_max + i_max;
  if (baseline > 1e-9) return s / baseline;
  return s / std::max(abs_w + abs_i, 1.0);
}

}  // namespace

TEST_SUITE_BEGIN("reward");

TEST_CASE("format reward requires one think block before one code block") {
  CHECK(reward::format_reward("<think>a</think><code>b</code>") == 1);
  CHECK(reward::format_reward("<code>b</code><think>a</think>") == 0);
  CHECK(reward::format_reward("<think>a</think><code>b</code><code>c</code>") == 0);
  CHECK(reward::format_reward("<think>a</think>") == 0);
  CHECK(reward::format_reward("") == 0);
  CHECK(reward::format_reward("<think><code>b</code></think>") == 0);
  CHECK(reward::format_reward("x <think>a</think> y <code>b</code> z") == 1);
}

TEST_CASE("structure indicator keyword set and lazy-sort flag") {
  CHECK(reward::structure_indicator("uses MUTEX handling").graph_indicator == 1);
  CHECK(reward::structure_indicator("adjacency list walk").graph_indicator == 1);
  CHECK(reward::structure_indicator("plain arithmetic").graph_indicator == 0);
  CHECK(reward::structure_indicator("").graph_indicator == 0);
  CHECK(reward::structure_indicator("").lazy_sort_flag == 0);

  const auto lazy =
      reward::structure_indicator("items = sorted(xs, key=lambda x: x.weight)");
  CHECK(lazy.lazy_sort_flag == 1);
  const auto aware = reward::structure_indicator(
      "items = sorted(xs, key=weight); use interactions too");
  CHECK(aware.lazy_sort_flag == 0);
}

TEST_CASE("execution reward composes per the component formulas") {
  const std::string graph_code = "walk the graph of interactions";
  SUBCASE("valid run with the structure bonus, early training") {
    const auto r = reward::exec_reward(
        fake_run(sandbox::Outcome::kValid, 1.0, 0), graph_code,
        reward::TrainingProgress::of(0.2));
    CHECK(r.total == doctest::Approx(0.7).epsilon(1e-12));
  }
  SUBCASE("ten violations at faded progress") {
    const auto r = reward::exec_reward(
        fake_run(sandbox::Outcome::kConstraintViolation, 1.0, 10), graph_code,
        reward::TrainingProgress::of(0.5));
    CHECK(r.total == doctest::Approx(0.04).epsilon(1e-12));
  }
  SUBCASE("failed executions earn nothing") {
    for (auto outcome : {sandbox::Outcome::kTimeout, sandbox::Outcome::kSyntaxError,
                         sandbox::Outcome::kRuntimeError}) {
      const auto r = reward::exec_reward(fake_run(outcome), graph_code,
                                         reward::TrainingProgress::of(0.0));
      CHECK(r.total == 0.0);
      CHECK(r.syntax == 0.0);
    }
  }
  SUBCASE("lazy sort subtracts 0.2") {
    const auto r = reward::exec_reward(
        fake_run(sandbox::Outcome::kValid, 1.0, 0),
        "sorted by weight only", reward::TrainingProgress::of(0.0));
    CHECK(r.lazy_penalty == -0.2);
    CHECK(r.total == doctest::Approx(0.1 + 0.1 + 0.3 - 0.2).epsilon(1e-12));
  }
}

TEST_CASE("curriculum schedule has a single step at 0.4") {
  CHECK(reward::curriculum_alpha(reward::TrainingProgress::of(0.0)) == 1.0);
  CHECK(reward::curriculum_alpha(reward::TrainingProgress::of(0.399)) == 1.0);
  CHECK(reward::curriculum_alpha(reward::TrainingProgress::of(0.4)) == 0.2);
  CHECK(reward::curriculum_alpha(reward::TrainingProgress::of(1.0)) == 0.2);
  CHECK(reward::TrainingProgress::of(-3.0).t == 0.0);
  CHECK(reward::TrainingProgress::of(7.0).t == 1.0);
}

TEST_CASE("normalization hand example matches the independent oracle") {
  const auto inst = make_instance({.n = 3,
                                   .weights = {5.0, 3.0, -1.0},
                                   .interactions = {{{0, 1}, 4.0}, {{1, 2}, -2.0}},
                                   .hi = 2});
  // W_max = 8, I_max = 4, baseline 12.
  CHECK(reward::normalize_score(inst, 6.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(normalize_oracle({5, 3, -1}, {4, -2}, 2, 6.0) ==
        doctest::Approx(0.5).epsilon(1e-12));

  for (double s : {-3.0, 0.0, 4.5, 12.0, 30.0}) {
    CHECK(reward::normalize_score(inst, s) ==
          doctest::Approx(normalize_oracle({5, 3, -1}, {4, -2}, 2, s)).epsilon(1e-12));
  }
}

TEST_CASE("alternate normalization uses the largest positive interactions") {
  const auto inst = make_instance({.n = 4,
                                   .weights = {1.0, 0.0, 0.0, 0.0},
                                   .interactions = {{{0, 1}, 6.0},
                                                    {{1, 2}, 2.0},
                                                    {{2, 3}, 4.0}},
                                   .hi = 2});
  // mean variant: W_max = 1, I_max = mean(6,2,4) * min(3, 1) = 4 -> B = 5
  CHECK(reward::normalize_score(inst, 5.0) == doctest::Approx(1.0).epsilon(1e-12));
  // top variant: I_max = 6 (single largest) -> B = 7
  CHECK(reward::normalize_score(
            inst, 7.0, reward::NormalizationVariant::kTopPositiveInteractions) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("degenerate normalization is a sigmoid around 0.5") {
  const auto inst = make_instance({.n = 2, .weights = {0.0, 0.0}});
  CHECK(reward::normalize_score(inst, 0.0) == 0.5);
  CHECK(reward::normalize_score(inst, 1e10) > 0.999);
  CHECK(reward::normalize_score(inst, -1e10) < 0.001);

  Rng rng(5);
  double prev_s = -1e9;
  double prev_v = reward::normalize_score(inst, prev_s);
  std::vector<double> draws;
  for (int i = 0; i < 10000; ++i) draws.push_back(rng.uniform_real(-1e6, 1e6));
  std::sort(draws.begin(), draws.end());
  for (double s : draws) {
    const double v = reward::normalize_score(inst, s);
    CHECK(v > 0.0);
    CHECK(v < 1.0);
    if (s > prev_s + 1e-9) CHECK(v > prev_v);
    prev_s = s;
    prev_v = v;
  }

  SUBCASE("positive scaling never flips the sign of (value - 0.5)") {
    for (double s : {-7.0, -0.3, 0.4, 12.0}) {
      const double base = reward::normalize_score(inst, s) - 0.5;
      for (double c : {0.01, 1.0, 250.0}) {
        const double scaled = reward::normalize_score(inst, c * s) - 0.5;
        CHECK(base * scaled > 0.0);
      }
    }
  }
}

TEST_CASE("nominal reward gates on feasibility") {
  const auto inst = make_instance({.n = 3,
                                   .weights = {5.0, 3.0, -1.0},
                                   .interactions = {{{0, 1}, 4.0}, {{1, 2}, -2.0}},
                                   .hi = 2});
  SUBCASE("hard gate zeroes any violation") {
    const auto run = fake_run(sandbox::Outcome::kConstraintViolation, 11.0, 1);
    CHECK(reward::nominal_reward(inst, run, reward::GateMode::kHard) == 0.0);
  }
  SUBCASE("hard gate clamps the normalized score") {
    const auto run = fake_run(sandbox::Outcome::kValid, 24.0, 0);  // 24/12 = 2.0
    CHECK(reward::nominal_reward(inst, run, reward::GateMode::kHard) == 1.0);
  }
  SUBCASE("soft gate subtracts 0.15 per violation") {
    const auto run = fake_run(sandbox::Outcome::kConstraintViolation, 10.8, 2);
    // Normalize(10.8) = 0.9 -> 0.9 - 0.30 = 0.6
    CHECK(reward::nominal_reward(inst, run, reward::GateMode::kSoft) ==
          doctest::Approx(0.6).epsilon(1e-12));
  }
  SUBCASE("missing selections score as raw zero") {
    const auto run = fake_run(sandbox::Outcome::kJsonParseError);
    CHECK(reward::nominal_reward(inst, run, reward::GateMode::kHard) == 0.0);
  }
}

TEST_CASE("intermediate score applies the unit constraint penalty") {
  const auto inst = make_instance({.n = 3,
                                   .weights = {5.0, 3.0, -1.0},
                                   .interactions = {{{0, 1}, 4.0}, {{1, 2}, -2.0}},
                                   .hi = 2});
  CHECK(reward::intermediate_score(inst, 6.0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(reward::intermediate_score(inst, 6.0, 3) == 0.0);
}

TEST_CASE("oracle anchoring is piecewise with a dead zone") {
  CHECK(reward::oracle_anchor_reward(0.05) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(reward::oracle_anchor_reward(0.001) == 0.0);
  CHECK(reward::oracle_anchor_reward(0.0) == 0.0);
  CHECK(reward::oracle_anchor_reward(-0.001) == 0.0);
  CHECK(reward::oracle_anchor_reward(-0.1) == -0.5);
}

TEST_CASE("diversity penalty via token 4-gram jaccard") {
  const std::string a = "select the best item from the catalog now";
  const std::string b = "choose a different strategy with other words here";
  SUBCASE("identical pair") {
    const auto p = reward::diversity_penalty({a, a});
    CHECK(p[0] == 1.0);
    CHECK(p[1] == 1.0);
  }
  SUBCASE("disjoint pair") {
    const auto p = reward::diversity_penalty({a, b});
    CHECK(p[0] == 0.0);
    CHECK(p[1] == 0.0);
  }
  SUBCASE("two identical plus one disjoint") {
    const auto p = reward::diversity_penalty({a, a, b});
    CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p[2] == 0.0);
  }
  SUBCASE("singleton group is zero by convention") {
    CHECK(reward::diversity_penalty({a}) == std::vector<double>{0.0});
  }
}

TEST_CASE("minimal feasibility reward tiers") {
  CHECK(reward::minimal_feasibility_reward(fake_run(sandbox::Outcome::kValid, 1.0)) ==
        1.0);
  CHECK(reward::minimal_feasibility_reward(
            fake_run(sandbox::Outcome::kConstraintViolation, 1.0, 2)) == 0.5);
  CHECK(reward::minimal_feasibility_reward(fake_run(sandbox::Outcome::kJsonParseError)) ==
        0.1);
  CHECK(reward::minimal_feasibility_reward(fake_run(sandbox::Outcome::kRuntimeError)) ==
        0.0);
  CHECK(reward::minimal_feasibility_reward(fake_run(sandbox::Outcome::kTimeout)) == 0.0);
}

TEST_CASE("composite reward is the fixed linear combination") {
  CHECK(reward::composite_reward(1, 0.7, 1.0) ==
        doctest::Approx(0.94).epsilon(1e-12));
  CHECK(reward::composite_reward(0, -0.4, 0.0) ==
        doctest::Approx(-0.08).epsilon(1e-12));

  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const int f = rng.bernoulli(0.5) ? 1 : 0;
    const double e = rng.uniform_real(-0.4, 0.7);
    const double n = rng.uniform_real(0.0, 1.0);
    const double c = reward::composite_reward(f, e, n);
    CHECK(c == doctest::Approx(0.10 * f + 0.20 * e + 0.70 * n).epsilon(1e-15));
    CHECK(c >= -0.08 - 1e-12);
    CHECK(c <= 0.94 + 1e-12);
  }
}

TEST_SUITE_END();
