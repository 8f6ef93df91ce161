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
#include "sds/eval.hpp"
#include "sds/generate.hpp"
#include "sds/solvers.hpp"
#include "sds/templates.hpp"

using namespace sds;
using eval::kInfeasibleScore;

namespace {

eval::MethodRow row(const std::string& uuid, bool feasible, double score_value,
                    double elapsed = 0.0) {
  eval::MethodRow r;
  r.uuid = uuid;
  r.feasible = feasible;
  r.error = feasible ? sandbox::Outcome::kValid : sandbox::Outcome::kConstraintViolation;
  r.score = feasible ? score_value : kInfeasibleScore;
  r.elapsed_sec = elapsed;
  return r;
}

}  // namespace

TEST_SUITE_BEGIN("eval");

TEST_CASE("vbs is the max feasible score across methods") {
  const std::vector<eval::MethodRecord> records = {
      {"a", {row("u1", true, 10.0)}},
      {"b", {row("u1", true, 12.0)}},
      {"c", {row("u1", false, 0.0)}},
  };
  CHECK(eval::compute_vbs(records, "u1") == 12.0);
  CHECK_THROWS_AS(eval::compute_vbs(records, "nope"), ContractViolation);

  const std::vector<eval::MethodRecord> all_fail = {
      {"a", {row("u1", false, 0.0)}},
  };
  CHECK(eval::compute_vbs(all_fail, "u1") == kInfeasibleScore);

  const std::vector<eval::MethodRecord> single = {{"a", {row("u1", true, 7.5)}}};
  CHECK(eval::compute_vbs(single, "u1") == 7.5);

  SUBCASE("permutation invariance") {
    auto shuffled = records;
    std::swap(shuffled[0], shuffled[2]);
    CHECK(eval::compute_vbs(shuffled, "u1") == 12.0);
  }
}

TEST_CASE("gap definition and clipping") {
  using eval::GapMode;
  CHECK(*eval::gap(100.0, 95.0, true, GapMode::kConditionalFeasible) ==
        doctest::Approx(0.05).epsilon(1e-12));
  CHECK(*eval::gap(100.0, -10.0, true, GapMode::kConditionalFeasible) == 1.0);
  CHECK(!eval::gap(100.0, 0.0, false, GapMode::kConditionalFeasible).has_value());
  CHECK(*eval::gap(100.0, 0.0, false, GapMode::kUnconditionalInfeasibleIsOne) == 1.0);
  CHECK(*eval::gap(100.0, 100.0, true, GapMode::kConditionalFeasible) == 0.0);
  CHECK(*eval::gap(100.0, 150.0, true, GapMode::kConditionalFeasible) == 0.0);

  SUBCASE("nonpositive vbs with a feasible row") {
    CHECK(*eval::gap(-5.0, -5.0, true, GapMode::kConditionalFeasible) == 0.0);
    CHECK(*eval::gap(-5.0, -9.0, true, GapMode::kConditionalFeasible) == 1.0);
  }
  SUBCASE("gap is antitone in score") {
    double prev = 1.0;
    for (double s : {0.0, 10.0, 50.0, 90.0, 100.0}) {
      const double g = *eval::gap(100.0, s, true, GapMode::kConditionalFeasible);
      CHECK(g <= prev);
      prev = g;
    }
  }
}

TEST_CASE("difficulty classification thresholds") {
  const auto trivial = eval::classify_difficulty(100.0, 99.5, true);
  CHECK(trivial.first == doctest::Approx(0.005));
  CHECK(trivial.second == eval::Difficulty::kTrivial);

  const auto moderate = eval::classify_difficulty(100.0, 95.0, true);
  CHECK(moderate.second == eval::Difficulty::kModerate);

  const auto hard = eval::classify_difficulty(100.0, 80.0, true);
  CHECK(hard.second == eval::Difficulty::kHard);

  const auto greedy_failed = eval::classify_difficulty(100.0, kInfeasibleScore, false);
  CHECK(greedy_failed.first == 1.0);
  CHECK(greedy_failed.second == eval::Difficulty::kHard);

  const auto all_failed = eval::classify_difficulty(kInfeasibleScore, kInfeasibleScore, false);
  CHECK(all_failed.first == 1.0);

  const auto equal = eval::classify_difficulty(42.0, 42.0, true);
  CHECK(equal.first == 0.0);
  CHECK(equal.second == eval::Difficulty::kTrivial);
}

TEST_CASE("pass@k bootstrap contract") {
  SUBCASE("k = N collapses to the deterministic best-of-N") {
    std::vector<std::vector<eval::SampleOutcome>> pools = {
        {{true, 0.4}, {true, 0.1}, {false, 1.0}, {true, 0.7}},
        {{false, 1.0}, {false, 1.0}, {false, 1.0}, {false, 1.0}},
    };
    const auto est = eval::pass_at_k(pools, 4, 50, 3);
    CHECK(est.pass_mean == 0.5);
    CHECK(est.pass_std == 0.0);
    CHECK(est.gap_mean == doctest::Approx((0.1 + 1.0) / 2).epsilon(1e-12));
    CHECK(est.gap_std == 0.0);
  }
  SUBCASE("all infeasible pools give pass 0 and gap 1 at every k") {
    std::vector<std::vector<eval::SampleOutcome>> pools(
        3, std::vector<eval::SampleOutcome>(8, {false, 1.0}));
    for (int k : {1, 2, 8}) {
      const auto est = eval::pass_at_k(pools, k, 20, 1);
      CHECK(est.pass_mean == 0.0);
      CHECK(est.gap_mean == 1.0);
    }
  }
  SUBCASE("estimated gap never improves when k shrinks") {
    std::vector<std::vector<eval::SampleOutcome>> pools;
    Rng rng(9);
    for (int i = 0; i < 40; ++i) {
      std::vector<eval::SampleOutcome> pool;
      for (int s = 0; s < 16; ++s) {
        const bool feasible = rng.bernoulli(0.7);
        pool.push_back({feasible, feasible ? rng.uniform01() : 1.0});
      }
      pools.push_back(std::move(pool));
    }
    const auto k1 = eval::pass_at_k(pools, 1, 300, 5);
    const auto k16 = eval::pass_at_k(pools, 16, 300, 5);
    CHECK(k1.gap_mean >= k16.gap_mean);
  }
  SUBCASE("argument validation") {
    std::vector<std::vector<eval::SampleOutcome>> pools = {
        {{true, 0.0}, {true, 0.0}}};
    CHECK_THROWS_AS(eval::pass_at_k(pools, 3, 10, 0), ContractViolation);
    CHECK_THROWS_AS(eval::pass_at_k(pools, 0, 10, 0), ContractViolation);
    CHECK_THROWS_AS(eval::pass_at_k({}, 1, 10, 0), ContractViolation);
  }
}

TEST_CASE("best-of-n collapse keeps the lowest-gap feasible sample") {
  const std::vector<eval::MethodRecord> vbs_ref = {
      {"ref", {row("u1", true, 100.0), row("u2", true, 100.0)}}};

  SUBCASE("one feasible among N") {
    const std::vector<eval::MethodRecord> samples = {
        {"s0", {row("u1", false, 0.0)}},
        {"s1", {row("u1", true, 60.0)}},
        {"s2", {row("u1", false, 0.0)}},
    };
    const auto collapsed = eval::best_of_n_collapse(samples, vbs_ref);
    REQUIRE(collapsed.rows.size() == 1);
    CHECK(collapsed.rows[0].score == 60.0);
  }
  SUBCASE("lower gap wins, ties keep the earliest sample") {
    const std::vector<eval::MethodRecord> samples = {
        {"s0", {row("u1", true, 70.0), row("u2", true, 90.0)}},
        {"s1", {row("u1", true, 90.0), row("u2", true, 90.0)}},
    };
    const auto collapsed = eval::best_of_n_collapse(samples, vbs_ref);
    CHECK(collapsed.rows[0].score == 90.0);  // u1: 0.1 beats 0.3
    // u2 ties at gap 0.1; the earliest sample row is kept.
    CHECK(collapsed.rows[1].score == 90.0);
  }
  SUBCASE("no feasible sample keeps an infeasible row") {
    const std::vector<eval::MethodRecord> samples = {
        {"s0", {row("u1", false, 0.0)}},
        {"s1", {row("u1", false, 0.0)}},
    };
    const auto collapsed = eval::best_of_n_collapse(samples, vbs_ref);
    CHECK(!collapsed.rows[0].feasible);
    CHECK(collapsed.rows[0].score == kInfeasibleScore);
  }
}

TEST_CASE("records csv round trip") {
  test::TempDir tmp("records");
  const auto path = tmp.path() / "records.csv";
  eval::MethodRecord record;
  record.method = "greedy";
  record.rows = {row("u1", true, 12.5, 0.01), row("u2", false, 0.0, 0.02)};
  record.rows[1].error = sandbox::Outcome::kTimeout;
  eval::write_records_csv(record, path);
  const auto reread = eval::read_records_csv(path);
  REQUIRE(reread.size() == 1);
  REQUIRE(reread[0].rows.size() == 2);
  CHECK(reread[0].method == "greedy");
  CHECK(reread[0].rows[0].score == 12.5);
  CHECK(reread[0].rows[1].score == kInfeasibleScore);
  CHECK(reread[0].rows[1].error == sandbox::Outcome::kTimeout);
}

TEST_CASE("metrics csv round trips losslessly") {
  test::TempDir tmp("metrics");
  const auto path = tmp.path() / "metrics_final.csv";

  const std::vector<eval::MethodRecord> records = {
      {"greedy", {row("u1", true, 95.123456789012, 0.01), row("u2", false, 0.0, 0.3)}},
      {"ls", {row("u1", true, 100.0, 0.2), row("u2", true, -3.5, 0.1)}},
  };
  const auto verdicts = eval::judge(records, "greedy");
  eval::write_metrics_csv(records, verdicts, path);
  const auto rows = eval::read_metrics_csv(path);
  REQUIRE(rows.size() == 4);

  for (const auto& r : rows) {
    CHECK((r.error_type == "none" || r.error_type == "timeout" ||
           r.error_type == "constraint" || r.error_type == "syntax" ||
           r.error_type == "runtime" || r.error_type == "json_parse"));
  }
  // Bit-exact round trip of every float column.
  CHECK(rows[0].score == 95.123456789012);
  CHECK(rows[0].gap_conditional.has_value());
  CHECK(*rows[0].gap_conditional ==
        *eval::gap(100.0, 95.123456789012, true, eval::GapMode::kConditionalFeasible));
  CHECK(!rows[1].gap_conditional.has_value());
  CHECK(rows[1].gap_unconditional == 1.0);
  CHECK(rows[3].score == -3.5);

  SUBCASE("empty record set writes a header-only file") {
    const auto empty_path = tmp.path() / "empty.csv";
    eval::write_metrics_csv({}, {}, empty_path);
    CHECK(eval::read_metrics_csv(empty_path).empty());
  }
}

TEST_CASE("summary json mirrors per-method aggregates") {
  const std::vector<eval::MethodRecord> records = {
      {"greedy", {row("u1", true, 50.0, 0.5), row("u2", false, 0.0, 0.5)}},
      {"ls", {row("u1", true, 100.0, 1.0), row("u2", true, 10.0, 1.0)}},
  };
  const auto verdicts = eval::judge(records, "greedy");
  const auto summary = eval::summary_json(records, verdicts);
  CHECK(summary.find("\"greedy\"") != std::string::npos);
  CHECK(summary.find("\"pass_rate\": 0.5") != std::string::npos);
  CHECK(summary.find("\"elapsed_total_sec\": 2.0") != std::string::npos);
}

TEST_CASE("tournament filters on probes and ranks by full-set gap") {
  // Small deceptive instances plus an exhaustive-strength reference record.
  gen::GenSpec spec = gen::GenSpec::of(Family::kDenseDeceptive, 1.0, 321);
  spec.params.n_min = 8;
  spec.params.n_max = 10;
  const auto test_set = gen::generate(spec, 8);

  std::vector<eval::MethodRecord> reference(2);
  reference[0].method = "greedy";
  reference[1].method = "oracle";
  for (const auto& inst : test_set) {
    const auto greedy = solvers::greedy_marginal(inst, 1.0, 0);
    const auto optimum = solvers::exhaustive(inst);
    reference[0].rows.push_back(row(inst.uuid(), greedy.feasible, greedy.score));
    reference[1].rows.push_back(row(inst.uuid(), optimum.feasible, optimum.score));
  }

  // The brute-force candidate matches the oracle, so its gap is exactly zero.
  const std::string brute_force = R"PY(
import itertools, json, sys
data = json.load(sys.stdin)
req = data["requirements"]
cat = data["catalog"]
n = req["n_variables"]
lo, hi = req["cardinality_bounds"]
weights = [v["weight"] for v in cat["variables"]]
pair = {tuple(map(int, k.split(","))): v for k, v in cat["interactions"].items()}
def ok(sel):
    s = set(sel)
    if not (lo <= len(s) <= hi):
        return False
    for p, d in req["precedence"]:
        if d in s and p not in s:
            return False
    for a, b in req["mutex"]:
        if a in s and b in s:
            return False
    for members in req["groups"].values():
        if sum(1 for v in members if v in s) > 1:
            return False
    return True
def value(sel):
    total = sum(weights[i] for i in sel)
    for i, j in itertools.combinations(sorted(sel), 2):
        total += pair.get((i, j), 0.0)
    return total
best, best_value = None, float("-inf")
for size in range(lo, hi + 1):
    for sel in itertools.combinations(range(n), size):
        if ok(sel) and value(sel) > best_value:
            best, best_value = sel, value(sel)
print(json.dumps({"selection": {"variables": list(best or [])}}))
)PY";

  const std::vector<sandbox::Candidate> pool = {
      sandbox::Candidate::of(brute_force, "brute"),
      sandbox::Candidate::of("raise RuntimeError('dead')\n", "crash"),
      sandbox::Candidate::of(
          "import sys, json\n"
          "d = json.load(sys.stdin)\n"
          "n = d['requirements']['n_variables']\n"
          "print(json.dumps({'selection': {'variables': list(range(n))}}))\n",
          "violator"),
      sandbox::Candidate::of(
          "import sys\nsys.stdin.read()\n"
          "print('{\"selection\":{\"variables\":[]}}')\n",
          "empty"),
  };

  eval::TournamentConfig config;
  config.probe_count = 4;
  config.survivors = 3;
  config.timeout_sec = 4.0;
  config.workers = 4;
  config.seed = 1;
  config.runner = sandbox::RunnerConfig::python3();

  const auto result = eval::tournament(pool, test_set, reference, config);
  CHECK(result.stage1_survivors == 2);
  REQUIRE(result.ranking.size() == 2);
  CHECK(result.ranking[0].pool_index == 0);  // brute force ranks first
  CHECK(result.ranking[0].full_mean_gap == 0.0);
  CHECK(result.ranking[0].feasible_rate == 1.0);
  CHECK(result.ranking[1].pool_index == 3);

  // Everything eliminated in stage 1 failed a probe; nothing eliminated
  // appears in the ranking.
  for (int idx : result.eliminated_pool_indices) {
    for (const auto& survivor : result.ranking) {
      CHECK(survivor.pool_index != idx);
    }
  }

  SUBCASE("argument validation") {
    CHECK_THROWS_AS(eval::tournament({}, test_set, reference, config),
                    ContractViolation);
    eval::TournamentConfig bad = config;
    bad.probe_count = 100;
    CHECK_THROWS_AS(eval::tournament(pool, test_set, reference, bad),
                    ContractViolation);
  }
}

TEST_SUITE_END();
