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
#include <fstream>
#include <set>

#include "helpers.hpp"
#include "sds/generate.hpp"
#include "sds/solvers.hpp"

using namespace sds;

TEST_SUITE_BEGIN("gen");

TEST_CASE("generation is deterministic in (spec, seed)") {
  const auto spec = gen::GenSpec::of(Family::kDenseDeceptive, 1.0, 17);
  const auto a = gen::generate(spec, 5);
  const auto b = gen::generate(spec, 5);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(gen::to_json_line(a[i]) == gen::to_json_line(b[i]));
  }
}

TEST_CASE("dense deceptive parameters stay in range") {
  const auto spec = gen::GenSpec::of(Family::kDenseDeceptive, 1.0, 23);
  const auto batch = gen::generate(spec, 100);
  for (const auto& inst : batch) {
    CHECK(inst.n() >= 20);
    CHECK(inst.n() <= 60);
    for (double w : inst.weights()) {
      CHECK(w >= -2.0);
      CHECK(w <= 2.0);
    }
    for (const auto& [pair, w] : inst.interactions()) {
      CHECK(w >= -20.0);
      CHECK(w <= 20.0);
    }
  }
}

TEST_CASE("structural trap carries a bait-headed precedence chain") {
  const auto spec = gen::GenSpec::of(Family::kStructuralTrap, 1.0, 31);
  for (const auto& inst : gen::generate(spec, 20)) {
    const auto& prec = inst.precedence();
    const int members = static_cast<int>(prec.size()) + 1;
    CHECK(members >= 4);
    CHECK(members <= 7);

    // The chain head is a prerequisite that depends on nothing.
    std::set<int> dependents;
    for (const auto& [pre, dep] : prec) dependents.insert(dep);
    int head = -1;
    for (const auto& [pre, dep] : prec) {
      if (!dependents.count(pre)) head = pre;
    }
    REQUIRE(head >= 0);
    CHECK(inst.weight(head) == 100.0);
    for (const auto& [pre, dep] : prec) {
      CHECK(inst.interaction(pre, dep) == -10.0);
    }
  }
}

TEST_CASE("max-cut form: weights equal degrees, edges carry -2") {
  const auto spec = gen::GenSpec::of(Family::kMaxCutQubo, 1.0, 47);
  const auto inst = gen::generate(spec, 1).front();
  for (const auto& [pair, w] : inst.interactions()) {
    CHECK(w == -2.0);
  }
  for (int v = 0; v < inst.n(); ++v) {
    CHECK(inst.weight(v) == static_cast<double>(inst.degree(v)));
  }
}

TEST_CASE("decomposable blocks never interact") {
  const auto spec = gen::GenSpec::of(Family::kDecomposable, 1.0, 53);
  const auto inst = gen::generate(spec, 1).front();
  const int blocks = 4;
  auto block_of = [&](int v) { return v * blocks / inst.n(); };
  for (const auto& [pair, w] : inst.interactions()) {
    CHECK(block_of(pair.first) == block_of(pair.second));
  }
}

TEST_CASE("mixture weights must sum to one and family draws follow them") {
  CHECK_THROWS_AS(gen::generate_mixture({}, 1, 0), ContractViolation);

  auto specs = gen::default_mixture(0);
  specs[0].weight = 0.5;
  CHECK_THROWS_AS(gen::generate_mixture(specs, 1, 0), ContractViolation);

  SUBCASE("single family at weight one") {
    const auto only = std::vector<gen::GenSpec>{
        gen::GenSpec::of(Family::kTreeStructured, 1.0, 3)};
    const auto dataset = gen::generate_mixture(only, 1, 3);
    REQUIRE(dataset.size() == 1);
    CHECK(dataset.front().problem_type() == Family::kTreeStructured);
  }

  SUBCASE("multinomial counts within three sigma") {
    const auto dataset = gen::generate_mixture(gen::default_mixture(5), 10000, 5);
    int dense = 0;
    for (const auto& inst : dataset) {
      dense += inst.problem_type() == Family::kDenseDeceptive ? 1 : 0;
    }
    const double sigma = std::sqrt(10000 * 0.2 * 0.8);
    CHECK(dense >= 2000 - 3 * sigma);
    CHECK(dense <= 2000 + 3 * sigma);
  }
}

TEST_CASE("every generated instance admits a feasible selection") {
  // Lower bounds above zero force a non-empty witness; a cheap solver must
  // find something feasible.
  gen::GenSpec spec = gen::GenSpec::of(Family::kRandomSds, 1.0, 61);
  spec.params.n_min = 20;
  spec.params.n_max = 40;
  spec.params.lower_target = 3;
  for (const auto& inst : gen::generate(spec, 20)) {
    const auto result = solvers::local_search_1flip(inst, 0.2, 1);
    CHECK(result.feasible);
  }
}

TEST_CASE("unsatisfiable lower bound raises a generation error naming the family") {
  gen::GenSpec spec = gen::GenSpec::of(Family::kDenseDeceptive, 1.0, 7);
  spec.params.upper_frac = 0.01;  // U clamps to 2
  spec.params.lower_fixed = 5;
  try {
    gen::generate(spec, 1);
    FAIL("expected GenerationError");
  } catch (const GenerationError& e) {
    CHECK(std::string(e.what()).find("dense_deceptive") != std::string::npos);
  }
}

TEST_CASE("greedy-easy instances are trivial for the greedy solver") {
  gen::GenSpec spec = gen::GenSpec::of(Family::kGreedyEasy, 1.0, 71);
  spec.params.n_min = 10;
  spec.params.n_max = 16;
  int trivial = 0;
  const auto batch = gen::generate(spec, 30);
  for (const auto& inst : batch) {
    const auto greedy = solvers::greedy_marginal(inst, 1.0, 0);
    const auto optimum = solvers::exhaustive(inst);
    REQUIRE(greedy.feasible);
    REQUIRE(optimum.feasible);
    const double hardness = (optimum.score - greedy.score) /
                            std::max(std::abs(optimum.score), 1e-10);
    if (hardness < 0.01) ++trivial;
  }
  CHECK(trivial >= 27);  // at least 90%
}

TEST_CASE("jsonl round trip is lossless") {
  test::TempDir tmp("jsonl");
  const auto path = tmp.path() / "data.jsonl";
  const auto dataset = gen::generate_mixture(gen::default_mixture(9), 20, 9);
  gen::write_jsonl(dataset, path);
  const auto reread = gen::read_jsonl(path);
  REQUIRE(reread.size() == dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    CHECK(gen::to_json_line(reread[i]) == gen::to_json_line(dataset[i]));
  }

  SUBCASE("writes are byte-stable") {
    const auto path2 = tmp.path() / "data2.jsonl";
    gen::write_jsonl(dataset, path2);
    std::ifstream a(path), b(path2);
    std::string sa((std::istreambuf_iterator<char>(a)), {});
    std::string sb((std::istreambuf_iterator<char>(b)), {});
    CHECK(sa == sb);
  }
}

TEST_CASE("empty file reads as an empty dataset") {
  test::TempDir tmp("jsonl-empty");
  const auto path = tmp.path() / "empty.jsonl";
  std::ofstream(path).close();
  CHECK(gen::read_jsonl(path).empty());
}

TEST_CASE("duplicate interaction keys are parse errors") {
  const std::string base =
      R"({"uuid":"u","problem_type":"random_sds","requirements":{"n_variables":3,)"
      R"("cardinality_bounds":[0,3],"precedence":[],"mutex":[],"groups":{}},)"
      R"("catalog":{"variables":[{"weight":1.0},{"weight":1.0},{"weight":1.0}],)";

  SUBCASE("literal duplicate keys") {
    const std::string line =
        base + R"("interactions":{"0,1":2.0,"0,1":3.0}}})";
    CHECK_THROWS_AS(gen::from_json_line(line, 4), ParseError);
  }
  SUBCASE("orientation collision") {
    const std::string line =
        base + R"("interactions":{"0,1":2.0,"1,0":3.0}}})";
    CHECK_THROWS_AS(gen::from_json_line(line, 4), ParseError);
  }
  SUBCASE("reversed keys are canonicalized") {
    const std::string line = base + R"("interactions":{"2,0":2.5}}})";
    const auto inst = gen::from_json_line(line);
    CHECK(inst.interaction(0, 2) == 2.5);
  }
}

TEST_CASE("malformed lines report their line number") {
  test::TempDir tmp("jsonl-bad");
  const auto path = tmp.path() / "bad.jsonl";
  {
    std::ofstream out(path);
    out << gen::to_json_line(test::random_small_instance(1)) << "\n";
    out << "{not json}\n";
  }
  try {
    gen::read_jsonl(path);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("candidate payload carries exactly requirements and catalog") {
  const auto inst = test::random_small_instance(77);
  const auto payload = gen::candidate_payload(inst);
  CHECK(payload.find("\"requirements\"") != std::string::npos);
  CHECK(payload.find("\"catalog\"") != std::string::npos);
  CHECK(payload.find("\"uuid\"") == std::string::npos);
}

TEST_SUITE_END();
