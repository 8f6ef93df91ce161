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

#include "helpers.hpp"
#include "sds/generate.hpp"
#include "sds/sandbox.hpp"
#include "sds/templates.hpp"

using namespace sds;

namespace {

Instance small_instance(std::uint64_t seed = 99) {
  gen::GenSpec spec = gen::GenSpec::of(Family::kDenseDeceptive, 1.0, seed);
  spec.params.n_min = 10;
  spec.params.n_max = 12;
  return gen::generate(spec, 1).front();
}

}  // namespace

TEST_SUITE_BEGIN("sandbox");

TEST_CASE("source canonicalization and hashing") {
  CHECK(sandbox::canonicalize_source("a  \r\nb\t\rc\n") == "a\nb\nc");
  CHECK(sandbox::canonicalize_source("") == "");

  const auto lf = sandbox::Candidate::of("x = 1\ny = 2\n");
  const auto crlf = sandbox::Candidate::of("x = 1\r\ny = 2\r\n");
  const auto trailing = sandbox::Candidate::of("x = 1   \ny = 2\t\n");
  CHECK(lf.source_hash == crlf.source_hash);
  CHECK(lf.source_hash == trailing.source_hash);
  CHECK(lf.source_hash.size() == 64);

  const auto different = sandbox::Candidate::of("x = 3\n");
  CHECK(different.source_hash != lf.source_hash);
}

TEST_CASE("code block extraction requires exactly one block") {
  const auto one = sandbox::extract_code_block("<think>plan</think><code>x = 1</code>");
  REQUIRE(one.has_value());
  CHECK(one->source_text == "x = 1");

  CHECK(!sandbox::extract_code_block("no blocks here").has_value());
  CHECK(!sandbox::extract_code_block("<code>a</code><code>b</code>").has_value());
  CHECK(!sandbox::extract_code_block("<code>unterminated").has_value());
}

TEST_CASE("outcome classification covers the six cases") {
  const auto inst = small_instance();
  const auto runner = sandbox::RunnerConfig::python3();
  auto classify = [&](const std::string& src) {
    return sandbox::run_candidate(sandbox::Candidate::of(src), inst, 1.5, runner);
  };

  SUBCASE("valid empty selection when the lower bound is zero") {
    REQUIRE(inst.cardinality_lo() == 0);
    const auto run = classify(
        "import sys\nsys.stdin.read()\n"
        "print('{\"selection\":{\"variables\":[]}}')\n");
    CHECK(run.outcome == sandbox::Outcome::kValid);
    CHECK(run.score == 0.0);
    CHECK(run.n_vio == 0);
  }
  SUBCASE("infinite loop times out near the deadline") {
    const auto run = classify("while True:\n    pass\n");
    CHECK(run.outcome == sandbox::Outcome::kTimeout);
    CHECK(run.elapsed_sec >= 1.5);
    CHECK(run.elapsed_sec <= 2.0);
  }
  SUBCASE("crash at runtime") {
    const auto run = classify("import sys\nsys.stdin.read()\nraise ValueError('x')\n");
    CHECK(run.outcome == sandbox::Outcome::kRuntimeError);
    CHECK(run.stderr_excerpt.find("ValueError") != std::string::npos);
  }
  SUBCASE("unparseable source is a syntax error") {
    const auto run = classify("def broken(:\n    pass\n");
    CHECK(run.outcome == sandbox::Outcome::kSyntaxError);
  }
  SUBCASE("garbage stdout is a json parse error") {
    const auto run = classify("import sys\nsys.stdin.read()\nprint('not json')\n");
    CHECK(run.outcome == sandbox::Outcome::kJsonParseError);
  }
  SUBCASE("parsed but violating selection") {
    const auto run = classify(
        "import sys, json\n"
        "d = json.load(sys.stdin)\n"
        "n = d['requirements']['n_variables']\n"
        "print(json.dumps({'selection': {'variables': list(range(n))}}))\n");
    CHECK(run.outcome == sandbox::Outcome::kConstraintViolation);
    CHECK(run.n_vio > 0);
    CHECK(run.selection.has_value());
  }
}

TEST_CASE("without a compile phase, syntax failures map to runtime") {
  const auto inst = small_instance();
  sandbox::RunnerConfig runner = sandbox::RunnerConfig::python3();
  runner.compile_cmd.clear();
  const auto run = sandbox::run_candidate(
      sandbox::Candidate::of("def broken(:\n    pass\n"), inst, 1.5, runner);
  CHECK(run.outcome == sandbox::Outcome::kRuntimeError);
}

TEST_CASE("reported scores come from an independent recomputation") {
  const auto inst = small_instance();
  // The candidate reports a wildly wrong score field; only the selection
  // counts.
  const auto run = sandbox::run_candidate(
      sandbox::Candidate::of(
          "import sys, json\n"
          "sys.stdin.read()\n"
          "print(json.dumps({'selection': {'variables': [0]}, 'score': 1e9}))\n"),
      inst, 1.5, sandbox::RunnerConfig::python3());
  REQUIRE(run.selection.has_value());
  CHECK(*run.score == score(inst, *run.selection));
  CHECK(*run.score != 1e9);
}

TEST_CASE("trailing output after the first json document is tolerated") {
  const auto inst = small_instance();
  const auto run = sandbox::run_candidate(
      sandbox::Candidate::of(
          "import sys\nsys.stdin.read()\n"
          "print('{\"selection\":{\"variables\":[]}}')\nprint('debug: done')\n"),
      inst, 1.5, sandbox::RunnerConfig::python3());
  CHECK(run.outcome == sandbox::Outcome::kValid);
}

TEST_CASE("out-of-range or malformed selections are schema failures") {
  const auto inst = small_instance();
  const auto runner = sandbox::RunnerConfig::python3();
  const auto bad_index = sandbox::run_candidate(
      sandbox::Candidate::of("import sys\nsys.stdin.read()\n"
                             "print('{\"selection\":{\"variables\":[9999]}}')\n"),
      inst, 1.5, runner);
  CHECK(bad_index.outcome == sandbox::Outcome::kJsonParseError);

  const auto wrong_shape = sandbox::run_candidate(
      sandbox::Candidate::of("import sys\nsys.stdin.read()\n"
                             "print('{\"vars\":[]}')\n"),
      inst, 1.5, runner);
  CHECK(wrong_shape.outcome == sandbox::Outcome::kJsonParseError);
}

TEST_CASE("misconfigured runners raise a harness error") {
  const auto inst = small_instance();
  sandbox::RunnerConfig runner;
  runner.run_cmd = {"/nonexistent/interpreter", "{file}"};
  runner.compile_cmd.clear();
  CHECK_THROWS_AS(sandbox::run_candidate(sandbox::Candidate::of("x"), inst, 1.0,
                                         runner),
                  HarnessError);
}

TEST_CASE("batches preserve input order and worker-count invariance") {
  gen::GenSpec spec = gen::GenSpec::of(Family::kDenseDeceptive, 1.0, 4);
  spec.params.n_min = 10;
  spec.params.n_max = 12;
  const auto instances = gen::generate(spec, 6);
  const auto cand = sandbox::Candidate::of(
      std::string(templates::reference_sa_source()), "reference");
  const auto runner = sandbox::RunnerConfig::python3();

  const auto serial = sandbox::run_batch(cand, instances, 3.0, 1, runner);
  const auto parallel = sandbox::run_batch(cand, instances, 3.0, 8, runner);
  REQUIRE(serial.size() == instances.size());
  for (std::size_t i = 0; i < instances.size(); ++i) {
    CHECK(serial[i].instance_uuid == instances[i].uuid());
    CHECK(serial[i].outcome == parallel[i].outcome);
    CHECK(serial[i].n_vio == parallel[i].n_vio);
    if (serial[i].selection) {
      CHECK(serial[i].selection->variables() == parallel[i].selection->variables());
    }
  }

  CHECK(sandbox::run_batch(cand, {}, 1.0, 4, runner).empty());
  CHECK_THROWS_AS(sandbox::run_batch(cand, instances, 1.0, 0, runner),
                  ContractViolation);
}

TEST_SUITE_END();
