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

#ifndef SDS_SANDBOX_HPP_
#define SDS_SANDBOX_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sds/core.hpp"

namespace sds::sandbox {

// An external solver program, stored canonicalized: line endings normalized
// to \n and trailing whitespace stripped per line. `source_hash` is the
// SHA-256 hex digest of the canonical text.
struct Candidate {
  std::string source_text;
  std::string source_hash;
  std::string origin;

  static Candidate of(std::string source, std::string origin = "");
};

// Canonicalization and hashing, exposed for dedup pipelines.
std::string canonicalize_source(std::string_view text);
std::string sha256_hex(std::string_view data);

// Extracts the body of the single <code>...</code> block in a generation.
// Returns nullopt when there are zero or multiple blocks.
std::optional<Candidate> extract_code_block(std::string_view generation_text,
                                            std::string origin = "");

enum class Outcome {
  kValid,
  kTimeout,
  kConstraintViolation,
  kSyntaxError,
  kRuntimeError,
  kJsonParseError,
};

const char* outcome_name(Outcome o);  // table vocabulary: none, timeout, ...

// How candidate programs are launched. Commands are argv vectors; the token
// "{file}" is replaced with the path of the candidate source file. When
// `compile_cmd` is set it runs first and a nonzero exit classifies as
// SyntaxError; without it no SyntaxError can be distinguished and every
// nonzero exit maps to RuntimeError.
struct RunnerConfig {
  std::vector<std::string> run_cmd = {"python3", "{file}"};
  std::vector<std::string> compile_cmd = {};
  std::uint64_t memory_limit_bytes = 2ull << 30;  // RLIMIT_AS for the child
  std::size_t stderr_excerpt_limit = 2048;
  std::size_t stdout_limit = 16ull << 20;

  static RunnerConfig python3();  // python3 runner with a compile-only phase
};

// Outcome of executing one candidate on one instance.
struct CandidateRun {
  std::string instance_uuid;
  Outcome outcome = Outcome::kRuntimeError;
  std::optional<Selection> selection;   // present for Valid/ConstraintViolation
  std::optional<double> score;          // recomputed by core, never trusted
  int n_vio = 0;
  double elapsed_sec = 0.0;
  std::string stderr_excerpt;
};

// Runs one candidate against one instance under the JSON-over-pipes
// contract: the child reads {"requirements": ..., "catalog": ...} on stdin
// and must print {"selection": {"variables": [...]}} as the first JSON
// document on stdout (trailing output after it is tolerated). The child is
// killed at `timeout_sec` wall-clock seconds. Classification is total and
// exclusive over the six outcomes; a misconfigured runner (command not
// executable) raises HarnessError instead.
CandidateRun run_candidate(const Candidate& cand, const Instance& inst,
                           double timeout_sec, const RunnerConfig& runner);

// Runs one candidate over many instances on a pool of worker threads, each
// run in its own process with its own scratch directory. Results are ordered
// by input order regardless of completion order; individual failures are
// reported per-run and never abort the batch.
std::vector<CandidateRun> run_batch(const Candidate& cand,
                                    const std::vector<Instance>& instances,
                                    double timeout_sec, int workers,
                                    const RunnerConfig& runner);

}  // namespace sds::sandbox

#endif  // SDS_SANDBOX_HPP_
