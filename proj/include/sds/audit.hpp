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

#ifndef SDS_AUDIT_HPP_
#define SDS_AUDIT_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sds::audit {

// All classifiers below are token/regex heuristics over the candidate
// language's surface syntax (Python by default). They characterize structure,
// not semantics; results are labeled heuristic and the pattern set can be
// retargeted through a JSON pattern file (see `AuditPatterns`).

// Regex pattern set driving the detectors. Patterns match against the
// lowercased code text (ECMAScript syntax).
struct AuditPatterns {
  std::string temperature_var;
  std::string cooling_update;
  std::string cooling_named;
  std::string metropolis;
  std::string guard;
  std::string best_assign;
  std::string best_compare;
  std::string move_toggle;
  std::string move_add;
  std::string move_remove;
  std::string fixed_loop;
  std::string dynamic_loop;
  std::string temperature_value;
  std::string iteration_alias;

  static const AuditPatterns& defaults();
  static AuditPatterns from_json(const std::string& json_text);
  std::string to_json() const;
};

// True iff all three fire: a temperature variable, a multiplicative cooling
// update, and an exponential Metropolis-style acceptance expression.
bool is_sa_like(std::string_view code_text,
                const AuditPatterns& patterns = AuditPatterns::defaults());

enum class Acceptance { kCurrentState, kGlobalBest, kMixed, kUnresolved };
const char* acceptance_name(Acceptance a);

// Classifies what the Metropolis expression compares the proposal against,
// by inspecting the exp(...) numerator (following one level of delta-variable
// indirection to its definition).
Acceptance classify_acceptance(
    std::string_view code_text,
    const AuditPatterns& patterns = AuditPatterns::defaults());

enum class Bucket {
  kBestBug,
  kAmbiguousAcceptance,
  kNoGuard,
  kNoBestTracking,
  kWeakMoves,
  kStructurallyComplete,
};
const char* bucket_name(Bucket b);

// Exclusive structural taxonomy over SA-like code; nullopt for code that is
// not SA-like. Global-best acceptance wins regardless of other features.
std::optional<Bucket> structural_taxonomy(
    std::string_view code_text,
    const AuditPatterns& patterns = AuditPatterns::defaults());

struct SaHyperparams {
  std::optional<double> t0;
  std::optional<double> cooling;
  std::optional<long> iterations;
  bool dynamic_termination = false;
};

struct TemplateMatch {
  bool matches = false;
  SaHyperparams params;
};

// Template conformance: constraint guard and Metropolis rule present, with
// extracted hyperparameters satisfying T0 >= 100, 0.8 <= cooling < 1.0 and
// (iterations >= 100 or dynamic termination).
TemplateMatch matches_sa_template(
    std::string_view code_text,
    const AuditPatterns& patterns = AuditPatterns::defaults());

// Per-code audit record plus aggregate bucket counts, as JSON.
struct CodeAudit {
  std::string label;
  bool sa_like = false;
  Acceptance acceptance = Acceptance::kUnresolved;
  std::optional<Bucket> bucket;
  TemplateMatch template_match;
};

CodeAudit audit_code(std::string_view code_text, std::string label = "",
                     const AuditPatterns& patterns = AuditPatterns::defaults());

std::string audit_report_json(const std::vector<CodeAudit>& audits);

}  // namespace sds::audit

#endif  // SDS_AUDIT_HPP_
