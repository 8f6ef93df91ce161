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

#include "sds/audit.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <regex>

#include <json.hpp>

#include "sds/errors.hpp"

namespace sds::audit {
namespace {

std::string lowercased(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool search(const std::string& code, const std::string& pattern) {
  return std::regex_search(code, std::regex(pattern));
}

std::optional<std::string> first_group(const std::string& code,
                                       const std::string& pattern) {
  std::smatch m;
  if (std::regex_search(code, m, std::regex(pattern)) && m.size() > 1) {
    for (std::size_t g = 1; g < m.size(); ++g) {
      if (m[g].matched) return m[g].str();
    }
  }
  return std::nullopt;
}

std::optional<double> parse_number(const std::string& text) {
  try {
    std::size_t used = 0;
    const double value = std::stod(text, &used);
    if (used == text.size()) return value;
  } catch (const std::exception&) {
  }
  return std::nullopt;
}

bool is_identifier(const std::string& text) {
  if (text.empty() || (!std::isalpha(static_cast<unsigned char>(text[0])) &&
                       text[0] != '_')) {
    return false;
  }
  return std::all_of(text.begin(), text.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_';
  });
}

// Numeric value assigned to `name`, e.g. resolving range(n_iterations).
std::optional<double> lookup_numeric(const std::string& code,
                                     const std::string& name,
                                     const std::string& alias_pattern) {
  std::string pattern = alias_pattern;
  const auto pos = pattern.find("{name}");
  if (pos == std::string::npos) return std::nullopt;
  pattern.replace(pos, 6, name);
  if (const auto text = first_group(code, pattern)) return parse_number(*text);
  return std::nullopt;
}

std::string trim(const std::string& s) {
  const auto from = s.find_first_not_of(" \t()");
  const auto to = s.find_last_not_of(" \t()");
  if (from == std::string::npos) return "";
  return s.substr(from, to - from + 1);
}

// Arguments of every exp(...) call, with balanced parentheses.
std::vector<std::string> exp_arguments(const std::string& code) {
  std::vector<std::string> args;
  const std::regex head(R"(\bexp\s*\()");
  auto begin = std::sregex_iterator(code.begin(), code.end(), head);
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    std::size_t pos = static_cast<std::size_t>(it->position()) +
                      static_cast<std::size_t>(it->length());
    int depth = 1;
    std::string arg;
    while (pos < code.size() && depth > 0) {
      const char c = code[pos];
      if (c == '(') ++depth;
      if (c == ')') --depth;
      if (depth > 0) arg.push_back(c);
      ++pos;
    }
    if (depth == 0) args.push_back(arg);
  }
  return args;
}

// The reference term of an acceptance expression: the operand after the last
// top-level '-' (delta = new - reference), falling back to the whole text.
std::string reference_term(const std::string& expr) {
  int depth = 0;
  std::size_t split = std::string::npos;
  for (std::size_t i = 0; i < expr.size(); ++i) {
    const char c = expr[i];
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == '-' && depth == 0) split = i;
  }
  return split == std::string::npos ? expr : expr.substr(split + 1);
}

enum class Vote { kCurrent, kBest, kUnresolved };

Vote vote_for_expression(const std::string& code, std::string expr, int hops) {
  expr = trim(expr);
  const std::string ref = trim(reference_term(expr));
  if (ref.find("best") != std::string::npos) return Vote::kBest;
  if (ref.find("curr") != std::string::npos) return Vote::kCurrent;
  if (expr.find("best") != std::string::npos) return Vote::kBest;
  if (expr.find("curr") != std::string::npos) return Vote::kCurrent;
  if (hops > 0 && is_identifier(ref)) {
    // Follow the delta variable to its definition.
    if (const auto rhs = first_group(code, "\\b" + ref + R"(\s*=\s*([^\n]+))")) {
      return vote_for_expression(code, *rhs, hops - 1);
    }
  }
  return Vote::kUnresolved;
}

}  // namespace

const AuditPatterns& AuditPatterns::defaults() {
  static const AuditPatterns patterns = [] {
    AuditPatterns p;
    p.temperature_var = R"(\b(?:temperature|temp|t|t0)\s*=\s*[0-9])";
    p.cooling_update =
        R"((?:\b(?:temperature|temp|t)\w*\s*\*=)|(?:\b(temperature|temp|t)(\w*)\s*=\s*\1\2\s*\*))";
    p.cooling_named = R"(\b(?:cooling|alpha)\w*\s*=\s*([0-9]*\.?[0-9]+))";
    p.metropolis =
        R"((?:random\.random\(\)|random\.uniform\([^)]*\)|\brand\(\))\s*<\s*(?:math\.|np\.)?exp\s*\()";
    p.guard = R"((?:while|if)\s+(?:not\s+)?\w*(?:feasib|valid)\w*\s*\()";
    p.best_assign = R"(\bbest\w*\s*=)";
    p.best_compare = R"((?:[<>]=?\s*best\w*)|(?:\bbest\w*\s*[<>]=?))";
    p.move_toggle = R"(\[\s*\w+\s*\]\s*=\s*(?:not\s|1\s*-))";
    p.move_add = R"(\.(?:append|add|insert)\s*\()";
    p.move_remove = R"(\.(?:remove|discard|pop)\s*\()";
    p.fixed_loop = R"(for\s+\w+\s+in\s+range\s*\(\s*([0-9]+|[a-z_][a-z0-9_]*)\s*\))";
    p.dynamic_loop = R"(while\s+(?:temperature|temp|t)\w*\s*>)";
    p.temperature_value = R"(\b(?:temperature|temp|t|t0)\s*=\s*([0-9]+(?:\.[0-9]*)?))";
    p.iteration_alias = R"(\b{name}\s*=\s*([0-9]+(?:\.[0-9]*)?))";
    return p;
  }();
  return patterns;
}

AuditPatterns AuditPatterns::from_json(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("audit patterns: ") + e.what());
  }
  AuditPatterns p = defaults();
  auto load = [&](const char* key, std::string& slot) {
    if (doc.contains(key)) slot = doc[key].get<std::string>();
  };
  load("temperature_var", p.temperature_var);
  load("cooling_update", p.cooling_update);
  load("cooling_named", p.cooling_named);
  load("metropolis", p.metropolis);
  load("guard", p.guard);
  load("best_assign", p.best_assign);
  load("best_compare", p.best_compare);
  load("move_toggle", p.move_toggle);
  load("move_add", p.move_add);
  load("move_remove", p.move_remove);
  load("fixed_loop", p.fixed_loop);
  load("dynamic_loop", p.dynamic_loop);
  load("temperature_value", p.temperature_value);
  load("iteration_alias", p.iteration_alias);
  return p;
}

std::string AuditPatterns::to_json() const {
  nlohmann::ordered_json doc;
  doc["temperature_var"] = temperature_var;
  doc["cooling_update"] = cooling_update;
  doc["cooling_named"] = cooling_named;
  doc["metropolis"] = metropolis;
  doc["guard"] = guard;
  doc["best_assign"] = best_assign;
  doc["best_compare"] = best_compare;
  doc["move_toggle"] = move_toggle;
  doc["move_add"] = move_add;
  doc["move_remove"] = move_remove;
  doc["fixed_loop"] = fixed_loop;
  doc["dynamic_loop"] = dynamic_loop;
  doc["temperature_value"] = temperature_value;
  doc["iteration_alias"] = iteration_alias;
  return doc.dump(2);
}

const char* acceptance_name(Acceptance a) {
  switch (a) {
    case Acceptance::kCurrentState:
      return "current_state";
    case Acceptance::kGlobalBest:
      return "global_best";
    case Acceptance::kMixed:
      return "mixed";
    default:
      return "unresolved";
  }
}

const char* bucket_name(Bucket b) {
  switch (b) {
    case Bucket::kBestBug:
      return "best_bug";
    case Bucket::kAmbiguousAcceptance:
      return "ambiguous_acceptance";
    case Bucket::kNoGuard:
      return "current_ok_no_guard";
    case Bucket::kNoBestTracking:
      return "current_ok_no_best_tracking";
    case Bucket::kWeakMoves:
      return "current_ok_guarded_but_weak_moves";
    default:
      return "current_ok_structurally_complete";
  }
}

bool is_sa_like(std::string_view code_text, const AuditPatterns& patterns) {
  const std::string code = lowercased(code_text);
  return search(code, patterns.temperature_var) &&
         search(code, patterns.cooling_update) &&
         search(code, patterns.metropolis);
}

Acceptance classify_acceptance(std::string_view code_text,
                               const AuditPatterns& patterns) {
  const std::string code = lowercased(code_text);
  if (!search(code, patterns.metropolis)) return Acceptance::kUnresolved;

  bool best_vote = false;
  bool current_vote = false;
  for (const auto& arg : exp_arguments(code)) {
    // Numerator of exp(delta / T): everything before the last top-level '/'.
    int depth = 0;
    std::size_t split = std::string::npos;
    for (std::size_t i = 0; i < arg.size(); ++i) {
      if (arg[i] == '(') ++depth;
      if (arg[i] == ')') --depth;
      if (arg[i] == '/' && depth == 0) split = i;
    }
    const std::string numerator =
        split == std::string::npos ? arg : arg.substr(0, split);
    switch (vote_for_expression(code, numerator, 2)) {
      case Vote::kBest:
        best_vote = true;
        break;
      case Vote::kCurrent:
        current_vote = true;
        break;
      default:
        break;
    }
  }
  if (best_vote && current_vote) return Acceptance::kMixed;
  if (best_vote) return Acceptance::kGlobalBest;
  if (current_vote) return Acceptance::kCurrentState;
  return Acceptance::kUnresolved;
}

std::optional<Bucket> structural_taxonomy(std::string_view code_text,
                                          const AuditPatterns& patterns) {
  if (!is_sa_like(code_text, patterns)) return std::nullopt;
  const std::string code = lowercased(code_text);

  const Acceptance acceptance = classify_acceptance(code_text, patterns);
  if (acceptance == Acceptance::kGlobalBest) return Bucket::kBestBug;
  if (acceptance != Acceptance::kCurrentState) {
    return Bucket::kAmbiguousAcceptance;
  }
  if (!search(code, patterns.guard)) return Bucket::kNoGuard;
  if (!(search(code, patterns.best_assign) &&
        search(code, patterns.best_compare))) {
    return Bucket::kNoBestTracking;
  }
  const bool two_way = search(code, patterns.move_toggle) ||
                       (search(code, patterns.move_add) &&
                        search(code, patterns.move_remove));
  if (!two_way) return Bucket::kWeakMoves;
  return Bucket::kStructurallyComplete;
}

TemplateMatch matches_sa_template(std::string_view code_text,
                                  const AuditPatterns& patterns) {
  const std::string code = lowercased(code_text);
  TemplateMatch match;

  if (const auto t0 = first_group(code, patterns.temperature_value)) {
    match.params.t0 = parse_number(*t0);
  }

  // Cooling: literal `t *= 0.99`, aliased `t *= cooling_rate`, or a named
  // cooling constant.
  if (const auto factor = first_group(
          code, R"(\b(?:temperature|temp|t)\w*\s*\*=\s*([a-z0-9_.]+))")) {
    if (const auto value = parse_number(*factor)) {
      match.params.cooling = value;
    } else if (is_identifier(*factor)) {
      match.params.cooling =
          lookup_numeric(code, *factor, patterns.iteration_alias);
    }
  }
  if (!match.params.cooling) {
    if (const auto named = first_group(code, patterns.cooling_named)) {
      match.params.cooling = parse_number(*named);
    }
  }

  match.params.dynamic_termination = search(code, patterns.dynamic_loop);
  // Several loops usually appear (comprehensions, scans); the iteration count
  // is the first range() argument that resolves to a literal number.
  {
    const std::regex loop(patterns.fixed_loop);
    for (auto it = std::sregex_iterator(code.begin(), code.end(), loop);
         it != std::sregex_iterator(); ++it) {
      const std::string arg = (*it)[1].str();
      if (const auto value = parse_number(arg)) {
        match.params.iterations = static_cast<long>(*value);
        break;
      }
      if (is_identifier(arg)) {
        if (const auto aliased =
                lookup_numeric(code, arg, patterns.iteration_alias)) {
          match.params.iterations = static_cast<long>(*aliased);
          break;
        }
      }
    }
  }

  const bool guard = search(code, patterns.guard);
  const bool metropolis = search(code, patterns.metropolis);
  const bool t0_ok = match.params.t0 && *match.params.t0 >= 100.0;
  const bool cooling_ok = match.params.cooling && *match.params.cooling >= 0.8 &&
                          *match.params.cooling < 1.0;
  const bool iters_ok = match.params.dynamic_termination ||
                        (match.params.iterations && *match.params.iterations >= 100);
  match.matches = guard && metropolis && t0_ok && cooling_ok && iters_ok;
  return match;
}

CodeAudit audit_code(std::string_view code_text, std::string label,
                     const AuditPatterns& patterns) {
  CodeAudit audit;
  audit.label = std::move(label);
  audit.sa_like = is_sa_like(code_text, patterns);
  audit.acceptance = classify_acceptance(code_text, patterns);
  audit.bucket = structural_taxonomy(code_text, patterns);
  audit.template_match = matches_sa_template(code_text, patterns);
  return audit;
}

std::string audit_report_json(const std::vector<CodeAudit>& audits) {
  nlohmann::ordered_json doc;
  doc["codes"] = nlohmann::ordered_json::array();
  std::map<std::string, int> bucket_counts;
  int sa_like = 0;
  int template_matches = 0;
  for (const auto& a : audits) {
    nlohmann::ordered_json entry;
    entry["label"] = a.label;
    entry["sa_like"] = a.sa_like;
    entry["acceptance"] = acceptance_name(a.acceptance);
    entry["bucket"] =
        a.bucket ? nlohmann::json(bucket_name(*a.bucket)) : nlohmann::json();
    entry["template_match"] = a.template_match.matches;
    nlohmann::ordered_json params;
    if (a.template_match.params.t0) params["t0"] = *a.template_match.params.t0;
    if (a.template_match.params.cooling) {
      params["cooling"] = *a.template_match.params.cooling;
    }
    if (a.template_match.params.iterations) {
      params["iterations"] = *a.template_match.params.iterations;
    }
    params["dynamic_termination"] = a.template_match.params.dynamic_termination;
    entry["hyperparams"] = std::move(params);
    doc["codes"].push_back(std::move(entry));

    sa_like += a.sa_like ? 1 : 0;
    template_matches += a.template_match.matches ? 1 : 0;
    if (a.bucket) ++bucket_counts[bucket_name(*a.bucket)];
  }
  doc["total"] = audits.size();
  doc["sa_like"] = sa_like;
  doc["template_matches"] = template_matches;
  doc["bucket_counts"] = bucket_counts;
  return doc.dump(2);
}

}  // namespace sds::audit
