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

#include "sds/reward.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

namespace sds::reward {
namespace {

constexpr double kEps = 1e-9;

// Graph-awareness keyword set matched against lowercased code.
constexpr const char* kGraphKeywords[] = {
    "networkx", "adjacency",   "neighbor",  "interactions", "precedence",
    "mutex",    "recursion",   "memoization", "backtrack",  "graph",
    "edge",     "vertex",      "topological", "dag",
};

std::string lowercased(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool contains(const std::string& haystack, std::string_view needle) {
  return haystack.find(needle) != std::string::npos;
}

bool execution_failed(sandbox::Outcome outcome) {
  return outcome == sandbox::Outcome::kTimeout ||
         outcome == sandbox::Outcome::kSyntaxError ||
         outcome == sandbox::Outcome::kRuntimeError;
}

double clamp01(double x) { return std::max(0.0, std::min(1.0, x)); }

// Whitespace-token 4-gram set of one code text.
std::set<std::string> token_4grams(const std::string& code) {
  std::istringstream stream(code);
  std::vector<std::string> tokens;
  std::string token;
  while (stream >> token) tokens.push_back(token);
  std::set<std::string> grams;
  if (tokens.size() < 4) return grams;
  for (std::size_t i = 0; i + 4 <= tokens.size(); ++i) {
    grams.insert(tokens[i] + '\x1f' + tokens[i + 1] + '\x1f' + tokens[i + 2] +
                 '\x1f' + tokens[i + 3]);
  }
  return grams;
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 1.0;  // equal (both empty) sets
  std::size_t inter = 0;
  for (const auto& g : a) inter += b.count(g);
  const std::size_t uni = a.size() + b.size() - inter;
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace

TrainingProgress TrainingProgress::of(double t) {
  return TrainingProgress{std::max(0.0, std::min(1.0, t))};
}

double curriculum_alpha(TrainingProgress progress) {
  return progress.t < 0.4 ? 1.0 : 0.2;
}

int format_reward(std::string_view generation_text) {
  const std::string text(generation_text);
  auto count_of = [&](std::string_view needle) {
    std::size_t count = 0;
    for (auto pos = text.find(needle); pos != std::string::npos;
         pos = text.find(needle, pos + needle.size())) {
      ++count;
    }
    return count;
  };
  if (count_of("<think>") != 1 || count_of("</think>") != 1 ||
      count_of("<code>") != 1 || count_of("</code>") != 1) {
    return 0;
  }
  const auto think_open = text.find("<think>");
  const auto think_close = text.find("</think>");
  const auto code_open = text.find("<code>");
  const auto code_close = text.find("</code>");
  return (think_open < think_close && think_close < code_open &&
          code_open < code_close)
             ? 1
             : 0;
}

StructureSignals structure_indicator(std::string_view code_text) {
  const std::string code = lowercased(code_text);
  StructureSignals signals;
  for (const char* keyword : kGraphKeywords) {
    if (contains(code, keyword)) {
      signals.graph_indicator = 1;
      break;
    }
  }
  if (contains(code, "sorted") && contains(code, "weight") &&
      !contains(code, "interactions")) {
    signals.lazy_sort_flag = 1;
  }
  return signals;
}

ExecReward exec_reward(const sandbox::CandidateRun& run,
                       std::string_view code_text, TrainingProgress progress) {
  ExecReward r;
  if (execution_failed(run.outcome)) return r;  // all-zero on failure

  const StructureSignals signals = structure_indicator(code_text);
  r.syntax = 0.1;
  r.schema = run.selection ? 0.1 : 0.0;
  r.structure = 0.2 * curriculum_alpha(progress) * signals.graph_indicator;
  if (run.selection) {
    r.feasibility = run.n_vio == 0 ? 0.3 : -std::min(0.2, 0.03 * run.n_vio);
  }
  r.lazy_penalty = signals.lazy_sort_flag ? -0.2 : 0.0;
  r.total = r.syntax + r.schema + r.structure + r.feasibility + r.lazy_penalty;
  return r;
}

double normalize_score(const Instance& inst, double raw_score,
                       NormalizationVariant variant) {
  double abs_weights = 0.0;
  std::vector<double> positive_weights;
  for (double w : inst.weights()) {
    abs_weights += std::abs(w);
    if (w > 0) positive_weights.push_back(w);
  }
  double abs_interactions = 0.0;
  std::vector<double> positive_interactions;
  for (const auto& [pair, w] : inst.interactions()) {
    abs_interactions += std::abs(w);
    if (w > 0) positive_interactions.push_back(w);
  }

  if (abs_weights <= kEps && abs_interactions <= kEps) {
    // Degenerate objective: magnitude-based squashing, 0 maps to 0.5.
    if (std::abs(raw_score) <= kEps) return 0.5;
    return 0.5 * (1.0 + raw_score / (1.0 + std::abs(raw_score)));
  }

  const auto upper = static_cast<std::size_t>(inst.cardinality_hi());
  std::sort(positive_weights.rbegin(), positive_weights.rend());
  double weight_max = 0.0;
  for (std::size_t i = 0; i < std::min(positive_weights.size(), upper); ++i) {
    weight_max += positive_weights[i];
  }

  const std::size_t max_pairs = upper * (upper > 0 ? upper - 1 : 0) / 2;
  const std::size_t usable_pairs = std::min(positive_interactions.size(), max_pairs);
  double interaction_max = 0.0;
  if (!positive_interactions.empty()) {
    if (variant == NormalizationVariant::kMeanPositiveInteractions) {
      double mean = 0.0;
      for (double w : positive_interactions) mean += w;
      mean /= static_cast<double>(positive_interactions.size());
      interaction_max = mean * static_cast<double>(usable_pairs);
    } else {
      std::sort(positive_interactions.rbegin(), positive_interactions.rend());
      for (std::size_t i = 0; i < usable_pairs; ++i) {
        interaction_max += positive_interactions[i];
      }
    }
  }

  const double baseline = weight_max + interaction_max;
  if (baseline > kEps) return raw_score / baseline;
  return raw_score / std::max(abs_weights + abs_interactions, 1.0);
}

double nominal_reward(const Instance& inst, const sandbox::CandidateRun& run,
                      GateMode gate, NormalizationVariant variant) {
  const double raw = run.score.value_or(0.0);
  const double normalized = normalize_score(inst, raw, variant);
  if (gate == GateMode::kHard) {
    return run.n_vio > 0 ? 0.0 : clamp01(normalized);
  }
  return clamp01(normalized - 0.15 * run.n_vio);
}

double intermediate_score(const Instance& inst, double raw_score, int n_vio,
                          NormalizationVariant variant) {
  const double normalized = normalize_score(inst, raw_score, variant);
  return clamp01(normalized - std::min(static_cast<double>(n_vio), 1.0));
}

double oracle_anchor_reward(double delta_norm) {
  if (delta_norm > 0.001) return 1.0 + 10.0 * delta_norm;
  if (delta_norm < -0.001) return -0.5;
  return 0.0;
}

std::vector<double> diversity_penalty(
    const std::vector<std::string>& group_codes) {
  const std::size_t n = group_codes.size();
  std::vector<double> penalties(n, 0.0);
  if (n < 2) return penalties;

  std::vector<std::set<std::string>> grams;
  grams.reserve(n);
  for (const auto& code : group_codes) grams.push_back(token_4grams(code));

  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) sum += jaccard(grams[i], grams[j]);
    }
    penalties[i] = sum / static_cast<double>(n - 1);
  }
  return penalties;
}

double minimal_feasibility_reward(const sandbox::CandidateRun& run) {
  switch (run.outcome) {
    case sandbox::Outcome::kValid:
      return 1.0;
    case sandbox::Outcome::kConstraintViolation:
      return 0.5;
    case sandbox::Outcome::kJsonParseError:
      return 0.1;
    default:
      return 0.0;
  }
}

double composite_reward(int r_format, double r_exec, double r_nominal) {
  return kFormatWeight * r_format + kExecWeight * r_exec +
         kNominalWeight * r_nominal;
}

RewardBreakdown compute_breakdown(const Instance& inst,
                                  std::string_view generation_text,
                                  const sandbox::CandidateRun& run,
                                  TrainingProgress progress, GateMode gate,
                                  NormalizationVariant variant) {
  RewardBreakdown b;
  b.gate = gate;
  b.progress_t = progress.t;
  b.r_format = format_reward(generation_text);

  std::string code_text;
  if (auto cand = sandbox::extract_code_block(generation_text)) {
    code_text = cand->source_text;
  }
  b.exec = exec_reward(run, code_text, progress);
  b.r_nominal = sandbox::Outcome::kValid == run.outcome ||
                        sandbox::Outcome::kConstraintViolation == run.outcome ||
                        sandbox::Outcome::kJsonParseError == run.outcome
                    ? nominal_reward(inst, run, gate, variant)
                    : 0.0;
  b.composite = composite_reward(b.r_format, b.exec.total, b.r_nominal);
  return b;
}

std::string breakdown_to_json(const RewardBreakdown& b) {
  nlohmann::ordered_json doc;
  doc["format"] = b.r_format;
  doc["syntax"] = b.exec.syntax;
  doc["schema"] = b.exec.schema;
  doc["structure"] = b.exec.structure;
  doc["feasibility"] = b.exec.feasibility;
  doc["lazy_penalty"] = b.exec.lazy_penalty;
  doc["exec"] = b.exec.total;
  doc["nominal"] = b.r_nominal;
  doc["composite"] = b.composite;
  doc["gate"] = b.gate == GateMode::kHard ? "hard" : "soft";
  doc["progress_t"] = b.progress_t;
  return doc.dump();
}

}  // namespace sds::reward
