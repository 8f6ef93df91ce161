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

#include "sds/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "sds/rng.hpp"

namespace sds::eval {
namespace {

constexpr double kHardnessEps = 1e-10;

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text, std::size_t line_no) {
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double value = 0.0;
  const auto res =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ParseError("bad number \"" + text + "\"", line_no);
  }
  return value;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

void check_csv_safe(const std::string& field, const char* what) {
  if (field.find(',') != std::string::npos ||
      field.find('\n') != std::string::npos) {
    throw ContractViolation(std::string(what) + " may not contain ',' or newline");
  }
}

std::optional<sandbox::Outcome> outcome_from_name(const std::string& name) {
  for (int i = 0; i <= static_cast<int>(sandbox::Outcome::kJsonParseError); ++i) {
    const auto o = static_cast<sandbox::Outcome>(i);
    if (name == sandbox::outcome_name(o)) return o;
  }
  return std::nullopt;
}

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t count = 0;
};

MeanStd mean_std(const std::vector<double>& values) {
  MeanStd out;
  out.count = values.size();
  if (values.empty()) return out;
  for (double v : values) out.mean += v;
  out.mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - out.mean) * (v - out.mean);
  out.stddev = std::sqrt(var / static_cast<double>(values.size()));
  return out;
}

double six_digits(double value) {
  if (!std::isfinite(value)) return value;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", value);
  return std::strtod(buf, nullptr);
}

}  // namespace

const MethodRow* MethodRecord::find(const std::string& uuid) const {
  for (const auto& row : rows) {
    if (row.uuid == uuid) return &row;
  }
  return nullptr;
}

const char* difficulty_name(Difficulty d) {
  switch (d) {
    case Difficulty::kTrivial:
      return "Trivial";
    case Difficulty::kModerate:
      return "Moderate";
    default:
      return "Hard";
  }
}

double compute_vbs(const std::vector<MethodRecord>& records,
                   const std::string& uuid) {
  bool known = false;
  double best = kInfeasibleScore;
  for (const auto& record : records) {
    for (const auto& row : record.rows) {
      if (row.uuid != uuid) continue;
      known = true;
      if (row.feasible && row.score > best) best = row.score;
    }
  }
  if (!known) throw ContractViolation("compute_vbs: unknown uuid " + uuid);
  return best;
}

std::optional<double> gap(double vbs, double score, bool feasible, GapMode mode) {
  if (!feasible) {
    if (mode == GapMode::kConditionalFeasible) return std::nullopt;
    return 1.0;
  }
  if (vbs <= 0.0) return score >= vbs ? 0.0 : 1.0;
  const double g = (vbs - std::max(0.0, score)) / vbs;
  return std::max(0.0, std::min(1.0, g));
}

std::pair<double, Difficulty> classify_difficulty(double vbs,
                                                  double greedy_score,
                                                  bool greedy_feasible) {
  double hardness;
  if (vbs == kInfeasibleScore) {
    hardness = 1.0;  // every solver failed
  } else if (!greedy_feasible) {
    hardness = 1.0;  // greedy failed where some method succeeded
  } else {
    hardness = (vbs - greedy_score) / std::max(std::abs(vbs), kHardnessEps);
    hardness = std::max(0.0, std::min(1.0, hardness));
  }
  Difficulty difficulty = Difficulty::kHard;
  if (hardness < 0.01) {
    difficulty = Difficulty::kTrivial;
  } else if (hardness < 0.10) {
    difficulty = Difficulty::kModerate;
  }
  return {hardness, difficulty};
}

std::vector<InstanceVerdict> judge(const std::vector<MethodRecord>& records,
                                   const std::string& greedy_method) {
  // uuids in first-appearance order keep the output deterministic.
  std::vector<std::string> uuids;
  std::unordered_set<std::string> seen;
  for (const auto& record : records) {
    for (const auto& row : record.rows) {
      if (seen.insert(row.uuid).second) uuids.push_back(row.uuid);
    }
  }

  const MethodRecord* greedy = nullptr;
  for (const auto& record : records) {
    if (record.method == greedy_method) greedy = &record;
  }

  std::vector<InstanceVerdict> verdicts;
  verdicts.reserve(uuids.size());
  for (const auto& uuid : uuids) {
    InstanceVerdict v;
    v.uuid = uuid;
    v.vbs = compute_vbs(records, uuid);
    const MethodRow* greedy_row = greedy ? greedy->find(uuid) : nullptr;
    const bool greedy_ok = greedy_row != nullptr && greedy_row->feasible;
    const double greedy_score = greedy_ok ? greedy_row->score : kInfeasibleScore;
    std::tie(v.hardness, v.difficulty) =
        classify_difficulty(v.vbs, greedy_score, greedy_ok);
    for (const auto& record : records) {
      if (const MethodRow* row = record.find(uuid)) {
        if (auto g = gap(v.vbs, row->score, row->feasible,
                         GapMode::kConditionalFeasible)) {
          v.gap_by_method[record.method] = *g;
        }
      }
    }
    verdicts.push_back(std::move(v));
  }
  return verdicts;
}

PassKEstimate pass_at_k(
    const std::vector<std::vector<SampleOutcome>>& per_instance_samples, int k,
    int bootstrap_iterations, std::uint64_t seed) {
  if (per_instance_samples.empty()) {
    throw ContractViolation("pass_at_k: no instances");
  }
  const std::size_t n_samples = per_instance_samples.front().size();
  for (const auto& pool : per_instance_samples) {
    if (pool.size() != n_samples) {
      throw ContractViolation("pass_at_k: ragged sample pools");
    }
  }
  if (k < 1 || static_cast<std::size_t>(k) > n_samples) {
    throw ContractViolation("pass_at_k: k must be in [1, N]");
  }
  if (bootstrap_iterations < 1) {
    throw ContractViolation("pass_at_k: bootstrap iterations must be >= 1");
  }

  Rng rng(seed);
  std::vector<int> indices(n_samples);
  std::vector<double> pass_per_iter;
  std::vector<double> gap_per_iter;
  pass_per_iter.reserve(static_cast<std::size_t>(bootstrap_iterations));
  gap_per_iter.reserve(static_cast<std::size_t>(bootstrap_iterations));

  for (int b = 0; b < bootstrap_iterations; ++b) {
    double pass_sum = 0.0;
    double gap_sum = 0.0;
    for (const auto& pool : per_instance_samples) {
      for (std::size_t i = 0; i < n_samples; ++i) indices[i] = static_cast<int>(i);
      bool any_feasible = false;
      double min_gap = 1.0;
      // Partial Fisher-Yates: the first k entries are a uniform draw
      // without replacement.
      for (int j = 0; j < k; ++j) {
        const auto swap_with = static_cast<std::size_t>(
            rng.uniform_int(j, static_cast<std::int64_t>(n_samples) - 1));
        std::swap(indices[static_cast<std::size_t>(j)], indices[swap_with]);
        const SampleOutcome& s =
            pool[static_cast<std::size_t>(indices[static_cast<std::size_t>(j)])];
        any_feasible = any_feasible || s.feasible;
        min_gap = std::min(min_gap, s.gap);
      }
      pass_sum += any_feasible ? 1.0 : 0.0;
      gap_sum += any_feasible ? min_gap : 1.0;
    }
    const auto m = static_cast<double>(per_instance_samples.size());
    pass_per_iter.push_back(pass_sum / m);
    gap_per_iter.push_back(gap_sum / m);
  }

  const MeanStd pass = mean_std(pass_per_iter);
  const MeanStd gaps = mean_std(gap_per_iter);
  return PassKEstimate{k, pass.mean, pass.stddev, gaps.mean, gaps.stddev};
}

MethodRecord best_of_n_collapse(const std::vector<MethodRecord>& samples,
                                const std::vector<MethodRecord>& vbs_reference,
                                const std::string& method_name) {
  MethodRecord collapsed;
  collapsed.method = method_name;
  if (samples.empty()) return collapsed;

  std::vector<std::string> uuids;
  std::unordered_set<std::string> seen;
  for (const auto& record : samples) {
    for (const auto& row : record.rows) {
      if (seen.insert(row.uuid).second) uuids.push_back(row.uuid);
    }
  }

  for (const auto& uuid : uuids) {
    const double vbs = compute_vbs(vbs_reference, uuid);
    const MethodRow* best_row = nullptr;
    double best_gap = 2.0;
    const MethodRow* first_row = nullptr;
    for (const auto& record : samples) {
      const MethodRow* row = record.find(uuid);
      if (!row) continue;
      if (!first_row) first_row = row;
      if (!row->feasible) continue;
      const double g = *gap(vbs, row->score, true,
                            GapMode::kUnconditionalInfeasibleIsOne);
      if (g < best_gap) {  // strict: ties keep the earliest sample
        best_gap = g;
        best_row = row;
      }
    }
    collapsed.rows.push_back(best_row   ? *best_row
                             : first_row ? *first_row
                                         : MethodRow{uuid, false,
                                                     sandbox::Outcome::kRuntimeError,
                                                     kInfeasibleScore, 0.0, ""});
  }
  return collapsed;
}

TournamentResult tournament(const std::vector<sandbox::Candidate>& pool,
                            const std::vector<Instance>& test_set,
                            const std::vector<MethodRecord>& reference_records,
                            const TournamentConfig& config) {
  if (pool.empty()) throw ContractViolation("tournament: empty candidate pool");
  if (config.probe_count < 1 ||
      static_cast<std::size_t>(config.probe_count) > test_set.size()) {
    throw ContractViolation("tournament: probe_count must be in [1, |test set|]");
  }

  std::unordered_map<std::string, double> vbs_by_uuid;
  for (const auto& inst : test_set) {
    vbs_by_uuid[inst.uuid()] = compute_vbs(reference_records, inst.uuid());
  }
  const MethodRecord* reference = nullptr;
  for (const auto& record : reference_records) {
    if (record.method == config.reference_method) reference = &record;
  }

  auto run_gap = [&](const sandbox::CandidateRun& run) {
    const double vbs = vbs_by_uuid.at(run.instance_uuid);
    const bool ok = run.outcome == sandbox::Outcome::kValid;
    return *gap(vbs, ok ? *run.score : kInfeasibleScore, ok,
                GapMode::kUnconditionalInfeasibleIsOne);
  };

  // Probe selection: hardest instances first (by the reference method's
  // unconditional gap), topped up with a uniform draw from the rest.
  std::vector<std::size_t> order(test_set.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<double> ref_gap(test_set.size(), 1.0);
  for (std::size_t i = 0; i < test_set.size(); ++i) {
    const MethodRow* row =
        reference ? reference->find(test_set[i].uuid()) : nullptr;
    if (row) {
      ref_gap[i] = *gap(vbs_by_uuid.at(test_set[i].uuid()), row->score,
                        row->feasible, GapMode::kUnconditionalInfeasibleIsOne);
    }
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return ref_gap[a] != ref_gap[b] ? ref_gap[a] > ref_gap[b] : a < b;
  });
  const int hard_count = std::min(
      config.probe_count,
      static_cast<int>(std::lround(config.hardest_frac * config.probe_count)));
  std::vector<std::size_t> probe_ids(order.begin(), order.begin() + hard_count);
  std::vector<std::size_t> rest(order.begin() + hard_count, order.end());
  Rng rng(config.seed);
  rng.shuffle(rest);
  for (int i = 0; i < config.probe_count - hard_count; ++i) {
    probe_ids.push_back(rest[static_cast<std::size_t>(i)]);
  }
  std::vector<Instance> probes;
  probes.reserve(probe_ids.size());
  for (std::size_t id : probe_ids) probes.push_back(test_set[id]);

  // Stage 1: a candidate survives only when Valid on every probe. Probes are
  // run in worker-sized slices so a disqualified candidate stops early; the
  // outcome is order-invariant because one bad probe already eliminates.
  TournamentResult result;
  struct Stage1Row {
    int pool_index;
    double mean_gap;
  };
  std::vector<Stage1Row> stage1;
  for (std::size_t c = 0; c < pool.size(); ++c) {
    bool alive = true;
    double gap_sum = 0.0;
    for (std::size_t offset = 0; offset < probes.size() && alive;
         offset += static_cast<std::size_t>(config.workers)) {
      const std::size_t end = std::min(
          probes.size(), offset + static_cast<std::size_t>(config.workers));
      const std::vector<Instance> slice(probes.begin() + static_cast<long>(offset),
                                        probes.begin() + static_cast<long>(end));
      const auto runs = sandbox::run_batch(pool[c], slice, config.timeout_sec,
                                           config.workers, config.runner);
      for (const auto& run : runs) {
        if (run.outcome != sandbox::Outcome::kValid) {
          alive = false;
          break;
        }
        gap_sum += run_gap(run);
      }
    }
    if (alive) {
      stage1.push_back({static_cast<int>(c),
                        gap_sum / static_cast<double>(probes.size())});
    } else {
      result.eliminated_pool_indices.push_back(static_cast<int>(c));
    }
  }
  result.stage1_survivors = static_cast<int>(stage1.size());

  std::sort(stage1.begin(), stage1.end(), [](const Stage1Row& a, const Stage1Row& b) {
    return a.mean_gap != b.mean_gap ? a.mean_gap < b.mean_gap
                                    : a.pool_index < b.pool_index;
  });
  if (static_cast<int>(stage1.size()) > config.survivors) {
    stage1.resize(static_cast<std::size_t>(config.survivors));
  }

  // Stage 2: full-set verification of the shortlisted survivors.
  for (const auto& entry : stage1) {
    const auto& cand = pool[static_cast<std::size_t>(entry.pool_index)];
    const auto runs = sandbox::run_batch(cand, test_set, config.timeout_sec,
                                         config.workers, config.runner);
    SurvivorReport report;
    report.pool_index = entry.pool_index;
    report.source_hash = cand.source_hash;
    report.probe_mean_gap = entry.mean_gap;
    double gap_sum = 0.0;
    int feasible = 0;
    int timeouts = 0;
    for (const auto& run : runs) {
      gap_sum += run_gap(run);
      feasible += run.outcome == sandbox::Outcome::kValid ? 1 : 0;
      timeouts += run.outcome == sandbox::Outcome::kTimeout ? 1 : 0;
    }
    const auto m = static_cast<double>(runs.size());
    report.full_mean_gap = gap_sum / m;
    report.feasible_rate = feasible / m;
    report.timeout_rate = timeouts / m;
    result.ranking.push_back(report);
  }
  std::sort(result.ranking.begin(), result.ranking.end(),
            [](const SurvivorReport& a, const SurvivorReport& b) {
              return a.full_mean_gap != b.full_mean_gap
                         ? a.full_mean_gap < b.full_mean_gap
                         : a.pool_index < b.pool_index;
            });
  return result;
}

// ---------------------------------------------------------------------------
// CSV / JSON reports
// ---------------------------------------------------------------------------

void write_records_csv(const MethodRecord& record,
                       const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << "uuid,method,feasible,error_type,score,elapsed_sec,code_hash\n";
  check_csv_safe(record.method, "method");
  for (const auto& row : record.rows) {
    check_csv_safe(row.uuid, "uuid");
    check_csv_safe(row.code_hash, "code_hash");
    out << row.uuid << ',' << record.method << ','
        << (row.feasible ? "True" : "False") << ','
        << sandbox::outcome_name(row.error) << ',' << format_double(row.score)
        << ',' << format_double(row.elapsed_sec) << ',' << row.code_hash << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<MethodRecord> read_records_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) return {};
  if (line != "uuid,method,feasible,error_type,score,elapsed_sec,code_hash") {
    throw ParseError("unexpected records header in " + path.string(), 1);
  }
  std::vector<MethodRecord> records;
  std::unordered_map<std::string, std::size_t> index;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 7) throw ParseError("expected 7 fields", line_no);
    MethodRow row;
    row.uuid = fields[0];
    row.feasible = fields[2] == "True";
    const auto outcome = outcome_from_name(fields[3]);
    if (!outcome) throw ParseError("unknown error_type " + fields[3], line_no);
    row.error = *outcome;
    row.score = parse_double(fields[4], line_no);
    row.elapsed_sec = parse_double(fields[5], line_no);
    row.code_hash = fields[6];
    const auto& method = fields[1];
    auto it = index.find(method);
    if (it == index.end()) {
      index.emplace(method, records.size());
      records.push_back(MethodRecord{method, {}});
      it = index.find(method);
    }
    records[it->second].rows.push_back(std::move(row));
  }
  return records;
}

void write_metrics_csv(const std::vector<MethodRecord>& records,
                       const std::vector<InstanceVerdict>& verdicts,
                       const std::filesystem::path& path) {
  std::unordered_map<std::string, const InstanceVerdict*> by_uuid;
  for (const auto& v : verdicts) by_uuid[v.uuid] = &v;

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << "uuid,method,feasible,error_type,score,gap_conditional,"
         "gap_unconditional,hardness,difficulty,elapsed_sec,code_hash\n";
  for (const auto& record : records) {
    check_csv_safe(record.method, "method");
    for (const auto& row : record.rows) {
      const auto it = by_uuid.find(row.uuid);
      if (it == by_uuid.end()) {
        throw ContractViolation("write_metrics_csv: no verdict for " + row.uuid);
      }
      const InstanceVerdict& v = *it->second;
      const auto conditional =
          gap(v.vbs, row.score, row.feasible, GapMode::kConditionalFeasible);
      const auto unconditional = gap(v.vbs, row.score, row.feasible,
                                     GapMode::kUnconditionalInfeasibleIsOne);
      out << row.uuid << ',' << record.method << ','
          << (row.feasible ? "True" : "False") << ','
          << sandbox::outcome_name(row.error) << ','
          << format_double(row.score) << ','
          << (conditional ? format_double(*conditional) : std::string()) << ','
          << format_double(*unconditional) << ',' << format_double(v.hardness)
          << ',' << difficulty_name(v.difficulty) << ','
          << format_double(row.elapsed_sec) << ',' << row.code_hash << '\n';
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<MetricsRow> read_metrics_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) return {};
  std::vector<MetricsRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 11) throw ParseError("expected 11 fields", line_no);
    MetricsRow row;
    row.uuid = fields[0];
    row.method = fields[1];
    row.feasible = fields[2] == "True";
    row.error_type = fields[3];
    row.score = parse_double(fields[4], line_no);
    if (!fields[5].empty()) row.gap_conditional = parse_double(fields[5], line_no);
    row.gap_unconditional = parse_double(fields[6], line_no);
    row.hardness = parse_double(fields[7], line_no);
    row.difficulty = fields[8];
    row.elapsed_sec = parse_double(fields[9], line_no);
    row.code_hash = fields[10];
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string summary_json(const std::vector<MethodRecord>& records,
                         const std::vector<InstanceVerdict>& verdicts) {
  std::unordered_map<std::string, const InstanceVerdict*> by_uuid;
  for (const auto& v : verdicts) by_uuid[v.uuid] = &v;

  nlohmann::ordered_json doc;
  doc["methods"] = nlohmann::ordered_json::object();
  for (const auto& record : records) {
    std::vector<double> conditional;
    std::vector<double> unconditional;
    std::vector<double> elapsed;
    int feasible = 0;
    for (const auto& row : record.rows) {
      const InstanceVerdict& v = *by_uuid.at(row.uuid);
      if (auto g = gap(v.vbs, row.score, row.feasible,
                       GapMode::kConditionalFeasible)) {
        conditional.push_back(*g);
      }
      unconditional.push_back(*gap(v.vbs, row.score, row.feasible,
                                   GapMode::kUnconditionalInfeasibleIsOne));
      elapsed.push_back(row.elapsed_sec);
      feasible += row.feasible ? 1 : 0;
    }
    const MeanStd cond = mean_std(conditional);
    const MeanStd uncond = mean_std(unconditional);
    const MeanStd time = mean_std(elapsed);
    double total_time = 0.0;
    for (double t : elapsed) total_time += t;

    nlohmann::ordered_json m;
    m["rows"] = record.rows.size();
    m["pass_rate"] = six_digits(
        record.rows.empty() ? 0.0
                            : static_cast<double>(feasible) /
                                  static_cast<double>(record.rows.size()));
    m["gap_conditional_mean"] = six_digits(cond.mean);
    m["gap_conditional_std"] = six_digits(cond.stddev);
    m["gap_unconditional_mean"] = six_digits(uncond.mean);
    m["gap_unconditional_std"] = six_digits(uncond.stddev);
    m["elapsed_mean_sec"] = six_digits(time.mean);
    m["elapsed_total_sec"] = six_digits(total_time);
    doc["methods"][record.method] = std::move(m);
  }
  return doc.dump(2);
}

}  // namespace sds::eval
