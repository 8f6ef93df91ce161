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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "sds/audit.hpp"
#include "sds/core.hpp"
#include "sds/eval.hpp"
#include "sds/generate.hpp"
#include "sds/reward.hpp"
#include "sds/sandbox.hpp"
#include "sds/solvers.hpp"
#include "sds/templates.hpp"

namespace py = pybind11;
using namespace sds;

namespace {

solvers::SAConfig sa_config(double t0, double cooling,
                            std::optional<int> fixed_iterations, double t_min,
                            const std::string& acceptance,
                            const std::string& guard, const std::string& move) {
  solvers::SAConfig cfg;
  cfg.t0 = t0;
  cfg.cooling = cooling;
  cfg.fixed_iterations = fixed_iterations;
  cfg.t_min = t_min;
  if (acceptance == "global_best_bug") {
    cfg.acceptance = solvers::SaAcceptance::kGlobalBestBug;
  } else if (acceptance != "current_state") {
    throw ContractViolation("acceptance must be current_state|global_best_bug");
  }
  if (guard == "reject_and_continue") {
    cfg.guard = solvers::SaGuard::kRejectAndContinue;
  } else if (guard != "retry_loop") {
    throw ContractViolation("guard must be retry_loop|reject_and_continue");
  }
  if (move == "add_remove") {
    cfg.move = solvers::SaMove::kAddRemove;
  } else if (move != "bit_flip") {
    throw ContractViolation("move must be bit_flip|add_remove");
  }
  return cfg;
}

py::dict result_to_dict(const solvers::SolveResult& r) {
  py::dict d;
  if (r.selection) {
    d["selection"] = r.selection->variables();
  } else {
    d["selection"] = py::none();
  }
  d["score"] = r.score;
  d["feasible"] = r.feasible;
  d["elapsed_sec"] = r.elapsed_sec;
  d["trace"] = r.trace;
  d["meta"] = r.meta;
  return d;
}

py::dict run_to_dict(const sandbox::CandidateRun& run) {
  py::dict d;
  d["instance_uuid"] = run.instance_uuid;
  d["outcome"] = sandbox::outcome_name(run.outcome);
  if (run.selection) {
    d["selection"] = run.selection->variables();
  } else {
    d["selection"] = py::none();
  }
  if (run.score) {
    d["score"] = *run.score;
  } else {
    d["score"] = py::none();
  }
  d["n_vio"] = run.n_vio;
  d["elapsed_sec"] = run.elapsed_sec;
  d["stderr_excerpt"] = run.stderr_excerpt;
  return d;
}

sandbox::RunnerConfig runner_config(const std::vector<std::string>& run_cmd,
                                    const std::vector<std::string>& compile_cmd,
                                    std::uint64_t memory_limit_bytes) {
  sandbox::RunnerConfig cfg;
  if (!run_cmd.empty()) cfg.run_cmd = run_cmd;
  cfg.compile_cmd = compile_cmd;
  cfg.memory_limit_bytes = memory_limit_bytes;
  return cfg;
}

sandbox::CandidateRun run_from_parts(const Instance& inst,
                                     const std::string& outcome,
                                     std::optional<std::vector<int>> selection,
                                     int n_vio) {
  sandbox::CandidateRun run;
  run.instance_uuid = inst.uuid();
  bool matched = false;
  for (int i = 0; i <= static_cast<int>(sandbox::Outcome::kJsonParseError); ++i) {
    if (outcome == sandbox::outcome_name(static_cast<sandbox::Outcome>(i))) {
      run.outcome = static_cast<sandbox::Outcome>(i);
      matched = true;
    }
  }
  if (!matched) throw ContractViolation("unknown outcome " + outcome);
  if (selection) {
    run.selection = Selection::of(*selection);
    run.score = score(inst, *run.selection);
  }
  run.n_vio = n_vio;
  return run;
}

}  // namespace

PYBIND11_MODULE(sdsbench, m) {
  m.doc() = "SDS benchmark suite: instance generation, solvers, sandboxed "
            "candidate execution, rewards and evaluation metrics";

  py::register_exception<ContractViolation>(m, "ContractViolation",
                                            PyExc_ValueError);
  py::register_exception<ParseError>(m, "DataParseError", PyExc_ValueError);
  py::register_exception<GenerationError>(m, "GenerationError", PyExc_RuntimeError);
  py::register_exception<HarnessError>(m, "HarnessError", PyExc_RuntimeError);

  py::class_<Selection>(m, "Selection")
      .def(py::init([](std::vector<int> vars) { return Selection::of(std::move(vars)); }))
      .def_property_readonly("variables", &Selection::variables)
      .def("__len__", &Selection::size)
      .def("__contains__", &Selection::contains)
      .def("__eq__", [](const Selection& a, const Selection& b) { return a == b; })
      .def("__repr__", [](const Selection& s) {
        std::string out = "Selection([";
        for (std::size_t i = 0; i < s.variables().size(); ++i) {
          if (i) out += ", ";
          out += std::to_string(s.variables()[i]);
        }
        return out + "])";
      });

  py::class_<ViolationReport>(m, "ViolationReport")
      .def_readonly("cardinality", &ViolationReport::cardinality)
      .def_readonly("precedence", &ViolationReport::precedence)
      .def_readonly("mutex", &ViolationReport::mutex)
      .def_readonly("group", &ViolationReport::group)
      .def_property_readonly("n_vio", &ViolationReport::n_vio);

  py::class_<Instance>(m, "Instance")
      .def_property_readonly("uuid", &Instance::uuid)
      .def_property_readonly("problem_type",
                             [](const Instance& i) {
                               return std::string(family_name(i.problem_type()));
                             })
      .def_property_readonly("n", &Instance::n)
      .def_property_readonly("weights", &Instance::weights)
      .def_property_readonly("cardinality_lo", &Instance::cardinality_lo)
      .def_property_readonly("cardinality_hi", &Instance::cardinality_hi)
      .def_property_readonly("precedence", &Instance::precedence)
      .def_property_readonly("mutex", &Instance::mutex)
      .def_property_readonly("groups", &Instance::groups)
      .def("interaction", &Instance::interaction)
      .def("to_json_line", [](const Instance& i) { return gen::to_json_line(i); })
      .def("candidate_payload",
           [](const Instance& i) { return gen::candidate_payload(i); })
      .def_static("from_json_line",
                  [](const std::string& line) { return gen::from_json_line(line); });

  m.def("score", &score, py::arg("instance"), py::arg("selection"));
  m.def("check_feasibility", &check_feasibility, py::arg("instance"),
        py::arg("selection"));
  m.def("marginal_gain", &marginal_gain, py::arg("instance"), py::arg("selection"),
        py::arg("i"));

  m.def("family_names", [] {
    std::vector<std::string> names;
    for (int i = 0; i < kFamilyCount; ++i) {
      names.push_back(family_name(static_cast<Family>(i)));
    }
    return names;
  });

  m.def(
      "generate",
      [](const std::string& family, int count, std::uint64_t seed,
         std::optional<int> n_min, std::optional<int> n_max) {
        const auto f = family_from_name(family);
        if (!f) throw ContractViolation("unknown family " + family);
        gen::GenSpec spec = gen::GenSpec::of(*f, 1.0, seed);
        if (n_min) spec.params.n_min = *n_min;
        if (n_max) spec.params.n_max = *n_max;
        return gen::generate(spec, count);
      },
      py::arg("family"), py::arg("count"), py::arg("seed") = 0,
      py::arg("n_min") = py::none(), py::arg("n_max") = py::none());

  m.def(
      "generate_mixture",
      [](int total, std::uint64_t seed) {
        return gen::generate_mixture(gen::default_mixture(seed), total, seed);
      },
      py::arg("total"), py::arg("seed") = 0,
      "Default benchmark mixture over all ten families");

  m.def("write_jsonl", &gen::write_jsonl, py::arg("dataset"), py::arg("path"));
  m.def("read_jsonl", &gen::read_jsonl, py::arg("path"));

  m.def(
      "solve_greedy",
      [](const Instance& inst, double budget, std::uint64_t seed) {
        return result_to_dict(solvers::greedy_marginal(inst, budget, seed));
      },
      py::arg("instance"), py::arg("budget_sec") = 5.0, py::arg("seed") = 0);
  m.def(
      "solve_local_search",
      [](const Instance& inst, double budget, std::uint64_t seed) {
        return result_to_dict(solvers::local_search_1flip(inst, budget, seed));
      },
      py::arg("instance"), py::arg("budget_sec") = 5.0, py::arg("seed") = 0);
  m.def(
      "solve_branch_and_bound",
      [](const Instance& inst, double budget, std::uint64_t seed) {
        return result_to_dict(solvers::branch_and_bound(inst, budget, seed));
      },
      py::arg("instance"), py::arg("budget_sec") = 5.0, py::arg("seed") = 0);
  m.def(
      "solve_sa",
      [](const Instance& inst, double budget, std::uint64_t seed, double t0,
         double cooling, std::optional<int> fixed_iterations, double t_min,
         const std::string& acceptance, const std::string& guard,
         const std::string& move) {
        return result_to_dict(solvers::simulated_annealing(
            inst, budget, seed,
            sa_config(t0, cooling, fixed_iterations, t_min, acceptance, guard,
                      move)));
      },
      py::arg("instance"), py::arg("budget_sec") = 5.0, py::arg("seed") = 0,
      py::arg("t0") = 1000.0, py::arg("cooling") = 0.99,
      py::arg("fixed_iterations") = 1000, py::arg("t_min") = 1.0,
      py::arg("acceptance") = "current_state", py::arg("guard") = "retry_loop",
      py::arg("move") = "bit_flip");
  m.def(
      "solve_exhaustive",
      [](const Instance& inst) { return result_to_dict(solvers::exhaustive(inst)); },
      py::arg("instance"));

  m.def("canonicalize_source", &sandbox::canonicalize_source);
  m.def("sha256_hex", [](const std::string& s) { return sandbox::sha256_hex(s); });
  m.def(
      "extract_code_block",
      [](const std::string& text) -> py::object {
        if (const auto cand = sandbox::extract_code_block(text)) {
          py::dict d;
          d["source_text"] = cand->source_text;
          d["source_hash"] = cand->source_hash;
          return d;
        }
        return py::none();
      },
      py::arg("generation_text"));
  m.def(
      "run_candidate",
      [](const std::string& source, const Instance& inst, double timeout_sec,
         const std::vector<std::string>& run_cmd,
         const std::vector<std::string>& compile_cmd,
         std::uint64_t memory_limit_bytes) {
        const auto cand = sandbox::Candidate::of(source);
        return run_to_dict(sandbox::run_candidate(
            cand, inst, timeout_sec,
            runner_config(run_cmd, compile_cmd, memory_limit_bytes)));
      },
      py::arg("source"), py::arg("instance"), py::arg("timeout_sec") = 5.0,
      py::arg("run_cmd") = std::vector<std::string>{"python3", "{file}"},
      py::arg("compile_cmd") =
          std::vector<std::string>{"python3", "-m", "py_compile", "{file}"},
      py::arg("memory_limit_bytes") = std::uint64_t{2} << 30);

  m.def("format_reward", [](const std::string& text) {
    return reward::format_reward(text);
  });
  m.def("structure_indicator", [](const std::string& code) {
    const auto s = reward::structure_indicator(code);
    return py::make_tuple(s.graph_indicator, s.lazy_sort_flag);
  });
  m.def("curriculum_alpha", [](double t) {
    return reward::curriculum_alpha(reward::TrainingProgress::of(t));
  });
  m.def(
      "exec_reward",
      [](const Instance& inst, const std::string& outcome,
         std::optional<std::vector<int>> selection, int n_vio,
         const std::string& code_text, double progress) {
        const auto run = run_from_parts(inst, outcome, std::move(selection), n_vio);
        const auto r =
            reward::exec_reward(run, code_text, reward::TrainingProgress::of(progress));
        py::dict d;
        d["syntax"] = r.syntax;
        d["schema"] = r.schema;
        d["structure"] = r.structure;
        d["feasibility"] = r.feasibility;
        d["lazy_penalty"] = r.lazy_penalty;
        d["total"] = r.total;
        return d;
      },
      py::arg("instance"), py::arg("outcome"), py::arg("selection"),
      py::arg("n_vio"), py::arg("code_text"), py::arg("progress") = 0.0);
  m.def(
      "normalize_score",
      [](const Instance& inst, double raw, const std::string& variant) {
        return reward::normalize_score(
            inst, raw,
            variant == "top"
                ? reward::NormalizationVariant::kTopPositiveInteractions
                : reward::NormalizationVariant::kMeanPositiveInteractions);
      },
      py::arg("instance"), py::arg("raw_score"), py::arg("variant") = "mean");
  m.def(
      "nominal_reward",
      [](const Instance& inst, const std::string& outcome,
         std::optional<std::vector<int>> selection, int n_vio,
         const std::string& gate) {
        const auto run = run_from_parts(inst, outcome, std::move(selection), n_vio);
        return reward::nominal_reward(inst, run,
                                      gate == "soft" ? reward::GateMode::kSoft
                                                     : reward::GateMode::kHard);
      },
      py::arg("instance"), py::arg("outcome"), py::arg("selection"),
      py::arg("n_vio"), py::arg("gate") = "hard");
  m.def("oracle_anchor_reward", &reward::oracle_anchor_reward);
  m.def("diversity_penalty", &reward::diversity_penalty);
  m.def(
      "minimal_feasibility_reward",
      [](const Instance& inst, const std::string& outcome,
         std::optional<std::vector<int>> selection, int n_vio) {
        return reward::minimal_feasibility_reward(
            run_from_parts(inst, outcome, std::move(selection), n_vio));
      },
      py::arg("instance"), py::arg("outcome"), py::arg("selection") = py::none(),
      py::arg("n_vio") = 0);
  m.def("composite_reward", &reward::composite_reward, py::arg("r_format"),
        py::arg("r_exec"), py::arg("r_nominal"));

  m.def(
      "gap",
      [](double vbs, double score_value, bool feasible, bool unconditional)
          -> py::object {
        const auto g = eval::gap(vbs, score_value, feasible,
                                 unconditional
                                     ? eval::GapMode::kUnconditionalInfeasibleIsOne
                                     : eval::GapMode::kConditionalFeasible);
        if (g) return py::float_(*g);
        return py::none();
      },
      py::arg("vbs"), py::arg("score"), py::arg("feasible"),
      py::arg("unconditional") = true);
  m.def(
      "classify_difficulty",
      [](double vbs, double greedy_score, bool greedy_feasible) {
        const auto [hardness, difficulty] =
            eval::classify_difficulty(vbs, greedy_score, greedy_feasible);
        return py::make_tuple(hardness, eval::difficulty_name(difficulty));
      },
      py::arg("vbs"), py::arg("greedy_score"), py::arg("greedy_feasible") = true);
  m.def(
      "pass_at_k",
      [](const std::vector<std::vector<std::pair<bool, double>>>& samples, int k,
         int bootstrap, std::uint64_t seed) {
        std::vector<std::vector<eval::SampleOutcome>> pools;
        pools.reserve(samples.size());
        for (const auto& pool : samples) {
          std::vector<eval::SampleOutcome> converted;
          converted.reserve(pool.size());
          for (const auto& [feasible, gap_value] : pool) {
            converted.push_back({feasible, gap_value});
          }
          pools.push_back(std::move(converted));
        }
        const auto est = eval::pass_at_k(pools, k, bootstrap, seed);
        py::dict d;
        d["k"] = est.k;
        d["pass_mean"] = est.pass_mean;
        d["pass_std"] = est.pass_std;
        d["gap_mean"] = est.gap_mean;
        d["gap_std"] = est.gap_std;
        return d;
      },
      py::arg("samples"), py::arg("k"), py::arg("bootstrap") = 500,
      py::arg("seed") = 0,
      "samples: per-instance list of (feasible, unconditional_gap) pairs");

  m.def("is_sa_like", [](const std::string& code) { return audit::is_sa_like(code); });
  m.def("classify_acceptance", [](const std::string& code) {
    return std::string(audit::acceptance_name(audit::classify_acceptance(code)));
  });
  m.def("structural_taxonomy", [](const std::string& code) -> py::object {
    if (const auto bucket = audit::structural_taxonomy(code)) {
      return py::str(audit::bucket_name(*bucket));
    }
    return py::none();
  });
  m.def("matches_sa_template", [](const std::string& code) {
    const auto match = audit::matches_sa_template(code);
    py::dict d;
    d["matches"] = match.matches;
    d["t0"] = match.params.t0 ? py::object(py::float_(*match.params.t0))
                              : py::object(py::none());
    d["cooling"] = match.params.cooling
                       ? py::object(py::float_(*match.params.cooling))
                       : py::object(py::none());
    d["iterations"] = match.params.iterations
                          ? py::object(py::int_(*match.params.iterations))
                          : py::object(py::none());
    d["dynamic_termination"] = match.params.dynamic_termination;
    return d;
  });

  m.def("reference_sa_source", [] { return std::string(templates::reference_sa_source()); });
  m.def("global_best_bug_sa_source",
        [] { return std::string(templates::global_best_bug_sa_source()); });
  m.def("passive_filter_sa_source",
        [] { return std::string(templates::passive_filter_sa_source()); });
  m.def("weight_sort_greedy_source",
        [] { return std::string(templates::weight_sort_greedy_source()); });
}
