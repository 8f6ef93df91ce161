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

#include "sds/templates.hpp"

#include <string>

namespace sds::templates {
namespace {

constexpr std::string_view kCommonPrelude = R"PY(import json
import math
import random
import sys


def main():
    random.seed(12345)
    data = json.load(sys.stdin)
    req = data["requirements"]
    catalog = data["catalog"]
    n = req["n_variables"]
    lo, hi = req["cardinality_bounds"]
    precedence = [tuple(p) for p in req["precedence"]]
    mutex = [tuple(m) for m in req["mutex"]]
    groups = {key: list(v) for key, v in req["groups"].items()}
    weights = [v["weight"] for v in catalog["variables"]]
    interactions = {}
    for key, value in catalog["interactions"].items():
        a, b = key.split(",")
        interactions[(int(a), int(b))] = value

    def calculate_score(selected):
        chosen = [i for i in range(n) if selected[i]]
        total = sum(weights[i] for i in chosen)
        for x in range(len(chosen)):
            for y in range(x + 1, len(chosen)):
                total += interactions.get((chosen[x], chosen[y]), 0.0)
        return total

    def is_feasible(selected):
        count = sum(selected)
        if count < lo or count > hi:
            return False
        for pre, dep in precedence:
            if selected[dep] and not selected[pre]:
                return False
        for a, b in mutex:
            if selected[a] and selected[b]:
                return False
        for members in groups.values():
            if sum(1 for v in members if selected[v]) > 1:
                return False
        return True

    def random_feasible():
        for _ in range(20000):
            size = random.randint(lo, hi)
            selected = [False] * n
            for v in random.sample(range(n), size):
                selected[v] = True
            if is_feasible(selected):
                return selected
        return None

    current = random_feasible()
    if current is None:
        print(json.dumps({"selection": {"variables": []}}))
        return
    current_score = calculate_score(current)
    best = current[:]
    best_score = current_score
    temperature = 1000.0
    cooling_rate = 0.99
)PY";

constexpr std::string_view kCommonEpilogue = R"PY(
    result = [i for i in range(n) if best[i]]
    print(json.dumps({"selection": {"variables": result}}))


if __name__ == "__main__":
    main()
)PY";

const std::string kReferenceSa = std::string(kCommonPrelude) + R"PY(    n_iterations = 1000
    for _ in range(n_iterations):
        neighbor = current[:]
        idx = random.randrange(n)
        neighbor[idx] = not neighbor[idx]
        guard_budget = 5000
        while not is_feasible(neighbor) and guard_budget > 0:
            idx = random.randrange(n)
            neighbor[idx] = not neighbor[idx]
            guard_budget -= 1
        if not is_feasible(neighbor):
            temperature *= cooling_rate
            continue
        neighbor_score = calculate_score(neighbor)
        delta = neighbor_score - current_score
        if delta > 0 or random.random() < math.exp(delta / temperature):
            current = neighbor
            current_score = neighbor_score
            if current_score > best_score:
                best = current[:]
                best_score = current_score
        temperature *= cooling_rate
)PY" + std::string(kCommonEpilogue);

const std::string kGlobalBestBugSa = std::string(kCommonPrelude) + R"PY(    n_iterations = 1000
    for _ in range(n_iterations):
        neighbor = current[:]
        idx = random.randrange(n)
        neighbor[idx] = not neighbor[idx]
        guard_budget = 5000
        while not is_feasible(neighbor) and guard_budget > 0:
            idx = random.randrange(n)
            neighbor[idx] = not neighbor[idx]
            guard_budget -= 1
        if not is_feasible(neighbor):
            temperature *= cooling_rate
            continue
        neighbor_score = calculate_score(neighbor)
        if neighbor_score > best_score or random.random() < math.exp(
            (neighbor_score - best_score) / temperature
        ):
            current = neighbor
            current_score = neighbor_score
            if neighbor_score > best_score:
                best = neighbor[:]
                best_score = neighbor_score
        temperature *= cooling_rate
)PY" + std::string(kCommonEpilogue);

const std::string kPassiveFilterSa = std::string(kCommonPrelude) + R"PY(    while temperature > 1e-10:
        neighbor = current[:]
        idx = random.randrange(n)
        neighbor[idx] = not neighbor[idx]
        if is_feasible(neighbor):
            neighbor_score = calculate_score(neighbor)
            delta = neighbor_score - current_score
            if delta > 0 or random.random() < math.exp(delta / temperature):
                current = neighbor
                current_score = neighbor_score
                if current_score > best_score:
                    best = current[:]
                    best_score = current_score
        temperature *= cooling_rate
)PY" + std::string(kCommonEpilogue);

// Deliberately never mentions pairwise terms anywhere.
constexpr std::string_view kWeightSortGreedy = R"PY(import json
import sys


def main():
    data = json.load(sys.stdin)
    req = data["requirements"]
    catalog = data["catalog"]
    n = req["n_variables"]
    lo, hi = req["cardinality_bounds"]
    precedence = [tuple(p) for p in req["precedence"]]
    mutex = [tuple(m) for m in req["mutex"]]
    groups = {key: list(v) for key, v in req["groups"].items()}
    variables = catalog["variables"]

    def is_feasible(selected):
        count = sum(selected)
        if count > hi:
            return False
        for pre, dep in precedence:
            if selected[dep] and not selected[pre]:
                return False
        for a, b in mutex:
            if selected[a] and selected[b]:
                return False
        for members in groups.values():
            if sum(1 for v in members if selected[v]) > 1:
                return False
        return True

    order = sorted(range(n), key=lambda v: variables[v]["weight"], reverse=True)
    selected = [False] * n
    count = 0
    for v in order:
        if count >= hi:
            break
        if variables[v]["weight"] <= 0 and count >= lo:
            break
        selected[v] = True
        if is_feasible(selected):
            count += 1
        else:
            selected[v] = False
    result = [i for i in range(n) if selected[i]]
    print(json.dumps({"selection": {"variables": result}}))


if __name__ == "__main__":
    main()
)PY";

}  // namespace

std::string_view reference_sa_source() { return kReferenceSa; }
std::string_view global_best_bug_sa_source() { return kGlobalBestBugSa; }
std::string_view passive_filter_sa_source() { return kPassiveFilterSa; }
std::string_view weight_sort_greedy_source() { return kWeightSortGreedy; }

}  // namespace sds::templates
