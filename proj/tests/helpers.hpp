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

#ifndef SDS_TESTS_HELPERS_HPP_
#define SDS_TESTS_HELPERS_HPP_

#include <filesystem>
#include <unistd.h>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sds/core.hpp"
#include "sds/generate.hpp"
#include "sds/rng.hpp"

namespace sds::test {

struct InstanceSpec {
  int n = 1;
  std::vector<double> weights;
  std::vector<std::pair<std::pair<int, int>, double>> interactions;
  int lo = 0;
  int hi = -1;  // -1 means n
  std::vector<std::pair<int, int>> precedence;
  std::vector<std::pair<int, int>> mutex;
  std::map<std::string, std::vector<int>> groups;
};

inline Instance make_instance(InstanceSpec spec) {
  InstanceData data;
  data.uuid = "test";
  data.problem_type = Family::kRandomSds;
  data.n_variables = spec.n;
  data.weights = spec.weights.empty() ? std::vector<double>(spec.n, 0.0)
                                      : std::move(spec.weights);
  data.interactions = std::move(spec.interactions);
  data.cardinality_lo = spec.lo;
  data.cardinality_hi = spec.hi < 0 ? spec.n : spec.hi;
  data.precedence = std::move(spec.precedence);
  data.mutex = std::move(spec.mutex);
  data.groups = std::move(spec.groups);
  return Instance(std::move(data));
}

// Random instance with every constraint type, sized for exhaustive oracles.
inline Instance random_small_instance(std::uint64_t seed, int n_min = 6,
                                      int n_max = 14) {
  gen::GenSpec spec = gen::GenSpec::of(Family::kRandomSds, 1.0, seed);
  spec.params.n_min = n_min;
  spec.params.n_max = n_max;
  spec.params.density = 0.4;
  spec.params.lower_target = 2;
  return gen::generate(spec, 1).front();
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("sds-test-" + tag + "-" + std::to_string(::getpid()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace sds::test

#endif  // SDS_TESTS_HELPERS_HPP_
