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

#ifndef SDS_ERRORS_HPP_
#define SDS_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sds {

// Caller broke a documented precondition (bad index, invalid config value).
class ContractViolation : public std::logic_error {
 public:
  explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

// Malformed input data: JSONL datasets, CSV records, config files.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what
                                : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Instance generation cannot satisfy the requested parameters.
class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The execution harness itself is misconfigured (e.g. runner command not
// executable). Distinct from any candidate outcome classification.
class HarnessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sds

#endif  // SDS_ERRORS_HPP_
