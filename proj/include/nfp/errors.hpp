// Copyright 2026 The sfc-nfp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NFP_ERRORS_HPP
#define NFP_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nfp {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text: policy DSL, chain spec, scenario file, CSV, plan.
// `line` and `column` are 1-based; 0 means unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0,
             std::size_t column = 0, std::string expected = {})
      : Error(format(what, line, column, expected)),
        line_(line),
        column_(column),
        expected_(std::move(expected)) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& expected() const { return expected_; }

 private:
  static std::string format(const std::string& what, std::size_t line,
                            std::size_t column, const std::string& expected) {
    std::string out;
    if (line != 0) {
      out += "line " + std::to_string(line);
      if (column != 0) out += ", column " + std::to_string(column);
      out += ": ";
    }
    out += what;
    if (!expected.empty()) out += " (expected " + expected + ")";
    return out;
  }

  std::size_t line_;
  std::size_t column_;
  std::string expected_;
};

// A queueing station with utilization >= 1; equilibrium metrics undefined.
class UnstableError : public Error {
 public:
  explicit UnstableError(const std::string& what, std::string station = {})
      : Error(what), station_(std::move(station)) {}
  const std::string& station() const { return station_; }

 private:
  std::string station_;
};

// Ordering constraints that cannot all be met.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// Two rules in one table share the same (priority, match) key.
class ConflictError : public Error {
 public:
  using Error::Error;
};

}  // namespace nfp

#endif  // NFP_ERRORS_HPP
