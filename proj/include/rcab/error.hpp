// Copyright 2026 The rcab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace rcab {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed text input. Line and column are 1-based; 0 means unknown.
class ParseError : public Error {
 public:
  ParseError(std::string source, std::size_t line, std::size_t column,
             const std::string& what)
      : Error(format(source, line, column, what)),
        source_(std::move(source)),
        line_(line),
        column_(column) {}

  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& source, std::size_t line,
                            std::size_t column, const std::string& what) {
    std::string out = source.empty() ? std::string("<input>") : source;
    if (line != 0) {
      out += ":" + std::to_string(line);
      if (column != 0) out += ":" + std::to_string(column);
    }
    return out + ": " + what;
  }

  std::string source_;
  std::size_t line_;
  std::size_t column_;
};

// Well-formed input that breaks a documented invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Extraction needs at least one crashing and one non-crashing sample.
class DegenerateDataset : public Error {
 public:
  using Error::Error;
};

// Augmentation seeds must crash the target.
class SeedNotCrashing : public Error {
 public:
  using Error::Error;
};

class BudgetZero : public Error {
 public:
  using Error::Error;
};

class NonCrashTrace : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace rcab
