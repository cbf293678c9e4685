// Copyright 2026 The segkit Authors. All Rights Reserved.
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

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace segkit {

/// Base of every error raised by segkit. Each subclass corresponds to one
/// exit code of the command-line tool.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (CSV, JSON, binary headers).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Well-formed input that violates a semantic invariant, e.g. a mapping row
/// referencing a class id that does not exist. Carries one entry per offence.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& what, std::vector<std::string> details)
      : Error(Join(what, details)), details_(std::move(details)) {}

  const std::vector<std::string>& details() const { return details_; }

 private:
  static std::string Join(const std::string& what,
                          const std::vector<std::string>& details) {
    std::string out = what;
    for (const auto& d : details) out += "\n  " + d;
    return out;
  }

  std::vector<std::string> details_;
};

/// Invalid pixel or tensor content.
class DataError : public Error {
 public:
  using Error::Error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class InversionError : public Error {
 public:
  InversionError(const std::string& what, std::vector<std::uint32_t> colliding)
      : Error(what), colliding_(std::move(colliding)) {}

  const std::vector<std::uint32_t>& colliding_ids() const { return colliding_; }

 private:
  std::vector<std::uint32_t> colliding_;
};

class ScheduleError : public Error {
 public:
  using Error::Error;
};

class PredictorError : public Error {
 public:
  using Error::Error;
};

class EvaluationError : public Error {
 public:
  using Error::Error;
};

}  // namespace segkit
