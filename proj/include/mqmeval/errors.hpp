// Copyright 2026 The mqmeval Authors.
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

// Exception types shared by all mqmeval modules. Each subclass names one
// failure mode; ErrorClass groups them for CLI exit codes.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mqmeval {

enum class ErrorClass { kUsage, kData, kBackend };

class Error : public std::runtime_error {
 public:
  Error(ErrorClass error_class, const std::string& message)
      : std::runtime_error(message), error_class_(error_class) {}
  ErrorClass error_class() const { return error_class_; }

 private:
  ErrorClass error_class_;
};

#define MQMEVAL_DATA_ERROR(Name)                                   \
  class Name : public Error {                                      \
   public:                                                         \
    explicit Name(const std::string& message)                      \
        : Error(ErrorClass::kData, #Name ": " + message) {}        \
  };

MQMEVAL_DATA_ERROR(InvalidCategory)
MQMEVAL_DATA_ERROR(SpanIntegrityError)
MQMEVAL_DATA_ERROR(EmptySuiteError)
MQMEVAL_DATA_ERROR(TagError)
MQMEVAL_DATA_ERROR(ConsistencyError)
MQMEVAL_DATA_ERROR(BuildError)
MQMEVAL_DATA_ERROR(AlignmentError)
MQMEVAL_DATA_ERROR(RoundError)
MQMEVAL_DATA_ERROR(FencingError)
MQMEVAL_DATA_ERROR(MissingScoreError)
MQMEVAL_DATA_ERROR(ResponseParseError)
MQMEVAL_DATA_ERROR(RangeError)
MQMEVAL_DATA_ERROR(LabelingError)
MQMEVAL_DATA_ERROR(MetaEvalError)
MQMEVAL_DATA_ERROR(CoverageError)
MQMEVAL_DATA_ERROR(ConfigError)

#undef MQMEVAL_DATA_ERROR

// Malformed input line. `line` is 1-based; 0 when not line-oriented.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : Error(ErrorClass::kData,
              "ParseError: line " + std::to_string(line) + ": " + message),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& message)
      : Error(ErrorClass::kUsage, "UsageError: " + message) {}
};

// Raised by backends. Transient failures are retried by EvaluateBatch.
class BackendError : public Error {
 public:
  BackendError(const std::string& message, bool transient = false,
               std::optional<std::size_t> index = std::nullopt)
      : Error(ErrorClass::kBackend,
              "BackendError" +
                  (index ? " (prompt " + std::to_string(*index) + ")"
                         : std::string()) +
                  ": " + message),
        transient_(transient),
        index_(index) {}

  bool transient() const { return transient_; }
  std::optional<std::size_t> index() const { return index_; }

  // Results completed before the failure, aligned with the input batch.
  std::vector<std::optional<std::string>> partial;

 private:
  bool transient_;
  std::optional<std::size_t> index_;
};

}  // namespace mqmeval
