// Copyright 2026 The Tunescape Authors.
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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tunescape {

// Base of every error raised by the library. The CLI maps these to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---- constraint language ----

class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& message)
      : Error("parse error at offset " + std::to_string(offset) + ": " + message),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class ConstraintEvalError : public Error {
 public:
  using Error::Error;
};

class UnboundIdentifier : public ConstraintEvalError {
 public:
  explicit UnboundIdentifier(const std::string& name)
      : ConstraintEvalError("unbound identifier '" + name + "'"), name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class DivisionByZero : public ConstraintEvalError {
 public:
  DivisionByZero() : ConstraintEvalError("division by zero") {}
};

// ---- spaces ----

class SpaceError : public Error {
 public:
  using Error::Error;
};

class InvalidConfiguration : public Error {
 public:
  using Error::Error;
};

class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

class NotEnoughValidConfigs : public Error {
 public:
  using Error::Error;
};

class UnknownBenchmark : public Error {
 public:
  explicit UnknownBenchmark(const std::string& name)
      : Error("unknown benchmark '" + name + "'") {}
};

// ---- datasets ----

class SchemaError : public Error {
 public:
  using Error::Error;
};

class ValueError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class EmptyDataset : public Error {
 public:
  using Error::Error;
};

// ---- surrogate / analyses ----

class DegenerateTarget : public Error {
 public:
  using Error::Error;
};

class TooFewRows : public Error {
 public:
  using Error::Error;
};

class NonPositiveObjective : public Error {
 public:
  using Error::Error;
};

// ---- tuners ----

class BackendFailure : public Error {
 public:
  using Error::Error;
};

class BackendTimeout : public BackendFailure {
 public:
  using BackendFailure::BackendFailure;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

class TooLarge : public Error {
 public:
  using Error::Error;
};

}  // namespace tunescape
