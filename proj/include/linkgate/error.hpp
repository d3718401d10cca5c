// Copyright 2026 The Linkgate Authors.
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

namespace linkgate {

// Base class for every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape mismatches and invalid configuration values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Caller violated an operation's precondition (empty input, non-scalar loss).
class UsageError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent files on disk.
class LoadError : public Error {
 public:
  using Error::Error;
};

// Named object (database, parameter, token) not found.
class LookupError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : Error(message + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Illegal or incomplete action sequence; `step` is the offending action index.
class DecodeError : public Error {
 public:
  DecodeError(const std::string& message, std::size_t step)
      : Error(message + " (step " + std::to_string(step) + ")"), step_(step) {}

  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

// Gold data the model cannot score (e.g. a gold entity of the wrong kind).
class TrainingDataError : public Error {
 public:
  using Error::Error;
};

}  // namespace linkgate
