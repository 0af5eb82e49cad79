// Copyright 2026 The Lyre Authors. All Rights Reserved.
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

#ifndef LYRE_ERROR_HPP_
#define LYRE_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace lyre {

// Base of every error the library throws. Callers that only need a message
// can catch this; the CLI maps subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text. Carries the 1-based line number when known (0 otherwise).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Well-formed but semantically invalid input (mixed annotations, empty input).
class FormatError : public Error {
 public:
  using Error::Error;
};

// Melody and lyrics (or token stream and alignment) disagree.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class OptionError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

// A library invariant did not hold. Indicates a bug rather than bad input.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace lyre

#endif  // LYRE_ERROR_HPP_
