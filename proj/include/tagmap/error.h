// Copyright 2026 The tagmap Authors.
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

#ifndef TAGMAP_ERROR_H_
#define TAGMAP_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tagmap {

// Base class of every error raised by the library. The CLI maps the
// subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad arguments, configuration or cross-object consistency.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Malformed input record. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line);
  explicit ParseError(const std::string& what) : Error(what) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_ = 0;
};

// Structurally valid file whose shape disagrees with its header.
class FormatError : public ParseError {
 public:
  using ParseError::ParseError;
};

// A retrofitting instance with a component that has no known vector.
class FeasibilityError : public Error {
 public:
  using Error::Error;
};

// Name lookup failure (concept, tag, token).
class LookupError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Composition of an empty token list.
class CompositionError : public Error {
 public:
  using Error::Error;
};

// Evaluation with no usable tag.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

}  // namespace tagmap

#endif  // TAGMAP_ERROR_H_
