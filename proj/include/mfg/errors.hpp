// Copyright 2026 The Myopic MFG Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MFG_ERRORS_HPP_
#define MFG_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mfg {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed expression text. `position` is a byte offset into the input.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : Error(message + " (at offset " + std::to_string(position) + ")"),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// ln/sqrt of a negative number, division by zero, non-finite results.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A model, parameter set or model file that violates its invariants.
class ModelError : public Error {
 public:
  using Error::Error;
};

// An operation was called outside its documented precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// A numerical solver could not deliver a result (no root, singular system,
// eigen-solver failure, no switching surface, ...).
class SolverError : public Error {
 public:
  using Error::Error;
};

// Both candidate fields push away from a switching surface, so no Filippov
// sliding motion exists there.
class TransversalCrossing : public Error {
 public:
  using Error::Error;
};

}  // namespace mfg

#endif  // MFG_ERRORS_HPP_
