/* Copyright 2026 The HetGNN Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef HETGNN_ERRORS_H_
#define HETGNN_ERRORS_H_

#include <stdexcept>
#include <string>

namespace hetgnn {

// Root of every error thrown by the library. Callers that only care about
// "did it work" catch this; the CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller passed arguments that can never be valid (shape mismatch, bad
// configuration, index out of range).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Tensor extents that do not line up.
class DimensionError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// Malformed text input. Carries 1-based line and column when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column)
      : Error(what + " (line " + std::to_string(line) + ", column " +
              std::to_string(column) + ")"),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// Data that is well-formed but violates a schema or structural invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A graph does not fit into the requested padding budget.
class FitError : public Error {
 public:
  using Error::Error;
};

// Record or artifact bytes that cannot be decoded.
class CorruptDataError : public Error {
 public:
  using Error::Error;
};

// Serialized data written under a different schema.
class FingerprintMismatch : public Error {
 public:
  using Error::Error;
};

// Filesystem failures.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace hetgnn

#endif  // HETGNN_ERRORS_H_
