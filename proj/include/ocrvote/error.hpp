///////////////////////////////////////////////////////////////////////
// File:        error.hpp
// Description: Exception types shared by the ocrvote library.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
///////////////////////////////////////////////////////////////////////

#ifndef OCRVOTE_ERROR_HPP
#define OCRVOTE_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ocrvote {

/// Invalid arguments supplied by a caller (bad fold counts, rates, ...).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input data that violates a format or a domain invariant.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A malformed record in a text document. line() is 1-based.
class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// An external trainer/recognizer command exited unsuccessfully.
class ExternalCommandError : public std::runtime_error {
 public:
  ExternalCommandError(const std::string& what, int status)
      : std::runtime_error(what), status_(status) {}

  int status() const noexcept { return status_; }

 private:
  int status_;
};

}  // namespace ocrvote

#endif  // OCRVOTE_ERROR_HPP
