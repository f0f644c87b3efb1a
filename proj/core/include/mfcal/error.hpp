// Copyright 2026 The mfcal Authors. All Rights Reserved.
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

#include <stdexcept>
#include <string>

namespace mfcal {

/// Broad failure classes. The CLI maps each to a distinct exit code.
enum class ErrorKind {
  kInvalidArgument,  // violated precondition on a flag or argument
  kIo,               // filesystem failure
  kFormat,           // malformed serialized input
  kNumerical,        // well-formed input with no numerical answer
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Specific decoding failures for PGM and field containers.
enum class FormatIssue {
  kBadMagic,
  kBadHeader,
  kTruncated,
  kBadMaxval,
  kUnsupportedVersion,
  kUnsupportedDtype,
  kBadDims,
  kDimensionOverflow,
  kBadCsv,
};

const char* to_string(FormatIssue issue) noexcept;

class FormatError : public Error {
 public:
  FormatError(FormatIssue issue, const std::string& what)
      : Error(ErrorKind::kFormat, what), issue_(issue) {}

  FormatIssue issue() const noexcept { return issue_; }

 private:
  FormatIssue issue_;
};

[[noreturn]] inline void throw_invalid(const std::string& what) {
  throw Error(ErrorKind::kInvalidArgument, what);
}

[[noreturn]] inline void throw_numerical(const std::string& what) {
  throw Error(ErrorKind::kNumerical, what);
}

}  // namespace mfcal
