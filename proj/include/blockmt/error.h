// Copyright 2026 The BlockMT Authors.
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

#ifndef BLOCKMT_ERROR_H_
#define BLOCKMT_ERROR_H_

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace blockmt {

enum class ErrorCode {
  kMalformedLine,
  kEmptySentence,
  kEncoding,
  kDomain,
  kEmptyModel,
  kUndefinedConditional,
  kParse,
  kChecksum,
  kUnsupportedVersion,
  kUnsupportedSection,
  kMalformedModel,
  kOracleBound,
  kEmptyInput,
  kIo,
};

const char* error_code_name(ErrorCode code);

// All recoverable failures in the library are reported through this type.
// `line()` is set for errors that point at a position in a text input.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> line = std::nullopt);

  ErrorCode code() const { return code_; }
  std::optional<std::size_t> line() const { return line_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> line_;
};

}  // namespace blockmt

#endif  // BLOCKMT_ERROR_H_
