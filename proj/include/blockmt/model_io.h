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

#ifndef BLOCKMT_MODEL_IO_H_
#define BLOCKMT_MODEL_IO_H_

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "blockmt/model.h"

namespace blockmt {

inline constexpr std::string_view kModelHeader = "#BLOCKMT v1";

// Text model format, version 1. Blocks are written by surface and sorted by
// (length, surfaces), so a loaded and re-saved model is byte-identical. The
// trailing `#CHECKSUM` line holds the CRC-32 of every preceding byte.
std::string serialize_model(const Model& model);

// Verifies the checksum before anything else. Throws kChecksum,
// kUnsupportedVersion, kUnsupportedSection or kMalformedModel.
Model parse_model(std::string_view text);

void save_model(const Model& model, std::ostream& out);
Model load_model(std::istream& in);

// File variants; I/O failures throw kIo.
void save_model_file(const Model& model, const std::string& path);
Model load_model_file(const std::string& path);

// Real numbers with 17 significant digits and their exact inverse.
std::string format_double(double value);
double parse_double(std::string_view text);

std::uint32_t crc32_of(std::string_view bytes);

}  // namespace blockmt

#endif  // BLOCKMT_MODEL_IO_H_
