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

#ifndef BLOCKMT_CLI_H_
#define BLOCKMT_CLI_H_

#include <istream>
#include <ostream>

namespace blockmt {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

// Entry point of the `blockmt` tool with subcommands train, translate,
// lookup and stats. Returns 0 on success, 1 on usage errors and 2 on data
// errors; diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::istream& in,
            std::ostream& out, std::ostream& err);

}  // namespace blockmt

#endif  // BLOCKMT_CLI_H_
