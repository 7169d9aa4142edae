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

#ifndef BLOCKMT_BLOCKS_H_
#define BLOCKMT_BLOCKS_H_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "blockmt/corpus.h"

namespace blockmt {

// An ordered contiguous run of tokens from one sentence. The EMPTY block is
// the single reserved token kEmptyId.
struct Block {
  Side side = Side::kSource;
  TokenSeq tokens;

  std::size_t size() const { return tokens.size(); }
  bool is_empty_block() const {
    return tokens.size() == 1 && tokens.front() == kEmptyId;
  }
  auto operator<=>(const Block&) const = default;
};

Block empty_block(Side side);

struct BlockSpan {
  std::size_t start = 0;
  std::size_t length = 0;

  std::size_t end() const { return start + length; }
  auto operator<=>(const BlockSpan&) const = default;
};

enum class Alternative { kAllIn, kSymmetric };

// "a" for all-in, "b" for symmetric.
const char* alternative_name(Alternative alternative);
std::optional<Alternative> parse_alternative(std::string_view text);

inline constexpr std::uint64_t kUnboundedBudget =
    std::numeric_limits<std::uint64_t>::max();

struct PairGenConfig {
  Alternative alternative = Alternative::kAllIn;
  std::size_t max_block_len = 3;
  std::uint64_t budget = kUnboundedBudget;
  bool emit_empty = false;
  // Cap on the number of segments per sentence in the symmetric alternative.
  std::size_t w_max = 8;

  bool operator==(const PairGenConfig&) const = default;
};

// Throws Error(kDomain) when a field is out of range.
void validate(const PairGenConfig& config);

struct PairRecord {
  Block source;
  Block target;

  bool operator==(const PairRecord&) const = default;
};

struct PairBatch {
  std::vector<PairRecord> records;
  bool truncated = false;
};

// Every contiguous span of length 1..min(max_len, length), ordered by start
// and then by length.
std::vector<BlockSpan> enumerate_block_spans(std::size_t length,
                                             std::size_t max_len);
std::vector<Block> enumerate_blocks(std::span<const TokenId> sentence,
                                    std::size_t max_len,
                                    Side side = Side::kSource);

// Number of blocks of length <= l in a sentence of length L:
// l(2L - l + 1) / 2.
std::uint64_t count_blocks_formula(std::uint64_t sentence_len,
                                   std::uint64_t max_len);
// l^2 (2Ls - l + 1)(2Lt - l + 1) / 4.
std::uint64_t count_pairs_formula(std::uint64_t source_len,
                                  std::uint64_t target_len,
                                  std::uint64_t max_len);

// All splits of a sentence of `length` tokens into `parts` contiguous blocks
// of at most `max_len` tokens, in lexicographic order of the cut positions.
std::vector<std::vector<BlockSpan>> enumerate_splits(std::size_t length,
                                                     std::size_t parts,
                                                     std::size_t max_len);
// Number of such splits (saturating).
std::uint64_t count_splits(std::size_t length, std::size_t parts,
                           std::size_t max_len);

using PairSink = std::function<void(std::span<const TokenId> source,
                                    std::span<const TokenId> target)>;

// Streams the records of one sentence pair in canonical order, decrementing
// `remaining` per record. Returns false when the budget ran out first.
bool emit_pairs(const SentencePair& pair, const PairGenConfig& config,
                std::uint64_t& remaining, const PairSink& sink);

// Records the pair would emit with an unbounded budget (saturating).
std::uint64_t pair_record_count(const SentencePair& pair,
                                const PairGenConfig& config);

PairBatch generate_pairs_all_in(const SentencePair& pair,
                                const PairGenConfig& config);
PairBatch generate_pairs_symmetric(const SentencePair& pair,
                                   const PairGenConfig& config);

// Debug dump: `src-block<TAB>tgt-block` per record.
void write_pair_records(std::ostream& out, std::span<const PairRecord> records,
                        const Vocabulary& source, const Vocabulary& target);

}  // namespace blockmt

#endif  // BLOCKMT_BLOCKS_H_
