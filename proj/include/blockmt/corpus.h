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

#ifndef BLOCKMT_CORPUS_H_
#define BLOCKMT_CORPUS_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace blockmt {

enum class Side : std::uint8_t { kSource, kTarget };

const char* side_name(Side side);

using TokenId = std::uint32_t;
using TokenSeq = std::vector<TokenId>;

// Reserved ids, present in every vocabulary.
inline constexpr TokenId kEmptyId = 0;
inline constexpr TokenId kOovId = 1;
inline constexpr std::string_view kEmptySurface = "<EMPTY>";
inline constexpr std::string_view kOovSurface = "<OOV>";

struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const {
    return std::hash<std::string_view>{}(s);
  }
};

// Interned surface tokens of one language side. Ids are dense and assigned
// in first-occurrence order after the two reserved entries.
class Vocabulary {
 public:
  explicit Vocabulary(Side side);

  Side side() const { return side_; }
  std::size_t size() const { return entries_.size(); }

  TokenId intern(std::string_view surface);
  std::optional<TokenId> find(std::string_view surface) const;
  const std::string& surface(TokenId id) const;

  const std::vector<std::string>& entries() const { return entries_; }

  bool operator==(const Vocabulary& other) const {
    return side_ == other.side_ && entries_ == other.entries_;
  }

 private:
  Side side_;
  std::vector<std::string> entries_;
  std::unordered_map<std::string, TokenId, StringHash, std::equal_to<>> ids_;
};

struct SentencePair {
  std::size_t index = 0;
  TokenSeq source;
  TokenSeq target;

  bool operator==(const SentencePair&) const = default;
};

struct ParsedCorpus {
  Vocabulary source_vocab{Side::kSource};
  Vocabulary target_vocab{Side::kTarget};
  std::vector<SentencePair> pairs;
};

struct ParseOptions {
  std::optional<std::size_t> max_pairs;
  bool lowercase = false;
};

// Reads `source<TAB>target` lines. Blank lines and lines starting with '#'
// are skipped. Throws Error with the 1-based physical line number on
// malformed input.
ParsedCorpus parse_corpus(std::istream& in, const ParseOptions& options = {});

struct TokenizedSentence {
  TokenSeq ids;
  // Surface form of every token, kept so unknown words can be copied through.
  std::vector<std::string> surfaces;
};

TokenizedSentence tokenize_sentence(std::string_view raw, Vocabulary& vocab,
                                    bool frozen, bool lowercase = false);
TokenizedSentence tokenize_frozen(std::string_view raw, const Vocabulary& vocab,
                                  bool lowercase = false);

// Splits on ASCII whitespace.
std::vector<std::string_view> split_whitespace(std::string_view text);

std::string render_tokens(std::span<const TokenId> tokens,
                          const Vocabulary& vocab);
std::string render_pair(const SentencePair& pair, const Vocabulary& source,
                        const Vocabulary& target);

bool is_valid_utf8(std::string_view text);
std::string ascii_lowercase(std::string_view text);

}  // namespace blockmt

#endif  // BLOCKMT_CORPUS_H_
