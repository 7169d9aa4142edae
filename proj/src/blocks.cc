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

#include "blockmt/blocks.h"

#include <algorithm>
#include <string>

#include "blockmt/error.h"

namespace blockmt {

namespace {

constexpr TokenId kEmptyToken[] = {kEmptyId};

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  return a > kUnboundedBudget - b ? kUnboundedBudget : a + b;
}

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  return a > kUnboundedBudget / b ? kUnboundedBudget : a * b;
}

void split_recursive(std::size_t pos, std::size_t length, std::size_t parts,
                     std::size_t max_len, std::vector<BlockSpan>& current,
                     std::vector<std::vector<BlockSpan>>& out) {
  const std::size_t left = length - pos;
  if (parts == 0) {
    if (left == 0) out.push_back(current);
    return;
  }
  if (left < parts || left > parts * max_len) return;
  for (std::size_t len = 1; len <= std::min(max_len, left); ++len) {
    current.push_back({pos, len});
    split_recursive(pos + len, length, parts - 1, max_len, current, out);
    current.pop_back();
  }
}

}  // namespace

Block empty_block(Side side) { return Block{side, {kEmptyId}}; }

const char* alternative_name(Alternative alternative) {
  return alternative == Alternative::kAllIn ? "a" : "b";
}

std::optional<Alternative> parse_alternative(std::string_view text) {
  if (text == "a") return Alternative::kAllIn;
  if (text == "b") return Alternative::kSymmetric;
  return std::nullopt;
}

void validate(const PairGenConfig& config) {
  if (config.max_block_len < 1) {
    throw Error(ErrorCode::kDomain, "max block length must be >= 1");
  }
  if (config.budget < 1) throw Error(ErrorCode::kDomain, "budget must be >= 1");
  if (config.w_max < 1) throw Error(ErrorCode::kDomain, "w_max must be >= 1");
}

std::vector<BlockSpan> enumerate_block_spans(std::size_t length,
                                             std::size_t max_len) {
  std::vector<BlockSpan> spans;
  for (std::size_t start = 0; start < length; ++start) {
    for (std::size_t len = 1; len <= max_len && start + len <= length; ++len) {
      spans.push_back({start, len});
    }
  }
  return spans;
}

std::vector<Block> enumerate_blocks(std::span<const TokenId> sentence,
                                    std::size_t max_len, Side side) {
  if (sentence.empty()) {
    throw Error(ErrorCode::kEmptySentence, "cannot enumerate blocks of an "
                                           "empty sentence");
  }
  std::vector<Block> blocks;
  for (const BlockSpan& span : enumerate_block_spans(sentence.size(), max_len)) {
    auto tokens = sentence.subspan(span.start, span.length);
    blocks.push_back(Block{side, TokenSeq(tokens.begin(), tokens.end())});
  }
  return blocks;
}

std::uint64_t count_blocks_formula(std::uint64_t sentence_len,
                                   std::uint64_t max_len) {
  if (max_len < 1 || sentence_len < 1 || max_len > sentence_len) {
    throw Error(ErrorCode::kDomain,
                "block count needs 1 <= l <= L, got l=" +
                    std::to_string(max_len) +
                    " L=" + std::to_string(sentence_len));
  }
  return max_len * (2 * sentence_len - max_len + 1) / 2;
}

std::uint64_t count_pairs_formula(std::uint64_t source_len,
                                  std::uint64_t target_len,
                                  std::uint64_t max_len) {
  if (max_len < 1 || max_len > std::min(source_len, target_len)) {
    throw Error(ErrorCode::kDomain,
                "pair count needs 1 <= l <= min(Ls, Lt)");
  }
  // l(2L-l+1) is always even, so the two halves divide exactly.
  return count_blocks_formula(source_len, max_len) *
         count_blocks_formula(target_len, max_len);
}

std::vector<std::vector<BlockSpan>> enumerate_splits(std::size_t length,
                                                     std::size_t parts,
                                                     std::size_t max_len) {
  std::vector<std::vector<BlockSpan>> out;
  std::vector<BlockSpan> current;
  if (parts == 0 || max_len == 0) return out;
  split_recursive(0, length, parts, max_len, current, out);
  return out;
}

std::uint64_t count_splits(std::size_t length, std::size_t parts,
                           std::size_t max_len) {
  // ways[p][n]: splits of n tokens into p blocks.
  std::vector<std::uint64_t> prev(length + 1, 0), next(length + 1, 0);
  prev[0] = 1;
  for (std::size_t p = 1; p <= parts; ++p) {
    std::fill(next.begin(), next.end(), 0);
    for (std::size_t n = 1; n <= length; ++n) {
      for (std::size_t len = 1; len <= std::min(max_len, n); ++len) {
        next[n] = saturating_add(next[n], prev[n - len]);
      }
    }
    std::swap(prev, next);
  }
  return parts == 0 ? (length == 0 ? 1 : 0) : prev[length];
}

std::uint64_t pair_record_count(const SentencePair& pair,
                                const PairGenConfig& config) {
  const std::size_t ls = pair.source.size();
  const std::size_t lt = pair.target.size();
  if (config.alternative == Alternative::kAllIn) {
    const std::uint64_t ns =
        count_blocks_formula(ls, std::min(ls, config.max_block_len));
    const std::uint64_t nt =
        count_blocks_formula(lt, std::min(lt, config.max_block_len));
    std::uint64_t total = saturating_mul(ns, nt);
    if (config.emit_empty) total = saturating_add(total, ns + nt);
    return total;
  }
  std::uint64_t total = 0;
  const std::size_t w_top = std::min({ls, lt, config.w_max});
  for (std::size_t w = 1; w <= w_top; ++w) {
    const std::uint64_t combos =
        saturating_mul(count_splits(ls, w, config.max_block_len),
                       count_splits(lt, w, config.max_block_len));
    total = saturating_add(total, saturating_mul(combos, w));
  }
  return total;
}

bool emit_pairs(const SentencePair& pair, const PairGenConfig& config,
                std::uint64_t& remaining, const PairSink& sink) {
  const std::span<const TokenId> src(pair.source);
  const std::span<const TokenId> tgt(pair.target);
  const std::span<const TokenId> empty(kEmptyToken);
  auto emit = [&](std::span<const TokenId> s, std::span<const TokenId> t) {
    if (remaining == 0) return false;
    if (remaining != kUnboundedBudget) --remaining;
    sink(s, t);
    return true;
  };

  if (config.alternative == Alternative::kAllIn) {
    const auto src_spans = enumerate_block_spans(src.size(), config.max_block_len);
    const auto tgt_spans = enumerate_block_spans(tgt.size(), config.max_block_len);
    for (const auto& s : src_spans) {
      for (const auto& t : tgt_spans) {
        if (!emit(src.subspan(s.start, s.length), tgt.subspan(t.start, t.length)))
          return false;
      }
    }
    if (config.emit_empty) {
      for (const auto& s : src_spans) {
        if (!emit(src.subspan(s.start, s.length), empty)) return false;
      }
      for (const auto& t : tgt_spans) {
        if (!emit(empty, tgt.subspan(t.start, t.length))) return false;
      }
    }
    return true;
  }

  const std::size_t w_top = std::min({src.size(), tgt.size(), config.w_max});
  for (std::size_t w = 1; w <= w_top; ++w) {
    const auto src_splits = enumerate_splits(src.size(), w, config.max_block_len);
    if (src_splits.empty()) continue;
    const auto tgt_splits = enumerate_splits(tgt.size(), w, config.max_block_len);
    for (const auto& ss : src_splits) {
      for (const auto& ts : tgt_splits) {
        for (std::size_t j = 0; j < w; ++j) {
          if (!emit(src.subspan(ss[j].start, ss[j].length),
                    tgt.subspan(ts[j].start, ts[j].length)))
            return false;
        }
      }
    }
  }
  return true;
}

namespace {

PairBatch collect(const SentencePair& pair, const PairGenConfig& config) {
  validate(config);
  PairBatch batch;
  std::uint64_t remaining = config.budget;
  batch.truncated = !emit_pairs(
      pair, config, remaining,
      [&](std::span<const TokenId> s, std::span<const TokenId> t) {
        batch.records.push_back(
            PairRecord{Block{Side::kSource, TokenSeq(s.begin(), s.end())},
                       Block{Side::kTarget, TokenSeq(t.begin(), t.end())}});
      });
  return batch;
}

}  // namespace

PairBatch generate_pairs_all_in(const SentencePair& pair,
                                const PairGenConfig& config) {
  if (config.alternative != Alternative::kAllIn) {
    throw Error(ErrorCode::kDomain, "generate_pairs_all_in needs alternative a");
  }
  return collect(pair, config);
}

PairBatch generate_pairs_symmetric(const SentencePair& pair,
                                   const PairGenConfig& config) {
  if (config.alternative != Alternative::kSymmetric) {
    throw Error(ErrorCode::kDomain,
                "generate_pairs_symmetric needs alternative b");
  }
  return collect(pair, config);
}

void write_pair_records(std::ostream& out, std::span<const PairRecord> records,
                        const Vocabulary& source, const Vocabulary& target) {
  for (const PairRecord& r : records) {
    out << render_tokens(r.source.tokens, source) << '\t'
        << render_tokens(r.target.tokens, target) << '\n';
  }
}

}  // namespace blockmt
