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

#ifndef BLOCKMT_STATISTICS_H_
#define BLOCKMT_STATISTICS_H_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "blockmt/blocks.h"
#include "blockmt/corpus.h"

namespace blockmt {

struct SeqHash {
  using is_transparent = void;
  std::size_t operator()(std::span<const TokenId> seq) const;
};

struct SeqEqual {
  using is_transparent = void;
  bool operator()(std::span<const TokenId> a, std::span<const TokenId> b) const {
    return std::equal(a.begin(), a.end(), b.begin(), b.end());
  }
};

// Interned blocks of one side with occurrence counts. Length totals are the
// sums of counts per block length (the EMPTY block is left out of them) and
// normalize the monolingual probabilities.
class BlockTable {
 public:
  using Id = std::uint32_t;

  explicit BlockTable(Side side = Side::kSource) : side_(side) {}

  Side side() const { return side_; }
  std::size_t size() const { return blocks_.size(); }

  Id intern(std::span<const TokenId> tokens);
  Id add(std::span<const TokenId> tokens, std::uint64_t count);
  void add(Id id, std::uint64_t count);

  std::optional<Id> find(std::span<const TokenId> tokens) const;
  bool contains(std::span<const TokenId> tokens) const {
    return find(tokens).has_value();
  }

  std::span<const TokenId> tokens(Id id) const { return blocks_[id]; }
  std::uint64_t count(Id id) const { return counts_[id]; }
  // Zero for unknown blocks.
  std::uint64_t count(std::span<const TokenId> tokens) const;

  std::uint64_t total() const { return total_; }
  std::uint64_t length_total(std::size_t length) const;
  const std::vector<std::uint64_t>& length_totals() const {
    return length_totals_;
  }
  // Used when a table holds a filtered subset of blocks but probabilities
  // must stay normalized against the full counts.
  void set_length_totals(std::vector<std::uint64_t> totals);

  // count / length_total(|block|); zero for unknown blocks.
  double mono_probability(std::span<const TokenId> tokens) const;

  std::size_t max_length() const { return length_totals_.empty() ? 0 : length_totals_.size() - 1; }

 private:
  Side side_;
  std::vector<TokenSeq> blocks_;
  std::vector<std::uint64_t> counts_;
  std::unordered_map<TokenSeq, Id, SeqHash, SeqEqual> index_;
  std::vector<std::uint64_t> length_totals_;
  std::uint64_t total_ = 0;
};

struct JointCount {
  BlockTable::Id source = 0;
  BlockTable::Id target = 0;
  std::uint64_t count = 0;
};

// Occurrence counts n, n^S, n^T and n^{S,T} over a stream of pair records.
class CountTable {
 public:
  void add(std::span<const TokenId> source, std::span<const TokenId> target,
           std::uint64_t times = 1);
  void add(const PairRecord& record) {
    add(record.source.tokens, record.target.tokens);
  }
  // Commutative addition of another tally.
  void merge(const CountTable& other);

  std::uint64_t n() const { return n_; }
  const BlockTable& source() const { return source_; }
  const BlockTable& target() const { return target_; }
  const BlockTable& side(Side s) const {
    return s == Side::kSource ? source_ : target_;
  }

  std::uint64_t joint(std::span<const TokenId> source,
                      std::span<const TokenId> target) const;
  std::size_t joint_size() const { return joint_.size(); }
  // Sorted by (source id, target id).
  std::vector<JointCount> sorted_joint() const;

  // Content equality keyed by token sequences, independent of interning order.
  bool same_counts(const CountTable& other) const;

 private:
  static std::uint64_t key(BlockTable::Id s, BlockTable::Id t) {
    return (static_cast<std::uint64_t>(s) << 32) | t;
  }

  std::uint64_t n_ = 0;
  BlockTable source_{Side::kSource};
  BlockTable target_{Side::kTarget};
  std::unordered_map<std::uint64_t, std::uint64_t> joint_;
};

CountTable accumulate(std::span<const PairRecord> records);

// count / n. Throws kEmptyModel for n == 0.
double probability(std::uint64_t count, std::uint64_t n);

struct Conditionals {
  double p_t_given_s = 0;
  double p_s_given_t = 0;
  double p_joint = 0;
};

Conditionals conditionals(std::uint64_t n_st, std::uint64_t n_s,
                          std::uint64_t n_t, std::uint64_t n);

// C = P(S,T) - P(S) P(T).
double correlation(double p_joint, double p_a, double p_b);
// rho = C / (P(a) P(b)).
double relative_correlation(double correlation, double p_a, double p_b);

enum class GrowthMode { kAnySplit, kAllSplits };

const char* growth_mode_name(GrowthMode mode);
std::optional<GrowthMode> parse_growth_mode(std::string_view text);

// Correlation and relative correlation of `block` split after `cut` tokens,
// from length-normalized monolingual probabilities. Empty when either part or
// the block itself was never counted.
std::optional<double> split_correlation(const BlockTable& table,
                                        std::span<const TokenId> block,
                                        std::size_t cut);
std::optional<double> split_rho(const BlockTable& table,
                                std::span<const TokenId> block,
                                std::size_t cut);

// Admission flags indexed by BlockTable::Id.
using Admission = std::vector<bool>;

// Length-k blocks whose prefix/suffix split into admitted sub-blocks shows
// C > 0 (any split, or both splits under kAllSplits).
std::vector<BlockTable::Id> grow_blocks(const BlockTable& table,
                                        const Admission& admitted,
                                        std::size_t k, GrowthMode mode);

// Runs growth from single words up to `max_len`.
Admission admit_blocks(const BlockTable& table, std::size_t max_len,
                       GrowthMode mode);

struct ThresholdConfig {
  double cs_pos = 1.0;
  double cs_neg = 0.5;
  double ct_pos = 1.0;
  double ct_neg = 0.5;
  double cts_pos = 1.0;
  double cts_neg = 0.5;
  std::uint64_t min_count = 1;
  GrowthMode growth_mode = GrowthMode::kAnySplit;

  bool operator==(const ThresholdConfig&) const = default;
};

void validate(const ThresholdConfig& config);

class Model;

// Threshold-filtered S, T and TS dictionaries. The result carries no
// vocabularies and no LAF table; see train_model.
Model build_dictionaries(const CountTable& counts,
                         const ThresholdConfig& thresholds);

struct CognateList {
  std::vector<std::pair<std::string, std::string>> pairs;
};

// TSV `source<TAB>target`, '#' comments. Throws kParse with the line number.
CognateList parse_cognates(std::istream& in);

class CognateFilter {
 public:
  CognateFilter() = default;
  CognateFilter(const CognateList& list, const Vocabulary& source,
                const Vocabulary& target);

  bool empty() const { return source_links_.empty(); }
  // False when one side holds a listed cognate whose counterpart is missing
  // from the other side.
  bool keep(std::span<const TokenId> source,
            std::span<const TokenId> target) const;

 private:
  std::unordered_map<TokenId, std::vector<TokenId>> source_links_;
  std::unordered_map<TokenId, std::vector<TokenId>> target_links_;
};

std::vector<PairRecord> filter_cognates(std::span<const PairRecord> records,
                                        const CognateFilter& filter);

}  // namespace blockmt

#endif  // BLOCKMT_STATISTICS_H_
