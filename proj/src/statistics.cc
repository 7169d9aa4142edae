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

#include "blockmt/statistics.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "blockmt/error.h"
#include "blockmt/model.h"

namespace blockmt {

std::size_t SeqHash::operator()(std::span<const TokenId> seq) const {
  std::size_t h = 0x9e3779b97f4a7c15ULL ^ seq.size();
  for (TokenId id : seq) {
    h ^= static_cast<std::size_t>(id) + 0x9e3779b97f4a7c15ULL + (h << 6) +
         (h >> 2);
  }
  return h;
}

BlockTable::Id BlockTable::intern(std::span<const TokenId> tokens) {
  if (auto it = index_.find(tokens); it != index_.end()) return it->second;
  const auto id = static_cast<Id>(blocks_.size());
  blocks_.emplace_back(tokens.begin(), tokens.end());
  counts_.push_back(0);
  index_.emplace(blocks_.back(), id);
  return id;
}

BlockTable::Id BlockTable::add(std::span<const TokenId> tokens,
                               std::uint64_t count) {
  const Id id = intern(tokens);
  add(id, count);
  return id;
}

void BlockTable::add(Id id, std::uint64_t count) {
  counts_[id] += count;
  total_ += count;
  const auto& tokens = blocks_[id];
  if (tokens.size() == 1 && tokens.front() == kEmptyId) return;
  if (length_totals_.size() <= tokens.size()) {
    length_totals_.resize(tokens.size() + 1, 0);
  }
  length_totals_[tokens.size()] += count;
}

std::optional<BlockTable::Id> BlockTable::find(
    std::span<const TokenId> tokens) const {
  if (auto it = index_.find(tokens); it != index_.end()) return it->second;
  return std::nullopt;
}

std::uint64_t BlockTable::count(std::span<const TokenId> tokens) const {
  const auto id = find(tokens);
  return id ? counts_[*id] : 0;
}

std::uint64_t BlockTable::length_total(std::size_t length) const {
  return length < length_totals_.size() ? length_totals_[length] : 0;
}

void BlockTable::set_length_totals(std::vector<std::uint64_t> totals) {
  length_totals_ = std::move(totals);
}

double BlockTable::mono_probability(std::span<const TokenId> tokens) const {
  const std::uint64_t c = count(tokens);
  const std::uint64_t total = length_total(tokens.size());
  if (c == 0 || total == 0) return 0.0;
  return static_cast<double>(c) / static_cast<double>(total);
}

void CountTable::add(std::span<const TokenId> source,
                     std::span<const TokenId> target, std::uint64_t times) {
  const auto s = source_.add(source, times);
  const auto t = target_.add(target, times);
  joint_[key(s, t)] += times;
  n_ += times;
}

void CountTable::merge(const CountTable& other) {
  std::vector<BlockTable::Id> source_map(other.source_.size());
  std::vector<BlockTable::Id> target_map(other.target_.size());
  for (BlockTable::Id id = 0; id < other.source_.size(); ++id) {
    source_map[id] = source_.add(other.source_.tokens(id), other.source_.count(id));
  }
  for (BlockTable::Id id = 0; id < other.target_.size(); ++id) {
    target_map[id] = target_.add(other.target_.tokens(id), other.target_.count(id));
  }
  for (const auto& [k, c] : other.joint_) {
    const auto s = static_cast<BlockTable::Id>(k >> 32);
    const auto t = static_cast<BlockTable::Id>(k & 0xffffffffULL);
    joint_[key(source_map[s], target_map[t])] += c;
  }
  n_ += other.n_;
}

std::uint64_t CountTable::joint(std::span<const TokenId> source,
                                std::span<const TokenId> target) const {
  const auto s = source_.find(source);
  const auto t = target_.find(target);
  if (!s || !t) return 0;
  auto it = joint_.find(key(*s, *t));
  return it == joint_.end() ? 0 : it->second;
}

std::vector<JointCount> CountTable::sorted_joint() const {
  std::vector<JointCount> out;
  out.reserve(joint_.size());
  for (const auto& [k, c] : joint_) {
    out.push_back({static_cast<BlockTable::Id>(k >> 32),
                   static_cast<BlockTable::Id>(k & 0xffffffffULL), c});
  }
  std::sort(out.begin(), out.end(), [](const JointCount& a, const JointCount& b) {
    return a.source != b.source ? a.source < b.source : a.target < b.target;
  });
  return out;
}

bool CountTable::same_counts(const CountTable& other) const {
  if (n_ != other.n_ || joint_.size() != other.joint_.size() ||
      source_.size() != other.source_.size() ||
      target_.size() != other.target_.size()) {
    return false;
  }
  for (BlockTable::Id id = 0; id < source_.size(); ++id) {
    if (other.source_.count(source_.tokens(id)) != source_.count(id)) return false;
  }
  for (BlockTable::Id id = 0; id < target_.size(); ++id) {
    if (other.target_.count(target_.tokens(id)) != target_.count(id)) return false;
  }
  for (const auto& [k, c] : joint_) {
    const auto s = source_.tokens(static_cast<BlockTable::Id>(k >> 32));
    const auto t = target_.tokens(static_cast<BlockTable::Id>(k & 0xffffffffULL));
    if (other.joint(s, t) != c) return false;
  }
  return true;
}

CountTable accumulate(std::span<const PairRecord> records) {
  CountTable table;
  for (const PairRecord& r : records) table.add(r);
  return table;
}

double probability(std::uint64_t count, std::uint64_t n) {
  if (n == 0) throw Error(ErrorCode::kEmptyModel, "probability with n = 0");
  if (count > n) {
    throw Error(ErrorCode::kDomain, "count exceeds total in probability");
  }
  return static_cast<double>(count) / static_cast<double>(n);
}

Conditionals conditionals(std::uint64_t n_st, std::uint64_t n_s,
                          std::uint64_t n_t, std::uint64_t n) {
  if (n_s == 0 || n_t == 0) {
    throw Error(ErrorCode::kUndefinedConditional,
                "conditional probability with a zero marginal");
  }
  if (n_st == 0) {
    throw Error(ErrorCode::kUndefinedConditional,
                "stored pair with zero joint count");
  }
  if (n_st > std::min(n_s, n_t)) {
    throw Error(ErrorCode::kDomain, "joint count exceeds a marginal");
  }
  Conditionals out;
  out.p_t_given_s = static_cast<double>(n_st) / static_cast<double>(n_s);
  out.p_s_given_t = static_cast<double>(n_st) / static_cast<double>(n_t);
  out.p_joint = probability(n_st, n);
  return out;
}

double correlation(double p_joint, double p_a, double p_b) {
  return p_joint - p_a * p_b;
}

double relative_correlation(double correlation, double p_a, double p_b) {
  if (!(p_a > 0.0) || !(p_b > 0.0)) {
    throw Error(ErrorCode::kDomain,
                "relative correlation needs positive marginals");
  }
  return correlation / (p_a * p_b);
}

const char* growth_mode_name(GrowthMode mode) {
  return mode == GrowthMode::kAnySplit ? "any_split" : "all_splits";
}

std::optional<GrowthMode> parse_growth_mode(std::string_view text) {
  if (text == "any_split") return GrowthMode::kAnySplit;
  if (text == "all_splits") return GrowthMode::kAllSplits;
  return std::nullopt;
}

namespace {

struct SplitProbabilities {
  double whole, left, right;
};

std::optional<SplitProbabilities> split_probabilities(
    const BlockTable& table, std::span<const TokenId> block, std::size_t cut) {
  if (cut == 0 || cut >= block.size()) return std::nullopt;
  const double whole = table.mono_probability(block);
  const double left = table.mono_probability(block.first(cut));
  const double right = table.mono_probability(block.subspan(cut));
  if (whole <= 0.0 || left <= 0.0 || right <= 0.0) return std::nullopt;
  return SplitProbabilities{whole, left, right};
}

}  // namespace

std::optional<double> split_correlation(const BlockTable& table,
                                        std::span<const TokenId> block,
                                        std::size_t cut) {
  const auto p = split_probabilities(table, block, cut);
  if (!p) return std::nullopt;
  return correlation(p->whole, p->left, p->right);
}

std::optional<double> split_rho(const BlockTable& table,
                                std::span<const TokenId> block,
                                std::size_t cut) {
  const auto p = split_probabilities(table, block, cut);
  if (!p) return std::nullopt;
  return relative_correlation(correlation(p->whole, p->left, p->right),
                              p->left, p->right);
}

std::vector<BlockTable::Id> grow_blocks(const BlockTable& table,
                                        const Admission& admitted,
                                        std::size_t k, GrowthMode mode) {
  std::vector<BlockTable::Id> out;
  if (k < 2) return out;
  auto is_admitted = [&](std::span<const TokenId> part) {
    const auto id = table.find(part);
    return id && *id < admitted.size() && admitted[*id];
  };
  for (BlockTable::Id id = 0; id < table.size(); ++id) {
    const auto block = table.tokens(id);
    if (block.size() != k) continue;
    // Prefix split (k-1 | 1) and suffix split (1 | k-1); one split for k = 2.
    const std::size_t cuts[2] = {k - 1, 1};
    const std::size_t num_cuts = k == 2 ? 1 : 2;
    std::size_t positive = 0;
    for (std::size_t i = 0; i < num_cuts; ++i) {
      const std::size_t cut = cuts[i];
      if (!is_admitted(block.first(cut)) || !is_admitted(block.subspan(cut))) {
        continue;
      }
      const auto c = split_correlation(table, block, cut);
      if (c && *c > 0.0) ++positive;
    }
    const bool admit = mode == GrowthMode::kAnySplit ? positive > 0
                                                     : positive == num_cuts;
    if (admit) out.push_back(id);
  }
  return out;
}

Admission admit_blocks(const BlockTable& table, std::size_t max_len,
                       GrowthMode mode) {
  Admission admitted(table.size(), false);
  for (BlockTable::Id id = 0; id < table.size(); ++id) {
    if (table.tokens(id).size() == 1) admitted[id] = true;
  }
  for (std::size_t k = 2; k <= max_len; ++k) {
    for (BlockTable::Id id : grow_blocks(table, admitted, k, mode)) {
      admitted[id] = true;
    }
  }
  return admitted;
}

void validate(const ThresholdConfig& config) {
  for (double c : {config.cs_pos, config.cs_neg, config.ct_pos, config.ct_neg,
                   config.cts_pos, config.cts_neg}) {
    if (!(c >= 0.0) || !std::isfinite(c)) {
      throw Error(ErrorCode::kDomain, "thresholds must be finite and >= 0");
    }
  }
  if (config.min_count < 1) {
    throw Error(ErrorCode::kDomain, "min_count must be >= 1");
  }
}

namespace {

// Single words always stay (subject to min_count); longer blocks need
// admission by growth and a split whose relative correlation clears the
// positive threshold.
BlockTable build_side(const BlockTable& counts, double positive,
                      std::uint64_t min_count, GrowthMode mode) {
  BlockTable dict(counts.side());
  const Admission admitted = admit_blocks(counts, counts.max_length(), mode);
  for (BlockTable::Id id = 0; id < counts.size(); ++id) {
    const auto block = counts.tokens(id);
    if (counts.count(id) < min_count) continue;
    if (block.size() == 1) {
      dict.add(block, counts.count(id));
      continue;
    }
    if (!admitted[id]) continue;
    bool words_present = true;
    for (TokenId t : block) {
      const TokenId word[] = {t};
      if (counts.count(word) < min_count) words_present = false;
    }
    if (!words_present) continue;
    bool passes = false;
    for (std::size_t cut = 1; cut < block.size() && !passes; ++cut) {
      const auto rho = split_rho(counts, block, cut);
      passes = rho && *rho > positive;
    }
    if (passes) dict.add(block, counts.count(id));
  }
  dict.set_length_totals(counts.length_totals());
  return dict;
}

}  // namespace

Model build_dictionaries(const CountTable& counts,
                         const ThresholdConfig& thresholds) {
  validate(thresholds);
  if (counts.n() == 0) {
    throw Error(ErrorCode::kEmptyModel, "no pair records to build a model from");
  }
  Model model;
  model.n = counts.n();
  model.thresholds = thresholds;
  model.source_dict = build_side(counts.source(), thresholds.cs_pos,
                                 thresholds.min_count, thresholds.growth_mode);
  model.target_dict = build_side(counts.target(), thresholds.ct_pos,
                                 thresholds.min_count, thresholds.growth_mode);
  const double n = static_cast<double>(counts.n());
  for (const JointCount& jc : counts.sorted_joint()) {
    if (jc.count < thresholds.min_count) continue;
    const auto s_tokens = counts.source().tokens(jc.source);
    const auto t_tokens = counts.target().tokens(jc.target);
    const auto s = model.source_dict.find(s_tokens);
    const auto t = model.target_dict.find(t_tokens);
    if (!s || !t) continue;
    const double p_joint = static_cast<double>(jc.count) / n;
    const double p_s = static_cast<double>(counts.source().count(jc.source)) / n;
    const double p_t = static_cast<double>(counts.target().count(jc.target)) / n;
    const double rho =
        relative_correlation(correlation(p_joint, p_s, p_t), p_s, p_t);
    const bool prohibited = rho < -thresholds.cts_neg;
    const bool word_pair = s_tokens.size() == 1 && t_tokens.size() == 1;
    if (word_pair || prohibited || rho > thresholds.cts_pos) {
      model.entries.push_back(TsEntry{*s, *t, jc.count, prohibited});
    }
  }
  model.rebuild_index();
  return model;
}

CognateList parse_cognates(std::istream& in) {
  CognateList list;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      throw Error(ErrorCode::kParse, "cognate line needs exactly one tab",
                  line_no);
    }
    std::string source = line.substr(0, tab);
    std::string target = line.substr(tab + 1);
    if (split_whitespace(source).size() != 1 ||
        split_whitespace(target).size() != 1) {
      throw Error(ErrorCode::kParse, "cognate fields must be single tokens",
                  line_no);
    }
    list.pairs.emplace_back(std::string(split_whitespace(source)[0]),
                            std::string(split_whitespace(target)[0]));
  }
  return list;
}

CognateFilter::CognateFilter(const CognateList& list, const Vocabulary& source,
                             const Vocabulary& target) {
  for (const auto& [s, t] : list.pairs) {
    const auto sid = source.find(s);
    const auto tid = target.find(t);
    // A cognate absent from one vocabulary can never be matched; listing it
    // still marks the other word as a cognate.
    const TokenId s_link = sid.value_or(kOovId);
    const TokenId t_link = tid.value_or(kOovId);
    if (sid) source_links_[*sid].push_back(t_link);
    if (tid) target_links_[*tid].push_back(s_link);
  }
}

bool CognateFilter::keep(std::span<const TokenId> source,
                         std::span<const TokenId> target) const {
  auto has_counterpart = [](std::span<const TokenId> other,
                            const std::vector<TokenId>& links) {
    return std::any_of(links.begin(), links.end(), [&](TokenId l) {
      return l != kOovId &&
             std::find(other.begin(), other.end(), l) != other.end();
    });
  };
  for (TokenId s : source) {
    auto it = source_links_.find(s);
    if (it != source_links_.end() && !has_counterpart(target, it->second)) {
      return false;
    }
  }
  for (TokenId t : target) {
    auto it = target_links_.find(t);
    if (it != target_links_.end() && !has_counterpart(source, it->second)) {
      return false;
    }
  }
  return true;
}

std::vector<PairRecord> filter_cognates(std::span<const PairRecord> records,
                                        const CognateFilter& filter) {
  std::vector<PairRecord> out;
  for (const PairRecord& r : records) {
    if (filter.empty() || filter.keep(r.source.tokens, r.target.tokens)) {
      out.push_back(r);
    }
  }
  return out;
}

}  // namespace blockmt
