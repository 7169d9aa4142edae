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

#include "blockmt/adhesion.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <unordered_map>

#include "blockmt/error.h"
#include "blockmt/model.h"
#include "blockmt/statistics.h"

namespace blockmt {

double gaf(double p) {
  if (!(p > 0.0)) throw Error(ErrorCode::kDomain, "GAF needs p > 0");
  return 1.0 / p;
}

double laf_context(double p_triple, double p_left, double p_right) {
  if (!(p_triple > 0.0) || !(p_left > 0.0) || !(p_right > 0.0)) {
    throw Error(ErrorCode::kDomain, "LAF context needs positive probabilities");
  }
  return p_triple / (p_left * p_right);
}

void LafTable::set(Side side, TokenId token, LafEntry entry) {
  (side == Side::kSource ? source_ : target_)[token] = entry;
}

std::optional<LafEntry> LafTable::find(Side side, TokenId token) const {
  const auto& table = this->side(side);
  auto it = table.find(token);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

namespace {

// Neumaier compensated sum.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  std::uint64_t terms = 0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
    ++terms;
  }
  double value() const { return sum + carry; }
};

}  // namespace

void build_laf_side(const BlockTable& table, LafTable& out) {
  std::map<TokenId, CompensatedSum> sums;
  for (BlockTable::Id id = 0; id < table.size(); ++id) {
    const auto block = table.tokens(id);
    if (block.size() != 3 || table.count(id) == 0) continue;
    if (std::find(block.begin(), block.end(), kEmptyId) != block.end()) continue;
    const double p_left = table.mono_probability(block.first(2));
    const double p_right = table.mono_probability(block.subspan(1));
    if (p_left <= 0.0 || p_right <= 0.0) continue;
    sums[block[1]].add(
        laf_context(table.mono_probability(block), p_left, p_right));
  }
  for (const auto& [token, acc] : sums) {
    out.set(table.side(), token,
            LafEntry{acc.value() / static_cast<double>(acc.terms), acc.terms});
  }
}

LafTable build_laf_table(const BlockTable& source, const BlockTable& target) {
  LafTable table;
  build_laf_side(source, table);
  build_laf_side(target, table);
  return table;
}

const char* adhesion_mode_name(AdhesionMode mode) {
  switch (mode) {
    case AdhesionMode::kLiteral: return "literal";
    case AdhesionMode::kGaf: return "gaf";
    case AdhesionMode::kLaf: return "laf";
  }
  return "literal";
}

std::optional<AdhesionMode> parse_adhesion_mode(std::string_view text) {
  if (text == "literal") return AdhesionMode::kLiteral;
  if (text == "gaf") return AdhesionMode::kGaf;
  if (text == "laf") return AdhesionMode::kLaf;
  return std::nullopt;
}

std::size_t overlap_length(std::span<const TokenId> left,
                           std::span<const TokenId> right) {
  for (std::size_t k = std::min(left.size(), right.size()); k > 0; --k) {
    if (std::equal(left.end() - static_cast<std::ptrdiff_t>(k), left.end(),
                   right.begin())) {
      return k;
    }
  }
  return 0;
}

double overlap_factor(std::span<const TokenId> overlap_words, Side side,
                      AdhesionMode mode, const Model& model) {
  double factor = 1.0;
  for (TokenId w : overlap_words) {
    const double p = model.word_probability(side, w);
    if (!(p > 0.0)) {
      throw Error(ErrorCode::kDomain,
                  "overlap word without probability: " +
                      (w < model.vocab(side).size() ? model.vocab(side).surface(w)
                                                    : std::to_string(w)));
    }
    switch (mode) {
      case AdhesionMode::kLiteral:
        factor *= p;
        break;
      case AdhesionMode::kGaf:
        factor *= gaf(p);
        break;
      case AdhesionMode::kLaf: {
        const auto entry = model.laf.find(side, w);
        factor *= (entry && entry->support > 0) ? entry->laf : gaf(p);
        break;
      }
    }
  }
  return factor;
}

double overlap_factor(const Block& left, const Block& right, AdhesionMode mode,
                      const Model& model) {
  const std::size_t k = overlap_length(left.tokens, right.tokens);
  const std::span<const TokenId> words(left.tokens);
  return overlap_factor(words.last(k), left.side, mode, model);
}

}  // namespace blockmt
