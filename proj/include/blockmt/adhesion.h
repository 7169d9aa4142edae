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

#ifndef BLOCKMT_ADHESION_H_
#define BLOCKMT_ADHESION_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string_view>

#include "blockmt/blocks.h"
#include "blockmt/corpus.h"

namespace blockmt {

class BlockTable;
class Model;

// Global adhesion factor 1/p.
double gaf(double p);

// Local adhesion of a middle word in one (left, middle, right) context:
// P(t1 t2 t3) / (P(t1 t2) P(t2 t3)).
double laf_context(double p_triple, double p_left, double p_right);

struct LafEntry {
  double laf = 1.0;
  // Number of (t1, t3) contexts averaged.
  std::uint64_t support = 0;

  bool operator==(const LafEntry&) const = default;
};

class LafTable {
 public:
  void set(Side side, TokenId token, LafEntry entry);
  std::optional<LafEntry> find(Side side, TokenId token) const;
  const std::map<TokenId, LafEntry>& side(Side s) const {
    return s == Side::kSource ? source_ : target_;
  }
  std::size_t size() const { return source_.size() + target_.size(); }
  bool operator==(const LafTable&) const = default;

 private:
  std::map<TokenId, LafEntry> source_;
  std::map<TokenId, LafEntry> target_;
};

// Averages laf_context over every stored (t1, t2, t3) whose two overlapping
// pairs are stored too. Words without any such context get no entry
// (support 0) and fall back to the global factor.
void build_laf_side(const BlockTable& table, LafTable& out);
LafTable build_laf_table(const BlockTable& source, const BlockTable& target);

enum class AdhesionMode { kLiteral, kGaf, kLaf };

const char* adhesion_mode_name(AdhesionMode mode);
std::optional<AdhesionMode> parse_adhesion_mode(std::string_view text);

// Longest token sequence that is a suffix of `left` and a prefix of `right`.
std::size_t overlap_length(std::span<const TokenId> left,
                           std::span<const TokenId> right);

// Factor for a run of overlapping words of one side:
//   literal  product of P(w)
//   gaf      product of 1/P(w)
//   laf      product of the stored LAF, 1/P(w) where none is stored
// P is the single-word probability from the model's dictionary of that side.
// The empty overlap gives 1 in every mode.
double overlap_factor(std::span<const TokenId> overlap_words, Side side,
                      AdhesionMode mode, const Model& model);

// Same, with the overlap taken as the maximal suffix/prefix match of two
// adjacent blocks.
double overlap_factor(const Block& left, const Block& right, AdhesionMode mode,
                      const Model& model);

}  // namespace blockmt

#endif  // BLOCKMT_ADHESION_H_
