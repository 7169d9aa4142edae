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

#ifndef BLOCKMT_MODEL_H_
#define BLOCKMT_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "blockmt/adhesion.h"
#include "blockmt/blocks.h"
#include "blockmt/corpus.h"
#include "blockmt/statistics.h"

namespace blockmt {

// One bilingual dictionary entry. Probabilities are derived from the counts
// and the model's n, see Model::stats.
struct TsEntry {
  BlockTable::Id source = 0;
  BlockTable::Id target = 0;
  std::uint64_t count = 0;
  bool prohibited = false;

  bool operator==(const TsEntry&) const = default;
};

struct TsStats {
  double p_joint = 0;
  double p_t_given_s = 0;
  double p_s_given_t = 0;
  double rho = 0;
};

// The trained translation model: S, T and TS dictionaries over exact counts,
// the LAF table, and the configuration it was trained with. Immutable once
// built; concurrent readers need no locking.
class Model {
 public:
  Vocabulary source_vocab{Side::kSource};
  Vocabulary target_vocab{Side::kTarget};
  BlockTable source_dict{Side::kSource};
  BlockTable target_dict{Side::kTarget};
  std::vector<TsEntry> entries;
  LafTable laf;

  std::uint64_t n = 0;
  PairGenConfig generation;
  ThresholdConfig thresholds;
  AdhesionMode adhesion = AdhesionMode::kLiteral;
  bool truncated = false;
  bool lowercase = false;
  std::uint64_t seed = 0;

  const BlockTable& dict(Side side) const {
    return side == Side::kSource ? source_dict : target_dict;
  }
  const Vocabulary& vocab(Side side) const {
    return side == Side::kSource ? source_vocab : target_vocab;
  }

  // Must be called whenever `entries` changes.
  void rebuild_index();

  // Entries of one source block, best first: higher P(T|S), then higher rho,
  // then lexicographically smaller target surface. Includes prohibited ones.
  std::span<const std::size_t> ranked_entries(BlockTable::Id source) const;

  TsStats stats(const TsEntry& entry) const;

  // Length-normalized single-word probability; zero for unknown words.
  double word_probability(Side side, TokenId token) const;

  std::string render_block(Side side, std::span<const TokenId> tokens) const {
    return render_tokens(tokens, vocab(side));
  }

 private:
  std::vector<std::vector<std::size_t>> by_source_;
};

// Compares two models by surface forms so that differing id assignment does
// not matter.
bool same_content(const Model& a, const Model& b);

}  // namespace blockmt

#endif  // BLOCKMT_MODEL_H_
