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

#ifndef BLOCKMT_DECODER_H_
#define BLOCKMT_DECODER_H_

#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "blockmt/adhesion.h"
#include "blockmt/blocks.h"
#include "blockmt/corpus.h"
#include "blockmt/model.h"

namespace blockmt {

// Target-side synonym pairs; a merge may treat them as the same word.
class SynonymTable {
 public:
  void add(TokenId a, TokenId b);
  bool equivalent(TokenId a, TokenId b) const;
  bool empty() const { return pairs_.empty(); }

 private:
  std::set<std::pair<TokenId, TokenId>> pairs_;
};

// TSV `word<TAB>word`, '#' comments. Words missing from the vocabulary are
// skipped. Throws kParse with the line number.
SynonymTable parse_synonyms(std::istream& in, const Vocabulary& target);

struct DecoderParams {
  std::size_t beam = 64;
  // Candidate target blocks tried per source span.
  std::size_t candidates = 8;
  AdhesionMode mode = AdhesionMode::kLiteral;
  std::size_t max_covers = 100000;
  double p_floor = 1e-9;
  std::size_t n_best = 1;
  // Source and target blocks share one block pattern: a k-word source block
  // only takes k-word target blocks.
  bool same_pattern = true;
  // Rank the final beam by correction before score.
  bool correction_first = false;
  std::size_t exhaustive_max_len = 8;
  const SynonymTable* synonyms = nullptr;
};

using Cover = std::vector<BlockSpan>;

// Starts and ends strictly increasing, no gaps, full coverage, every span
// within [1, max_len].
bool is_valid_cover(const Cover& cover, std::size_t sentence_len,
                    std::size_t max_len);

// Covers built from single words and multi-word S-dictionary blocks, longer
// blocks first, at most `max_covers` of them.
std::vector<Cover> enumerate_covers(std::span<const TokenId> sentence,
                                    const Model& model, std::size_t max_covers);

struct Candidate {
  // Target tokens. A copied-through source word at position i gets the id
  // target_vocab.size() + i.
  TokenSeq target;
  // log P(T|S), or log p_floor for copy-through.
  double log_ratio = 0.0;
  // Index into Model::entries; empty for copy-through.
  std::optional<std::size_t> entry;

  bool operator==(const Candidate&) const = default;
};

// Top candidates for the source span: non-prohibited TS entries in the
// model's ranking, or a copy-through for single words with none.
std::vector<Candidate> candidates(const Model& model,
                                  const TokenizedSentence& sentence,
                                  BlockSpan span, const DecoderParams& params);

// Concatenation with the longest suffix/prefix overlap written once; with a
// synonym table, synonyms count as matching and the left variant is kept.
TokenSeq merge_targets(std::span<const TokenId> left,
                       std::span<const TokenId> right,
                       const SynonymTable* synonyms = nullptr);
std::size_t merge_overlap(std::span<const TokenId> left,
                          std::span<const TokenId> right,
                          const SynonymTable* synonyms = nullptr);

struct Hypothesis {
  Cover cover;
  std::vector<Candidate> choices;
  TokenSeq merged_target;
  // Log of the block-translation objective.
  double score = 0.0;
  // Minimum over adjacent target blocks of their best junction rho.
  double correction = std::numeric_limits<double>::infinity();
};

// Target blocks of overlapping spans are merged, abutting ones concatenated.
TokenSeq build_merged_target(const Cover& cover,
                             std::span<const Candidate> choices,
                             const SynonymTable* synonyms = nullptr);

// log of prod_j P(T_j|S_j) * prod_j F(T_j, T_{j+1}), the second product over
// adjacent blocks whose source spans overlap.
double score(const Hypothesis& hypothesis, const Model& model,
             const TokenizedSentence& sentence, AdhesionMode mode,
             const SynonymTable* synonyms = nullptr);

// log F for the junction between choices j-1 and j of a hypothesis.
double log_junction_factor(const Model& model,
                           const TokenizedSentence& sentence,
                           BlockSpan previous_span,
                           const Candidate& previous, BlockSpan span,
                           const Candidate& current, AdhesionMode mode,
                           const SynonymTable* synonyms);

// For each adjacent pair of target blocks, the best relative correlation
// over splits of their union into two adjacent sub-blocks straddling the
// junction (at most `max_len` words together, -1 when not in the target
// dictionary); the minimum over pairs. +inf for single-block hypotheses.
double correction_score(const Hypothesis& hypothesis, const Model& model,
                        std::size_t max_len,
                        const SynonymTable* synonyms = nullptr);

// Alternative with the highest correction score, ties by score.
Hypothesis correction(std::span<const Hypothesis> alternatives,
                      const Model& model, std::size_t max_len,
                      const SynonymTable* synonyms = nullptr);

struct Translation {
  Hypothesis best;
  std::vector<Hypothesis> n_best;
};

// Beam search over covers and candidate choices. Throws kEmptyInput for an
// empty sentence.
Translation translate(const TokenizedSentence& sentence, const Model& model,
                      const DecoderParams& params);

// Scores every cover and every candidate combination. Throws kOracleBound
// above params.exhaustive_max_len words.
Hypothesis translate_exhaustive(const TokenizedSentence& sentence,
                                const Model& model, const DecoderParams& params);

std::string render_target(const Hypothesis& hypothesis, const Model& model,
                          const TokenizedSentence& sentence);

}  // namespace blockmt

#endif  // BLOCKMT_DECODER_H_
