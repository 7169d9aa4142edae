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

#ifndef BLOCKMT_TRAINING_H_
#define BLOCKMT_TRAINING_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

#include "blockmt/adhesion.h"
#include "blockmt/blocks.h"
#include "blockmt/corpus.h"
#include "blockmt/model.h"
#include "blockmt/statistics.h"

namespace blockmt {

struct AccumulateResult {
  CountTable counts;
  bool truncated = false;
};

// Generates and tallies the pair records of a whole corpus. Sentences are
// split into `shards` contiguous ranges tallied concurrently; each sentence
// gets its slice of the global budget up front, so the result is identical
// to a single sequential pass. `shards` == 0 picks the hardware concurrency.
// The budget counts generated records, before cognate filtering.
AccumulateResult accumulate_corpus(std::span<const SentencePair> pairs,
                                   const PairGenConfig& config,
                                   const CognateFilter* cognates = nullptr,
                                   std::size_t shards = 1);

struct TrainConfig {
  PairGenConfig generation;
  ThresholdConfig thresholds;
  AdhesionMode adhesion = AdhesionMode::kLiteral;
  bool lowercase = false;
  std::uint64_t seed = 0;
  std::size_t shards = 0;
  std::optional<CognateList> cognates;
};

struct TrainSummary {
  std::size_t sentence_pairs = 0;
  std::uint64_t n = 0;
  bool truncated = false;
  std::size_t source_entries = 0;
  std::size_t target_entries = 0;
  std::size_t ts_entries = 0;
  std::size_t prohibited_entries = 0;
  // Multi-word blocks whose best split falls below -cs_neg / -ct_neg. They
  // are reported, not stored.
  std::size_t source_negative_blocks = 0;
  std::size_t target_negative_blocks = 0;
  std::size_t laf_entries = 0;
};

// Full pipeline: record generation, counting, growth, thresholding and the
// LAF table. LAF values come from the complete counts rather than the
// thresholded dictionaries, so thresholding does not bias them.
Model train_model(const ParsedCorpus& corpus, const TrainConfig& config,
                  TrainSummary* summary = nullptr);

}  // namespace blockmt

#endif  // BLOCKMT_TRAINING_H_
