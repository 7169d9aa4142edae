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

#include "blockmt/training.h"

#include <algorithm>
#include <thread>
#include <vector>

#include "blockmt/error.h"

namespace blockmt {

namespace {

std::size_t negative_blocks(const BlockTable& counts, double negative) {
  std::size_t out = 0;
  for (BlockTable::Id id = 0; id < counts.size(); ++id) {
    const auto block = counts.tokens(id);
    if (block.size() < 2) continue;
    std::optional<double> best;
    for (std::size_t cut = 1; cut < block.size(); ++cut) {
      const auto rho = split_rho(counts, block, cut);
      if (rho && (!best || *rho > *best)) best = rho;
    }
    if (best && *best < -negative) ++out;
  }
  return out;
}

}  // namespace

AccumulateResult accumulate_corpus(std::span<const SentencePair> pairs,
                                   const PairGenConfig& config,
                                   const CognateFilter* cognates,
                                   std::size_t shards) {
  validate(config);
  // Budget slices in canonical order.
  std::vector<std::uint64_t> slices(pairs.size(), 0);
  std::uint64_t remaining = config.budget;
  bool truncated = false;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const std::uint64_t want = pair_record_count(pairs[i], config);
    if (remaining == kUnboundedBudget) {
      slices[i] = kUnboundedBudget;
      continue;
    }
    slices[i] = std::min(want, remaining);
    if (want > remaining) truncated = true;
    remaining -= slices[i];
  }

  if (shards == 0) shards = std::max(1u, std::thread::hardware_concurrency());
  shards = std::max<std::size_t>(1, std::min(shards, pairs.size()));

  std::vector<CountTable> tables(shards);
  auto run = [&](std::size_t shard) {
    const std::size_t begin = pairs.size() * shard / shards;
    const std::size_t end = pairs.size() * (shard + 1) / shards;
    CountTable& table = tables[shard];
    for (std::size_t i = begin; i < end; ++i) {
      std::uint64_t budget = slices[i];
      if (budget == 0) continue;
      emit_pairs(pairs[i], config, budget,
                 [&](std::span<const TokenId> s, std::span<const TokenId> t) {
                   if (cognates && !cognates->empty() && !cognates->keep(s, t)) {
                     return;
                   }
                   table.add(s, t);
                 });
    }
  };
  if (shards == 1) {
    run(0);
  } else {
    std::vector<std::thread> workers;
    for (std::size_t s = 0; s < shards; ++s) workers.emplace_back(run, s);
    for (auto& w : workers) w.join();
  }

  AccumulateResult result;
  result.truncated = truncated;
  result.counts = std::move(tables.front());
  for (std::size_t s = 1; s < shards; ++s) result.counts.merge(tables[s]);
  return result;
}

Model train_model(const ParsedCorpus& corpus, const TrainConfig& config,
                  TrainSummary* summary) {
  validate(config.generation);
  validate(config.thresholds);
  if (corpus.pairs.empty()) {
    throw Error(ErrorCode::kEmptyModel, "corpus has no sentence pairs");
  }
  std::optional<CognateFilter> filter;
  if (config.cognates) {
    filter.emplace(*config.cognates, corpus.source_vocab, corpus.target_vocab);
  }
  AccumulateResult acc = accumulate_corpus(
      corpus.pairs, config.generation, filter ? &*filter : nullptr, config.shards);

  Model model = build_dictionaries(acc.counts, config.thresholds);
  model.source_vocab = corpus.source_vocab;
  model.target_vocab = corpus.target_vocab;
  model.generation = config.generation;
  model.adhesion = config.adhesion;
  model.truncated = acc.truncated;
  model.lowercase = config.lowercase;
  model.seed = config.seed;
  model.laf = build_laf_table(acc.counts.source(), acc.counts.target());
  // Keep LAF entries only for words the model can still look up.
  LafTable kept;
  for (Side side : {Side::kSource, Side::kTarget}) {
    for (const auto& [token, entry] : model.laf.side(side)) {
      if (model.word_probability(side, token) > 0.0) kept.set(side, token, entry);
    }
  }
  model.laf = std::move(kept);
  model.rebuild_index();

  if (summary) {
    summary->sentence_pairs = corpus.pairs.size();
    summary->n = model.n;
    summary->truncated = model.truncated;
    summary->source_entries = model.source_dict.size();
    summary->target_entries = model.target_dict.size();
    summary->ts_entries = model.entries.size();
    summary->prohibited_entries = static_cast<std::size_t>(
        std::count_if(model.entries.begin(), model.entries.end(),
                      [](const TsEntry& e) { return e.prohibited; }));
    summary->source_negative_blocks =
        negative_blocks(acc.counts.source(), config.thresholds.cs_neg);
    summary->target_negative_blocks =
        negative_blocks(acc.counts.target(), config.thresholds.ct_neg);
    summary->laf_entries = model.laf.size();
  }
  return model;
}

}  // namespace blockmt
