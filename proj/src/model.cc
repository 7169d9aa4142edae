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

#include "blockmt/model.h"

#include <algorithm>
#include <map>
#include <string>
#include <tuple>

namespace blockmt {

namespace {

std::string_view surface_or_empty(const Vocabulary& vocab, TokenId id) {
  return id < vocab.size() ? std::string_view(vocab.surface(id))
                           : std::string_view();
}

// Lexicographic order over surface strings; falls back to ids for tokens a
// vocabulary does not know (hand-built tables in tests).
bool surface_less(const Vocabulary& vocab, std::span<const TokenId> a,
                  std::span<const TokenId> b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] == b[i]) continue;
    const auto sa = surface_or_empty(vocab, a[i]);
    const auto sb = surface_or_empty(vocab, b[i]);
    if (sa != sb) return sa < sb;
    return a[i] < b[i];
  }
  return a.size() < b.size();
}

}  // namespace

void Model::rebuild_index() {
  by_source_.assign(source_dict.size(), {});
  for (std::size_t i = 0; i < entries.size(); ++i) {
    by_source_[entries[i].source].push_back(i);
  }
  for (auto& list : by_source_) {
    std::sort(list.begin(), list.end(), [&](std::size_t x, std::size_t y) {
      const TsEntry& a = entries[x];
      const TsEntry& b = entries[y];
      if (a.count != b.count) return a.count > b.count;
      const auto na = target_dict.count(a.target);
      const auto nb = target_dict.count(b.target);
      if (na != nb) return na < nb;
      return surface_less(target_vocab, target_dict.tokens(a.target),
                          target_dict.tokens(b.target));
    });
  }
}

std::span<const std::size_t> Model::ranked_entries(BlockTable::Id source) const {
  if (source >= by_source_.size()) return {};
  return by_source_[source];
}

TsStats Model::stats(const TsEntry& entry) const {
  const double total = static_cast<double>(n);
  const double n_s = static_cast<double>(source_dict.count(entry.source));
  const double n_t = static_cast<double>(target_dict.count(entry.target));
  const double c = static_cast<double>(entry.count);
  TsStats out;
  out.p_joint = c / total;
  out.p_t_given_s = c / n_s;
  out.p_s_given_t = c / n_t;
  const double p_s = n_s / total;
  const double p_t = n_t / total;
  out.rho = relative_correlation(correlation(out.p_joint, p_s, p_t), p_s, p_t);
  return out;
}

double Model::word_probability(Side side, TokenId token) const {
  const TokenId word[] = {token};
  return dict(side).mono_probability(word);
}

namespace {

using SurfaceCounts = std::map<std::string, std::uint64_t>;

SurfaceCounts surface_counts(const BlockTable& table, const Vocabulary& vocab) {
  SurfaceCounts out;
  for (BlockTable::Id id = 0; id < table.size(); ++id) {
    out[render_tokens(table.tokens(id), vocab)] = table.count(id);
  }
  return out;
}

}  // namespace

bool same_content(const Model& a, const Model& b) {
  if (std::tie(a.n, a.generation, a.thresholds, a.adhesion, a.truncated,
               a.lowercase, a.seed) !=
      std::tie(b.n, b.generation, b.thresholds, b.adhesion, b.truncated,
               b.lowercase, b.seed)) {
    return false;
  }
  for (Side side : {Side::kSource, Side::kTarget}) {
    if (a.dict(side).length_totals() != b.dict(side).length_totals()) return false;
    if (surface_counts(a.dict(side), a.vocab(side)) !=
        surface_counts(b.dict(side), b.vocab(side))) {
      return false;
    }
    std::map<std::string, LafEntry> la, lb;
    for (const auto& [tok, e] : a.laf.side(side)) la[a.vocab(side).surface(tok)] = e;
    for (const auto& [tok, e] : b.laf.side(side)) lb[b.vocab(side).surface(tok)] = e;
    if (la != lb) return false;
  }
  using Key = std::pair<std::string, std::string>;
  auto entry_map = [](const Model& m) {
    std::map<Key, std::pair<std::uint64_t, bool>> out;
    for (const TsEntry& e : m.entries) {
      out[{m.render_block(Side::kSource, m.source_dict.tokens(e.source)),
           m.render_block(Side::kTarget, m.target_dict.tokens(e.target))}] = {
          e.count, e.prohibited};
    }
    return out;
  };
  return entry_map(a) == entry_map(b);
}

}  // namespace blockmt
