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

#include "blockmt/decoder.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <unordered_map>

#include "blockmt/error.h"
#include "blockmt/statistics.h"

namespace blockmt {

void SynonymTable::add(TokenId a, TokenId b) {
  pairs_.emplace(a, b);
  pairs_.emplace(b, a);
}

bool SynonymTable::equivalent(TokenId a, TokenId b) const {
  return a == b || pairs_.count({a, b}) > 0;
}

SynonymTable parse_synonyms(std::istream& in, const Vocabulary& target) {
  SynonymTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos ||
        line.find('\t', tab + 1) != std::string::npos) {
      throw Error(ErrorCode::kParse, "synonym line needs exactly one tab",
                  line_no);
    }
    const auto a = split_whitespace(std::string_view(line).substr(0, tab));
    const auto b = split_whitespace(std::string_view(line).substr(tab + 1));
    if (a.size() != 1 || b.size() != 1) {
      throw Error(ErrorCode::kParse, "synonym fields must be single tokens",
                  line_no);
    }
    const auto ia = target.find(a[0]);
    const auto ib = target.find(b[0]);
    if (ia && ib) table.add(*ia, *ib);
  }
  return table;
}

bool is_valid_cover(const Cover& cover, std::size_t sentence_len,
                    std::size_t max_len) {
  if (cover.empty()) return sentence_len == 0;
  if (cover.front().start != 0 || cover.back().end() != sentence_len) {
    return false;
  }
  for (std::size_t i = 0; i < cover.size(); ++i) {
    if (cover[i].length < 1 || cover[i].length > max_len) return false;
    if (i == 0) continue;
    const BlockSpan& prev = cover[i - 1];
    if (cover[i].start <= prev.start) return false;
    if (cover[i].end() <= prev.end()) return false;
    if (cover[i].start > prev.end()) return false;
  }
  return true;
}

namespace {

std::size_t decode_max_len(const Model& model) {
  return std::max<std::size_t>(1, std::max(model.generation.max_block_len,
                                            model.source_dict.max_length()));
}

// Spans that may follow `previous` in a cover of `length` words, longest
// first and then by start.
std::vector<BlockSpan> next_spans(std::optional<BlockSpan> previous,
                                  std::size_t length, std::size_t max_len) {
  std::vector<BlockSpan> out;
  if (!previous) {
    for (std::size_t len = std::min(max_len, length); len >= 1; --len) {
      out.push_back({0, len});
    }
    return out;
  }
  const std::size_t end = previous->end();
  for (std::size_t start = previous->start + 1; start <= end && start < length;
       ++start) {
    for (std::size_t len = 1; len <= max_len && start + len <= length; ++len) {
      if (start + len > end) out.push_back({start, len});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const BlockSpan& a, const BlockSpan& b) {
    return a.length > b.length;
  });
  return out;
}

void cover_dfs(std::span<const TokenId> sentence, const Model& model,
               std::size_t max_len, std::size_t max_covers, Cover& current,
               std::vector<Cover>& out) {
  if (out.size() >= max_covers) return;
  if (!current.empty() && current.back().end() == sentence.size()) {
    out.push_back(current);
    return;
  }
  std::optional<BlockSpan> previous;
  if (!current.empty()) previous = current.back();
  for (const BlockSpan& span : next_spans(previous, sentence.size(), max_len)) {
    if (span.length > 1 &&
        !model.source_dict.contains(sentence.subspan(span.start, span.length))) {
      continue;
    }
    current.push_back(span);
    cover_dfs(sentence, model, max_len, max_covers, current, out);
    current.pop_back();
    if (out.size() >= max_covers) return;
  }
}

}  // namespace

std::vector<Cover> enumerate_covers(std::span<const TokenId> sentence,
                                    const Model& model,
                                    std::size_t max_covers) {
  std::vector<Cover> out;
  if (sentence.empty() || max_covers == 0) return out;
  Cover current;
  cover_dfs(sentence, model, decode_max_len(model), max_covers, current, out);
  return out;
}

std::vector<Candidate> candidates(const Model& model,
                                  const TokenizedSentence& sentence,
                                  BlockSpan span, const DecoderParams& params) {
  std::vector<Candidate> out;
  const auto block =
      std::span<const TokenId>(sentence.ids).subspan(span.start, span.length);
  if (const auto id = model.source_dict.find(block)) {
    const double log_ns = std::log(static_cast<double>(model.source_dict.count(*id)));
    for (std::size_t index : model.ranked_entries(*id)) {
      if (out.size() >= params.candidates) break;
      const TsEntry& e = model.entries[index];
      if (e.prohibited) continue;
      const auto target = model.target_dict.tokens(e.target);
      if (target.size() == 1 && target.front() == kEmptyId) continue;
      if (params.same_pattern && target.size() != block.size()) continue;
      out.push_back(Candidate{TokenSeq(target.begin(), target.end()),
                              std::log(static_cast<double>(e.count)) - log_ns,
                              index});
    }
  }
  if (out.empty() && span.length == 1) {
    const auto copy_id =
        static_cast<TokenId>(model.target_vocab.size() + span.start);
    out.push_back(Candidate{{copy_id}, std::log(params.p_floor), std::nullopt});
  }
  return out;
}

std::size_t merge_overlap(std::span<const TokenId> left,
                          std::span<const TokenId> right,
                          const SynonymTable* synonyms) {
  for (std::size_t k = std::min(left.size(), right.size()); k > 0; --k) {
    bool match = true;
    for (std::size_t i = 0; i < k && match; ++i) {
      const TokenId a = left[left.size() - k + i];
      const TokenId b = right[i];
      match = a == b || (synonyms && synonyms->equivalent(a, b));
    }
    if (match) return k;
  }
  return 0;
}

TokenSeq merge_targets(std::span<const TokenId> left,
                       std::span<const TokenId> right,
                       const SynonymTable* synonyms) {
  const std::size_t k = merge_overlap(left, right, synonyms);
  TokenSeq out(left.begin(), left.end());
  out.insert(out.end(), right.begin() + static_cast<std::ptrdiff_t>(k),
             right.end());
  return out;
}

TokenSeq build_merged_target(const Cover& cover,
                             std::span<const Candidate> choices,
                             const SynonymTable* synonyms) {
  TokenSeq out;
  for (std::size_t j = 0; j < choices.size(); ++j) {
    const TokenSeq& t = choices[j].target;
    std::size_t skip = 0;
    if (j > 0 && cover[j].start < cover[j - 1].end()) {
      skip = merge_overlap(choices[j - 1].target, t, synonyms);
    }
    out.insert(out.end(), t.begin() + static_cast<std::ptrdiff_t>(skip), t.end());
  }
  return out;
}

double log_junction_factor(const Model& model,
                           const TokenizedSentence& sentence,
                           BlockSpan previous_span, const Candidate& previous,
                           BlockSpan span, const Candidate& current,
                           AdhesionMode mode, const SynonymTable* synonyms) {
  if (span.start >= previous_span.end()) return 0.0;
  const std::size_t k = merge_overlap(previous.target, current.target, synonyms);
  const auto target_words = std::span<const TokenId>(previous.target).last(k);
  double factor = 1.0;
  if (mode == AdhesionMode::kLaf) {
    const auto source_words = std::span<const TokenId>(sentence.ids).subspan(
        span.start, previous_span.end() - span.start);
    factor = overlap_factor(source_words, Side::kSource, AdhesionMode::kLaf, model) *
             overlap_factor(target_words, Side::kTarget, AdhesionMode::kLiteral,
                            model);
  } else {
    factor = overlap_factor(target_words, Side::kTarget, mode, model);
  }
  return std::log(factor);
}

namespace {

// One step of the objective. Beam search and scoring share it so both
// produce bit-identical sums.
double step(double score, double log_junction, double log_ratio) {
  return (score + log_junction) + log_ratio;
}

double junction_correction(const Model& model, std::span<const TokenId> left,
                           std::span<const TokenId> right, bool overlapping,
                           std::size_t max_len, const SynonymTable* synonyms) {
  TokenSeq merged = overlapping ? merge_targets(left, right, synonyms)
                                : TokenSeq(left.begin(), left.end());
  if (!overlapping) merged.insert(merged.end(), right.begin(), right.end());
  const std::size_t right_start = merged.size() - right.size();
  const std::span<const TokenId> m(merged);
  double best = -1.0;
  for (std::size_t i = 0; i < left.size(); ++i) {
    for (std::size_t e = right_start + 1; e <= merged.size(); ++e) {
      if (e <= i + 1 || e - i > max_len) continue;
      const auto whole = m.subspan(i, e - i);
      if (!model.target_dict.contains(whole)) continue;
      for (std::size_t cut = 1; cut < whole.size(); ++cut) {
        const auto rho = split_rho(model.target_dict, whole, cut);
        if (rho) best = std::max(best, *rho);
      }
    }
  }
  return best;
}

// Surface of a hypothesis token: vocabulary entry or copied source word.
std::string_view target_surface(const Model& model,
                                const TokenizedSentence& sentence, TokenId id) {
  const std::size_t vocab = model.target_vocab.size();
  if (id < vocab) return model.target_vocab.surface(id);
  return sentence.surfaces.at(id - vocab);
}

bool surface_less(const Model& model, const TokenizedSentence& sentence,
                  const TokenSeq& a, const TokenSeq& b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] == b[i]) continue;
    const auto sa = target_surface(model, sentence, a[i]);
    const auto sb = target_surface(model, sentence, b[i]);
    if (sa != sb) return sa < sb;
    return a[i] < b[i];
  }
  return a.size() < b.size();
}

// Final ordering: score, then correction, then target surface; correction
// goes first when requested.
bool final_better(const Hypothesis& a, const Hypothesis& b, const Model& model,
                  const TokenizedSentence& sentence, bool correction_first) {
  if (correction_first) {
    if (a.correction != b.correction) return a.correction > b.correction;
    if (a.score != b.score) return a.score > b.score;
  } else {
    if (a.score != b.score) return a.score > b.score;
    if (a.correction != b.correction) return a.correction > b.correction;
  }
  if (a.merged_target != b.merged_target) {
    return surface_less(model, sentence, a.merged_target, b.merged_target);
  }
  return a.cover < b.cover;
}

struct SpanOption {
  BlockSpan span;
  std::vector<Candidate> candidates;
};

// Usable spans of a sentence grouped by start position.
std::vector<std::vector<SpanOption>> span_options(
    const Model& model, const TokenizedSentence& sentence,
    const DecoderParams& params) {
  const std::size_t length = sentence.ids.size();
  const std::size_t max_len = decode_max_len(model);
  std::vector<std::vector<SpanOption>> out(length);
  for (std::size_t start = 0; start < length; ++start) {
    for (std::size_t len = 1; len <= max_len && start + len <= length; ++len) {
      const BlockSpan span{start, len};
      if (len > 1 &&
          !model.source_dict.contains(
              std::span<const TokenId>(sentence.ids).subspan(start, len))) {
        continue;
      }
      auto cands = candidates(model, sentence, span, params);
      if (cands.empty()) continue;
      out[start].push_back(SpanOption{span, std::move(cands)});
    }
  }
  return out;
}

void finish(Hypothesis& h, const Model& model, const DecoderParams& params) {
  h.merged_target = build_merged_target(h.cover, h.choices, params.synonyms);
  h.correction = correction_score(h, model, decode_max_len(model), params.synonyms);
}

}  // namespace

double score(const Hypothesis& hypothesis, const Model& model,
             const TokenizedSentence& sentence, AdhesionMode mode,
             const SynonymTable* synonyms) {
  double s = 0.0;
  for (std::size_t j = 0; j < hypothesis.choices.size(); ++j) {
    double junction = 0.0;
    if (j > 0) {
      junction = log_junction_factor(model, sentence, hypothesis.cover[j - 1],
                                     hypothesis.choices[j - 1],
                                     hypothesis.cover[j],
                                     hypothesis.choices[j], mode, synonyms);
    }
    s = step(s, junction, hypothesis.choices[j].log_ratio);
  }
  return s;
}

double correction_score(const Hypothesis& hypothesis, const Model& model,
                        std::size_t max_len, const SynonymTable* synonyms) {
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t j = 1; j < hypothesis.choices.size(); ++j) {
    const bool overlapping =
        hypothesis.cover[j].start < hypothesis.cover[j - 1].end();
    worst = std::min(worst, junction_correction(
                                model, hypothesis.choices[j - 1].target,
                                hypothesis.choices[j].target, overlapping,
                                max_len, synonyms));
  }
  return worst;
}

Hypothesis correction(std::span<const Hypothesis> alternatives,
                      const Model& model, std::size_t max_len,
                      const SynonymTable* synonyms) {
  if (alternatives.empty()) {
    throw Error(ErrorCode::kDomain, "correction needs at least one alternative");
  }
  if (alternatives.size() == 1) return alternatives.front();
  std::size_t best = 0;
  double best_correction = correction_score(alternatives[0], model, max_len, synonyms);
  for (std::size_t i = 1; i < alternatives.size(); ++i) {
    const double c = correction_score(alternatives[i], model, max_len, synonyms);
    if (c > best_correction ||
        (c == best_correction && alternatives[i].score > alternatives[best].score)) {
      best = i;
      best_correction = c;
    }
  }
  Hypothesis out = alternatives[best];
  out.correction = best_correction;
  return out;
}

namespace {

struct Node {
  const SpanOption* option = nullptr;
  std::size_t candidate = 0;
  double score = 0.0;
  std::ptrdiff_t parent = -1;
  TokenSeq merged;
};

Hypothesis unwind(const std::vector<Node>& nodes, std::ptrdiff_t index) {
  Hypothesis h;
  for (std::ptrdiff_t i = index; i >= 0; i = nodes[i].parent) {
    h.cover.push_back(nodes[i].option->span);
    h.choices.push_back(nodes[i].option->candidates[nodes[i].candidate]);
  }
  std::reverse(h.cover.begin(), h.cover.end());
  std::reverse(h.choices.begin(), h.choices.end());
  h.score = nodes[index].score;
  return h;
}

}  // namespace

Translation translate(const TokenizedSentence& sentence, const Model& model,
                      const DecoderParams& params) {
  const std::size_t length = sentence.ids.size();
  if (length == 0) throw Error(ErrorCode::kEmptyInput, "empty sentence");
  const std::size_t beam = std::max<std::size_t>(1, params.beam);
  const auto options = span_options(model, sentence, params);

  std::vector<Node> nodes;
  // Per end position: recombination key (option, candidate) -> node. States
  // sharing the last span and target block have identical futures.
  std::vector<std::map<std::pair<const SpanOption*, std::size_t>, std::size_t>>
      stacks(length + 1);

  auto partial_better = [&](const Node& a, const Node& b) {
    if (a.score != b.score) return a.score > b.score;
    return surface_less(model, sentence, a.merged, b.merged);
  };
  auto offer = [&](Node node) {
    auto& stack = stacks[node.option->span.end()];
    const auto key = std::make_pair(node.option, node.candidate);
    auto it = stack.find(key);
    if (it == stack.end()) {
      stack.emplace(key, nodes.size());
      nodes.push_back(std::move(node));
    } else if (partial_better(node, nodes[it->second])) {
      nodes[it->second] = std::move(node);
    }
  };
  auto pruned = [&](std::size_t end) {
    std::vector<std::size_t> ids;
    for (const auto& [key, id] : stacks[end]) ids.push_back(id);
    std::sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) {
      return partial_better(nodes[a], nodes[b]);
    });
    if (ids.size() > beam) ids.resize(beam);
    return ids;
  };

  for (const SpanOption& option : options[0]) {
    for (std::size_t c = 0; c < option.candidates.size(); ++c) {
      Node node;
      node.option = &option;
      node.candidate = c;
      node.score = step(0.0, 0.0, option.candidates[c].log_ratio);
      node.merged = option.candidates[c].target;
      offer(std::move(node));
    }
  }

  for (std::size_t end = 1; end < length; ++end) {
    for (std::size_t id : pruned(end)) {
      const BlockSpan previous = nodes[id].option->span;
      for (std::size_t start = previous.start + 1; start <= end; ++start) {
        for (const SpanOption& option : options[start]) {
          if (option.span.end() <= end) continue;
          for (std::size_t c = 0; c < option.candidates.size(); ++c) {
            const Node& parent = nodes[id];
            const Candidate& prev_cand =
                parent.option->candidates[parent.candidate];
            const Candidate& cand = option.candidates[c];
            const double junction = log_junction_factor(
                model, sentence, previous, prev_cand, option.span, cand,
                params.mode, params.synonyms);
            Node node;
            node.option = &option;
            node.candidate = c;
            node.score = step(parent.score, junction, cand.log_ratio);
            node.parent = static_cast<std::ptrdiff_t>(id);
            const std::size_t skip =
                option.span.start < previous.end()
                    ? merge_overlap(prev_cand.target, cand.target, params.synonyms)
                    : 0;
            node.merged = parent.merged;
            node.merged.insert(node.merged.end(),
                               cand.target.begin() + static_cast<std::ptrdiff_t>(skip),
                               cand.target.end());
            offer(std::move(node));
          }
        }
      }
    }
  }

  std::vector<Hypothesis> finals;
  for (std::size_t id : pruned(length)) {
    Hypothesis h = unwind(nodes, static_cast<std::ptrdiff_t>(id));
    finish(h, model, params);
    finals.push_back(std::move(h));
  }
  // Single words always have a candidate, so a full cover always exists.
  std::sort(finals.begin(), finals.end(), [&](const Hypothesis& a, const Hypothesis& b) {
    return final_better(a, b, model, sentence, params.correction_first);
  });
  Translation out;
  out.best = finals.front();
  const std::size_t want = std::max<std::size_t>(1, params.n_best);
  for (const Hypothesis& h : finals) {
    if (out.n_best.size() >= want) break;
    const bool seen = std::any_of(
        out.n_best.begin(), out.n_best.end(),
        [&](const Hypothesis& o) { return o.merged_target == h.merged_target; });
    if (!seen) out.n_best.push_back(h);
  }
  return out;
}

namespace {

struct Exhaustive {
  const Model& model;
  const TokenizedSentence& sentence;
  const DecoderParams& params;
  const std::vector<std::vector<SpanOption>>& options;
  Hypothesis current;
  std::optional<Hypothesis> best;

  void search(double s) {
    const std::size_t length = sentence.ids.size();
    if (!current.cover.empty() && current.cover.back().end() == length) {
      Hypothesis h = current;
      h.score = s;
      finish(h, model, params);
      if (!best || final_better(h, *best, model, sentence, params.correction_first)) {
        best = std::move(h);
      }
      return;
    }
    std::size_t first = 0, last = 0;
    if (current.cover.empty()) {
      first = last = 0;
    } else {
      first = current.cover.back().start + 1;
      last = std::min(current.cover.back().end(), length - 1);
    }
    for (std::size_t start = first; start <= last; ++start) {
      for (const SpanOption& option : options[start]) {
        if (!current.cover.empty() && option.span.end() <= current.cover.back().end()) {
          continue;
        }
        for (const Candidate& cand : option.candidates) {
          double junction = 0.0;
          if (!current.cover.empty()) {
            junction = log_junction_factor(model, sentence, current.cover.back(),
                                           current.choices.back(), option.span,
                                           cand, params.mode, params.synonyms);
          }
          current.cover.push_back(option.span);
          current.choices.push_back(cand);
          search(step(s, junction, cand.log_ratio));
          current.cover.pop_back();
          current.choices.pop_back();
        }
      }
    }
  }
};

}  // namespace

Hypothesis translate_exhaustive(const TokenizedSentence& sentence,
                                const Model& model,
                                const DecoderParams& params) {
  if (sentence.ids.empty()) throw Error(ErrorCode::kEmptyInput, "empty sentence");
  if (sentence.ids.size() > params.exhaustive_max_len) {
    throw Error(ErrorCode::kOracleBound,
                "sentence of " + std::to_string(sentence.ids.size()) +
                    " words exceeds the exhaustive decoder bound of " +
                    std::to_string(params.exhaustive_max_len));
  }
  const auto options = span_options(model, sentence, params);
  Exhaustive search{model, sentence, params, options, {}, std::nullopt};
  search.search(0.0);
  return *search.best;
}

std::string render_target(const Hypothesis& hypothesis, const Model& model,
                          const TokenizedSentence& sentence) {
  std::string out;
  for (std::size_t i = 0; i < hypothesis.merged_target.size(); ++i) {
    if (i > 0) out += ' ';
    out += target_surface(model, sentence, hypothesis.merged_target[i]);
  }
  return out;
}

}  // namespace blockmt
