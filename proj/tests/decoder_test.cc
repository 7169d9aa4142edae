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

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "blockmt/decoder.h"
#include "blockmt/error.h"
#include "blockmt/training.h"
#include "test_util.h"

namespace blockmt {
namespace {

// Model assembled entry by entry so every probability is known by hand.
class HandModel {
 public:
  HandModel& block(Side side, std::string_view text, std::uint64_t count) {
    TokenSeq ids;
    Vocabulary& vocab = side == Side::kSource ? m_.source_vocab : m_.target_vocab;
    for (const auto& w : testing::words(text)) ids.push_back(vocab.intern(w));
    (side == Side::kSource ? m_.source_dict : m_.target_dict).add(ids, count);
    return *this;
  }
  HandModel& entry(std::string_view s, std::string_view t, std::uint64_t count,
                   bool prohibited = false) {
    const auto sid = m_.source_dict.find(testing::ids_of(m_.source_vocab, s));
    const auto tid = m_.target_dict.find(testing::ids_of(m_.target_vocab, t));
    EXPECT_TRUE(sid && tid) << s << " / " << t;
    m_.entries.push_back(TsEntry{*sid, *tid, count, prohibited});
    return *this;
  }
  Model build(std::uint64_t n = 1000) {
    m_.n = n;
    m_.rebuild_index();
    return m_;
  }

 private:
  Model m_;
};

Model score_fixture() {
  // P(x y | a b) = 0.4, P(y z | b c) = 0.3, P(y) = 0.1.
  return HandModel()
      .block(Side::kSource, "a", 10)
      .block(Side::kSource, "b", 10)
      .block(Side::kSource, "c", 10)
      .block(Side::kSource, "a b", 10)
      .block(Side::kSource, "b c", 10)
      .block(Side::kTarget, "x", 4)
      .block(Side::kTarget, "y", 1)
      .block(Side::kTarget, "z", 5)
      .block(Side::kTarget, "x y", 8)
      .block(Side::kTarget, "y z", 6)
      .entry("a b", "x y", 4)
      .entry("b c", "y z", 3)
      .entry("a", "x", 4)
      .entry("b", "y", 1)
      .entry("c", "z", 5)
      .build();
}

std::set<Cover> oracle_covers(std::span<const TokenId> sentence,
                              const Model& model, std::size_t max_len) {
  // All subsets of usable spans that satisfy the cover invariants.
  std::vector<BlockSpan> spans;
  for (std::size_t s = 0; s < sentence.size(); ++s) {
    for (std::size_t l = 1; l <= max_len && s + l <= sentence.size(); ++l) {
      if (l == 1 || model.source_dict.contains(sentence.subspan(s, l))) {
        spans.push_back({s, l});
      }
    }
  }
  std::set<Cover> out;
  for (std::uint64_t mask = 1; mask < (1ull << spans.size()); ++mask) {
    Cover c;
    for (std::size_t i = 0; i < spans.size(); ++i) {
      if (mask & (1ull << i)) c.push_back(spans[i]);
    }
    std::sort(c.begin(), c.end());
    if (is_valid_cover(c, sentence.size(), max_len)) out.insert(c);
  }
  return out;
}

TEST(Covers, ThreeWordsWithAllPairs) {
  const Model m = score_fixture();
  const auto sentence = tokenize_frozen("a b c", m.source_vocab);
  const auto covers = enumerate_covers(sentence.ids, m, 100);
  const std::set<Cover> got(covers.begin(), covers.end());
  const std::set<Cover> expected = {
      {{0, 2}, {1, 2}}, {{0, 2}, {2, 1}}, {{0, 1}, {1, 2}}, {{0, 1}, {1, 1}, {2, 1}}};
  EXPECT_EQ(got, expected);
  EXPECT_EQ(got, oracle_covers(sentence.ids, m, 3));
  EXPECT_EQ(covers.size(), got.size());
  // Longest blocks first, the all-singletons cover last.
  EXPECT_EQ(covers.front().front().length, 2u);
  EXPECT_EQ(covers.back().size(), 3u);
  EXPECT_FALSE(is_valid_cover({{0, 1}, {0, 2}, {2, 1}}, 3, 3));
}

TEST(Covers, SingleWordAndAllOov) {
  const Model m = score_fixture();
  EXPECT_EQ(enumerate_covers(tokenize_frozen("a", m.source_vocab).ids, m, 10).size(), 1u);
  const auto oov = tokenize_frozen("q r s", m.source_vocab);
  const auto covers = enumerate_covers(oov.ids, m, 10);
  ASSERT_EQ(covers.size(), 1u);
  EXPECT_EQ(covers[0], (Cover{{0, 1}, {1, 1}, {2, 1}}));
}

TEST(Covers, RandomDictionariesMatchOracle) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 60; ++trial) {
    HandModel hm;
    std::uniform_int_distribution<int> w(0, 3);
    for (int i = 0; i < 4; ++i) hm.block(Side::kSource, "w" + std::to_string(i), 1);
    for (int b = 0; b < 8; ++b) {
      std::string text;
      const int len = std::uniform_int_distribution<int>(2, 3)(rng);
      for (int k = 0; k < len; ++k) text += "w" + std::to_string(w(rng)) + " ";
      hm.block(Side::kSource, text, 1);
    }
    Model m = hm.build();
    m.generation.max_block_len = 3;
    std::string sentence;
    const int len = std::uniform_int_distribution<int>(1, 7)(rng);
    for (int k = 0; k < len; ++k) sentence += "w" + std::to_string(w(rng)) + " ";
    const auto ids = tokenize_frozen(sentence, m.source_vocab).ids;
    const auto covers = enumerate_covers(ids, m, 1000000);
    for (const auto& c : covers) {
      ASSERT_TRUE(is_valid_cover(c, ids.size(), 3));
      for (std::size_t i = 0; i < c.size(); ++i) {
        for (std::size_t j = 0; j < c.size(); ++j) {
          if (i == j) continue;
          const bool contained = c[j].start <= c[i].start && c[i].end() <= c[j].end();
          EXPECT_FALSE(contained);
        }
      }
    }
    EXPECT_EQ(std::set<Cover>(covers.begin(), covers.end()), oracle_covers(ids, m, 3));
    EXPECT_LE(enumerate_covers(ids, m, 2).size(), 2u);
  }
}

TEST(Candidates, RankingTopKAndProhibited) {
  const Model m = HandModel()
                      .block(Side::kSource, "go", 10)
                      .block(Side::kTarget, "p", 6)
                      .block(Side::kTarget, "q", 3)
                      .block(Side::kTarget, "r", 1)
                      .block(Side::kTarget, "bad", 50)
                      .entry("go", "r", 1)
                      .entry("go", "p", 6)
                      .entry("go", "bad", 7, /*prohibited=*/true)
                      .entry("go", "q", 3)
                      .build();
  DecoderParams params;
  params.candidates = 2;
  const auto sentence = tokenize_frozen("go", m.source_vocab);
  const auto c = candidates(m, sentence, {0, 1}, params);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(render_tokens(c[0].target, m.target_vocab), "p");
  EXPECT_EQ(render_tokens(c[1].target, m.target_vocab), "q");
  EXPECT_DOUBLE_EQ(c[0].log_ratio, std::log(0.6));
  params.candidates = 10;
  for (const auto& cand : candidates(m, sentence, {0, 1}, params)) {
    EXPECT_NE(render_tokens(cand.target, m.target_vocab), "bad");
  }
}

TEST(Candidates, TiesBrokenByRhoThenSurface) {
  const Model m = HandModel()
                      .block(Side::kSource, "go", 10)
                      .block(Side::kTarget, "common", 100)
                      .block(Side::kTarget, "rare", 5)
                      .block(Side::kTarget, "b", 5)
                      .block(Side::kTarget, "a", 5)
                      .entry("go", "common", 5)
                      .entry("go", "rare", 5)
                      .entry("go", "b", 5)
                      .entry("go", "a", 5)
                      .build();
  DecoderParams params;
  const auto c = candidates(m, tokenize_frozen("go", m.source_vocab), {0, 1}, params);
  ASSERT_EQ(c.size(), 4u);
  // Equal P(T|S); smaller n_t means larger rho; then surface order.
  EXPECT_EQ(render_tokens(c[0].target, m.target_vocab), "a");
  EXPECT_EQ(render_tokens(c[1].target, m.target_vocab), "b");
  EXPECT_EQ(render_tokens(c[2].target, m.target_vocab), "rare");
  EXPECT_EQ(render_tokens(c[3].target, m.target_vocab), "common");
}

TEST(Candidates, OovCopyThrough) {
  const Model m = score_fixture();
  DecoderParams params;
  params.p_floor = 1e-6;
  const auto sentence = tokenize_frozen("zzz", m.source_vocab);
  const auto c = candidates(m, sentence, {0, 1}, params);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_FALSE(c[0].entry.has_value());
  EXPECT_EQ(c[0].log_ratio, std::log(1e-6));
  Hypothesis h;
  h.cover = {{0, 1}};
  h.choices = c;
  h.merged_target = build_merged_target(h.cover, h.choices);
  EXPECT_EQ(render_target(h, m, sentence), "zzz");
}

TEST(Merge, Examples) {
  const TokenSeq t12{1, 2}, t23{2, 3}, t34{3, 4}, t2{2};
  EXPECT_EQ(merge_targets(t12, t23), (TokenSeq{1, 2, 3}));
  EXPECT_EQ(merge_targets(t12, t34), (TokenSeq{1, 2, 3, 4}));
  EXPECT_EQ(merge_targets(t12, t2), (TokenSeq{1, 2}));
  EXPECT_EQ(merge_targets(TokenSeq{5, 1, 2}, TokenSeq{1, 2, 6}), (TokenSeq{5, 1, 2, 6}));
}

TEST(Merge, LengthProperty) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<TokenId> tok(2, 4);
  std::uniform_int_distribution<std::size_t> len(1, 4);
  for (int i = 0; i < 500; ++i) {
    TokenSeq a, b;
    for (std::size_t k = len(rng); k > 0; --k) a.push_back(tok(rng));
    for (std::size_t k = len(rng); k > 0; --k) b.push_back(tok(rng));
    EXPECT_EQ(merge_targets(a, b).size(), a.size() + b.size() - overlap_length(a, b));
  }
}

TEST(Merge, SynonymsMatchAndKeepLeftVariant) {
  SynonymTable syn;
  syn.add(2, 7);
  const TokenSeq left{1, 2}, right{7, 3};
  EXPECT_EQ(merge_targets(left, right), (TokenSeq{1, 2, 7, 3}));
  EXPECT_EQ(merge_targets(left, right, &syn), (TokenSeq{1, 2, 3}));

  Vocabulary v(Side::kTarget);
  v.intern("big");
  v.intern("large");
  std::istringstream in("# pairs\nbig\tlarge\nunknown\tlarge\n");
  const SynonymTable parsed = parse_synonyms(in, v);
  EXPECT_TRUE(parsed.equivalent(2, 3));
  EXPECT_TRUE(parsed.equivalent(3, 2));
  std::istringstream bad("big large\n");
  EXPECT_THROW(parse_synonyms(bad, v), Error);
}

TEST(Score, OverlapArithmetic) {
  const Model m = score_fixture();
  const auto sentence = tokenize_frozen("a b c", m.source_vocab);
  DecoderParams params;
  Hypothesis h;
  h.cover = {{0, 2}, {1, 2}};
  h.choices = {candidates(m, sentence, {0, 2}, params)[0],
               candidates(m, sentence, {1, 2}, params)[0]};
  EXPECT_NEAR(score(h, m, sentence, AdhesionMode::kLiteral), std::log(0.012), 1e-12);
  EXPECT_NEAR(score(h, m, sentence, AdhesionMode::kGaf), std::log(0.4 * 0.3 * 10), 1e-12);
  EXPECT_EQ(render_tokens(build_merged_target(h.cover, h.choices), m.target_vocab), "x y z");

  Hypothesis single;
  single.cover = {{0, 2}};
  single.choices = {h.choices[0]};
  EXPECT_NEAR(score(single, m, sentence, AdhesionMode::kLiteral), std::log(0.4), 1e-15);
}

TEST(Score, LogDomainMatchesProductDomain) {
  const Model m = score_fixture();
  const auto sentence = tokenize_frozen("a b c", m.source_vocab);
  DecoderParams params;
  for (const Cover& cover : enumerate_covers(sentence.ids, m, 100)) {
    Hypothesis h;
    h.cover = cover;
    double product = 1.0;
    for (std::size_t j = 0; j < cover.size(); ++j) {
      h.choices.push_back(candidates(m, sentence, cover[j], params)[0]);
      product *= std::exp(h.choices[j].log_ratio);
      if (j > 0 && cover[j].start < cover[j - 1].end()) {
        const auto k = overlap_length(h.choices[j - 1].target, h.choices[j].target);
        for (std::size_t i = 0; i < k; ++i) {
          product *= m.word_probability(
              Side::kTarget, h.choices[j].target[i]);
        }
      }
    }
    EXPECT_NEAR(std::exp(score(h, m, sentence, AdhesionMode::kLiteral)), product, 1e-9);
  }
}

Model correction_fixture() {
  // Words x, y, z at P = 0.2, w at 0.4; bigram rho(x y) = 0.8,
  // rho(z w) = -0.2.
  return HandModel()
      .block(Side::kSource, "a", 10)
      .block(Side::kSource, "b", 10)
      .block(Side::kTarget, "x", 2)
      .block(Side::kTarget, "y", 2)
      .block(Side::kTarget, "z", 2)
      .block(Side::kTarget, "w", 4)
      .block(Side::kTarget, "x y", 72)
      .block(Side::kTarget, "z w", 64)
      .block(Side::kTarget, "w w", 864)
      .entry("a", "x", 2)
      .entry("a", "z", 2)
      .entry("b", "y", 2)
      .entry("b", "w", 4)
      .build();
}

Hypothesis two_word(const Model& m, std::string_view t1, std::string_view t2,
                    double score_value) {
  Hypothesis h;
  h.cover = {{0, 1}, {1, 1}};
  h.choices = {Candidate{testing::ids_of(m.target_vocab, t1), 0.0, std::nullopt},
               Candidate{testing::ids_of(m.target_vocab, t2), 0.0, std::nullopt}};
  h.merged_target = build_merged_target(h.cover, h.choices);
  h.score = score_value;
  return h;
}

TEST(Correction, HigherJunctionRhoWins) {
  const Model m = correction_fixture();
  const Hypothesis good = two_word(m, "x", "y", -5.0);
  const Hypothesis poor = two_word(m, "z", "w", -1.0);
  EXPECT_NEAR(correction_score(good, m, 3), 0.8, 1e-12);
  EXPECT_NEAR(correction_score(poor, m, 3), -0.2, 1e-12);
  const std::vector<Hypothesis> both = {poor, good};
  EXPECT_EQ(correction(both, m, 3).merged_target, good.merged_target);
}

TEST(Correction, SingleAlternativeUnchangedAndTiesByScore) {
  const Model m = correction_fixture();
  const Hypothesis only = two_word(m, "z", "w", -3.0);
  const std::vector<Hypothesis> one = {only};
  EXPECT_EQ(correction(one, m, 3).merged_target, only.merged_target);
  EXPECT_EQ(correction(one, m, 3).score, only.score);
  // Neither "x w" nor "z y" is in the target dictionary: both score -1.
  const Hypothesis low = two_word(m, "x", "w", -4.0);
  const Hypothesis high = two_word(m, "z", "y", -2.0);
  EXPECT_EQ(correction_score(low, m, 3), -1.0);
  EXPECT_EQ(correction_score(high, m, 3), -1.0);
  const std::vector<Hypothesis> tied = {low, high};
  EXPECT_EQ(correction(tied, m, 3).merged_target, high.merged_target);
  Hypothesis lone;
  lone.cover = {{0, 2}};
  lone.choices = {Candidate{testing::ids_of(m.target_vocab, "x y"), 0.0, std::nullopt}};
  EXPECT_TRUE(std::isinf(correction_score(lone, m, 3)));
}

Model go_model() {
  TrainConfig cfg;
  cfg.generation.max_block_len = 2;
  return train_model(testing::parse_text(testing::go_fixture_corpus()), cfg);
}

TEST(Translate, GoFixture) {
  const Model m = go_model();
  // Hand tally: "go" appears in two one-word sentences, each giving the
  // single record (go, idti); n_s = n_st = 2.
  const auto go = m.source_dict.find(testing::ids_of(m.source_vocab, "go"));
  ASSERT_TRUE(go.has_value());
  const TsEntry& top = m.entries[m.ranked_entries(*go).front()];
  EXPECT_EQ(m.stats(top).p_t_given_s, 1.0);
  EXPECT_EQ(top.count, 2u);
  DecoderParams params;
  const auto sentence = tokenize_frozen("go", m.source_vocab);
  const Translation t = translate(sentence, m, params);
  EXPECT_EQ(render_target(t.best, m, sentence), "idti");
  EXPECT_EQ(render_target(translate_exhaustive(sentence, m, params), m, sentence), "idti");
}

TEST(Translate, AllOovCopiesThrough) {
  const Model m = go_model();
  const auto sentence = tokenize_frozen("zzz yyy", m.source_vocab);
  const Translation t = translate(sentence, m, DecoderParams{});
  EXPECT_EQ(render_target(t.best, m, sentence), "zzz yyy");
}

TEST(Translate, EmptyInputAndOracleBound) {
  const Model m = go_model();
  try {
    translate(TokenizedSentence{}, m, DecoderParams{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyInput);
  }
  DecoderParams params;
  params.exhaustive_max_len = 2;
  try {
    translate_exhaustive(tokenize_frozen("go go go", m.source_vocab), m, params);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOracleBound);
  }
}

TEST(Translate, ProhibitedCombinationNeverSelected) {
  const Model m = HandModel()
                      .block(Side::kSource, "a", 10)
                      .block(Side::kTarget, "good", 5)
                      .block(Side::kTarget, "bad", 2)
                      .entry("a", "bad", 9, /*prohibited=*/true)
                      .entry("a", "good", 1)
                      .build();
  const auto sentence = tokenize_frozen("a", m.source_vocab);
  EXPECT_EQ(render_target(translate_exhaustive(sentence, m, DecoderParams{}), m, sentence), "good");
  EXPECT_EQ(render_target(translate(sentence, m, DecoderParams{}).best, m, sentence), "good");
}

Model toy_model(std::uint64_t seed, std::size_t pairs) {
  TrainConfig cfg;
  cfg.shards = 1;
  return train_model(testing::parse_text(testing::make_toy_language(seed, pairs, 0).train), cfg);
}

std::string random_sentence(std::mt19937_64& rng, std::size_t len) {
  std::uniform_int_distribution<int> word(0, 49), coll(0, 9), kind(0, 9);
  std::string out;
  for (std::size_t i = 0; i < len; ++i) {
    const int k = kind(rng);
    if (k == 0) {
      out += "oov" + std::to_string(word(rng)) + " ";
    } else if (k <= 2) {
      out += (k == 1 ? "ca" : "cb") + std::to_string(coll(rng)) + " ";
    } else {
      out += "s" + std::to_string(word(rng)) + " ";
    }
  }
  return out;
}

TEST(Translate, BeamMatchesExhaustiveAndIsMonotone) {
  const Model m = toy_model(1, 400);
  std::mt19937_64 rng(77);
  DecoderParams wide;
  wide.beam = 1024;
  wide.candidates = 3;
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t len = std::uniform_int_distribution<std::size_t>(1, 5)(rng);
    const auto sentence = tokenize_frozen(random_sentence(rng, len), m.source_vocab);
    const Hypothesis oracle = translate_exhaustive(sentence, m, wide);
    const Translation beam = translate(sentence, m, wide);
    EXPECT_EQ(beam.best.score, oracle.score);
    EXPECT_EQ(beam.best.merged_target, oracle.merged_target);
    double previous = -std::numeric_limits<double>::infinity();
    for (std::size_t b : {1, 2, 4, 16, 1024}) {
      DecoderParams p = wide;
      p.beam = b;
      const double s = translate(sentence, m, p).best.score;
      EXPECT_GE(s, previous);
      previous = s;
    }
  }
}

TEST(Translate, DeterministicAndNBest) {
  const Model m = toy_model(2, 300);
  const auto sentence = tokenize_frozen("s1 ca2 cb2 s3", m.source_vocab);
  DecoderParams params;
  params.n_best = 4;
  const Translation a = translate(sentence, m, params);
  const Translation b = translate(sentence, m, params);
  ASSERT_EQ(a.n_best.size(), b.n_best.size());
  EXPECT_GE(a.n_best.size(), 2u);
  for (std::size_t i = 0; i < a.n_best.size(); ++i) {
    EXPECT_EQ(a.n_best[i].merged_target, b.n_best[i].merged_target);
    EXPECT_EQ(a.n_best[i].score, b.n_best[i].score);
    if (i > 0) EXPECT_LE(a.n_best[i].score, a.n_best[i - 1].score);
  }
  EXPECT_EQ(a.n_best.front().merged_target, a.best.merged_target);
  EXPECT_EQ(render_target(a.best, m, sentence), "t1 tb2 ta2 t3");
}

TEST(Translate, ScoreEqualsRecomputedObjective) {
  const Model m = toy_model(3, 300);
  std::mt19937_64 rng(5);
  for (auto mode : {AdhesionMode::kLiteral, AdhesionMode::kGaf, AdhesionMode::kLaf}) {
    DecoderParams params;
    params.mode = mode;
    for (int trial = 0; trial < 10; ++trial) {
      const auto sentence = tokenize_frozen(random_sentence(rng, 5), m.source_vocab);
      const Hypothesis h = translate(sentence, m, params).best;
      EXPECT_EQ(score(h, m, sentence, mode), h.score);
      EXPECT_TRUE(is_valid_cover(h.cover, sentence.ids.size(), 3));
      EXPECT_EQ(h.merged_target, build_merged_target(h.cover, h.choices));
    }
  }
}

}  // namespace
}  // namespace blockmt
