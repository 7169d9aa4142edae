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

#include <zlib.h>

#include <cstdio>
#include <filesystem>
#include <random>
#include <sstream>

#include "blockmt/decoder.h"
#include "blockmt/error.h"
#include "blockmt/model_io.h"
#include "blockmt/training.h"
#include "test_util.h"

namespace blockmt {
namespace {

Model fixture_model() {
  TrainConfig cfg;
  cfg.thresholds.cts_pos = 0.75;
  cfg.thresholds.cs_neg = 0.3;
  cfg.generation.budget = 100000;
  cfg.adhesion = AdhesionMode::kLaf;
  cfg.seed = 42;
  cfg.shards = 1;
  return train_model(
      testing::parse_text(testing::make_toy_language(9, 300, 0).train), cfg);
}

ErrorCode load_code(std::string_view text) {
  try {
    parse_model(text);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kIo;
}

// Re-seals edited text with a correct checksum.
std::string reseal(std::string body) {
  char trailer[32];
  std::snprintf(trailer, sizeof trailer, "#CHECKSUM %08x\n",
                static_cast<unsigned>(crc32(0, reinterpret_cast<const Bytef*>(body.data()),
                                            static_cast<uInt>(body.size()))));
  return body + trailer;
}

std::string body_of(const std::string& text) {
  return text.substr(0, text.rfind("#CHECKSUM"));
}

TEST(ModelIo, RoundTripPreservesEverything) {
  const Model m = fixture_model();
  const std::string text = serialize_model(m);
  const Model loaded = parse_model(text);
  EXPECT_TRUE(same_content(m, loaded));
  EXPECT_EQ(loaded.n, m.n);
  EXPECT_EQ(loaded.thresholds, m.thresholds);
  EXPECT_EQ(loaded.generation, m.generation);
  EXPECT_EQ(loaded.adhesion, AdhesionMode::kLaf);
  EXPECT_EQ(loaded.seed, 42u);
  EXPECT_EQ(loaded.laf.size(), m.laf.size());
  EXPECT_GT(m.laf.size(), 0u);
  EXPECT_EQ(serialize_model(loaded), text);

  // Probabilities and decoding are derived identically after loading.
  const std::string sentence = "s1 ca3 cb3 s4 s7";
  const auto a = tokenize_frozen(sentence, m.source_vocab);
  const auto b = tokenize_frozen(sentence, loaded.source_vocab);
  DecoderParams params;
  params.mode = AdhesionMode::kLaf;
  const Hypothesis ha = translate(a, m, params).best;
  const Hypothesis hb = translate(b, loaded, params).best;
  EXPECT_EQ(ha.score, hb.score);
  EXPECT_EQ(render_target(ha, m, a), render_target(hb, loaded, b));
}

TEST(ModelIo, FormatLayout) {
  const std::string text = serialize_model(fixture_model());
  EXPECT_EQ(text.rfind("#BLOCKMT v1\n", 0), 0u);
  for (const char* key : {"n", "alternative", "l_max", "min_count", "cs_pos",
                          "cs_neg", "ct_pos", "ct_neg", "cts_pos", "cts_neg",
                          "adhesion", "growth_mode", "budget", "seed"}) {
    EXPECT_NE(text.find(std::string("\n#meta ") + key + "\t"), std::string::npos) << key;
  }
  const auto s = text.find("\n#S\n");
  const auto t = text.find("\n#T\n");
  const auto ts = text.find("\n#TS\n");
  const auto laf = text.find("\n#LAF\n");
  const auto sum = text.find("\n#CHECKSUM ");
  EXPECT_LT(s, t);
  EXPECT_LT(t, ts);
  EXPECT_LT(ts, laf);
  EXPECT_LT(laf, sum);
  EXPECT_NE(text.find("#meta cts_pos\t0.75\n"), std::string::npos);
  EXPECT_NE(text.find("#meta cs_neg\t0.29999999999999999\n"), std::string::npos);
  EXPECT_NE(text.find("#meta adhesion\tlaf\n"), std::string::npos);
  EXPECT_NE(text.find("\ns1\t"), std::string::npos);
  EXPECT_NE(text.find("\nca3 cb3\t"), std::string::npos);
  EXPECT_NE(text.find("\ntarget\t"), std::string::npos);
  // Checksum trailer: CRC-32 of every prior byte.
  const std::string body = text.substr(0, sum + 1);
  char expected[32];
  std::snprintf(expected, sizeof expected, "#CHECKSUM %08x\n",
                static_cast<unsigned>(crc32(0, reinterpret_cast<const Bytef*>(body.data()),
                                            static_cast<uInt>(body.size()))));
  EXPECT_EQ(text.substr(sum + 1), expected);
}

TEST(ModelIo, DoublesUseSeventeenDigitsAndRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(1.0), "1");
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng) * std::pow(10.0, static_cast<double>(i % 40 - 20));
    EXPECT_EQ(parse_double(format_double(x)), x);
  }
}

TEST(ModelIo, EverySingleByteCorruptionDetected) {
  const std::string text = serialize_model(fixture_model());
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> pos(0, text.size() - 1);
  std::uniform_int_distribution<int> delta(1, 255);
  for (int trial = 0; trial < 50; ++trial) {
    std::string bad = text;
    const std::size_t p = pos(rng);
    bad[p] = static_cast<char>(static_cast<unsigned char>(bad[p]) + delta(rng));
    EXPECT_THROW(parse_model(bad), Error) << "position " << p;
  }
  std::string bad = text;
  bad[20] ^= 0x01;
  EXPECT_EQ(load_code(bad), ErrorCode::kChecksum);
  EXPECT_EQ(load_code(text.substr(0, text.size() - 1)), ErrorCode::kChecksum);
  EXPECT_EQ(load_code(body_of(text)), ErrorCode::kChecksum);
}

TEST(ModelIo, UnknownSectionAndVersion) {
  const std::string text = serialize_model(fixture_model());
  EXPECT_EQ(load_code(reseal(body_of(text) + "#EXTRA\nfoo\t1\n")),
            ErrorCode::kUnsupportedSection);
  std::string v2 = body_of(text);
  v2.replace(0, 11, "#BLOCKMT v2");
  EXPECT_EQ(load_code(reseal(v2)), ErrorCode::kUnsupportedVersion);
  EXPECT_NO_THROW(parse_model(reseal(body_of(text))));
}

TEST(ModelIo, MalformedContentRejected) {
  const std::string body = body_of(serialize_model(fixture_model()));
  // TS entry for a block that is not in the dictionaries.
  std::string bad = body;
  bad.insert(bad.find("#LAF\n"), "nosuch\tt1\t1\t0\n");
  EXPECT_EQ(load_code(reseal(bad)), ErrorCode::kMalformedModel);
  std::string bad_flag = body;
  bad_flag.insert(bad_flag.find("#LAF\n"), "s1\tt1\t1\t2\n");
  EXPECT_EQ(load_code(reseal(bad_flag)), ErrorCode::kMalformedModel);
  std::string missing = body;
  missing.erase(missing.find("#meta n\t"), missing.find('\n', missing.find("#meta n\t")) -
                                               missing.find("#meta n\t") + 1);
  EXPECT_EQ(load_code(reseal(missing)), ErrorCode::kMalformedModel);
}

TEST(ModelIo, Files) {
  const Model m = fixture_model();
  const auto dir = std::filesystem::temp_directory_path();
  const std::string path = (dir / "blockmt_model_io_test.bmt").string();
  save_model_file(m, path);
  EXPECT_TRUE(same_content(load_model_file(path), m));
  std::filesystem::remove(path);
  try {
    load_model_file((dir / "does_not_exist.bmt").string());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

TEST(ModelIo, SameTrainingTwiceIsByteIdentical) {
  EXPECT_EQ(serialize_model(fixture_model()), serialize_model(fixture_model()));
}

}  // namespace
}  // namespace blockmt
