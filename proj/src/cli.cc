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

#include "blockmt/cli.h"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "blockmt/corpus.h"
#include "blockmt/decoder.h"
#include "blockmt/error.h"
#include "blockmt/model.h"
#include "blockmt/model_io.h"
#include "blockmt/training.h"

namespace blockmt {
namespace {

// Everything a command may need; filled by CLI11.
struct RunConfig {
  std::string corpus;
  std::string out;
  std::string model;
  std::string cognates;
  std::string synonyms;
  std::string alternative = "a";
  std::string growth_mode = "any_split";
  std::string adhesion;
  std::size_t max_block_len = 3;
  std::uint64_t budget = kUnboundedBudget;
  bool emit_empty = false;
  std::size_t w_max = 8;
  ThresholdConfig thresholds;
  bool lowercase = false;
  std::uint64_t seed = 0;
  std::size_t max_pairs = 0;
  std::size_t shards = 0;
  std::size_t beam = 64;
  std::size_t n_best = 1;
  std::size_t candidates = 8;
  std::size_t max_covers = 100000;
  double p_floor = 1e-9;
  bool correction_first = false;
  std::vector<std::string> block;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  return in;
}

void check_readable(const std::string& path) { open_input(path); }

void print_kv(std::ostream& out, const char* key, const std::string& value) {
  out << key << '\t' << value << '\n';
}

void print_kv(std::ostream& out, const char* key, std::uint64_t value) {
  print_kv(out, key, std::to_string(value));
}

int cmd_train(const RunConfig& rc, std::ostream& out) {
  TrainConfig cfg;
  const auto alt = parse_alternative(rc.alternative);
  const auto growth = parse_growth_mode(rc.growth_mode);
  if (!alt || !growth) throw UsageError("bad --alt or --growth-mode");
  cfg.generation.alternative = *alt;
  cfg.generation.max_block_len = rc.max_block_len;
  cfg.generation.budget = rc.budget;
  cfg.generation.emit_empty = rc.emit_empty;
  cfg.generation.w_max = rc.w_max;
  cfg.thresholds = rc.thresholds;
  cfg.thresholds.growth_mode = *growth;
  if (!rc.adhesion.empty()) cfg.adhesion = *parse_adhesion_mode(rc.adhesion);
  cfg.lowercase = rc.lowercase;
  cfg.seed = rc.seed;
  cfg.shards = rc.shards;
  try {
    validate(cfg.generation);
    validate(cfg.thresholds);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }

  // Paths are checked before any work starts.
  check_readable(rc.corpus);
  if (!rc.cognates.empty()) check_readable(rc.cognates);
  {
    std::ofstream probe(rc.out, std::ios::binary | std::ios::app);
    if (!probe) throw Error(ErrorCode::kIo, "cannot write '" + rc.out + "'");
  }

  if (!rc.cognates.empty()) {
    auto in = open_input(rc.cognates);
    cfg.cognates = parse_cognates(in);
  }
  ParseOptions options;
  options.lowercase = rc.lowercase;
  if (rc.max_pairs > 0) options.max_pairs = rc.max_pairs;
  ParsedCorpus corpus;
  {
    auto in = open_input(rc.corpus);
    corpus = parse_corpus(in, options);
  }
  TrainSummary summary;
  const Model model = train_model(corpus, cfg, &summary);
  save_model_file(model, rc.out);

  print_kv(out, "sentence_pairs", summary.sentence_pairs);
  print_kv(out, "n", summary.n);
  print_kv(out, "source_entries", summary.source_entries);
  print_kv(out, "target_entries", summary.target_entries);
  print_kv(out, "ts_entries", summary.ts_entries);
  print_kv(out, "prohibited_entries", summary.prohibited_entries);
  print_kv(out, "source_negative_blocks", summary.source_negative_blocks);
  print_kv(out, "target_negative_blocks", summary.target_negative_blocks);
  print_kv(out, "laf_entries", summary.laf_entries);
  print_kv(out, "truncated", summary.truncated ? "1" : "0");
  return kExitOk;
}

int cmd_translate(const RunConfig& rc, std::istream& in, std::ostream& out) {
  if (rc.beam == 0 || rc.n_best == 0 || rc.candidates == 0 ||
      !(rc.p_floor > 0.0 && rc.p_floor <= 1.0)) {
    throw UsageError("--beam, --n-best and --candidates must be positive and "
                     "--p-floor in (0, 1]");
  }
  check_readable(rc.model);
  if (!rc.synonyms.empty()) check_readable(rc.synonyms);
  const Model model = load_model_file(rc.model);

  SynonymTable synonyms;
  DecoderParams params;
  if (!rc.synonyms.empty()) {
    auto syn_in = open_input(rc.synonyms);
    synonyms = parse_synonyms(syn_in, model.target_vocab);
    params.synonyms = &synonyms;
  }
  params.beam = rc.beam;
  params.n_best = rc.n_best;
  params.candidates = rc.candidates;
  params.max_covers = rc.max_covers;
  params.p_floor = rc.p_floor;
  params.correction_first = rc.correction_first;
  params.mode = rc.adhesion.empty() ? model.adhesion
                                    : *parse_adhesion_mode(rc.adhesion);

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!is_valid_utf8(line)) {
      throw Error(ErrorCode::kEncoding, "input is not valid UTF-8", line_no);
    }
    const TokenizedSentence sentence =
        tokenize_frozen(line, model.source_vocab, model.lowercase);
    if (sentence.ids.empty()) {
      if (rc.n_best > 1) continue;
      out << '\n';
      continue;
    }
    const Translation t = translate(sentence, model, params);
    if (rc.n_best > 1) {
      for (std::size_t i = 0; i < t.n_best.size(); ++i) {
        out << i << '\t' << format_double(t.n_best[i].score) << '\t'
            << render_target(t.n_best[i], model, sentence) << '\n';
      }
    } else {
      out << render_target(t.best, model, sentence) << '\n';
    }
  }
  return kExitOk;
}

int cmd_lookup(const RunConfig& rc, std::ostream& out) {
  check_readable(rc.model);
  const Model model = load_model_file(rc.model);
  std::string text;
  for (const auto& word : rc.block) {
    if (!text.empty()) text += ' ';
    text += word;
  }
  const TokenizedSentence block =
      tokenize_frozen(text, model.source_vocab, model.lowercase);
  if (block.ids.empty()) throw UsageError("lookup needs a source block");
  const auto id = model.source_dict.find(block.ids);
  if (!id) return kExitOk;
  struct Row {
    const TsEntry* entry;
    TsStats stats;
  };
  std::vector<Row> rows;
  // Already ordered by P(T|S), then rho, then target surface.
  for (std::size_t index : model.ranked_entries(*id)) {
    rows.push_back({&model.entries[index], model.stats(model.entries[index])});
  }
  for (const Row& row : rows) {
    out << model.render_block(Side::kTarget,
                              model.target_dict.tokens(row.entry->target))
        << '\t' << row.entry->count << '\t' << format_double(row.stats.p_joint)
        << '\t' << format_double(row.stats.p_t_given_s) << '\t'
        << format_double(row.stats.p_s_given_t) << '\t'
        << format_double(row.stats.rho);
    if (row.entry->prohibited) out << "\tP";
    out << '\n';
  }
  return kExitOk;
}

int cmd_stats(const RunConfig& rc, std::ostream& out) {
  if (rc.model.empty() == rc.corpus.empty()) {
    throw UsageError("stats needs exactly one of --model or --corpus");
  }
  if (!rc.corpus.empty()) {
    check_readable(rc.corpus);
    auto in = open_input(rc.corpus);
    ParseOptions options;
    options.lowercase = rc.lowercase;
    const ParsedCorpus corpus = parse_corpus(in, options);
    std::uint64_t source_tokens = 0, target_tokens = 0;
    for (const auto& p : corpus.pairs) {
      source_tokens += p.source.size();
      target_tokens += p.target.size();
    }
    print_kv(out, "sentence_pairs", corpus.pairs.size());
    print_kv(out, "source_tokens", source_tokens);
    print_kv(out, "target_tokens", target_tokens);
    // Reserved entries are not words of the corpus.
    print_kv(out, "source_vocabulary", corpus.source_vocab.size() - 2);
    print_kv(out, "target_vocabulary", corpus.target_vocab.size() - 2);
    return kExitOk;
  }
  check_readable(rc.model);
  const Model model = load_model_file(rc.model);
  std::size_t prohibited = 0;
  for (const auto& e : model.entries) prohibited += e.prohibited ? 1 : 0;
  print_kv(out, "n", model.n);
  print_kv(out, "alternative", alternative_name(model.generation.alternative));
  print_kv(out, "l_max", model.generation.max_block_len);
  print_kv(out, "source_entries", model.source_dict.size());
  print_kv(out, "target_entries", model.target_dict.size());
  print_kv(out, "ts_entries", model.entries.size());
  print_kv(out, "prohibited_entries", prohibited);
  print_kv(out, "laf_entries", model.laf.size());
  print_kv(out, "truncated", model.truncated ? "1" : "0");
  return kExitOk;
}

void add_generation_flags(CLI::App* app, RunConfig& rc) {
  app->add_option("--alt", rc.alternative, "Pair generation: a (all-in) or b (symmetric)")
      ->check(CLI::IsMember({"a", "b"}));
  app->add_option("--max-block-len", rc.max_block_len, "Longest block length l_max");
  app->add_option("--min-count", rc.thresholds.min_count, "Minimum occurrence count");
  app->add_option("--cs-pos", rc.thresholds.cs_pos, "Source admission threshold");
  app->add_option("--cs-neg", rc.thresholds.cs_neg, "Source negative threshold");
  app->add_option("--ct-pos", rc.thresholds.ct_pos, "Target admission threshold");
  app->add_option("--ct-neg", rc.thresholds.ct_neg, "Target negative threshold");
  app->add_option("--cts-pos", rc.thresholds.cts_pos, "Bilingual admission threshold");
  app->add_option("--cts-neg", rc.thresholds.cts_neg, "Bilingual prohibition threshold");
  app->add_option("--budget", rc.budget, "Maximum number of pair records");
  app->add_flag("--emit-empty", rc.emit_empty, "Emit pairs with the EMPTY block");
  app->add_option("--w-max", rc.w_max, "Maximum segments per sentence (alt b)");
  app->add_option("--cognates", rc.cognates, "Cognate pairs, TSV");
  app->add_option("--growth-mode", rc.growth_mode, "any_split or all_splits")
      ->check(CLI::IsMember({"any_split", "all_splits"}));
  app->add_flag("--lowercase", rc.lowercase, "ASCII-lowercase all text");
  app->add_option("--max-pairs", rc.max_pairs, "Read at most this many pairs (0: all)");
  app->add_option("--shards", rc.shards, "Counting threads (0: hardware)");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::istream& in,
            std::ostream& out, std::ostream& err) {
  RunConfig rc;
  CLI::App app{"Block-based statistical machine translation", "blockmt"};
  app.require_subcommand(1);

  auto* train = app.add_subcommand("train", "Train a model from a parallel corpus");
  train->add_option("--corpus", rc.corpus, "Parallel corpus, source<TAB>target")->required();
  train->add_option("--out", rc.out, "Model file to write")->required();
  add_generation_flags(train, rc);

  auto* tr = app.add_subcommand("translate", "Translate standard input line by line");
  tr->add_option("--model", rc.model, "Model file")->required();
  tr->add_option("--beam", rc.beam, "Beam width");
  tr->add_option("--n-best", rc.n_best, "Print the K best translations");
  tr->add_option("--synonyms", rc.synonyms, "Target synonym pairs, TSV");
  tr->add_option("--p-floor", rc.p_floor, "Probability of a copied unknown word");
  tr->add_option("--candidates", rc.candidates, "Candidate target blocks per span");
  tr->add_option("--max-covers", rc.max_covers, "Cover enumeration cap");
  tr->add_flag("--correction-first", rc.correction_first,
               "Rank by correction before score");

  for (auto* sub : {train, tr}) {
    sub->add_option("--adhesion", rc.adhesion, "literal, gaf or laf")
        ->check(CLI::IsMember({"literal", "gaf", "laf"}));
    sub->add_option("--seed", rc.seed, "Seed recorded with the run");
  }

  auto* lookup = app.add_subcommand("lookup", "List the TS entries of a source block");
  lookup->add_option("--model", rc.model, "Model file")->required();
  lookup->add_option("block", rc.block, "Source block words")->required();

  auto* stats = app.add_subcommand("stats", "Summarize a model or a corpus");
  stats->add_option("--model", rc.model, "Model file");
  stats->add_option("--corpus", rc.corpus, "Parallel corpus");
  stats->add_flag("--lowercase", rc.lowercase, "ASCII-lowercase the corpus");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (train->parsed()) return cmd_train(rc, out);
    if (tr->parsed()) return cmd_translate(rc, in, out);
    if (lookup->parsed()) return cmd_lookup(rc, out);
    return cmd_stats(rc, out);
  } catch (const UsageError& e) {
    err << "blockmt: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "blockmt: " << error_code_name(e.code()) << ": " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace blockmt
