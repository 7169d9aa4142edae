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

#include "blockmt/model_io.h"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <system_error>
#include <utility>
#include <vector>

#include "blockmt/error.h"

namespace blockmt {

std::string format_double(double value) {
  std::array<char, 64> buf{};
  const auto result = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                    std::chars_format::general, 17);
  return std::string(buf.data(), result.ptr);
}

double parse_double(std::string_view text) {
  double value = 0;
  const auto result =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc() || result.ptr != text.data() + text.size()) {
    throw Error(ErrorCode::kMalformedModel,
                "bad real number '" + std::string(text) + "'");
  }
  return value;
}

std::uint32_t crc32_of(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed large inputs in pieces.
  constexpr std::size_t kChunk = 1u << 30;
  for (std::size_t pos = 0; pos < bytes.size(); pos += kChunk) {
    const std::size_t len = std::min(kChunk, bytes.size() - pos);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data() + pos),
                static_cast<uInt>(len));
  }
  return static_cast<std::uint32_t>(crc);
}

namespace {

std::string join_totals(const std::vector<std::uint64_t>& totals) {
  std::string out;
  for (std::size_t i = 0; i < totals.size(); ++i) {
    if (i > 0) out += ' ';
    out += std::to_string(totals[i]);
  }
  return out;
}

using SurfaceKey = std::vector<std::string_view>;

SurfaceKey surface_key(std::span<const TokenId> tokens, const Vocabulary& vocab) {
  SurfaceKey key;
  key.reserve(tokens.size());
  for (TokenId t : tokens) key.push_back(vocab.surface(t));
  return key;
}

bool key_less(const SurfaceKey& a, const SurfaceKey& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

std::string join_key(const SurfaceKey& key) {
  std::string out;
  for (std::size_t i = 0; i < key.size(); ++i) {
    if (i > 0) out += ' ';
    out += key[i];
  }
  return out;
}

// Dictionary ids in file order.
std::vector<BlockTable::Id> sorted_ids(const BlockTable& table,
                                       const Vocabulary& vocab) {
  std::vector<std::pair<SurfaceKey, BlockTable::Id>> keyed;
  keyed.reserve(table.size());
  for (BlockTable::Id id = 0; id < table.size(); ++id) {
    keyed.emplace_back(surface_key(table.tokens(id), vocab), id);
  }
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
    return key_less(a.first, b.first);
  });
  std::vector<BlockTable::Id> out;
  out.reserve(keyed.size());
  for (const auto& [key, id] : keyed) out.push_back(id);
  return out;
}

void write_dict(std::string& out, const char* name, const BlockTable& table,
                const Vocabulary& vocab) {
  out += name;
  out += '\n';
  for (BlockTable::Id id : sorted_ids(table, vocab)) {
    out += join_key(surface_key(table.tokens(id), vocab));
    out += '\t';
    out += std::to_string(table.count(id));
    out += '\n';
  }
}

void meta(std::string& out, std::string_view key, std::string_view value) {
  out += "#meta ";
  out += key;
  out += '\t';
  out += value;
  out += '\n';
}

}  // namespace

std::string serialize_model(const Model& model) {
  std::string out;
  out += kModelHeader;
  out += '\n';
  const auto& g = model.generation;
  const auto& th = model.thresholds;
  meta(out, "n", std::to_string(model.n));
  meta(out, "alternative", alternative_name(g.alternative));
  meta(out, "l_max", std::to_string(g.max_block_len));
  meta(out, "budget", g.budget == kUnboundedBudget ? "unbounded"
                                                    : std::to_string(g.budget));
  meta(out, "emit_empty", g.emit_empty ? "1" : "0");
  meta(out, "w_max", std::to_string(g.w_max));
  meta(out, "truncated", model.truncated ? "1" : "0");
  meta(out, "min_count", std::to_string(th.min_count));
  meta(out, "growth_mode", growth_mode_name(th.growth_mode));
  meta(out, "cs_pos", format_double(th.cs_pos));
  meta(out, "cs_neg", format_double(th.cs_neg));
  meta(out, "ct_pos", format_double(th.ct_pos));
  meta(out, "ct_neg", format_double(th.ct_neg));
  meta(out, "cts_pos", format_double(th.cts_pos));
  meta(out, "cts_neg", format_double(th.cts_neg));
  meta(out, "adhesion", adhesion_mode_name(model.adhesion));
  meta(out, "lowercase", model.lowercase ? "1" : "0");
  meta(out, "seed", std::to_string(model.seed));
  meta(out, "s_length_totals", join_totals(model.source_dict.length_totals()));
  meta(out, "t_length_totals", join_totals(model.target_dict.length_totals()));

  write_dict(out, "#S", model.source_dict, model.source_vocab);
  write_dict(out, "#T", model.target_dict, model.target_vocab);

  out += "#TS\n";
  {
    std::vector<std::pair<std::pair<SurfaceKey, SurfaceKey>, std::size_t>> keyed;
    keyed.reserve(model.entries.size());
    for (std::size_t i = 0; i < model.entries.size(); ++i) {
      const TsEntry& e = model.entries[i];
      keyed.push_back(
          {{surface_key(model.source_dict.tokens(e.source), model.source_vocab),
            surface_key(model.target_dict.tokens(e.target), model.target_vocab)},
           i});
    }
    std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
      if (a.first.first != b.first.first) {
        return key_less(a.first.first, b.first.first);
      }
      return key_less(a.first.second, b.first.second);
    });
    for (const auto& [keys, index] : keyed) {
      const TsEntry& e = model.entries[index];
      out += join_key(keys.first);
      out += '\t';
      out += join_key(keys.second);
      out += '\t';
      out += std::to_string(e.count);
      out += e.prohibited ? "\t1\n" : "\t0\n";
    }
  }

  out += "#LAF\n";
  for (Side side : {Side::kSource, Side::kTarget}) {
    std::map<std::string_view, LafEntry> by_surface;
    for (const auto& [token, entry] : model.laf.side(side)) {
      by_surface.emplace(model.vocab(side).surface(token), entry);
    }
    for (const auto& [surface, entry] : by_surface) {
      out += side_name(side);
      out += '\t';
      out += surface;
      out += '\t';
      out += format_double(entry.laf);
      out += '\t';
      out += std::to_string(entry.support);
      out += '\n';
    }
  }

  char trailer[32];
  std::snprintf(trailer, sizeof trailer, "#CHECKSUM %08x\n", crc32_of(out));
  out += trailer;
  return out;
}

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto tab = line.find('\t', pos);
    out.push_back(line.substr(pos, tab == std::string_view::npos
                                       ? std::string_view::npos
                                       : tab - pos));
    if (tab == std::string_view::npos) break;
    pos = tab + 1;
  }
  return out;
}

[[noreturn]] void malformed(const std::string& what, std::size_t line) {
  throw Error(ErrorCode::kMalformedModel, what, line);
}

std::uint64_t parse_uint(std::string_view text, std::size_t line) {
  std::uint64_t value = 0;
  const auto result =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || result.ec != std::errc() ||
      result.ptr != text.data() + text.size()) {
    malformed("bad integer '" + std::string(text) + "'", line);
  }
  return value;
}

double parse_real(std::string_view text, std::size_t line) {
  try {
    return parse_double(text);
  } catch (const Error& e) {
    malformed(e.what(), line);
  }
}

bool parse_flag(std::string_view text, std::size_t line) {
  if (text == "0") return false;
  if (text == "1") return true;
  malformed("flag must be 0 or 1", line);
}

TokenSeq parse_block(std::string_view text, Vocabulary& vocab,
                     std::size_t line) {
  const auto words = split_whitespace(text);
  if (words.empty()) malformed("empty block", line);
  TokenSeq out;
  out.reserve(words.size());
  for (const auto& w : words) out.push_back(vocab.intern(w));
  return out;
}

std::vector<std::uint64_t> parse_totals(std::string_view text,
                                        std::size_t line) {
  std::vector<std::uint64_t> out;
  for (const auto& w : split_whitespace(text)) out.push_back(parse_uint(w, line));
  return out;
}

enum class Section { kMeta, kS, kT, kTs, kLaf };

}  // namespace

Model parse_model(std::string_view text) {
  // Checksum first: the trailer is the last line.
  if (text.empty() || text.back() != '\n') {
    throw Error(ErrorCode::kChecksum, "missing checksum trailer");
  }
  const auto trailer_start = text.rfind('\n', text.size() - 2);
  const std::size_t body_end =
      trailer_start == std::string_view::npos ? 0 : trailer_start + 1;
  const std::string_view trailer =
      text.substr(body_end, text.size() - 1 - body_end);
  constexpr std::string_view kPrefix = "#CHECKSUM ";
  if (trailer.substr(0, kPrefix.size()) != kPrefix ||
      trailer.size() != kPrefix.size() + 8) {
    throw Error(ErrorCode::kChecksum, "missing checksum trailer");
  }
  std::uint32_t stored = 0;
  {
    const auto hex = trailer.substr(kPrefix.size());
    const auto result =
        std::from_chars(hex.data(), hex.data() + hex.size(), stored, 16);
    if (result.ec != std::errc() || result.ptr != hex.data() + hex.size()) {
      throw Error(ErrorCode::kChecksum, "unreadable checksum");
    }
  }
  const std::string_view body = text.substr(0, body_end);
  if (crc32_of(body) != stored) {
    throw Error(ErrorCode::kChecksum, "checksum mismatch");
  }

  Model model;
  std::vector<std::uint64_t> s_totals, t_totals;
  bool s_totals_seen = false, t_totals_seen = false;
  Section section = Section::kMeta;
  int sections_seen = 0;
  std::map<std::string, bool> required = {
      {"n", false},         {"alternative", false}, {"l_max", false},
      {"min_count", false}, {"cts_pos", false},     {"cts_neg", false}};

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < body.size()) {
    const auto nl = body.find('\n', pos);
    const std::string_view line = body.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (line_no == 1) {
      if (line == kModelHeader) continue;
      if (line.substr(0, 9) == "#BLOCKMT ") {
        throw Error(ErrorCode::kUnsupportedVersion,
                    "unsupported model version '" +
                        std::string(line.substr(9)) + "'",
                    line_no);
      }
      malformed("missing #BLOCKMT header", line_no);
    }
    if (line.substr(0, 6) == "#meta ") {
      if (section != Section::kMeta) malformed("#meta after a section", line_no);
      const auto fields = split_tabs(line.substr(6));
      if (fields.size() != 2) malformed("meta line needs key and value", line_no);
      const std::string key(fields[0]);
      const std::string_view value = fields[1];
      if (required.count(key)) required[key] = true;
      auto& g = model.generation;
      auto& th = model.thresholds;
      if (key == "n") {
        model.n = parse_uint(value, line_no);
      } else if (key == "alternative") {
        const auto alt = parse_alternative(value);
        if (!alt) malformed("unknown alternative", line_no);
        g.alternative = *alt;
      } else if (key == "l_max") {
        g.max_block_len = parse_uint(value, line_no);
      } else if (key == "budget") {
        g.budget = value == "unbounded" ? kUnboundedBudget
                                        : parse_uint(value, line_no);
      } else if (key == "emit_empty") {
        g.emit_empty = parse_flag(value, line_no);
      } else if (key == "w_max") {
        g.w_max = parse_uint(value, line_no);
      } else if (key == "truncated") {
        model.truncated = parse_flag(value, line_no);
      } else if (key == "min_count") {
        th.min_count = parse_uint(value, line_no);
      } else if (key == "growth_mode") {
        const auto mode = parse_growth_mode(value);
        if (!mode) malformed("unknown growth mode", line_no);
        th.growth_mode = *mode;
      } else if (key == "cs_pos") {
        th.cs_pos = parse_real(value, line_no);
      } else if (key == "cs_neg") {
        th.cs_neg = parse_real(value, line_no);
      } else if (key == "ct_pos") {
        th.ct_pos = parse_real(value, line_no);
      } else if (key == "ct_neg") {
        th.ct_neg = parse_real(value, line_no);
      } else if (key == "cts_pos") {
        th.cts_pos = parse_real(value, line_no);
      } else if (key == "cts_neg") {
        th.cts_neg = parse_real(value, line_no);
      } else if (key == "adhesion") {
        const auto mode = parse_adhesion_mode(value);
        if (!mode) malformed("unknown adhesion mode", line_no);
        model.adhesion = *mode;
      } else if (key == "lowercase") {
        model.lowercase = parse_flag(value, line_no);
      } else if (key == "seed") {
        model.seed = parse_uint(value, line_no);
      } else if (key == "s_length_totals") {
        s_totals = parse_totals(value, line_no);
        s_totals_seen = true;
      } else if (key == "t_length_totals") {
        t_totals = parse_totals(value, line_no);
        t_totals_seen = true;
      } else {
        malformed("unknown meta key '" + key + "'", line_no);
      }
      continue;
    }
    if (!line.empty() && line.front() == '#') {
      static constexpr std::array<std::pair<std::string_view, Section>, 4>
          kSections = {{{"#S", Section::kS},
                        {"#T", Section::kT},
                        {"#TS", Section::kTs},
                        {"#LAF", Section::kLaf}}};
      const auto it = std::find_if(kSections.begin(), kSections.end(),
                                   [&](const auto& s) { return s.first == line; });
      if (it == kSections.end()) {
        throw Error(ErrorCode::kUnsupportedSection,
                    "unsupported section '" + std::string(line) + "'", line_no);
      }
      const int index = static_cast<int>(it - kSections.begin());
      if (index != sections_seen) malformed("sections out of order", line_no);
      ++sections_seen;
      section = it->second;
      continue;
    }
    const auto fields = split_tabs(line);
    switch (section) {
      case Section::kMeta:
        malformed("data line before any section", line_no);
      case Section::kS:
      case Section::kT: {
        if (fields.size() != 2) malformed("block line needs 2 fields", line_no);
        const Side side = section == Section::kS ? Side::kSource : Side::kTarget;
        Vocabulary& vocab = side == Side::kSource ? model.source_vocab
                                                  : model.target_vocab;
        BlockTable& dict = side == Side::kSource ? model.source_dict
                                                 : model.target_dict;
        const TokenSeq block = parse_block(fields[0], vocab, line_no);
        if (dict.contains(block)) malformed("duplicate block", line_no);
        dict.add(block, parse_uint(fields[1], line_no));
        break;
      }
      case Section::kTs: {
        if (fields.size() != 4) malformed("TS line needs 4 fields", line_no);
        const auto s = model.source_dict.find(
            parse_block(fields[0], model.source_vocab, line_no));
        const auto t = model.target_dict.find(
            parse_block(fields[1], model.target_vocab, line_no));
        if (!s || !t) malformed("TS entry refers to an unknown block", line_no);
        model.entries.push_back(TsEntry{*s, *t, parse_uint(fields[2], line_no),
                                        parse_flag(fields[3], line_no)});
        break;
      }
      case Section::kLaf: {
        if (fields.size() != 4) malformed("LAF line needs 4 fields", line_no);
        Side side;
        if (fields[0] == side_name(Side::kSource)) {
          side = Side::kSource;
        } else if (fields[0] == side_name(Side::kTarget)) {
          side = Side::kTarget;
        } else {
          malformed("unknown LAF side", line_no);
        }
        const auto token = model.vocab(side).find(fields[1]);
        if (!token) malformed("LAF entry for an unknown word", line_no);
        model.laf.set(side, *token,
                      LafEntry{parse_real(fields[2], line_no),
                               parse_uint(fields[3], line_no)});
        break;
      }
    }
  }
  if (line_no == 0) malformed("missing #BLOCKMT header", 1);
  for (const auto& [key, seen] : required) {
    if (!seen) throw Error(ErrorCode::kMalformedModel, "missing meta key " + key);
  }
  if (sections_seen != 4) {
    throw Error(ErrorCode::kMalformedModel, "missing sections");
  }
  if (!s_totals_seen || !t_totals_seen) {
    throw Error(ErrorCode::kMalformedModel, "missing length totals");
  }
  model.source_dict.set_length_totals(std::move(s_totals));
  model.target_dict.set_length_totals(std::move(t_totals));
  model.rebuild_index();
  return model;
}

void save_model(const Model& model, std::ostream& out) {
  const std::string text = serialize_model(model);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::kIo, "failed to write model");
}

Model load_model(std::istream& in) {
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::kIo, "failed to read model");
  return parse_model(text);
}

void save_model_file(const Model& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot open '" + path + "' for writing");
  save_model(model, out);
  out.close();
  if (!out) throw Error(ErrorCode::kIo, "failed to write '" + path + "'");
}

Model load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  return load_model(in);
}

}  // namespace blockmt
