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

#include "blockmt/corpus.h"

#include <algorithm>
#include <string>

#include "blockmt/error.h"

namespace blockmt {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedLine: return "malformed-line";
    case ErrorCode::kEmptySentence: return "empty-sentence";
    case ErrorCode::kEncoding: return "encoding";
    case ErrorCode::kDomain: return "domain";
    case ErrorCode::kEmptyModel: return "empty-model";
    case ErrorCode::kUndefinedConditional: return "undefined-conditional";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kChecksum: return "checksum";
    case ErrorCode::kUnsupportedVersion: return "unsupported-version";
    case ErrorCode::kUnsupportedSection: return "unsupported-section";
    case ErrorCode::kMalformedModel: return "malformed-model";
    case ErrorCode::kOracleBound: return "oracle-bound";
    case ErrorCode::kEmptyInput: return "empty-input";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

namespace {

std::string with_line(const std::string& message,
                      std::optional<std::size_t> line) {
  if (!line) return message;
  return "line " + std::to_string(*line) + ": " + message;
}

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' ||
         c == '\v';
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message,
             std::optional<std::size_t> line)
    : std::runtime_error(with_line(message, line)), code_(code), line_(line) {}

const char* side_name(Side side) {
  return side == Side::kSource ? "source" : "target";
}

Vocabulary::Vocabulary(Side side) : side_(side) {
  intern(kEmptySurface);
  intern(kOovSurface);
}

TokenId Vocabulary::intern(std::string_view surface) {
  if (auto it = ids_.find(surface); it != ids_.end()) return it->second;
  const auto id = static_cast<TokenId>(entries_.size());
  entries_.emplace_back(surface);
  ids_.emplace(entries_.back(), id);
  return id;
}

std::optional<TokenId> Vocabulary::find(std::string_view surface) const {
  if (auto it = ids_.find(surface); it != ids_.end()) return it->second;
  return std::nullopt;
}

const std::string& Vocabulary::surface(TokenId id) const {
  return entries_.at(id);
}

std::vector<std::string_view> split_whitespace(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    if (j > i) out.push_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string ascii_lowercase(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(), [](char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
  });
  return out;
}

bool is_valid_utf8(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    std::size_t extra = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      extra = 1;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      extra = 2;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      extra = 3;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + extra >= text.size()) return false;
    for (std::size_t k = 1; k <= extra; ++k) {
      const auto cc = static_cast<unsigned char>(text[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // Overlong forms, surrogates and out-of-range code points.
    if ((extra == 1 && cp < 0x80) || (extra == 2 && cp < 0x800) ||
        (extra == 3 && cp < 0x10000) || cp > 0x10FFFF ||
        (cp >= 0xD800 && cp <= 0xDFFF)) {
      return false;
    }
    i += extra + 1;
  }
  return true;
}

namespace {

TokenSeq parse_side(std::string_view text, Vocabulary& vocab, bool lowercase,
                    std::size_t line_no) {
  TokenSeq ids;
  for (std::string_view token : split_whitespace(text)) {
    std::string surface = lowercase ? ascii_lowercase(token)
                                    : std::string(token);
    if (surface == kEmptySurface || surface == kOovSurface) {
      throw Error(ErrorCode::kMalformedLine,
                  "reserved token '" + surface + "' in corpus text", line_no);
    }
    ids.push_back(vocab.intern(surface));
  }
  if (ids.empty()) {
    throw Error(ErrorCode::kEmptySentence,
                std::string("empty ") + side_name(vocab.side()) + " sentence",
                line_no);
  }
  return ids;
}

}  // namespace

ParsedCorpus parse_corpus(std::istream& in, const ParseOptions& options) {
  ParsedCorpus corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (options.max_pairs && corpus.pairs.size() >= *options.max_pairs) break;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (split_whitespace(line).empty()) continue;
    if (!is_valid_utf8(line)) {
      throw Error(ErrorCode::kEncoding, "invalid UTF-8", line_no);
    }
    const auto tabs = std::count(line.begin(), line.end(), '\t');
    if (tabs != 1) {
      throw Error(ErrorCode::kMalformedLine,
                  "expected exactly one tab, found " + std::to_string(tabs),
                  line_no);
    }
    const auto tab = line.find('\t');
    const std::string_view view(line);
    SentencePair pair;
    pair.index = corpus.pairs.size();
    pair.source = parse_side(view.substr(0, tab), corpus.source_vocab,
                             options.lowercase, line_no);
    pair.target = parse_side(view.substr(tab + 1), corpus.target_vocab,
                             options.lowercase, line_no);
    corpus.pairs.push_back(std::move(pair));
  }
  if (in.bad()) throw Error(ErrorCode::kIo, "read error on corpus stream");
  return corpus;
}

TokenizedSentence tokenize_frozen(std::string_view raw,
                                  const Vocabulary& vocab, bool lowercase) {
  TokenizedSentence out;
  for (std::string_view token : split_whitespace(raw)) {
    std::string surface = lowercase ? ascii_lowercase(token)
                                    : std::string(token);
    const auto id = vocab.find(surface);
    // Reserved surfaces typed by a user are treated as unknown words.
    out.ids.push_back(id && *id > kOovId ? *id : kOovId);
    out.surfaces.push_back(std::move(surface));
  }
  return out;
}

TokenizedSentence tokenize_sentence(std::string_view raw, Vocabulary& vocab,
                                    bool frozen, bool lowercase) {
  if (frozen) return tokenize_frozen(raw, vocab, lowercase);
  TokenizedSentence out;
  for (std::string_view token : split_whitespace(raw)) {
    std::string surface = lowercase ? ascii_lowercase(token)
                                    : std::string(token);
    out.ids.push_back(vocab.intern(surface));
    out.surfaces.push_back(std::move(surface));
  }
  return out;
}

std::string render_tokens(std::span<const TokenId> tokens,
                          const Vocabulary& vocab) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out += ' ';
    out += vocab.surface(tokens[i]);
  }
  return out;
}

std::string render_pair(const SentencePair& pair, const Vocabulary& source,
                        const Vocabulary& target) {
  return render_tokens(pair.source, source) + '\t' +
         render_tokens(pair.target, target);
}

}  // namespace blockmt
