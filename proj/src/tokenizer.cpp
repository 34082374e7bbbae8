#include "collgram/tokenizer.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include <unicode/locid.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "collgram/digest.hpp"
#include "collgram/error.hpp"

namespace collgram {
namespace {

constexpr UChar32 kApostrophe = 0x27;
constexpr UChar32 kRightSingleQuote = 0x2019;

struct CodePoint {
  UChar32 value;
  std::size_t begin;
  std::size_t end;
};

// Invalid sequences decode to U+FFFD, which then tokenizes as punctuation.
std::vector<CodePoint> decode(std::string_view text) {
  std::vector<CodePoint> out;
  out.reserve(text.size());
  const auto* s = reinterpret_cast<const uint8_t*>(text.data());
  const auto length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    const int32_t begin = i;
    UChar32 c;
    U8_NEXT(s, i, length, c);
    if (c < 0) c = 0xFFFD;
    out.push_back({c, static_cast<std::size_t>(begin), static_cast<std::size_t>(i)});
  }
  return out;
}

bool is_letter(UChar32 c) { return u_isalpha(c); }
bool is_digit(UChar32 c) { return u_isdigit(c); }
bool is_mark(UChar32 c) { return (U_GET_GC_MASK(c) & U_GC_M_MASK) != 0; }
bool is_apostrophe(UChar32 c) { return c == kApostrophe || c == kRightSingleQuote; }
bool is_space(UChar32 c) { return u_isUWhiteSpace(c); }

bool is_upper_initial(std::string_view s) {
  if (s.empty()) return false;
  const auto* p = reinterpret_cast<const uint8_t*>(s.data());
  int32_t i = 0;
  UChar32 c;
  U8_NEXT(p, i, static_cast<int32_t>(s.size()), c);
  return c >= 0 && (u_isupper(c) || u_istitle(c));
}

bool is_digit_initial(std::string_view s) {
  if (s.empty()) return false;
  const auto* p = reinterpret_cast<const uint8_t*>(s.data());
  int32_t i = 0;
  UChar32 c;
  U8_NEXT(p, i, static_cast<int32_t>(s.size()), c);
  return c >= 0 && u_isdigit(c);
}

std::string fold(std::string_view surface) {
  bool ascii = true;
  for (unsigned char ch : surface) {
    if (ch >= 0x80) {
      ascii = false;
      break;
    }
  }
  if (ascii) {
    std::string out(surface);
    for (char& ch : out) {
      if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
    }
    return out;
  }
  std::string out;
  icu::UnicodeString::fromUTF8(icu::StringPiece(surface.data(), static_cast<int32_t>(surface.size())))
      .toLower(icu::Locale::getRoot())
      .toUTF8String(out);
  return out;
}

bool is_sentence_terminal(const Token& t) {
  return t.surface == "." || t.surface == "!" || t.surface == "?";
}

}  // namespace

std::string_view to_string(ProperNounMode mode) {
  switch (mode) {
    case ProperNounMode::heuristic: return "heuristic";
    case ProperNounMode::tag_file: return "tag_file";
    case ProperNounMode::off: return "off";
  }
  return "off";
}

ProperNounMode parse_proper_noun_mode(std::string_view name) {
  if (name == "heuristic") return ProperNounMode::heuristic;
  if (name == "tag_file" || name == "tag-file") return ProperNounMode::tag_file;
  if (name == "off") return ProperNounMode::off;
  throw Error("unknown proper-noun mode '" + std::string(name) + "' (expected heuristic, tag_file or off)");
}

std::string TokenizerConfig::fingerprint() const {
  std::string canonical = "collgram-tokenizer/1";
  canonical += ";case_fold=";
  canonical += case_fold ? '1' : '0';
  canonical += ";keep_internal_apostrophes=";
  canonical += keep_internal_apostrophes ? '1' : '0';
  return sha256_hex(canonical).substr(0, 16);
}

TokenizedDocument tokenize(std::string_view text, const TokenizerConfig& config, std::string doc_id) {
  TokenizedDocument doc;
  doc.doc_id = std::move(doc_id);
  doc.tokenizer_fingerprint = config.fingerprint();
  const std::vector<CodePoint> cps = decode(text);

  std::size_t sentence = 0;
  bool space_before = false;
  int newlines = 0;  // newlines in the current whitespace gap

  auto emit = [&](std::size_t begin, std::size_t end, bool is_word) {
    Token tok;
    tok.surface.assign(text.substr(begin, end - begin));
    if (!doc.tokens.empty()) {
      const Token& prev = doc.tokens.back();
      bool split = newlines >= 2;
      if (!split && space_before && is_sentence_terminal(prev)) {
        split = is_upper_initial(tok.surface) || is_digit_initial(tok.surface);
      }
      if (split) ++sentence;
    }
    tok.folded = config.case_fold ? fold(tok.surface) : tok.surface;
    tok.sentence_index = sentence;
    tok.is_word = is_word;
    doc.tokens.push_back(std::move(tok));
    space_before = false;
    newlines = 0;
  };

  std::size_t i = 0;
  while (i < cps.size()) {
    const UChar32 c = cps[i].value;
    if (is_space(c)) {
      space_before = true;
      if (c == '\n') ++newlines;
      ++i;
      continue;
    }
    if (is_letter(c) || is_digit(c)) {
      const std::size_t start = i;
      bool has_letter = false;
      while (i < cps.size()) {
        const UChar32 d = cps[i].value;
        if (is_letter(d)) {
          has_letter = true;
        } else if (is_digit(d) || is_mark(d)) {
        } else if (config.keep_internal_apostrophes && is_apostrophe(d) && i > start &&
                   (is_letter(cps[i - 1].value) || is_mark(cps[i - 1].value)) && i + 1 < cps.size() && is_letter(cps[i + 1].value)) {
        } else {
          break;
        }
        ++i;
      }
      emit(cps[start].begin, cps[i - 1].end, has_letter);
      continue;
    }
    emit(cps[i].begin, cps[i].end, false);
    ++i;
  }

  doc.sentence_count = doc.tokens.empty() ? 0 : sentence + 1;
  return doc;
}

TokenizedDocument detect_proper_nouns(TokenizedDocument doc, ProperNounMode mode,
                                      const std::optional<std::filesystem::path>& tag_file) {
  for (Token& t : doc.tokens) t.is_proper_noun = false;

  switch (mode) {
    case ProperNounMode::off:
      return doc;
    case ProperNounMode::tag_file: {
      if (!tag_file) throw Error("document '" + doc.doc_id + "': tag_file mode requires a tag file");
      std::ifstream in(*tag_file, std::ios::binary);
      if (!in) throw Error("cannot open tag file " + tag_file->string());
      std::ostringstream buf;
      buf << in.rdbuf();
      return apply_proper_noun_tags(std::move(doc), buf.str(), tag_file->string());
    }
    case ProperNounMode::heuristic:
      break;
  }

  // Index of the first word token of each sentence.
  std::vector<bool> initial(doc.tokens.size(), false);
  {
    std::size_t current = static_cast<std::size_t>(-1);
    for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
      const Token& t = doc.tokens[i];
      if (!t.is_word) continue;
      if (t.sentence_index != current) {
        current = t.sentence_index;
        initial[i] = true;
      }
    }
  }

  std::unordered_set<std::string> capitalised_inside;
  for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
    const Token& t = doc.tokens[i];
    if (t.is_word && !initial[i] && is_upper_initial(t.surface)) capitalised_inside.insert(t.surface);
  }

  for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
    Token& t = doc.tokens[i];
    if (!t.is_word || !is_upper_initial(t.surface)) continue;
    t.is_proper_noun = !initial[i] || capitalised_inside.contains(t.surface);
  }
  return doc;
}

TokenizedDocument apply_proper_noun_tags(TokenizedDocument doc, std::string_view tag_text,
                                         std::string_view source_name) {
  std::vector<bool> tags;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < tag_text.size()) {
    std::size_t nl = tag_text.find('\n', pos);
    if (nl == std::string_view::npos) nl = tag_text.size();
    std::string_view line = tag_text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line == "1") {
      tags.push_back(true);
    } else if (line == "0") {
      tags.push_back(false);
    } else {
      throw Error(std::string(source_name) + ":" + std::to_string(line_no) +
                  ": expected \"0\" or \"1\", got \"" + std::string(line) + "\"");
    }
  }
  if (tags.size() != doc.tokens.size()) {
    throw Error("tag file " + std::string(source_name) + " does not match document '" + doc.doc_id +
                "': " + std::to_string(doc.tokens.size()) + " tokens but " + std::to_string(tags.size()) +
                " tags");
  }
  for (std::size_t i = 0; i < tags.size(); ++i) {
    doc.tokens[i].is_proper_noun = tags[i] && doc.tokens[i].is_word;
  }
  return doc;
}

std::vector<BigramOccurrence> extract_bigrams(const TokenizedDocument& doc) {
  std::vector<BigramOccurrence> out;
  const auto& toks = doc.tokens;
  for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
    const Token& a = toks[i];
    const Token& b = toks[i + 1];
    if (!a.is_word || !b.is_word || a.is_proper_noun || b.is_proper_noun) continue;
    if (a.sentence_index != b.sentence_index) continue;
    out.push_back({a.folded, b.folded, i});
  }
  return out;
}

TokenizedDocument prepare_document(std::string_view text, const TokenizerConfig& config, std::string doc_id,
                                   const std::optional<std::filesystem::path>& tag_file) {
  return detect_proper_nouns(tokenize(text, config, std::move(doc_id)), config.proper_noun_mode,
                             config.proper_noun_mode == ProperNounMode::tag_file ? tag_file : std::nullopt);
}

}  // namespace collgram
