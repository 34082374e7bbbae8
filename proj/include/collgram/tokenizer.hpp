#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace collgram {

enum class ProperNounMode { heuristic, tag_file, off };

std::string_view to_string(ProperNounMode mode);
// Throws Error on an unknown name.
ProperNounMode parse_proper_noun_mode(std::string_view name);

struct TokenizerConfig {
  bool case_fold = true;
  bool keep_internal_apostrophes = true;
  ProperNounMode proper_noun_mode = ProperNounMode::heuristic;

  // Hex digest of the settings that affect token boundaries and lookup
  // forms. proper_noun_mode is excluded: reference indexes are always
  // built with detection off while profiled documents use it.
  std::string fingerprint() const;
};

struct Token {
  std::string surface;
  std::string folded;
  std::size_t sentence_index = 0;
  bool is_word = false;
  bool is_proper_noun = false;
};

struct TokenizedDocument {
  std::string doc_id;
  std::vector<Token> tokens;
  std::size_t sentence_count = 0;
  std::string tokenizer_fingerprint;  // of the config that produced tokens
};

struct BigramOccurrence {
  std::string w1;
  std::string w2;
  std::size_t position = 0;  // token index of w1

  friend bool operator==(const BigramOccurrence&, const BigramOccurrence&) = default;
};

// Splits text into word and punctuation tokens and assigns sentence
// indices. Word tokens are maximal runs of letters and digits (plus
// apostrophes flanked by letters when the config keeps them); every other
// non-space code point is a one-character punctuation token. A run without
// any letter (a number) is kept as a token with is_word = false.
//
// A sentence ends after '.', '!' or '?' when whitespace follows and the
// next token starts with an uppercase letter or a digit, and at blank-line
// paragraph breaks.
TokenizedDocument tokenize(std::string_view text, const TokenizerConfig& config,
                           std::string doc_id = {});

// Sets is_proper_noun on every token according to mode. In tag_file mode
// tag_file must name a file with one "0"/"1" line per token; a count
// mismatch throws Error naming the document and both counts.
TokenizedDocument detect_proper_nouns(TokenizedDocument doc, ProperNounMode mode,
                                      const std::optional<std::filesystem::path>& tag_file = {});

// Same as the tag_file mode of detect_proper_nouns, with tags already read.
TokenizedDocument apply_proper_noun_tags(TokenizedDocument doc, std::string_view tag_text,
                                         std::string_view source_name = "<tags>");

// Adjacent word pairs inside one sentence, excluding proper nouns. Any
// intervening punctuation or number token breaks adjacency.
std::vector<BigramOccurrence> extract_bigrams(const TokenizedDocument& doc);

// Convenience for callers holding raw text: tokenize, run proper-noun
// detection per config (tag_file only in tag_file mode) and return it.
TokenizedDocument prepare_document(std::string_view text, const TokenizerConfig& config,
                                   std::string doc_id,
                                   const std::optional<std::filesystem::path>& tag_file = {});

}  // namespace collgram
