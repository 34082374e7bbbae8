#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "collgram/tokenizer.hpp"

namespace collgram {

struct UnigramEntry {
  std::string word;
  std::uint64_t count;
  friend bool operator==(const UnigramEntry&, const UnigramEntry&) = default;
};

struct BigramEntry {
  std::string w1;
  std::string w2;
  std::uint64_t count;
  friend bool operator==(const BigramEntry&, const BigramEntry&) = default;
};

// Interned vocabulary with unigram and bigram counts. Words are stored once
// and bigrams keyed by a packed pair of word ids.
class CountTable {
 public:
  CountTable() = default;
  CountTable(const CountTable&) = delete;
  CountTable& operator=(const CountTable&) = delete;
  CountTable(CountTable&&) = default;
  CountTable& operator=(CountTable&&) = default;

  std::uint32_t intern(std::string_view word);
  std::optional<std::uint32_t> find(std::string_view word) const;

  void add_unigram(std::uint32_t id, std::uint64_t n) { unigrams_[id] += n; }
  void add_bigram(std::uint32_t a, std::uint32_t b, std::uint64_t n) { bigrams_[pack(a, b)] += n; }

  std::size_t vocabulary_size() const { return words_.size(); }
  std::size_t bigram_types() const { return bigrams_.size(); }
  const std::string& word(std::uint32_t id) const { return words_[id]; }
  std::uint64_t unigram(std::uint32_t id) const { return unigrams_[id]; }
  std::optional<std::uint64_t> bigram(std::uint32_t a, std::uint32_t b) const;

  // Adds every count of other into this table.
  void merge(const CountTable& other);
  // Drops bigrams below the floor; unigrams are untouched.
  void prune_bigrams(std::uint64_t min_count);

  std::vector<UnigramEntry> sorted_unigrams() const;
  std::vector<BigramEntry> sorted_bigrams() const;

 private:
  static std::uint64_t pack(std::uint32_t a, std::uint32_t b) {
    return (static_cast<std::uint64_t>(a) << 32) | b;
  }
  // Ids ordered by the byte order of their words.
  std::vector<std::uint32_t> ranks() const;

  std::deque<std::string> words_;  // stable addresses for the views in ids_
  std::unordered_map<std::string_view, std::uint32_t> ids_;
  std::vector<std::uint64_t> unigrams_;
  std::unordered_map<std::uint64_t, std::uint64_t> bigrams_;
};

// Reference-corpus frequencies: N, f(w), f(w1, w2). Immutable once built;
// concurrent read-only queries are safe.
class FrequencyIndex {
 public:
  std::uint64_t total_tokens() const { return total_tokens_; }
  std::uint64_t min_bigram_count() const { return min_bigram_count_; }
  const std::string& tokenizer_fingerprint() const { return fingerprint_; }

  std::optional<std::uint64_t> lookup_unigram(std::string_view w) const;
  std::optional<std::uint64_t> lookup_bigram(std::string_view w1, std::string_view w2) const;

  std::size_t vocabulary_size() const { return table_.vocabulary_size(); }
  std::size_t bigram_types() const { return table_.bigram_types(); }
  std::vector<UnigramEntry> sorted_unigrams() const { return table_.sorted_unigrams(); }
  std::vector<BigramEntry> sorted_bigrams() const { return table_.sorted_bigrams(); }

  // Observational equality: N, floor, fingerprint and every count.
  friend bool operator==(const FrequencyIndex& a, const FrequencyIndex& b);

 private:
  friend class IndexBuilder;
  friend FrequencyIndex load_index(const std::filesystem::path& dir);

  std::uint64_t total_tokens_ = 0;
  std::uint64_t min_bigram_count_ = 1;
  std::string fingerprint_;
  CountTable table_;
};

// Streams reference documents into counts. Builders over disjoint shards
// of a corpus can be merged in any order with identical results.
class IndexBuilder {
 public:
  explicit IndexBuilder(TokenizerConfig config, std::uint64_t min_bigram_count = 1);

  void add_document(std::string_view text);
  void merge(IndexBuilder&& other);
  std::uint64_t total_tokens() const { return total_tokens_; }

  // Throws Error("empty reference corpus") when no word token was seen.
  FrequencyIndex finish() &&;

 private:
  TokenizerConfig config_;
  std::uint64_t min_bigram_count_;
  std::uint64_t total_tokens_ = 0;
  CountTable table_;
};

// Counts with proper-noun detection off regardless of config. threads > 1
// shards the documents across worker builders.
FrequencyIndex build_index(std::span<const std::string> reference_docs, const TokenizerConfig& config,
                           std::uint64_t min_bigram_count = 1, unsigned threads = 1);

inline std::optional<std::uint64_t> lookup_bigram(const FrequencyIndex& index, std::string_view w1,
                                                  std::string_view w2) {
  return index.lookup_bigram(w1, w2);
}

// Writes meta.json, unigrams.tsv and bigrams.tsv into dir (created if
// missing). Output is sorted so identical indexes give identical bytes.
void save_index(const FrequencyIndex& index, const std::filesystem::path& dir);
FrequencyIndex load_index(const std::filesystem::path& dir);

}  // namespace collgram
