#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace collgram {

struct RawDocument {
  std::string doc_id;       // <source stem>_<ordinal>, ordinal from 0001
  std::string text;         // markup stripped
  std::size_t char_count = 0;  // Unicode scalar values in text
  std::string source_file;
};

std::size_t count_chars(std::string_view utf8);

// Europarl layout: lines starting with <CHAPTER, <SPEAKER or <P are markup
// and a <SPEAKER line opens a new document. Text lines of a turn are joined
// with single newlines (blank lines dropped) and the result trimmed. Turns
// with no text produce nothing. Without any SPEAKER line the whole file is
// one document.
std::vector<RawDocument> parse_europarl(std::string_view content, std::string_view source_name);

// Parses every regular file of dir in file-name order.
std::vector<RawDocument> read_europarl_dir(const std::filesystem::path& dir);

// SplitMix64 (Steele, Lea & Flood 2014): the n-th output (n from 1) is
// mix(seed + n * 0x9e3779b97f4a7c15), so any implementation reproduces the
// stream from the seed alone.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  // Uniform in [0, bound) by rejection: draws below 2^64 mod bound are
  // discarded, the remaining ones reduced modulo bound.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::uint64_t state_;
};

struct SamplingSpec {
  std::size_t min_chars = 3500;
  std::size_t max_chars = 4500;
  std::size_t sample_size = 200;
  std::uint64_t seed = 0;
};

// Eligible documents (min_chars <= char_count <= max_chars) are sorted by
// doc_id; a partial Fisher-Yates shuffle driven by SplitMix64(seed) swaps
// position i with i + below(n - i) for i < sample_size; the first
// sample_size documents are returned sorted by doc_id.
std::vector<RawDocument> sample_documents(std::span<const RawDocument> docs, const SamplingSpec& spec);

struct DocumentSet {
  std::string label;
  std::vector<RawDocument> docs;
};

// doc_id -> [source document, target documents in argument order].
// Throws Error listing, per target set, the source ids it lacks.
std::map<std::string, std::vector<RawDocument>> pair_documents(const DocumentSet& source,
                                                              std::span<const DocumentSet> targets);

// Reads <doc_id>.txt files of dir.
DocumentSet read_document_dir(const std::filesystem::path& dir, std::string label);

// Writes <doc_id>.txt per document plus manifest.csv
// (doc_id,char_count,source_file), rows sorted by doc_id.
void write_documents(const std::filesystem::path& dir, std::span<const RawDocument> docs);

}  // namespace collgram
