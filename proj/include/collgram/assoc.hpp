#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "collgram/refindex.hpp"
#include "collgram/tokenizer.hpp"

namespace collgram {

inline constexpr double kHighMiThreshold = 5.0;
inline constexpr double kHighTThreshold = 6.0;

struct AssociationScores {
  std::uint64_t observed = 0;  // O, reference bigram count
  std::uint64_t f1 = 0;
  std::uint64_t f2 = 0;
  std::uint64_t n = 0;
  double expected = 0.0;  // f1 * f2 / N
  double mi = 0.0;        // log2(O / E), bits
  double t = 0.0;         // (O - E) / sqrt(O)
};

// Throws Error("inconsistent frequencies") unless
// 0 < O <= min(f1, f2) and f1, f2 <= N.
AssociationScores score_bigram(std::uint64_t observed, std::uint64_t f1, std::uint64_t f2, std::uint64_t n);

inline bool is_highly_collocational_mi(const AssociationScores& s) { return s.mi >= kHighMiThreshold; }
inline bool is_highly_collocational_t(const AssociationScores& s) { return s.t >= kHighTThreshold; }

// occurrences counts every bigram token; types counts each distinct
// (w1, w2) once per document, for all four counts of the profile.
enum class CountingMode { occurrences, types };

struct DocumentProfile {
  std::string doc_id;
  std::uint64_t bigrams_total = 0;
  std::uint64_t bigrams_scored = 0;
  std::uint64_t high_mi = 0;
  std::uint64_t high_t = 0;
  std::optional<double> pct_high_mi;
  std::optional<double> pct_high_t;
  std::optional<double> ratio;  // pct_high_t / pct_high_mi

  // Set when no bigram of the document was found in the reference index.
  bool no_scored_bigrams() const { return bigrams_scored == 0; }
};

// Throws Error("tokenizer mismatch ...") when the document was tokenized
// with a config whose fingerprint differs from the index's.
DocumentProfile profile_document(const TokenizedDocument& doc, const FrequencyIndex& index,
                                 CountingMode mode = CountingMode::occurrences);

// Fills the percentage and ratio fields from the four counts.
void compute_indices(DocumentProfile& profile);

// CSV header: doc_id,bigrams_total,bigrams_scored,high_mi,high_t,
// pct_high_mi,pct_high_t,ratio. Absent values are empty fields.
void write_profiles_csv(std::ostream& out, std::span<const DocumentProfile> profiles);
std::vector<DocumentProfile> read_profiles_csv(const std::filesystem::path& path);
std::vector<DocumentProfile> parse_profiles_csv(std::string_view content, std::string_view source_name);

}  // namespace collgram
