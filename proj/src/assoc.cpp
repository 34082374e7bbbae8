#include "collgram/assoc.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <set>
#include <utility>

#include "collgram/error.hpp"
#include "collgram/format.hpp"

namespace collgram {

AssociationScores score_bigram(std::uint64_t observed, std::uint64_t f1, std::uint64_t f2, std::uint64_t n) {
  if (observed == 0 || f1 == 0 || f2 == 0 || n == 0 || observed > std::min(f1, f2) || f1 > n || f2 > n) {
    throw Error("inconsistent frequencies: O=" + std::to_string(observed) + " f1=" + std::to_string(f1) +
                " f2=" + std::to_string(f2) + " N=" + std::to_string(n));
  }
  AssociationScores s{observed, f1, f2, n, 0.0, 0.0, 0.0};
  const auto on = static_cast<unsigned __int128>(observed) * n;
  const auto ff = static_cast<unsigned __int128>(f1) * f2;
  const long double expected = static_cast<long double>(f1) * static_cast<long double>(f2) / n;
  s.expected = static_cast<double>(expected);
  if (on == ff) return s;  // independence: mi = t = 0 exactly
  s.mi = static_cast<double>(std::log2(static_cast<long double>(on) / static_cast<long double>(ff)));
  s.t = static_cast<double>((observed - expected) / std::sqrt(static_cast<long double>(observed)));
  return s;
}

void compute_indices(DocumentProfile& p) {
  p.pct_high_mi.reset();
  p.pct_high_t.reset();
  p.ratio.reset();
  if (p.bigrams_scored == 0) return;
  const auto scored = static_cast<double>(p.bigrams_scored);
  p.pct_high_mi = 100.0 * static_cast<double>(p.high_mi) / scored;
  p.pct_high_t = 100.0 * static_cast<double>(p.high_t) / scored;
  if (*p.pct_high_mi > 0.0) p.ratio = *p.pct_high_t / *p.pct_high_mi;
}

DocumentProfile profile_document(const TokenizedDocument& doc, const FrequencyIndex& index, CountingMode mode) {
  if (doc.tokenizer_fingerprint != index.tokenizer_fingerprint()) {
    throw Error("tokenizer mismatch: document '" + doc.doc_id + "' was tokenized with fingerprint " +
                doc.tokenizer_fingerprint + " but the index uses " + index.tokenizer_fingerprint());
  }
  DocumentProfile p;
  p.doc_id = doc.doc_id;

  std::vector<BigramOccurrence> bigrams = extract_bigrams(doc);
  if (mode == CountingMode::types) {
    std::set<std::pair<std::string, std::string>> seen;
    std::erase_if(bigrams, [&seen](const BigramOccurrence& b) { return !seen.emplace(b.w1, b.w2).second; });
  }

  p.bigrams_total = bigrams.size();
  for (const auto& b : bigrams) {
    const auto o = index.lookup_bigram(b.w1, b.w2);
    if (!o) continue;
    const auto s = score_bigram(*o, *index.lookup_unigram(b.w1), *index.lookup_unigram(b.w2), index.total_tokens());
    ++p.bigrams_scored;
    if (is_highly_collocational_mi(s)) ++p.high_mi;
    if (is_highly_collocational_t(s)) ++p.high_t;
  }
  compute_indices(p);
  return p;
}

namespace {
constexpr std::string_view kProfileHeader = "doc_id,bigrams_total,bigrams_scored,high_mi,high_t,pct_high_mi,pct_high_t,ratio";

std::uint64_t parse_uint(std::string_view s, const std::string& where) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) throw Error(where + ": bad integer '" + std::string(s) + "'");
  return v;
}

std::optional<double> parse_optional_double(std::string_view s, const std::string& where) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw Error(where + ": bad number '" + std::string(s) + "'");
  }
  return v;
}
}  // namespace

void write_profiles_csv(std::ostream& out, std::span<const DocumentProfile> profiles) {
  out << kProfileHeader << '\n';
  for (const auto& p : profiles) {
    out << p.doc_id << ',' << p.bigrams_total << ',' << p.bigrams_scored << ',' << p.high_mi << ',' << p.high_t << ','
        << format_fixed6(p.pct_high_mi) << ',' << format_fixed6(p.pct_high_t) << ',' << format_fixed6(p.ratio) << '\n';
  }
}

std::vector<DocumentProfile> parse_profiles_csv(std::string_view content, std::string_view source_name) {
  const auto lines = split_lines(content);
  const std::string src(source_name);
  if (lines.empty() || lines[0] != kProfileHeader) throw Error(src + ":1: unexpected profile header");
  std::vector<DocumentProfile> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::string where = src + ":" + std::to_string(i + 1);
    const auto f = split_csv(lines[i]);
    if (f.size() != 8 || f[0].empty()) throw Error(where + ": expected 8 fields");
    DocumentProfile p;
    p.doc_id = std::string(f[0]);
    p.bigrams_total = parse_uint(f[1], where);
    p.bigrams_scored = parse_uint(f[2], where);
    p.high_mi = parse_uint(f[3], where);
    p.high_t = parse_uint(f[4], where);
    p.pct_high_mi = parse_optional_double(f[5], where);
    p.pct_high_t = parse_optional_double(f[6], where);
    p.ratio = parse_optional_double(f[7], where);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<DocumentProfile> read_profiles_csv(const std::filesystem::path& path) {
  return parse_profiles_csv(read_text_file(path.string()), path.string());
}

}  // namespace collgram
