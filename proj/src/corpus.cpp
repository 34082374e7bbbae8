#include "collgram/corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "collgram/error.hpp"
#include "collgram/format.hpp"

namespace collgram {

namespace fs = std::filesystem;

namespace {

bool starts_with_markup(std::string_view line) {
  return line.starts_with("<CHAPTER") || line.starts_with("<SPEAKER") || line.starts_with("<P");
}

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string make_id(std::string_view stem, std::size_t ordinal) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%04zu", ordinal);
  return std::string(stem) + buf;
}

}  // namespace

std::size_t count_chars(std::string_view utf8) {
  // Every scalar value has exactly one byte that is not a continuation byte.
  return static_cast<std::size_t>(
      std::count_if(utf8.begin(), utf8.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

std::vector<RawDocument> parse_europarl(std::string_view content, std::string_view source_name) {
  const std::string stem = fs::path(source_name).stem().string();
  std::vector<RawDocument> docs;
  std::string current;

  auto flush = [&] {
    const std::string_view text = trim(current);
    if (!text.empty()) {
      RawDocument d;
      d.doc_id = make_id(stem, docs.size() + 1);
      d.text = std::string(text);
      d.char_count = count_chars(d.text);
      d.source_file = std::string(source_name);
      docs.push_back(std::move(d));
    }
    current.clear();
  };

  for (std::string_view line : split_lines(content)) {
    if (starts_with_markup(line)) {
      if (line.starts_with("<SPEAKER")) flush();
      continue;
    }
    if (is_blank(line)) continue;
    if (!current.empty()) current += '\n';
    current += line;
  }
  flush();
  return docs;
}

std::vector<RawDocument> read_europarl_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error("input directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<RawDocument> docs;
  for (const auto& f : files) {
    auto parsed = parse_europarl(read_text_file(f.string()), f.filename().string());
    std::move(parsed.begin(), parsed.end(), std::back_inserter(docs));
  }
  return docs;
}

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t SplitMix64::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("SplitMix64::below requires a positive bound");
  const std::uint64_t threshold = (0 - bound) % bound;
  while (true) {
    const std::uint64_t r = next();
    if (r >= threshold) return r % bound;
  }
}

std::vector<RawDocument> sample_documents(std::span<const RawDocument> docs, const SamplingSpec& spec) {
  if (spec.min_chars > spec.max_chars) throw Error("min_chars exceeds max_chars");
  if (spec.sample_size == 0) throw Error("sample size must be at least 1");

  std::vector<const RawDocument*> eligible;
  for (const auto& d : docs) {
    if (d.char_count >= spec.min_chars && d.char_count <= spec.max_chars) eligible.push_back(&d);
  }
  std::sort(eligible.begin(), eligible.end(), [](const auto* a, const auto* b) { return a->doc_id < b->doc_id; });
  for (std::size_t i = 1; i < eligible.size(); ++i) {
    if (eligible[i]->doc_id == eligible[i - 1]->doc_id) throw Error("duplicate doc_id " + eligible[i]->doc_id);
  }
  if (eligible.size() < spec.sample_size) {
    throw Error("insufficient eligible documents: " + std::to_string(eligible.size()) + " of " +
                std::to_string(docs.size()) + " within [" + std::to_string(spec.min_chars) + ", " +
                std::to_string(spec.max_chars) + "] characters, " + std::to_string(spec.sample_size) + " requested");
  }

  SplitMix64 rng(spec.seed);
  const std::size_t n = eligible.size();
  for (std::size_t i = 0; i < spec.sample_size; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(eligible[i], eligible[j]);
  }
  std::vector<RawDocument> out;
  out.reserve(spec.sample_size);
  for (std::size_t i = 0; i < spec.sample_size; ++i) out.push_back(*eligible[i]);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.doc_id < b.doc_id; });
  return out;
}

std::map<std::string, std::vector<RawDocument>> pair_documents(const DocumentSet& source,
                                                              std::span<const DocumentSet> targets) {
  std::map<std::string, std::vector<RawDocument>> aligned;
  for (const auto& d : source.docs) {
    if (!aligned.emplace(d.doc_id, std::vector<RawDocument>{d}).second) {
      throw Error("duplicate doc_id " + d.doc_id + " in " + source.label);
    }
  }
  std::ostringstream missing;
  for (const auto& target : targets) {
    std::map<std::string, const RawDocument*> by_id;
    for (const auto& d : target.docs) by_id.emplace(d.doc_id, &d);
    std::vector<std::string> absent;
    for (auto& [id, row] : aligned) {
      auto it = by_id.find(id);
      if (it == by_id.end()) {
        absent.push_back(id);
      } else {
        row.push_back(*it->second);
      }
    }
    if (!absent.empty()) {
      missing << "\n  " << target.label << " is missing:";
      for (const auto& id : absent) missing << ' ' << id;
    }
  }
  if (!missing.str().empty()) throw Error("cannot pair documents:" + missing.str());
  return aligned;
}

DocumentSet read_document_dir(const fs::path& dir, std::string label) {
  if (!fs::is_directory(dir)) throw Error("document directory not found: " + dir.string());
  DocumentSet set{std::move(label), {}};
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
    RawDocument d;
    d.doc_id = entry.path().stem().string();
    d.text = read_text_file(entry.path().string());
    if (d.text.ends_with('\n')) d.text.pop_back();
    d.char_count = count_chars(d.text);
    d.source_file = entry.path().filename().string();
    set.docs.push_back(std::move(d));
  }
  std::sort(set.docs.begin(), set.docs.end(), [](const auto& a, const auto& b) { return a.doc_id < b.doc_id; });
  return set;
}

void write_documents(const fs::path& dir, std::span<const RawDocument> docs) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());
  std::vector<const RawDocument*> sorted;
  for (const auto& d : docs) sorted.push_back(&d);
  std::sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) { return a->doc_id < b->doc_id; });

  for (const auto* d : sorted) {
    std::ofstream out(dir / (d->doc_id + ".txt"), std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + (dir / (d->doc_id + ".txt")).string());
    out << d->text << '\n';
  }
  std::ofstream manifest(dir / "manifest.csv", std::ios::binary | std::ios::trunc);
  if (!manifest) throw Error("cannot write " + (dir / "manifest.csv").string());
  manifest << "doc_id,char_count,source_file\n";
  for (const auto* d : sorted) manifest << d->doc_id << ',' << d->char_count << ',' << d->source_file << '\n';
}

}  // namespace collgram
