#include "collgram/refindex.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "collgram/error.hpp"

namespace collgram {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kFormat = "collgram-index";
constexpr int kVersion = 1;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::optional<std::uint64_t> parse_count(std::string_view s) {
  std::uint64_t v = 0;
  if (s.empty() || s.front() == '+' || s.front() == '-') return std::nullopt;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || v == 0) return std::nullopt;
  return v;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (true) {
    const std::size_t tab = line.find('\t', pos);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(pos));
      return fields;
    }
    fields.push_back(line.substr(pos, tab - pos));
    pos = tab + 1;
  }
}

// Calls fn(line, line_no) for each line; the file must end with LF.
template <typename Fn>
void for_each_line(const fs::path& path, const std::string& content, Fn&& fn) {
  if (!content.empty() && content.back() != '\n') {
    const auto lines = static_cast<std::size_t>(std::count(content.begin(), content.end(), '\n')) + 1;
    throw Error(path.string() + ":" + std::to_string(lines) + ": truncated line (missing newline)");
  }
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < content.size()) {
    const std::size_t nl = content.find('\n', pos);
    ++line_no;
    fn(std::string_view(content).substr(pos, nl - pos), line_no);
    pos = nl + 1;
  }
}

}  // namespace

std::uint32_t CountTable::intern(std::string_view word) {
  if (auto it = ids_.find(word); it != ids_.end()) return it->second;
  const auto id = static_cast<std::uint32_t>(words_.size());
  words_.emplace_back(word);
  ids_.emplace(words_.back(), id);
  unigrams_.push_back(0);
  return id;
}

std::optional<std::uint32_t> CountTable::find(std::string_view word) const {
  if (auto it = ids_.find(word); it != ids_.end()) return it->second;
  return std::nullopt;
}

std::optional<std::uint64_t> CountTable::bigram(std::uint32_t a, std::uint32_t b) const {
  if (auto it = bigrams_.find(pack(a, b)); it != bigrams_.end()) return it->second;
  return std::nullopt;
}

void CountTable::merge(const CountTable& other) {
  std::vector<std::uint32_t> remap(other.words_.size());
  for (std::uint32_t i = 0; i < other.words_.size(); ++i) {
    remap[i] = intern(other.words_[i]);
    unigrams_[remap[i]] += other.unigrams_[i];
  }
  for (const auto& [key, n] : other.bigrams_) {
    const auto a = static_cast<std::uint32_t>(key >> 32);
    const auto b = static_cast<std::uint32_t>(key & 0xFFFFFFFFu);
    add_bigram(remap[a], remap[b], n);
  }
}

void CountTable::prune_bigrams(std::uint64_t min_count) {
  if (min_count <= 1) return;
  std::erase_if(bigrams_, [min_count](const auto& kv) { return kv.second < min_count; });
}

std::vector<std::uint32_t> CountTable::ranks() const {
  std::vector<std::uint32_t> order(words_.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [this](std::uint32_t a, std::uint32_t b) { return words_[a] < words_[b]; });
  std::vector<std::uint32_t> rank(words_.size());
  for (std::uint32_t r = 0; r < order.size(); ++r) rank[order[r]] = r;
  return rank;
}

std::vector<UnigramEntry> CountTable::sorted_unigrams() const {
  std::vector<UnigramEntry> out;
  out.reserve(words_.size());
  for (std::uint32_t i = 0; i < words_.size(); ++i) out.push_back({words_[i], unigrams_[i]});
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.word < b.word; });
  return out;
}

std::vector<BigramEntry> CountTable::sorted_bigrams() const {
  const auto rank = ranks();
  std::vector<std::pair<std::uint64_t, std::uint64_t>> keyed;  // (ranked key, count)
  keyed.reserve(bigrams_.size());
  for (const auto& [key, n] : bigrams_) {
    const auto a = static_cast<std::uint32_t>(key >> 32);
    const auto b = static_cast<std::uint32_t>(key & 0xFFFFFFFFu);
    keyed.emplace_back(pack(rank[a], rank[b]), n);
  }
  std::sort(keyed.begin(), keyed.end());
  std::vector<std::uint32_t> by_rank(rank.size());
  for (std::uint32_t id = 0; id < rank.size(); ++id) by_rank[rank[id]] = id;
  std::vector<BigramEntry> out;
  out.reserve(keyed.size());
  for (const auto& [key, n] : keyed) {
    out.push_back({words_[by_rank[key >> 32]], words_[by_rank[key & 0xFFFFFFFFu]], n});
  }
  return out;
}

std::optional<std::uint64_t> FrequencyIndex::lookup_unigram(std::string_view w) const {
  if (auto id = table_.find(w)) return table_.unigram(*id);
  return std::nullopt;
}

std::optional<std::uint64_t> FrequencyIndex::lookup_bigram(std::string_view w1, std::string_view w2) const {
  const auto a = table_.find(w1);
  if (!a) return std::nullopt;
  const auto b = table_.find(w2);
  if (!b) return std::nullopt;
  return table_.bigram(*a, *b);
}

bool operator==(const FrequencyIndex& a, const FrequencyIndex& b) {
  return a.total_tokens_ == b.total_tokens_ && a.min_bigram_count_ == b.min_bigram_count_ &&
         a.fingerprint_ == b.fingerprint_ && a.table_.vocabulary_size() == b.table_.vocabulary_size() &&
         a.table_.bigram_types() == b.table_.bigram_types() &&
         a.sorted_unigrams() == b.sorted_unigrams() && a.sorted_bigrams() == b.sorted_bigrams();
}

IndexBuilder::IndexBuilder(TokenizerConfig config, std::uint64_t min_bigram_count)
    : config_(config), min_bigram_count_(min_bigram_count) {
  if (min_bigram_count_ == 0) throw Error("min_bigram_count must be positive");
  config_.proper_noun_mode = ProperNounMode::off;
}

void IndexBuilder::add_document(std::string_view text) {
  const TokenizedDocument doc = tokenize(text, config_);
  constexpr auto kNone = static_cast<std::uint32_t>(-1);
  std::uint32_t prev = kNone;
  std::size_t prev_sentence = 0;
  for (const Token& t : doc.tokens) {
    if (!t.is_word) {
      prev = kNone;
      continue;
    }
    const std::uint32_t id = table_.intern(t.folded);
    table_.add_unigram(id, 1);
    ++total_tokens_;
    if (prev != kNone && prev_sentence == t.sentence_index) table_.add_bigram(prev, id, 1);
    prev = id;
    prev_sentence = t.sentence_index;
  }
}

void IndexBuilder::merge(IndexBuilder&& other) {
  if (other.config_.fingerprint() != config_.fingerprint() || other.min_bigram_count_ != min_bigram_count_) {
    throw Error("cannot merge index builders with different settings");
  }
  total_tokens_ += other.total_tokens_;
  table_.merge(other.table_);
  other.table_ = CountTable{};
  other.total_tokens_ = 0;
}

FrequencyIndex IndexBuilder::finish() && {
  if (total_tokens_ == 0) throw Error("empty reference corpus");
  FrequencyIndex index;
  index.total_tokens_ = total_tokens_;
  index.min_bigram_count_ = min_bigram_count_;
  index.fingerprint_ = config_.fingerprint();
  table_.prune_bigrams(min_bigram_count_);
  index.table_ = std::move(table_);
  return index;
}

FrequencyIndex build_index(std::span<const std::string> reference_docs, const TokenizerConfig& config,
                           std::uint64_t min_bigram_count, unsigned threads) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(reference_docs.size())));
  if (threads <= 1) {
    IndexBuilder builder(config, min_bigram_count);
    for (const auto& doc : reference_docs) builder.add_document(doc);
    return std::move(builder).finish();
  }
  std::vector<IndexBuilder> shards;
  shards.reserve(threads);
  for (unsigned i = 0; i < threads; ++i) shards.emplace_back(config, min_bigram_count);
  {
    std::vector<std::jthread> workers;
    for (unsigned w = 0; w < threads; ++w) {
      workers.emplace_back([&, w] {
        for (std::size_t i = w; i < reference_docs.size(); i += threads) shards[w].add_document(reference_docs[i]);
      });
    }
  }
  for (unsigned i = 1; i < threads; ++i) shards[0].merge(std::move(shards[i]));
  return std::move(shards[0]).finish();
}

void save_index(const FrequencyIndex& index, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create index directory " + dir.string() + ": " + ec.message());

  nlohmann::ordered_json meta;
  meta["format"] = kFormat;
  meta["version"] = kVersion;
  meta["total_tokens"] = index.total_tokens();
  meta["min_bigram_count"] = index.min_bigram_count();
  meta["tokenizer_fingerprint"] = index.tokenizer_fingerprint();

  auto open = [](const fs::path& p) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + p.string());
    return out;
  };

  {
    auto out = open(dir / "meta.json");
    out << meta.dump() << '\n';
  }
  {
    auto out = open(dir / "unigrams.tsv");
    for (const auto& u : index.sorted_unigrams()) out << u.word << '\t' << u.count << '\n';
  }
  {
    auto out = open(dir / "bigrams.tsv");
    for (const auto& b : index.sorted_bigrams()) out << b.w1 << '\t' << b.w2 << '\t' << b.count << '\n';
  }
}

FrequencyIndex load_index(const fs::path& dir) {
  const fs::path meta_path = dir / "meta.json";
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(read_file(meta_path));
  } catch (const nlohmann::json::exception&) {
    throw Error(meta_path.string() + ": unsupported index format (meta.json is not valid JSON)");
  }
  if (!meta.is_object() || meta.value("format", "") != kFormat || !meta.contains("version") ||
      !meta["version"].is_number_integer() || meta["version"].get<int>() != kVersion) {
    throw Error(meta_path.string() + ": unsupported index format");
  }
  if (!meta.contains("tokenizer_fingerprint") || !meta["tokenizer_fingerprint"].is_string() ||
      meta["tokenizer_fingerprint"].get<std::string>().empty()) {
    throw Error(meta_path.string() + ": missing tokenizer_fingerprint");
  }
  auto positive = [&](const char* key) {
    if (!meta.contains(key) || !meta[key].is_number_unsigned() || meta[key].get<std::uint64_t>() == 0) {
      throw Error(meta_path.string() + ": field '" + key + "' must be a positive integer");
    }
    return meta[key].get<std::uint64_t>();
  };

  FrequencyIndex index;
  index.total_tokens_ = positive("total_tokens");
  index.min_bigram_count_ = positive("min_bigram_count");
  index.fingerprint_ = meta["tokenizer_fingerprint"].get<std::string>();
  CountTable& table = index.table_;

  const fs::path uni_path = dir / "unigrams.tsv";
  std::uint64_t sum = 0;
  {
    const std::string content = read_file(uni_path);
    for_each_line(uni_path, content, [&](std::string_view line, std::size_t no) {
      const auto f = split_tabs(line);
      const auto n = f.size() == 2 && !f[0].empty() ? parse_count(f[1]) : std::nullopt;
      if (!n) throw Error(uni_path.string() + ":" + std::to_string(no) + ": malformed unigram line");
      if (table.find(f[0])) throw Error(uni_path.string() + ":" + std::to_string(no) + ": duplicate word");
      table.add_unigram(table.intern(f[0]), *n);
      sum += *n;
    });
  }
  if (sum != index.total_tokens_) {
    throw Error(uni_path.string() + ": unigram counts sum to " + std::to_string(sum) + " but total_tokens is " +
                std::to_string(index.total_tokens_));
  }

  const fs::path bi_path = dir / "bigrams.tsv";
  {
    const std::string content = read_file(bi_path);
    for_each_line(bi_path, content, [&](std::string_view line, std::size_t no) {
      const auto where = bi_path.string() + ":" + std::to_string(no);
      const auto f = split_tabs(line);
      const auto n = f.size() == 3 ? parse_count(f[2]) : std::nullopt;
      if (!n) throw Error(where + ": malformed bigram line");
      const auto a = table.find(f[0]);
      const auto b = table.find(f[1]);
      if (!a || !b) throw Error(where + ": bigram word missing from unigrams.tsv");
      if (table.bigram(*a, *b)) throw Error(where + ": duplicate bigram");
      if (*n > table.unigram(*a) || *n > table.unigram(*b)) {
        throw Error(where + ": bigram count exceeds a unigram count");
      }
      table.add_bigram(*a, *b, *n);
    });
  }
  return index;
}

}  // namespace collgram
