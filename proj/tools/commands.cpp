#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "collgram/assoc.hpp"
#include "collgram/corpus.hpp"
#include "collgram/error.hpp"
#include "collgram/format.hpp"
#include "collgram/refindex.hpp"
#include "collgram/run_manifest.hpp"
#include "collgram/stats.hpp"
#include "collgram/tokenizer.hpp"

namespace collgram::cli {

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInput = 2;

unsigned worker_threads() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("COLLGRAM_THREADS")) {
    try {
      const long cap = std::stol(env);
      if (cap >= 1) n = std::min(n, static_cast<unsigned>(cap));
    } catch (const std::exception&) {
      throw Error("COLLGRAM_THREADS must be a positive integer, got '" + std::string(env) + "'");
    }
  }
  return n;
}

// Runs fn(i) for i in [0, count) on up to `threads` workers.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i, 0u);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> workers;
    for (unsigned w = 0; w < threads; ++w) {
      workers.emplace_back([&, w] {
        try {
          for (std::size_t i; (i = next.fetch_add(1)) < count;) fn(i, w);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

std::vector<fs::path> regular_files(const fs::path& dir, std::string_view extension = {}) {
  if (!fs::is_directory(dir)) throw Error("input directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    if (!extension.empty() && entry.path().extension() != extension) continue;
    files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::vector<std::pair<std::string, std::string>> recorded_flags(const CLI::App& cmd) {
  std::vector<std::pair<std::string, std::string>> flags;
  for (const CLI::Option* opt : cmd.get_options()) {
    if (opt->get_name() == "--help" || opt->count() == 0) continue;
    std::string value;
    for (const auto& r : opt->results()) value += (value.empty() ? "" : ",") + r;
    flags.emplace_back(opt->get_name(), value);
  }
  return flags;
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

fs::path sidecar_manifest(const fs::path& output_file) { return output_file.string() + ".run.json"; }

struct TokenizerFlags {
  bool no_lowercase = false;
  bool split_apostrophes = false;

  void attach(CLI::App* cmd) {
    cmd->add_flag("--no-lowercase", no_lowercase, "Keep original case in lookup forms");
    cmd->add_flag("--split-apostrophes", split_apostrophes, "Treat apostrophes as punctuation");
  }
  TokenizerConfig config() const {
    TokenizerConfig c;
    c.case_fold = !no_lowercase;
    c.keep_internal_apostrophes = !split_apostrophes;
    return c;
  }
};

struct BuildIndexOptions {
  std::string input;
  std::string output;
  std::uint64_t min_count = 1;
  TokenizerFlags tokenizer;
};

void build_index_command(const BuildIndexOptions& o, const CLI::App& cmd) {
  const auto files = regular_files(o.input);
  const unsigned threads = std::max(1u, std::min<unsigned>(worker_threads(), static_cast<unsigned>(files.size())));
  std::vector<IndexBuilder> shards;
  for (unsigned i = 0; i < threads; ++i) shards.emplace_back(o.tokenizer.config(), o.min_count);
  parallel_for(files.size(), threads, [&](std::size_t i, unsigned w) {
    shards[w].add_document(read_text_file(files[i].string()));
  });
  for (unsigned i = 1; i < shards.size(); ++i) shards[0].merge(std::move(shards[i]));
  const FrequencyIndex index = std::move(shards[0]).finish();
  save_index(index, o.output);
  write_run_manifest(fs::path(o.output) / "run.json", make_run_manifest("build-index", recorded_flags(cmd), {o.input}));
  std::cerr << "indexed " << files.size() << " files: N=" << index.total_tokens() << ", "
            << index.vocabulary_size() << " word types, " << index.bigram_types() << " bigram types\n";
}

struct ProfileOptions {
  std::string index;
  std::string docs;
  std::string out;
  std::string pn_mode = "heuristic";
  bool type_level = false;
  TokenizerFlags tokenizer;
};

void profile_command(const ProfileOptions& o, const CLI::App& cmd) {
  TokenizerConfig config = o.tokenizer.config();
  config.proper_noun_mode = parse_proper_noun_mode(o.pn_mode);
  const FrequencyIndex index = load_index(o.index);
  if (config.fingerprint() != index.tokenizer_fingerprint()) {
    throw Error("tokenizer mismatch: flags give fingerprint " + config.fingerprint() + " but " + o.index +
                " was built with " + index.tokenizer_fingerprint());
  }
  const auto files = regular_files(o.docs, ".txt");
  const CountingMode mode = o.type_level ? CountingMode::types : CountingMode::occurrences;

  std::vector<DocumentProfile> profiles(files.size());
  parallel_for(files.size(), worker_threads(), [&](std::size_t i, unsigned) {
    const fs::path& f = files[i];
    const std::string id = f.stem().string();
    fs::path tags = f.parent_path() / (id + ".pn");
    const auto doc = prepare_document(read_text_file(f.string()), config, id, tags);
    profiles[i] = profile_document(doc, index, mode);
  });

  for (const auto& p : profiles) {
    if (p.no_scored_bigrams()) {
      std::cerr << "warning: " << p.doc_id << ": no bigram found in the reference index; indices left empty\n";
    }
  }
  auto out = open_output(o.out);
  write_profiles_csv(out, profiles);
  write_run_manifest(sidecar_manifest(o.out), make_run_manifest("profile", recorded_flags(cmd), {o.index, o.docs}));
}

struct CompareOptions {
  std::vector<std::string> profiles;
  std::vector<std::string> labels;
  double alpha = 0.05;
  std::optional<std::size_t> m;
  std::string out;
  std::string plot_data;
  std::string table;
};

void compare_command(const CompareOptions& o, const CLI::App& cmd) {
  std::vector<std::string> labels = o.labels;
  if (labels.empty()) {
    for (const auto& p : o.profiles) labels.push_back(fs::path(p).stem().string());
  }
  if (labels.size() != o.profiles.size()) {
    throw Error("--labels has " + std::to_string(labels.size()) + " entries but --profiles has " +
                std::to_string(o.profiles.size()));
  }
  std::vector<TranslatorProfiles> sets;
  for (std::size_t i = 0; i < labels.size(); ++i) sets.push_back({labels[i], read_profiles_csv(o.profiles[i])});

  const auto matrices = compare_sets(sets, o.alpha, o.m);
  {
    auto out = open_output(o.out);
    write_comparison_csv(out, matrices);
  }
  if (!o.plot_data.empty()) {
    auto out = open_output(o.plot_data);
    write_plot_data(out, sets);
  }
  std::ostringstream table;
  render_comparison_table(table, matrices);
  if (!o.table.empty()) {
    auto out = open_output(o.table);
    out << table.str();
  }
  std::cout << table.str();
  for (const auto& mat : matrices) {
    for (const auto& c : mat.cells) {
      if (c.dropped_pairs > 0) {
        std::cerr << "note: " << to_string(mat.index) << " " << c.row_translator << " vs " << c.col_translator
                  << ": dropped " << c.dropped_pairs << " pair(s) with absent values\n";
      }
      if (c.failure) {
        std::cerr << "warning: " << to_string(mat.index) << " " << c.row_translator << " vs " << c.col_translator
                  << ": " << *c.failure << '\n';
      }
    }
  }
  std::vector<fs::path> inputs(o.profiles.begin(), o.profiles.end());
  write_run_manifest(sidecar_manifest(o.out), make_run_manifest("compare", recorded_flags(cmd), inputs));
}

struct SampleOptions {
  std::string input;
  std::string out;
  SamplingSpec spec;
};

void sample_command(const SampleOptions& o, const CLI::App& cmd) {
  const auto docs = read_europarl_dir(o.input);
  const auto sample = sample_documents(docs, o.spec);
  write_documents(o.out, sample);
  write_run_manifest(fs::path(o.out) / "run.json", make_run_manifest("sample", recorded_flags(cmd), {o.input}));
  std::cerr << "sampled " << sample.size() << " of " << docs.size() << " documents\n";
}

struct IngestOptions {
  std::string input;
  std::string out;
};

void ingest_command(const IngestOptions& o, const CLI::App& cmd) {
  const auto docs = read_europarl_dir(o.input);
  write_documents(o.out, docs);
  write_run_manifest(fs::path(o.out) / "run.json", make_run_manifest("ingest", recorded_flags(cmd), {o.input}));
  std::cerr << "ingested " << docs.size() << " documents\n";
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"collgram: phraseological profiling of texts against a reference corpus"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  BuildIndexOptions build;
  auto* build_cmd = app.add_subcommand("build-index", "Count unigrams and bigrams of a reference corpus");
  build_cmd->add_option("--input", build.input, "Directory of reference text files")->required();
  build_cmd->add_option("--output", build.output, "Index directory to write")->required();
  build_cmd->add_option("--min-count", build.min_count, "Drop bigrams seen fewer times")
      ->check(CLI::PositiveNumber);
  build.tokenizer.attach(build_cmd);

  ProfileOptions profile;
  auto* profile_cmd = app.add_subcommand("profile", "Compute %high-MI, %high-t and their ratio per document");
  profile_cmd->add_option("--index", profile.index, "Index directory")->required();
  profile_cmd->add_option("--docs", profile.docs, "Directory of <doc_id>.txt files")->required();
  profile_cmd->add_option("--out", profile.out, "Profile CSV to write")->required();
  profile_cmd->add_option("--pn-mode", profile.pn_mode, "Proper-noun detection: heuristic, tag_file or off")
      ->check(CLI::IsMember({"heuristic", "tag_file", "off"}));
  profile_cmd->add_flag("--type-level", profile.type_level, "Count distinct bigram types instead of occurrences");
  profile.tokenizer.attach(profile_cmd);

  CompareOptions compare;
  auto* compare_cmd = app.add_subcommand("compare", "Paired comparison of profile sets");
  compare_cmd->add_option("--profiles", compare.profiles, "Profile CSVs, comma separated")
      ->required()
      ->delimiter(',');
  compare_cmd->add_option("--labels", compare.labels, "Translator labels, comma separated")->delimiter(',');
  compare_cmd->add_option("--alpha", compare.alpha, "Family-wise significance level")
      ->check(CLI::Range(0.0, 1.0));
  compare_cmd->add_option("--m", compare.m, "Number of tests for the Bonferroni correction")
      ->check(CLI::PositiveNumber);
  compare_cmd->add_option("--out", compare.out, "Comparison CSV to write")->required();
  compare_cmd->add_option("--plot-data", compare.plot_data, "Per-translator means and standard errors CSV");
  compare_cmd->add_option("--table", compare.table, "Also write the text table to this file");

  SampleOptions sample;
  auto* sample_cmd = app.add_subcommand("sample", "Seeded length-filtered random selection of speeches");
  sample_cmd->add_option("--input", sample.input, "Directory of Europarl files")->required();
  sample_cmd->add_option("--min-chars", sample.spec.min_chars, "Minimum characters per document");
  sample_cmd->add_option("--max-chars", sample.spec.max_chars, "Maximum characters per document");
  sample_cmd->add_option("--n", sample.spec.sample_size, "Number of documents to draw")->check(CLI::PositiveNumber);
  sample_cmd->add_option("--seed", sample.spec.seed, "Generator seed")->required();
  sample_cmd->add_option("--out", sample.out, "Output directory")->required();

  IngestOptions ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Split Europarl files into one text file per speech");
  ingest_cmd->add_option("--input", ingest.input, "Directory of Europarl files")->required();
  ingest_cmd->add_option("--out", ingest.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*build_cmd) build_index_command(build, *build_cmd);
    if (*profile_cmd) profile_command(profile, *profile_cmd);
    if (*compare_cmd) compare_command(compare, *compare_cmd);
    if (*sample_cmd) sample_command(sample, *sample_cmd);
    if (*ingest_cmd) ingest_command(ingest, *ingest_cmd);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitOk;
}

}  // namespace collgram::cli
