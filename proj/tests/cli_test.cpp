#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <sys/wait.h>

#include "test_util.hpp"

namespace collgram {
namespace {

namespace fs = std::filesystem;
using testing::slurp;
using testing::TempDir;
using testing::write_file;

struct Result {
  int status = -1;
  std::string output;  // stdout and stderr interleaved
};

Result run(const std::string& args) {
  const std::string cmd = std::string(COLLGRAM_BIN) + " " + args + " 2>&1";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, pipe)) r.output.append(buf, n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    write_file(dir_ / "ref" / "a.txt", "the cat sat on the mat. The dog sat on the log.\n");
    write_file(dir_ / "ref" / "b.txt", "a cat and a dog sat together on the mat\n");
    write_file(dir_ / "docs" / "d1.txt", "The cat sat on the mat.");
    write_file(dir_ / "docs" / "d2.txt", "A dog sat on the log. Then Rex sat.");
    write_file(dir_ / "docs" / "d3.txt", "Nothing here matches anything");
  }

  Result build(const std::string& extra = {}) {
    return run("build-index --input " + q(dir_ / "ref") + " --output " + q(dir_ / "idx") + " " + extra);
  }

  TempDir dir_{"cli"};
};

TEST_F(CliTest, BuildIndexWritesFilesAndIsReproducible) {
  ASSERT_EQ(build().status, 0);
  for (const char* f : {"meta.json", "unigrams.tsv", "bigrams.tsv", "run.json"}) EXPECT_TRUE(fs::exists(dir_ / "idx" / f)) << f;
  const std::string uni = slurp(dir_ / "idx" / "unigrams.tsv");
  const std::string bi = slurp(dir_ / "idx" / "bigrams.tsv");
  const std::string meta = slurp(dir_ / "idx" / "meta.json");
  EXPECT_NE(bi.find("sat\ton\t2\n"), std::string::npos);
  ASSERT_EQ(build().status, 0);
  EXPECT_EQ(slurp(dir_ / "idx" / "unigrams.tsv"), uni);
  EXPECT_EQ(slurp(dir_ / "idx" / "bigrams.tsv"), bi);
  EXPECT_EQ(slurp(dir_ / "idx" / "meta.json"), meta);
  EXPECT_NE(slurp(dir_ / "idx" / "run.json").find("\"command\": \"build-index\""), std::string::npos);
}

TEST_F(CliTest, BuildIndexThreadsDoNotChangeOutput) {
  ASSERT_EQ(run("build-index --input " + q(dir_ / "ref") + " --output " + q(dir_ / "one")).status, 0);
  ASSERT_EQ(run("build-index --input " + q(dir_ / "ref") + " --output " + q(dir_ / "two")).status, 0);
  setenv("COLLGRAM_THREADS", "2", 1);
  ASSERT_EQ(run("build-index --input " + q(dir_ / "ref") + " --output " + q(dir_ / "two")).status, 0);
  unsetenv("COLLGRAM_THREADS");
  EXPECT_EQ(slurp(dir_ / "one" / "bigrams.tsv"), slurp(dir_ / "two" / "bigrams.tsv"));
}

TEST_F(CliTest, BuildIndexEmptyCorpus) {
  fs::create_directories(dir_ / "empty");
  const auto r = run("build-index --input " + q(dir_ / "empty") + " --output " + q(dir_ / "idx"));
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.output.find("empty reference corpus"), std::string::npos);
}

TEST_F(CliTest, BuildIndexMinCount) {
  ASSERT_EQ(build("--min-count 3").status, 0);
  EXPECT_EQ(slurp(dir_ / "idx" / "bigrams.tsv"), "on\tthe\t3\n");
}

TEST_F(CliTest, ProfileRowsAndDeterminism) {
  ASSERT_EQ(build().status, 0);
  const std::string args = "profile --index " + q(dir_ / "idx") + " --docs " + q(dir_ / "docs") + " --out " + q(dir_ / "p.csv");
  const auto r = run(args);
  ASSERT_EQ(r.status, 0) << r.output;
  const std::string csv = slurp(dir_ / "p.csv");
  EXPECT_EQ(line_count(csv), 4u);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "doc_id,bigrams_total,bigrams_scored,high_mi,high_t,pct_high_mi,pct_high_t,ratio");
  EXPECT_NE(csv.find("\nd3,3,0,0,0,,,\n"), std::string::npos) << csv;
  EXPECT_NE(r.output.find("warning: d3"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir_ / "p.csv.run.json"));
  ASSERT_EQ(run(args).status, 0);
  EXPECT_EQ(slurp(dir_ / "p.csv"), csv);
}

TEST_F(CliTest, ProfileTokenizerMismatch) {
  ASSERT_EQ(build("--no-lowercase").status, 0);
  const auto r = run("profile --index " + q(dir_ / "idx") + " --docs " + q(dir_ / "docs") + " --out " + q(dir_ / "p.csv"));
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.output.find("tokenizer mismatch"), std::string::npos);
}

TEST_F(CliTest, ProfileTagFileMode) {
  ASSERT_EQ(build().status, 0);
  // "The cat sat on the mat ." with "cat" tagged as a proper noun.
  write_file(dir_ / "docs" / "d1.pn", "0\n1\n0\n0\n0\n0\n0\n");
  fs::remove(dir_ / "docs" / "d2.txt");
  fs::remove(dir_ / "docs" / "d3.txt");
  const auto r = run("profile --pn-mode tag_file --index " + q(dir_ / "idx") + " --docs " + q(dir_ / "docs") +
                     " --out " + q(dir_ / "p.csv"));
  ASSERT_EQ(r.status, 0) << r.output;
  EXPECT_NE(slurp(dir_ / "p.csv").find("\nd1,3,"), std::string::npos);

  write_file(dir_ / "docs" / "d1.pn", "0\n1\n");
  const auto bad = run("profile --pn-mode tag_file --index " + q(dir_ / "idx") + " --docs " + q(dir_ / "docs") +
                       " --out " + q(dir_ / "p.csv"));
  EXPECT_EQ(bad.status, 2);
  EXPECT_NE(bad.output.find("d1"), std::string::npos);
}

std::string profile_csv(const std::vector<std::pair<std::string, double>>& rows) {
  std::string s = "doc_id,bigrams_total,bigrams_scored,high_mi,high_t,pct_high_mi,pct_high_t,ratio\n";
  for (const auto& [id, v] : rows) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%s,100,100,0,0,%.6f,%.6f,%.6f\n", id.c_str(), v, 2 * v, 0.5 + v / 10);
    s += buf;
  }
  return s;
}

TEST_F(CliTest, CompareFourSets) {
  std::string list;
  for (int k = 0; k < 4; ++k) {
    std::vector<std::pair<std::string, double>> rows;
    for (int d = 0; d < 6; ++d) rows.emplace_back("doc" + std::to_string(d), k + d * 0.7 + ((d * k) % 3) * 0.1);
    const auto path = dir_ / ("set" + std::to_string(k) + ".csv");
    write_file(path, profile_csv(rows));
    list += (list.empty() ? "" : ",") + path.string();
  }
  const auto r = run("compare --profiles " + list + " --labels h,ms,dl,gg --alpha 0.05 --out " + q(dir_ / "report.csv") +
                     " --plot-data " + q(dir_ / "plots.csv"));
  ASSERT_EQ(r.status, 0) << r.output;
  const std::string report = slurp(dir_ / "report.csv");
  EXPECT_EQ(line_count(report), 1u + 18u);
  EXPECT_NE(report.find("\npct_high_mi,h,ms,6,0,"), std::string::npos) << report;
  EXPECT_NE(r.output.find("m 18"), std::string::npos) << r.output;
  EXPECT_EQ(line_count(slurp(dir_ / "plots.csv")), 1u + 12u);
  EXPECT_TRUE(fs::exists(dir_ / "report.csv.run.json"));
}

TEST_F(CliTest, CompareTwoSetsDefaultsM) {
  write_file(dir_ / "a.csv", profile_csv({{"x", 1.0}, {"y", 2.0}, {"z", 3.5}}));
  write_file(dir_ / "b.csv", profile_csv({{"x", 1.5}, {"y", 2.1}, {"z", 4.5}}));
  const auto r = run("compare --profiles " + q(dir_ / "a.csv") + "," + q(dir_ / "b.csv") + " --out " + q(dir_ / "r.csv"));
  ASSERT_EQ(r.status, 0) << r.output;
  EXPECT_NE(r.output.find("m 3)"), std::string::npos) << r.output;
  EXPECT_EQ(line_count(slurp(dir_ / "r.csv")), 1u + 3u);
}

TEST_F(CliTest, CompareMisaligned) {
  write_file(dir_ / "a.csv", profile_csv({{"x", 1.0}, {"y", 2.0}}));
  write_file(dir_ / "b.csv", profile_csv({{"x", 1.5}, {"w", 2.1}}));
  const auto r = run("compare --profiles " + q(dir_ / "a.csv") + "," + q(dir_ / "b.csv") + " --labels A,B --out " +
                     q(dir_ / "r.csv"));
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.output.find("A is missing: w"), std::string::npos) << r.output;
  EXPECT_NE(r.output.find("B is missing: y"), std::string::npos) << r.output;
}

std::string speech(std::size_t chars) {
  std::string s;
  while (s.size() < chars) s += "Word ";
  s.resize(chars);
  if (s.back() == ' ') s.back() = 'x';
  return s;
}

TEST_F(CliTest, IngestAndSample) {
  // 30 speeches: lengths 3000, 3100, ..., 5900.
  for (int f = 0; f < 3; ++f) {
    std::string content = "<CHAPTER ID=1>\n";
    for (int s = 0; s < 10; ++s) {
      content += "<SPEAKER ID=" + std::to_string(s) + ">\n" + speech(3000 + 100 * (f * 10 + s)) + "\n";
    }
    write_file(dir_ / "ep" / ("ep-" + std::to_string(f) + ".txt"), content);
  }
  auto r = run("ingest --input " + q(dir_ / "ep") + " --out " + q(dir_ / "ingested"));
  ASSERT_EQ(r.status, 0) << r.output;
  EXPECT_EQ(line_count(slurp(dir_ / "ingested" / "manifest.csv")), 31u);
  EXPECT_TRUE(fs::exists(dir_ / "ingested" / "ep-1_0004.txt"));
  EXPECT_TRUE(fs::exists(dir_ / "ingested" / "run.json"));

  // Default bounds 3500..4500 leave 11 eligible speeches.
  r = run("sample --input " + q(dir_ / "ep") + " --n 11 --seed 5 --out " + q(dir_ / "s1"));
  ASSERT_EQ(r.status, 0) << r.output;
  const std::string manifest = slurp(dir_ / "s1" / "manifest.csv");
  EXPECT_EQ(line_count(manifest), 12u);
  EXPECT_NE(manifest.find("ep-0_0006,3500,ep-0.txt"), std::string::npos) << manifest;
  EXPECT_NE(manifest.find("ep-1_0006,4500,ep-1.txt"), std::string::npos) << manifest;

  r = run("sample --input " + q(dir_ / "ep") + " --n 5 --seed 9 --out " + q(dir_ / "s2"));
  ASSERT_EQ(r.status, 0);
  r = run("sample --input " + q(dir_ / "ep") + " --n 5 --seed 9 --out " + q(dir_ / "s3"));
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(slurp(dir_ / "s2" / "manifest.csv"), slurp(dir_ / "s3" / "manifest.csv"));

  r = run("sample --input " + q(dir_ / "ep") + " --seed 1 --out " + q(dir_ / "s4"));
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.output.find("insufficient eligible documents: 11"), std::string::npos) << r.output;
}

TEST(CliUsage, BadArguments) {
  EXPECT_EQ(run("").status, 2);
  EXPECT_EQ(run("no-such-command").status, 2);
  EXPECT_EQ(run("build-index --input x").status, 2);
  EXPECT_EQ(run("profile --index /nonexistent --docs /nonexistent --out /tmp/x.csv").status, 2);
  EXPECT_EQ(run("--help").status, 0);
}

}  // namespace
}  // namespace collgram
