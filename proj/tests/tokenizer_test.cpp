#include <gtest/gtest.h>

#include <random>

#include "collgram/error.hpp"
#include "collgram/tokenizer.hpp"
#include "test_util.hpp"

namespace collgram {
namespace {

std::vector<std::string> surfaces(const TokenizedDocument& d) {
  std::vector<std::string> out;
  for (const auto& t : d.tokens) out.push_back(t.surface);
  return out;
}

// Builds a document directly: one inner vector per sentence.
TokenizedDocument make_doc(const std::vector<std::vector<std::string>>& sentences) {
  TokenizerConfig config;
  TokenizedDocument d;
  d.doc_id = "doc";
  d.tokenizer_fingerprint = config.fingerprint();
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    for (const auto& w : sentences[s]) {
      const auto tok = tokenize(w, config).tokens.at(0);
      Token t = tok;
      t.sentence_index = s;
      d.tokens.push_back(t);
    }
  }
  d.sentence_count = sentences.size();
  return d;
}

TEST(Tokenize, EmptyText) {
  const auto d = tokenize("", TokenizerConfig{});
  EXPECT_TRUE(d.tokens.empty());
  EXPECT_EQ(d.sentence_count, 0u);
}

TEST(Tokenize, TwoSentences) {
  const auto d = tokenize("The cat sat. It purred.", TokenizerConfig{});
  EXPECT_EQ(surfaces(d), (std::vector<std::string>{"The", "cat", "sat", ".", "It", "purred", "."}));
  std::size_t words = 0;
  for (const auto& t : d.tokens) words += t.is_word;
  EXPECT_EQ(words, 5u);
  EXPECT_EQ(d.tokens.size() - words, 2u);
  EXPECT_EQ(d.sentence_count, 2u);
  EXPECT_EQ(d.tokens[3].sentence_index, 0u);  // the period closes sentence 0
  EXPECT_EQ(d.tokens[4].sentence_index, 1u);
  EXPECT_EQ(d.tokens[0].folded, "the");
}

TEST(Tokenize, InternalApostropheKept) {
  const auto d = tokenize("don't stop", TokenizerConfig{});
  EXPECT_EQ(surfaces(d), (std::vector<std::string>{"don't", "stop"}));
  EXPECT_TRUE(d.tokens[0].is_word);
}

TEST(Tokenize, ApostrophesSplitWhenDisabled) {
  TokenizerConfig c;
  c.keep_internal_apostrophes = false;
  EXPECT_EQ(surfaces(tokenize("don't", c)), (std::vector<std::string>{"don", "'", "t"}));
}

TEST(Tokenize, EdgeApostrophesArePunctuation) {
  const auto d = tokenize("'tis the players' turn", TokenizerConfig{});
  EXPECT_EQ(surfaces(d), (std::vector<std::string>{"'", "tis", "the", "players", "'", "turn"}));
}

TEST(Tokenize, TypographicApostrophe) {
  EXPECT_EQ(surfaces(tokenize("it’s", TokenizerConfig{})), (std::vector<std::string>{"it’s"}));
}

TEST(Tokenize, HyphenSplits) {
  const auto d = tokenize("self-fulfilling prophecy", TokenizerConfig{});
  EXPECT_EQ(surfaces(d), (std::vector<std::string>{"self", "-", "fulfilling", "prophecy"}));
  EXPECT_FALSE(d.tokens[1].is_word);
}

TEST(Tokenize, NumbersAreNotWords) {
  const auto d = tokenize("in 2022 and B52s", TokenizerConfig{});
  ASSERT_EQ(d.tokens.size(), 4u);
  EXPECT_FALSE(d.tokens[1].is_word);
  EXPECT_TRUE(d.tokens[3].is_word);
}

TEST(Tokenize, SentenceRuleNeedsSpaceAndCapital) {
  EXPECT_EQ(tokenize("e.g. this one", TokenizerConfig{}).sentence_count, 1u);
  EXPECT_EQ(tokenize("It ends. and goes on", TokenizerConfig{}).sentence_count, 1u);
  EXPECT_EQ(tokenize("It ends.Then more", TokenizerConfig{}).sentence_count, 1u);
  EXPECT_EQ(tokenize("Really? Yes! 3 more", TokenizerConfig{}).sentence_count, 3u);
}

TEST(Tokenize, ParagraphBreakSplits) {
  const auto d = tokenize("first part\n\nsecond part\nsame paragraph", TokenizerConfig{});
  EXPECT_EQ(d.sentence_count, 2u);
  EXPECT_EQ(d.tokens[2].sentence_index, 1u);
  EXPECT_EQ(d.tokens[5].sentence_index, 1u);
  EXPECT_EQ(tokenize("\n\n\nleading breaks only", TokenizerConfig{}).sentence_count, 1u);
  EXPECT_EQ(tokenize("a\r\n \r\nb", TokenizerConfig{}).sentence_count, 2u);
}

TEST(Tokenize, UnicodeLettersAndFolding) {
  const auto d = tokenize("Équipe ÉTÉ naïve Straße", TokenizerConfig{});
  ASSERT_EQ(d.tokens.size(), 4u);
  EXPECT_EQ(d.tokens[0].folded, "équipe");
  EXPECT_EQ(d.tokens[1].folded, "été");
  EXPECT_EQ(d.tokens[3].folded, "straße");
  // Combining acute accent stays inside the word.
  EXPECT_EQ(tokenize("café noir", TokenizerConfig{}).tokens.size(), 2u);
}

TEST(Tokenize, NoFoldingKeepsSurface) {
  TokenizerConfig c;
  c.case_fold = false;
  for (const auto& t : tokenize("The Cat SAT.", c).tokens) EXPECT_EQ(t.folded, t.surface);
}

TEST(Tokenize, InvalidUtf8BecomesPunctuation) {
  const auto d = tokenize(std::string("ab\xff" "cd"), TokenizerConfig{});
  ASSERT_EQ(d.tokens.size(), 3u);
  EXPECT_FALSE(d.tokens[1].is_word);
}

TEST(Tokenize, FingerprintIgnoresProperNounMode) {
  TokenizerConfig a;
  TokenizerConfig b;
  b.proper_noun_mode = ProperNounMode::off;
  EXPECT_EQ(a.fingerprint(), b.fingerprint());
  b.case_fold = false;
  EXPECT_NE(a.fingerprint(), b.fingerprint());
}

TEST(ProperNouns, SentenceInitialWithoutOtherOccurrence) {
  auto d = detect_proper_nouns(tokenize("Paris is big", TokenizerConfig{}), ProperNounMode::heuristic);
  EXPECT_FALSE(d.tokens[0].is_proper_noun);
}

TEST(ProperNouns, NonInitialCapitalised) {
  auto d = detect_proper_nouns(tokenize("i saw Paris", TokenizerConfig{}), ProperNounMode::heuristic);
  EXPECT_FALSE(d.tokens[0].is_proper_noun);
  EXPECT_TRUE(d.tokens[2].is_proper_noun);
}

TEST(ProperNouns, InitialFlaggedWhenSeenCapitalisedElsewhere) {
  auto d = detect_proper_nouns(tokenize("Paris is big. We love Paris. The end", TokenizerConfig{}),
                               ProperNounMode::heuristic);
  EXPECT_TRUE(d.tokens[0].is_proper_noun);   // Paris, sentence-initial
  EXPECT_FALSE(d.tokens[4].is_proper_noun);  // We
  EXPECT_TRUE(d.tokens[6].is_proper_noun);   // Paris
  EXPECT_FALSE(d.tokens[8].is_proper_noun);  // The
}

TEST(ProperNouns, InitialSkipsLeadingPunctuation) {
  auto d = detect_proper_nouns(tokenize("\"Hello there", TokenizerConfig{}), ProperNounMode::heuristic);
  EXPECT_FALSE(d.tokens[1].is_proper_noun);
}

TEST(ProperNouns, OffClearsFlags) {
  auto d = detect_proper_nouns(tokenize("i saw Paris", TokenizerConfig{}), ProperNounMode::heuristic);
  d = detect_proper_nouns(std::move(d), ProperNounMode::off);
  for (const auto& t : d.tokens) EXPECT_FALSE(t.is_proper_noun);
}

TEST(ProperNouns, TagFile) {
  testing::TempDir dir("tags");
  testing::write_file(dir / "d.pn", "0\n1\n1\n0\n");
  auto d = detect_proper_nouns(tokenize("we met Ann .", TokenizerConfig{}, "d"), ProperNounMode::tag_file,
                               dir / "d.pn");
  EXPECT_FALSE(d.tokens[0].is_proper_noun);
  EXPECT_TRUE(d.tokens[1].is_proper_noun);
  EXPECT_TRUE(d.tokens[2].is_proper_noun);
  EXPECT_FALSE(d.tokens[3].is_proper_noun);
}

TEST(ProperNouns, TagFileOnPunctuationIsIgnored) {
  auto d = apply_proper_noun_tags(tokenize("a .", TokenizerConfig{}), "0\n1\n");
  EXPECT_FALSE(d.tokens[1].is_proper_noun);
}

TEST(ProperNouns, TagFileLengthMismatch) {
  try {
    apply_proper_noun_tags(tokenize("one two three", TokenizerConfig{}, "doc7"), "0\n1\n", "doc7.pn");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("doc7"), std::string::npos);
    EXPECT_NE(msg.find("3 tokens"), std::string::npos);
    EXPECT_NE(msg.find("2 tags"), std::string::npos);
  }
}

TEST(ProperNouns, TagFileBadLine) {
  EXPECT_THROW(apply_proper_noun_tags(tokenize("a", TokenizerConfig{}), "yes\n"), Error);
  EXPECT_THROW(detect_proper_nouns(tokenize("a", TokenizerConfig{}), ProperNounMode::tag_file), Error);
}

TEST(ExtractBigrams, PlainSentence) {
  const auto b = extract_bigrams(make_doc({{"a", "b", "c"}}));
  EXPECT_EQ(b, (std::vector<BigramOccurrence>{{"a", "b", 0}, {"b", "c", 1}}));
}

TEST(ExtractBigrams, PunctuationBreaksAdjacency) {
  EXPECT_TRUE(extract_bigrams(make_doc({{"a", ",", "b"}})).empty());
}

TEST(ExtractBigrams, SentenceBoundaryBreaksAdjacency) {
  const auto b = extract_bigrams(make_doc({{"a", "b"}, {"c", "d"}}));
  EXPECT_EQ(b, (std::vector<BigramOccurrence>{{"a", "b", 0}, {"c", "d", 2}}));
}

TEST(ExtractBigrams, ProperNounsExcluded) {
  auto d = detect_proper_nouns(tokenize("we saw Ann there today", TokenizerConfig{}), ProperNounMode::heuristic);
  const auto b = extract_bigrams(d);
  EXPECT_EQ(b, (std::vector<BigramOccurrence>{{"we", "saw", 0}, {"there", "today", 3}}));
}

// Random texts over a small alphabet of words, capitals and punctuation.
std::string random_text(std::mt19937_64& rng) {
  static const std::vector<std::string> pieces = {"alpha", "Beta", "gamma", "Delta", "x", "it's", ".", ",", "!",
                                                  "?",     "42",   "-",     "\n\n",  "é", "Ω"};
  std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1);
  std::uniform_int_distribution<int> len(0, 60);
  std::bernoulli_distribution space(0.7);
  std::string out;
  const int n = len(rng);
  for (int i = 0; i < n; ++i) {
    out += pieces[pick(rng)];
    if (space(rng)) out += ' ';
  }
  return out;
}

TEST(TokenizerProperties, RandomTexts) {
  std::mt19937_64 rng(7);
  TokenizerConfig folded;
  TokenizerConfig unfolded;
  unfolded.case_fold = false;
  for (int iter = 0; iter < 500; ++iter) {
    const std::string text = random_text(rng);
    const auto a = tokenize(text, folded);
    const auto b = tokenize(text, unfolded);

    // Determinism.
    const auto again = tokenize(text, folded);
    ASSERT_EQ(a.tokens.size(), again.tokens.size());
    for (std::size_t i = 0; i < a.tokens.size(); ++i) ASSERT_EQ(a.tokens[i].folded, again.tokens[i].folded);

    // Folding changes neither token count nor segmentation.
    ASSERT_EQ(a.tokens.size(), b.tokens.size()) << text;
    ASSERT_EQ(a.sentence_count, b.sentence_count) << text;
    for (std::size_t i = 0; i < a.tokens.size(); ++i) {
      ASSERT_EQ(a.tokens[i].sentence_index, b.tokens[i].sentence_index);
      ASSERT_EQ(b.tokens[i].folded, b.tokens[i].surface);
    }

    // Sentence indices are non-decreasing and cover 0..count-1.
    std::size_t expected = 0;
    for (const auto& t : a.tokens) {
      ASSERT_TRUE(t.sentence_index == expected || t.sentence_index == expected + 1) << text;
      if (t.sentence_index == expected + 1) ++expected;
    }
    if (!a.tokens.empty()) ASSERT_EQ(expected + 1, a.sentence_count);

    // Bigram bound, with equality when nothing interrupts.
    const auto flagged = detect_proper_nouns(a, ProperNounMode::heuristic);
    std::size_t words = 0;
    std::vector<bool> sentence_has_word(a.sentence_count, false);
    for (const auto& t : flagged.tokens) {
      if (!t.is_word) continue;
      ++words;
      sentence_has_word[t.sentence_index] = true;
      ASSERT_FALSE(t.is_proper_noun && !t.is_word);
    }
    const auto nonempty = static_cast<std::size_t>(std::count(sentence_has_word.begin(), sentence_has_word.end(), true));
    ASSERT_LE(extract_bigrams(flagged).size(), words - nonempty);
  }
}

TEST(TokenizerProperties, BoundIsTightWithoutInterruptions) {
  auto d = tokenize("one two three. Four five\n\nsix seven", TokenizerConfig{});
  d.tokens.erase(std::remove_if(d.tokens.begin(), d.tokens.end(), [](const Token& t) { return !t.is_word; }),
                 d.tokens.end());
  d = detect_proper_nouns(std::move(d), ProperNounMode::off);
  EXPECT_EQ(extract_bigrams(d).size(), 7u - 3u);
}

}  // namespace
}  // namespace collgram
