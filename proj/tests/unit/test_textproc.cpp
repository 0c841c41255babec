#include <random>

#include "cscope/textproc.hpp"
#include "test_support.hpp"

using namespace cscope;

namespace {

std::vector<std::string> norms_of(const std::vector<Token>& tokens) {
  std::vector<std::string> out;
  for (const auto& t : tokens) out.push_back(t.norm);
  return out;
}

std::string slice(const std::string& text, const SentenceSpan& s) {
  return text.substr(s.start, s.end - s.start);
}

bool only_whitespace(std::string_view s) {
  return s.find_first_not_of(" \t\n\r") == std::string_view::npos;
}

// Random prose mixing sentence terminators, abbreviations, digits, hyphens
// and non-ASCII letters.
std::string random_text(std::mt19937& rng) {
  static const std::vector<std::string> words = {
      "Dr.", "Smith", "treats", "COPD", "CKD", "worsens", "e.g.", "fig.", "rule-based",
      "patients", "2008", "vs.", "the", "Kidney", "déjà", "Ωmega", "(GFR)", "\"quoted\"",
      "et", "al.", "no.", "3.5", "coughing,", "toxicity!", "why?", "—", "x", "Data;"};
  static const std::vector<std::string> gaps = {" ", "  ", "\n", "\t", ". ", "! ", "? ", ".\n"};
  std::uniform_int_distribution<std::size_t> n_words(0, 30);
  std::uniform_int_distribution<std::size_t> pick_word(0, words.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_gap(0, gaps.size() - 1);
  std::string out;
  const auto n = n_words(rng);
  for (std::size_t i = 0; i < n; ++i) {
    out += words[pick_word(rng)];
    out += gaps[pick_gap(rng)];
  }
  return out;
}

}  // namespace

TEST(SplitSentences, AbbreviationDoesNotEndSentence) {
  const TextProcessor tp;
  const std::string text = "Dr. Smith treats COPD. CKD worsens.";
  const auto spans = tp.split_sentences(text);
  ASSERT_EQ(spans.size(), 2u);
  EXPECT_EQ(slice(text, spans[0]), "Dr. Smith treats COPD.");
  EXPECT_EQ(slice(text, spans[1]), "CKD worsens.");
  EXPECT_EQ(spans[0].index, 0u);
  EXPECT_EQ(spans[1].index, 1u);
}

TEST(SplitSentences, EmptyAndUnterminated) {
  const TextProcessor tp;
  EXPECT_TRUE(tp.split_sentences("").empty());
  const std::string text = "no terminator here";
  const auto spans = tp.split_sentences(text);
  ASSERT_EQ(spans.size(), 1u);
  EXPECT_EQ(slice(text, spans[0]), text);
}

TEST(SplitSentences, BoundaryNeedsUppercaseOrDigit) {
  const TextProcessor tp;
  EXPECT_EQ(tp.split_sentences("It rose. then fell.").size(), 1u);
  EXPECT_EQ(tp.split_sentences("It rose. 2008 was worse.").size(), 2u);
  EXPECT_EQ(tp.split_sentences("Really? Yes! Fine.").size(), 3u);
  EXPECT_EQ(tp.split_sentences("See fig. 3 for details.").size(), 1u);
  EXPECT_EQ(tp.split_sentences("Smith et al. Reported it.").size(), 1u);
}

TEST(Tokenize, StripsPunctuationAndFoldsCase) {
  const TextProcessor tp;
  EXPECT_EQ(norms_of(tp.tokenize("abnormal coughing, toxicity!")),
            (std::vector<std::string>{"abnormal", "coughing", "toxicity"}));
  EXPECT_EQ(norms_of(tp.tokenize("COPD")), (std::vector<std::string>{"copd"}));
  EXPECT_TRUE(tp.tokenize("\xE2\x80\x94").empty());  // em dash alone
}

TEST(Tokenize, HyphenatedWordStaysWhole) {
  const TextProcessor tp;
  const auto tokens = tp.tokenize("a rule-based system");
  EXPECT_EQ(norms_of(tokens), (std::vector<std::string>{"a", "rule-based", "system"}));
  EXPECT_EQ(tokens[1].surface, "rule-based");
}

TEST(Tokenize, NonAsciiLowercase) {
  const TextProcessor tp;
  EXPECT_EQ(norms_of(tp.tokenize("ÉTUDE Ωmega")), (std::vector<std::string>{"étude", "ωmega"}));
}

TEST(Tokenize, PositionsIncrease) {
  const TextProcessor tp;
  const auto p = tp.process("One two. Three four five.");
  ASSERT_EQ(p.tokens.size(), 5u);
  for (std::size_t i = 0; i < p.tokens.size(); ++i) EXPECT_EQ(p.tokens[i].position, i);
  EXPECT_EQ(p.tokens[2].sentence_index, 1u);
}

TEST(Stopwords, Membership) {
  const TextProcessor tp;
  EXPECT_TRUE(tp.is_stopword("the"));
  EXPECT_FALSE(tp.is_stopword("copd"));
  EXPECT_TRUE(tp.is_stopword(""));
}

TEST(Stopwords, ShippedListsMatchCompiledDefaults) {
  const std::filesystem::path dir(CSCOPE_RESOURCE_DIR);
  EXPECT_EQ(load_word_list(dir / "stopwords.txt"), default_stopwords());
  EXPECT_EQ(load_word_list(dir / "abbreviations.txt"), default_abbreviations());
  EXPECT_GE(default_stopwords().size(), 100u);
}

TEST(Normalize, LineEndingsAndTrim) {
  EXPECT_EQ(normalize_text("  a\r\nb\rc \n"), "a\nb\nc");
  EXPECT_EQ(normalize_text("\xC2\xA0x\xC2\xA0"), "x");  // NBSP
}

TEST(Stemming, SuffixRules) {
  EXPECT_EQ(stem_suffix("coughing"), "cough");
  EXPECT_EQ(stem_suffix("treated"), "treat");
  EXPECT_EQ(stem_suffix("patients"), "patient");
  EXPECT_EQ(stem_suffix("class"), "class");
  EXPECT_EQ(stem_suffix("bed"), "bed");  // stem would be shorter than 3
  TextProcessor stemming(default_stopwords(), default_abbreviations(), TextOptions{true});
  EXPECT_EQ(stemming.norms("Coughing patients"), (std::vector<std::string>{"cough", "patient"}));
  EXPECT_EQ(TextProcessor().norms("Coughing patients"),
            (std::vector<std::string>{"coughing", "patients"}));
}

TEST(NumericToken, Detection) {
  EXPECT_TRUE(is_numeric_token("2008"));
  EXPECT_TRUE(is_numeric_token("3.5"));
  EXPECT_FALSE(is_numeric_token("b12"));
  EXPECT_FALSE(is_numeric_token(""));
}

TEST(TextProperties, SpansReconstructText) {
  std::mt19937 rng(7);
  const TextProcessor tp;
  for (int i = 0; i < 2000; ++i) {
    const auto text = normalize_text(random_text(rng));
    const auto spans = tp.split_sentences(text);
    std::size_t cursor = 0;
    for (std::size_t k = 0; k < spans.size(); ++k) {
      ASSERT_EQ(spans[k].index, k);
      ASSERT_LE(cursor, spans[k].start);
      ASSERT_LT(spans[k].start, spans[k].end);
      ASSERT_TRUE(only_whitespace(std::string_view(text).substr(cursor, spans[k].start - cursor)))
          << text;
      cursor = spans[k].end;
    }
    ASSERT_TRUE(only_whitespace(std::string_view(text).substr(cursor))) << text;
  }
}

TEST(TextProperties, TokenizeIsIdempotentOnNorms) {
  std::mt19937 rng(11);
  const TextProcessor tp;
  for (int i = 0; i < 2000; ++i) {
    const auto norms = norms_of(tp.process(random_text(rng)).tokens);
    std::string joined;
    for (const auto& n : norms) joined += n + " ";
    ASSERT_EQ(norms_of(tp.tokenize(joined)), norms) << joined;
    for (const auto& n : norms) ASSERT_FALSE(n.empty());
  }
}

TEST(TextProperties, Deterministic) {
  std::mt19937 rng(3);
  const TextProcessor a;
  const TextProcessor b;
  for (int i = 0; i < 200; ++i) {
    const auto text = random_text(rng);
    const auto pa = a.process(text);
    const auto pb = b.process(text);
    ASSERT_EQ(pa.sentences, pb.sentences);
    ASSERT_EQ(pa.tokens, pb.tokens);
  }
}
