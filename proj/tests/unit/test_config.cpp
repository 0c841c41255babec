#include <fstream>

#include "cscope/config.hpp"
#include "test_support.hpp"

using namespace cscope;
using cscope::testing::TempDir;

TEST(Config, Defaults) {
  const auto c = parse_config("");
  EXPECT_EQ(c.enrichment.lambda, 0.5);
  EXPECT_EQ(c.enrichment.theta, 2u);
  EXPECT_EQ(c.enrichment.min_df, 2u);
  EXPECT_EQ(c.search.k1, 1.2);
  EXPECT_EQ(c.search.b, 0.75);
  EXPECT_EQ(c.search.delta, 0.5);
  EXPECT_EQ(c.search.hops, 1);
  EXPECT_EQ(c.beta, 1.0);
  EXPECT_EQ(c.rate_limit, 1.0);
  EXPECT_FALSE(c.text.stem);
  EXPECT_TRUE(c.warnings.empty());
}

TEST(Config, ParsesEveryKey) {
  const auto c = parse_config(
      "# tuning\n"
      "lambda = 0.25\n"
      "theta=3\n"
      "min_df=4\n"
      "delta=0.7\n"
      "H=2\n"
      "k1=1.5\n"
      "b=0.5\n"
      "beta=0.5\n"
      "r=20\n"
      "stem=yes\n"
      "stopwords=lists/stop.txt\n"
      "abbreviations=/abs/abbr.txt\n"
      "source_dir=src\n"
      "text_extract_command=pdftotext -q\n",
      "/base");
  EXPECT_EQ(c.enrichment.lambda, 0.25);
  EXPECT_EQ(c.enrichment.theta, 3u);
  EXPECT_EQ(c.enrichment.min_df, 4u);
  EXPECT_EQ(c.search.delta, 0.7);
  EXPECT_EQ(c.search.hops, 2);
  EXPECT_EQ(c.search.k1, 1.5);
  EXPECT_EQ(c.search.b, 0.5);
  EXPECT_EQ(c.beta, 0.5);
  EXPECT_EQ(c.rate_limit, 20.0);
  EXPECT_TRUE(c.text.stem);
  EXPECT_EQ(c.stopwords_path, std::filesystem::path("/base/lists/stop.txt"));
  EXPECT_EQ(c.abbreviations_path, std::filesystem::path("/abs/abbr.txt"));
  EXPECT_EQ(c.source_dir, std::filesystem::path("/base/src"));
  EXPECT_EQ(c.text_extract_command, "pdftotext -q");
}

TEST(Config, BetaOutsideDocumentedRangeWarns) {
  const auto c = parse_config("beta=2\n");
  EXPECT_EQ(c.beta, 2.0);
  ASSERT_EQ(c.warnings.size(), 1u);
}

TEST(Config, Rejections) {
  for (const char* bad : {"lambda=1.5", "nonsense=1", "k1=abc", "stem=maybe", "rate_limit=0",
                          "beta=-1", "hops=-1", "just a line"}) {
    EXPECT_CSCOPE_ERROR(parse_config(bad), ErrorCode::ParseError);
  }
}

TEST(Config, LoadResolvesAgainstFileDirectory) {
  TempDir dir;
  std::ofstream(dir.path() / "stop.txt") << "the\nzebra\n";
  std::ofstream(dir.path() / "cscope.conf") << "stopwords=stop.txt\n";
  const auto c = load_config(dir.path() / "cscope.conf");
  EXPECT_EQ(c.stopwords_path, dir.path() / "stop.txt");
  EXPECT_TRUE(c.make_text_processor().is_stopword("zebra"));
  EXPECT_CSCOPE_ERROR(load_config(dir.path() / "absent.conf"), ErrorCode::IoFailure);
}
