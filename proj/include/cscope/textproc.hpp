#pragma once

#include <cstddef>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace cscope {

// Byte range [start, end) of one sentence inside normalized document text.
struct SentenceSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  std::size_t index = 0;

  bool operator==(const SentenceSpan&) const = default;
};

struct Token {
  std::string surface;
  std::string norm;
  std::size_t sentence_index = 0;
  std::size_t position = 0;

  bool operator==(const Token&) const = default;
};

struct TextOptions {
  // Suffix stripping (s, es, ed, ing) keeping at least 3 stem characters.
  bool stem = false;
};

// Sentences and tokens of a whole document.
struct ProcessedText {
  std::string text;  // normalized
  std::vector<SentenceSpan> sentences;
  std::vector<Token> tokens;
};

// Line endings folded to LF, leading and trailing whitespace removed.
std::string normalize_text(std::string_view text);

std::vector<std::string> default_stopwords();
std::vector<std::string> default_abbreviations();

// Reads a one-entry-per-line list; blank lines and '#' comments are skipped.
std::vector<std::string> load_word_list(const std::filesystem::path& path);

class TextProcessor {
 public:
  TextProcessor();
  TextProcessor(std::vector<std::string> stopwords,
                std::vector<std::string> abbreviations, TextOptions options);

  // A boundary is '.', '!' or '?' (optionally followed by closing quotes or
  // brackets), then whitespace, then an uppercase letter or digit. A '.' that
  // ends a listed abbreviation is never a boundary.
  std::vector<SentenceSpan> split_sentences(std::string_view text) const;

  std::vector<Token> tokenize(std::string_view sentence,
                              std::size_t sentence_index = 0,
                              std::size_t first_position = 0) const;

  bool is_stopword(std::string_view norm) const;

  // Normalizes, splits and tokenizes; token positions run over the document.
  ProcessedText process(std::string_view text) const;

  // Norms of a free-form string (queries, concept labels).
  std::vector<std::string> norms(std::string_view text) const;

  const TextOptions& options() const { return options_; }

 private:
  bool ends_with_abbreviation(std::string_view text, std::size_t dot) const;

  std::set<std::string, std::less<>> stopwords_;
  std::vector<std::string> abbreviations_;
  TextOptions options_;
};

// Token made only of digits and numeric separators.
bool is_numeric_token(std::string_view norm);

std::string stem_suffix(std::string_view norm);

}  // namespace cscope
