#include "cscope/textproc.hpp"

#include <algorithm>
#include <fstream>

#include "cscope/error.hpp"

namespace cscope {
namespace {

constexpr const char* kStopwords[] = {
    "a",        "about",     "above",    "after",      "again",   "against",
    "all",      "also",      "am",       "an",         "and",     "any",
    "are",      "as",        "at",       "be",         "because", "been",
    "before",   "being",     "below",    "between",    "both",    "but",
    "by",       "can",       "could",    "did",        "do",      "does",
    "doing",    "down",      "during",   "each",       "either",  "few",
    "for",      "from",      "further",  "had",        "has",     "have",
    "having",   "he",        "her",      "here",       "hers",    "herself",
    "him",      "himself",   "his",      "how",        "however", "i",
    "if",       "in",        "into",     "is",         "it",      "its",
    "itself",   "just",      "may",      "me",         "might",   "more",
    "most",     "must",      "my",       "myself",     "neither", "no",
    "nor",      "not",       "of",       "off",        "on",      "once",
    "only",     "or",        "other",    "our",        "ours",    "ourselves",
    "out",      "over",      "own",      "same",       "shall",   "she",
    "should",   "so",        "some",     "such",       "than",    "that",
    "the",      "their",     "theirs",   "them",       "themselves", "then",
    "there",    "these",     "they",     "this",       "those",   "through",
    "thus",     "to",        "too",      "under",      "until",   "up",
    "upon",     "very",      "was",      "we",         "were",    "what",
    "when",     "where",     "whether",  "which",      "while",   "who",
    "whom",     "why",       "will",     "with",       "within",  "without",
    "would",    "you",       "your",     "yours",      "yourself", "yourselves",
};

constexpr const char* kAbbreviations[] = {
    "dr.", "fig.", "e.g.", "i.e.", "et al.", "vs.", "no.", "vol.",
};

struct CodePoint {
  char32_t value;
  std::size_t length;
};

// Invalid sequences decode as U+FFFD over a single byte.
CodePoint decode(std::string_view s, std::size_t i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) return {b0, 1};
  std::size_t len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return {0xFFFD, 1};
  }
  if (i + len > s.size()) return {0xFFFD, 1};
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) return {0xFFFD, 1};
    cp = (cp << 6) | (b & 0x3F);
  }
  return {cp, len};
}

void encode(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool is_space(char32_t cp) {
  return (cp >= 0x09 && cp <= 0x0D) || cp == 0x20 || cp == 0x85 ||
         cp == 0xA0 || cp == 0x1680 || (cp >= 0x2000 && cp <= 0x200A) ||
         cp == 0x2028 || cp == 0x2029 || cp == 0x202F || cp == 0x205F ||
         cp == 0x3000;
}

bool is_punct(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) ||
           (cp >= 0x5B && cp <= 0x60) || (cp >= 0x7B && cp <= 0x7E);
  }
  if (cp >= 0xA1 && cp <= 0xBF) {
    // ª ² ³ µ ¹ º ¼ ½ ¾ behave like word characters.
    return !(cp == 0xAA || cp == 0xB2 || cp == 0xB3 || cp == 0xB5 ||
             cp == 0xB9 || cp == 0xBA || (cp >= 0xBC && cp <= 0xBE));
  }
  return cp == 0xD7 || cp == 0xF7 || (cp >= 0x2010 && cp <= 0x2027) ||
         (cp >= 0x2030 && cp <= 0x205E) || cp == 0x2212 ||
         (cp >= 0x3001 && cp <= 0x3003) || (cp >= 0x3008 && cp <= 0x3011) ||
         cp == 0xFF0C || cp == 0xFF0E;
}

bool is_word(char32_t cp) { return !is_space(cp) && !is_punct(cp); }

// Punctuation that stays inside a token when flanked by word characters.
bool is_joiner(char32_t cp) {
  return cp == '-' || cp == '\'' || cp == '.' || cp == 0x2010 ||
         cp == 0x2011 || cp == 0x2019;
}

bool is_upper(char32_t cp) {
  return (cp >= 'A' && cp <= 'Z') || (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) ||
         (cp >= 0x391 && cp <= 0x3A9 && cp != 0x3A2) ||
         (cp >= 0x400 && cp <= 0x42F);
}

char32_t to_lower(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
  if (cp >= 0x391 && cp <= 0x3A9 && cp != 0x3A2) return cp + 0x20;
  if (cp >= 0x410 && cp <= 0x42F) return cp + 0x20;
  if (cp >= 0x400 && cp <= 0x40F) return cp + 0x50;
  return cp;
}

std::string lowercase(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    auto cp = decode(s, i);
    encode(to_lower(cp.value), out);
    i += cp.length;
  }
  return out;
}

bool is_closer(char32_t cp) {
  return cp == '"' || cp == '\'' || cp == ')' || cp == ']' || cp == 0x2019 ||
         cp == 0x201D;
}

bool is_opener(char c) {
  return c == '(' || c == '[' || c == '"' || c == '\'';
}

char ascii_lower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c + 0x20) : c;
}

std::vector<std::string> to_vector(const auto& words) {
  return std::vector<std::string>(std::begin(words), std::end(words));
}

}  // namespace

std::string normalize_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\r') {
      out.push_back('\n');
      if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
    } else {
      out.push_back(text[i]);
    }
  }
  std::size_t begin = 0;
  while (begin < out.size()) {
    auto cp = decode(out, begin);
    if (!is_space(cp.value)) break;
    begin += cp.length;
  }
  std::size_t end = out.size();
  while (end > begin) {
    // Step back to the start of the previous code point.
    std::size_t k = end - 1;
    while (k > begin && (static_cast<unsigned char>(out[k]) & 0xC0) == 0x80) --k;
    if (!is_space(decode(out, k).value)) break;
    end = k;
  }
  return out.substr(begin, end - begin);
}

std::vector<std::string> default_stopwords() { return to_vector(kStopwords); }

std::vector<std::string> default_abbreviations() {
  return to_vector(kAbbreviations);
}

std::vector<std::string> load_word_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + path.string());
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    auto entry = normalize_text(line);
    if (entry.empty() || entry.front() == '#') continue;
    words.push_back(lowercase(entry));
  }
  return words;
}

TextProcessor::TextProcessor()
    : TextProcessor(default_stopwords(), default_abbreviations(), {}) {}

TextProcessor::TextProcessor(std::vector<std::string> stopwords,
                             std::vector<std::string> abbreviations,
                             TextOptions options)
    : stopwords_(std::make_move_iterator(stopwords.begin()),
                 std::make_move_iterator(stopwords.end())),
      abbreviations_(std::move(abbreviations)),
      options_(options) {}

bool TextProcessor::ends_with_abbreviation(std::string_view text,
                                           std::size_t dot) const {
  const std::size_t stop = dot + 1;
  for (const auto& abbr : abbreviations_) {
    if (abbr.size() > stop) continue;
    const std::size_t begin = stop - abbr.size();
    bool same = true;
    for (std::size_t k = 0; k < abbr.size() && same; ++k) {
      same = ascii_lower(text[begin + k]) == abbr[k];
    }
    if (!same) continue;
    if (begin == 0) return true;
    const char before = text[begin - 1];
    if (before == ' ' || before == '\t' || before == '\n' || is_opener(before)) {
      return true;
    }
  }
  return false;
}

std::vector<SentenceSpan> TextProcessor::split_sentences(
    std::string_view text) const {
  std::vector<SentenceSpan> spans;
  std::size_t start = 0;
  while (start < text.size()) {
    auto cp = decode(text, start);
    if (!is_space(cp.value)) break;
    start += cp.length;
  }
  if (start == text.size()) return spans;

  std::size_t i = start;
  while (i < text.size()) {
    const char c = text[i];
    if (c != '.' && c != '!' && c != '?') {
      i += decode(text, i).length;
      continue;
    }
    std::size_t term_end = i + 1;
    while (term_end < text.size()) {
      auto cp = decode(text, term_end);
      if (!is_closer(cp.value)) break;
      term_end += cp.length;
    }
    std::size_t next = term_end;
    while (next < text.size()) {
      auto cp = decode(text, next);
      if (!is_space(cp.value)) break;
      next += cp.length;
    }
    const bool has_space = next > term_end;
    if (has_space && next < text.size()) {
      auto cp = decode(text, next);
      const bool starts_sentence =
          is_upper(cp.value) || (cp.value >= '0' && cp.value <= '9');
      if (starts_sentence && !(c == '.' && ends_with_abbreviation(text, i))) {
        spans.push_back({start, term_end, spans.size()});
        start = next;
        i = next;
        continue;
      }
    }
    i = term_end;
  }

  std::size_t end = text.size();
  while (end > start) {
    std::size_t k = end - 1;
    while (k > start && (static_cast<unsigned char>(text[k]) & 0xC0) == 0x80) --k;
    if (!is_space(decode(text, k).value)) break;
    end = k;
  }
  if (end > start) spans.push_back({start, end, spans.size()});
  return spans;
}

std::vector<Token> TextProcessor::tokenize(std::string_view sentence,
                                           std::size_t sentence_index,
                                           std::size_t first_position) const {
  std::vector<Token> tokens;
  std::size_t position = first_position;
  std::size_t begin = std::string_view::npos;

  auto flush = [&](std::size_t end) {
    if (begin == std::string_view::npos) return;
    Token token;
    token.surface = std::string(sentence.substr(begin, end - begin));
    token.norm = lowercase(token.surface);
    if (options_.stem) token.norm = stem_suffix(token.norm);
    begin = std::string_view::npos;
    if (token.norm.empty()) return;
    token.sentence_index = sentence_index;
    token.position = position++;
    tokens.push_back(std::move(token));
  };

  bool prev_word = false;
  for (std::size_t i = 0; i < sentence.size();) {
    const auto cp = decode(sentence, i);
    if (is_word(cp.value)) {
      if (begin == std::string_view::npos) begin = i;
      prev_word = true;
    } else if (is_joiner(cp.value) && prev_word &&
               i + cp.length < sentence.size() &&
               is_word(decode(sentence, i + cp.length).value)) {
      // e.g. "rule-based", "3.5", "patient's"
      prev_word = false;
    } else {
      flush(i);
      prev_word = false;
    }
    i += cp.length;
  }
  flush(sentence.size());
  return tokens;
}

bool TextProcessor::is_stopword(std::string_view norm) const {
  return norm.empty() || stopwords_.contains(norm);
}

ProcessedText TextProcessor::process(std::string_view text) const {
  ProcessedText out;
  out.text = normalize_text(text);
  out.sentences = split_sentences(out.text);
  std::size_t position = 0;
  for (const auto& span : out.sentences) {
    auto tokens = tokenize(
        std::string_view(out.text).substr(span.start, span.end - span.start),
        span.index, position);
    position += tokens.size();
    for (auto& t : tokens) out.tokens.push_back(std::move(t));
  }
  return out;
}

std::vector<std::string> TextProcessor::norms(std::string_view text) const {
  std::vector<std::string> out;
  for (auto& token : tokenize(text)) out.push_back(std::move(token.norm));
  return out;
}

bool is_numeric_token(std::string_view norm) {
  bool digit = false;
  for (char c : norm) {
    if (c >= '0' && c <= '9') {
      digit = true;
    } else if (c != '.' && c != ',' && c != '-' && c != '/') {
      return false;
    }
  }
  return digit;
}

std::string stem_suffix(std::string_view norm) {
  auto strip = [&](std::string_view suffix) {
    return norm.size() >= suffix.size() + 3 && norm.ends_with(suffix);
  };
  if (strip("ing")) return std::string(norm.substr(0, norm.size() - 3));
  if (strip("ed")) return std::string(norm.substr(0, norm.size() - 2));
  if (strip("es")) return std::string(norm.substr(0, norm.size() - 2));
  if (strip("s") && !norm.ends_with("ss")) {
    return std::string(norm.substr(0, norm.size() - 1));
  }
  return std::string(norm);
}

}  // namespace cscope
