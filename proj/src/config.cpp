#include "cscope/config.hpp"

#include <charconv>

#include "cscope/error.hpp"
#include "cscope/evaluation.hpp"
#include "cscope/jsonl.hpp"

namespace cscope {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw Error(ErrorCode::ParseError,
                "config: bad value for " + std::string(key) + ": " + std::string(value));
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "1" || value == "true" || value == "on" || value == "yes") return true;
  if (value == "0" || value == "false" || value == "off" || value == "no") return false;
  throw Error(ErrorCode::ParseError, "config: bad boolean for " + std::string(key));
}

}  // namespace

TextProcessor Config::make_text_processor() const {
  auto stopwords = stopwords_path.empty() ? default_stopwords() : load_word_list(stopwords_path);
  auto abbreviations =
      abbreviations_path.empty() ? default_abbreviations() : load_word_list(abbreviations_path);
  return TextProcessor(std::move(stopwords), std::move(abbreviations), text);
}

Config parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  Config config;
  auto resolve = [&](std::string_view v) {
    std::filesystem::path p{std::string(v)};
    return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  };
  std::size_t line_no = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    auto line = trim(text.substr(0, nl));
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::ParseError, "config line " + std::to_string(line_no) + ": expected key=value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key == "lambda") {
      config.enrichment.lambda = parse_number<double>(key, value);
    } else if (key == "theta") {
      config.enrichment.theta = parse_number<std::uint64_t>(key, value);
    } else if (key == "min_df") {
      config.enrichment.min_df = parse_number<std::uint64_t>(key, value);
    } else if (key == "delta") {
      config.search.delta = parse_number<double>(key, value);
    } else if (key == "hops" || key == "H") {
      config.search.hops = parse_number<int>(key, value);
    } else if (key == "k1") {
      config.search.k1 = parse_number<double>(key, value);
    } else if (key == "b") {
      config.search.b = parse_number<double>(key, value);
    } else if (key == "beta") {
      config.beta = parse_number<double>(key, value);
    } else if (key == "rate_limit" || key == "r") {
      config.rate_limit = parse_number<double>(key, value);
    } else if (key == "stem") {
      config.text.stem = parse_bool(key, value);
    } else if (key == "stopwords") {
      config.stopwords_path = resolve(value);
    } else if (key == "abbreviations") {
      config.abbreviations_path = resolve(value);
    } else if (key == "source_dir") {
      config.source_dir = resolve(value);
    } else if (key == "text_extract_command") {
      config.text_extract_command = std::string(value);
    } else {
      throw Error(ErrorCode::ParseError, "config: unknown key " + std::string(key));
    }
  }
  if (config.enrichment.lambda < 0.0 || config.enrichment.lambda > 1.0) {
    throw Error(ErrorCode::ParseError, "config: lambda must lie in [0,1]");
  }
  if (config.search.hops < 0) throw Error(ErrorCode::ParseError, "config: hops must be >= 0");
  if (config.rate_limit <= 0.0) throw Error(ErrorCode::ParseError, "config: rate_limit must be > 0");
  if (config.beta < 0.0) throw Error(ErrorCode::ParseError, "config: beta must be >= 0");
  if (!eval::beta_in_documented_range(config.beta)) {
    config.warnings.push_back("beta=" + std::to_string(config.beta) +
                              " lies outside the [0,1] weighting range");
  }
  return config;
}

Config load_config(const std::filesystem::path& path) {
  return parse_config(read_file(path), path.parent_path());
}

}  // namespace cscope
