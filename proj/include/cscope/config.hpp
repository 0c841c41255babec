#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cscope/enrichment.hpp"
#include "cscope/search.hpp"
#include "cscope/textproc.hpp"

namespace cscope {

struct Config {
  EnrichmentConfig enrichment;
  SearchConfig search;
  TextOptions text;
  double beta = 1.0;
  double rate_limit = 1.0;  // requests per second against a remote source
  std::filesystem::path stopwords_path;
  std::filesystem::path abbreviations_path;
  std::filesystem::path source_dir;
  // External command turning non-text files into plain text (file path is
  // appended as the last argument).
  std::string text_extract_command;

  // Non-fatal findings from parsing (e.g. beta outside [0,1]).
  std::vector<std::string> warnings;

  TextProcessor make_text_processor() const;
};

// key=value lines; '#' comments. Keys: lambda theta min_df delta hops k1 b
// beta rate_limit stem stopwords abbreviations source_dir text_extract_command.
// Relative paths resolve against the file's directory.
// Throws ParseError, IoFailure.
Config parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
Config load_config(const std::filesystem::path& path);

}  // namespace cscope
