#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cscope/enrichment.hpp"
#include "cscope/ids.hpp"
#include "cscope/ingestion.hpp"
#include "cscope/jsonl.hpp"
#include "cscope/ontology.hpp"
#include "cscope/textproc.hpp"

namespace cscope {

struct Posting {
  DocId doc;
  std::uint32_t tf = 0;

  bool operator==(const Posting&) const = default;
};

// term -> postings sorted by doc id, plus per-document lengths. Lives apart
// from the full text so purged documents stay searchable.
class PostingsIndex {
 public:
  // Replaces any previous entry for `doc`.
  void add_document(DocId doc, std::span<const std::string> norms);
  void add_document(DocId doc, const std::map<std::string, std::uint32_t>& term_tf,
                    std::uint32_t length);
  void remove_document(DocId doc);

  // Term frequencies of one document, recovered from the postings.
  std::map<std::string, std::uint32_t> document_terms(DocId doc) const;

  std::span<const Posting> postings(std::string_view term) const;
  bool contains_document(DocId doc) const { return lengths_.contains(doc); }
  std::uint32_t doc_length(DocId doc) const;
  std::size_t doc_count() const { return lengths_.size(); }
  double average_doc_length() const;
  std::size_t term_count() const { return terms_.size(); }

  std::vector<ordered_json> to_records() const;
  static PostingsIndex from_records(const std::vector<ordered_json>& records);
  std::string serialize() const;  // checked JSONL bytes

  bool operator==(const PostingsIndex&) const = default;

 private:
  std::map<std::string, std::vector<Posting>, std::less<>> terms_;
  std::map<DocId, std::uint32_t> lengths_;
  std::uint64_t total_length_ = 0;
};

// concept -> documents in which it occurs.
class ConceptIndex {
 public:
  // Replaces the occurrences recorded for `doc`.
  void set_document(DocId doc, const std::vector<ConceptOccurrence>& occurrences);

  std::vector<ConceptOccurrence> for_concept(ConceptId id) const;
  std::vector<ConceptOccurrence> for_document(DocId doc) const;
  std::size_t size() const;

  std::vector<ordered_json> to_records() const;
  static ConceptIndex from_records(const std::vector<ordered_json>& records);

  bool operator==(const ConceptIndex&) const = default;

 private:
  std::map<ConceptId, std::map<DocId, ConceptOccurrence>> by_concept_;
};

enum class SearchMode { metadata, concept_based, free_text };

std::string_view to_string(SearchMode mode);
SearchMode parse_search_mode(std::string_view s);

struct MetadataFilters {
  std::optional<std::string> author;   // case-insensitive substring
  std::optional<std::string> journal;  // case-insensitive substring
  std::optional<int> year_from;
  std::optional<int> year_to;
  std::optional<std::string> doi;      // exact

  bool empty() const {
    return !author && !journal && !year_from && !year_to && !doi;
  }
};

struct SearchQuery {
  SearchMode mode = SearchMode::free_text;
  std::string text;
  MetadataFilters filters;
  std::size_t limit = 20;
};

struct SearchResult {
  DocId doc;
  double score = 0.0;
  std::vector<std::pair<ConceptId, double>> matched_concepts;  // concept mode
  std::string doi;
  std::string title;

  bool operator==(const SearchResult&) const = default;
};

struct SearchResponse {
  SearchMode mode = SearchMode::free_text;
  std::vector<SearchResult> results;
  std::vector<std::string> unmatched_tokens;

  bool operator==(const SearchResponse&) const = default;
};

struct SearchConfig {
  double k1 = 1.2;
  double b = 0.75;
  double delta = 0.5;  // activation decay per hop
  int hops = 1;
};

// Read-only state a query runs against.
struct SearchContext {
  const Ontology& ontology;
  const DocumentRegistry& registry;
  const PostingsIndex& index;
  const ConceptIndex& concepts;
  const TextProcessor& text;
  SearchConfig config;
};

// ln((D - df + 0.5) / (df + 0.5) + 1)
double bm25_idf(std::size_t df, std::size_t doc_count);
double bm25_term_score(std::uint32_t tf, std::uint32_t doc_length,
                       double avg_doc_length, double idf, double k1, double b);

// Spreading activation: seeds start at 1.0; each hop through an edge of
// weight w multiplies by w * delta; a concept keeps its best activation.
std::map<ConceptId, double> concept_activation(const Ontology& ontology,
                                               const std::vector<ConceptId>& seeds,
                                               int hops, double delta);

// Throws NoFilter, InvalidArgument.
std::vector<SearchResult> search_metadata(const MetadataFilters& filters,
                                          std::size_t limit,
                                          const DocumentRegistry& registry);
// Throws EmptyQuery, InvalidArgument.
SearchResponse search_concept(std::string_view text, std::size_t limit,
                              const SearchContext& ctx);
SearchResponse search_freetext(std::string_view text, std::size_t limit,
                               const SearchContext& ctx);

SearchResponse search(const SearchQuery& query, const SearchContext& ctx);

// Index over the token streams of full-text documents, with the postings of
// purged documents carried over from `previous`.
PostingsIndex rebuild_index(const DocumentRegistry& registry,
                            const std::function<std::string(DocId)>& load_text,
                            const PostingsIndex& previous,
                            const TextProcessor& text);

}  // namespace cscope
