#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cscope/ids.hpp"
#include "cscope/jsonl.hpp"
#include "cscope/ontology.hpp"
#include "cscope/textproc.hpp"

namespace cscope {

struct EnrichmentConfig {
  double lambda = 0.5;       // constant share of the correspondence weight
  std::uint64_t theta = 2;   // co-occurring sentences needed for an edge
  std::uint64_t min_df = 2;
  std::size_t max_ngram = 3;
};

struct ConceptOccurrence {
  DocId doc;
  ConceptId concept_id;
  std::size_t sentence_index = 0;        // first sentence with a match
  std::vector<std::size_t> sentences;    // sentence of every match
  std::uint32_t tf = 0;

  bool operator==(const ConceptOccurrence&) const = default;
};

// A gazetteer hit over a token sequence: tokens [start, start + length).
struct GazetteerMatch {
  std::size_t start = 0;
  std::size_t length = 0;
  ConceptId concept_id;

  bool operator==(const GazetteerMatch&) const = default;
};

// Dictionary of approved labels and synonyms as norm sequences.
class Gazetteer {
 public:
  Gazetteer() = default;
  Gazetteer(const Ontology& ontology, const TextProcessor& text);

  // Adds one entry; on a clash of norm sequences the lower concept id wins.
  void add(const std::vector<std::string>& norms, ConceptId id);

  // Greedy longest match, left to right, non-overlapping.
  std::vector<GazetteerMatch> match(std::span<const std::string> norms) const;

  bool empty() const { return root_.children.empty(); }

 private:
  struct Node {
    std::map<std::string, Node, std::less<>> children;
    std::optional<ConceptId> concept_id;
  };
  Node root_;
};

std::vector<ConceptOccurrence> match_concepts(DocId doc,
                                              std::span<const Token> tokens,
                                              const Gazetteer& gazetteer);

// Convenience: builds the gazetteer from the ontology's approved concepts.
std::vector<ConceptOccurrence> match_concepts(DocId doc,
                                              std::span<const Token> tokens,
                                              const Ontology& ontology,
                                              const TextProcessor& text);

// Per-sentence view of a document used for candidate statistics.
struct SentenceProfile {
  std::vector<std::string> norms;
  std::set<ConceptId> concepts;  // approved concepts matched in the sentence
};

struct DocumentProfile {
  DocId doc;
  std::vector<SentenceProfile> sentences;
};

DocumentProfile build_profile(DocId doc, std::span<const Token> tokens,
                              const Gazetteer& gazetteer);

enum class CandidateStatus { pending, accepted, rejected };

std::string_view to_string(CandidateStatus status);
CandidateStatus parse_candidate_status(std::string_view s);

struct CandidateConcept {
  std::string term;
  std::uint64_t df = 0;
  double weight = 0.0;
  double cooc = 0.0;  // fraction of approved concepts co-occurring
  std::set<ConceptId> cooccurring_approved;
  CandidateStatus status = CandidateStatus::pending;
  std::set<DocId> source_docs;

  bool operator==(const CandidateConcept&) const = default;
};

// weight = (df / D) * (lambda + (1 - lambda) * cooc)
double score_candidate(std::uint64_t df, std::uint64_t doc_count, double cooc,
                       double lambda);

// Returns the eligible candidate n-grams of a sentence (n <= max_n): no
// stopword at either end and no numeric-only token.
std::vector<std::string> sentence_ngrams(std::span<const std::string> norms,
                                         const TextProcessor& text,
                                         std::size_t max_n);

class CandidateQueue;

// Pending candidates over the corpus profiles, sorted by term.
std::vector<CandidateConcept> extract_candidates(
    std::span<const DocumentProfile> corpus, const Ontology& ontology,
    const CandidateQueue& queue, const TextProcessor& text,
    const EnrichmentConfig& config);

// Number of sentences in which `term` and each approved concept co-occur.
std::map<ConceptId, std::uint64_t> cooccurrence_counts(
    std::string_view term, std::span<const DocumentProfile> corpus);

class CandidateQueue {
 public:
  // Replaces every pending entry; resolved entries are kept as tombstones.
  void refresh(std::vector<CandidateConcept> pending);

  // Pending only, weight descending, ties by term.
  std::vector<CandidateConcept> list_pending() const;
  std::vector<CandidateConcept> all() const;

  const CandidateConcept* find(std::string_view term) const;
  bool is_resolved(std::string_view term) const;

  // Throws UnknownCandidate, AlreadyResolved.
  const CandidateConcept& require_pending(std::string_view term) const;
  void mark(std::string_view term, CandidateStatus status);

  void insert(CandidateConcept candidate);

  bool operator==(const CandidateQueue&) const = default;

 private:
  std::map<std::string, CandidateConcept, std::less<>> entries_;
};

// Promotes a pending candidate: adds an approved concept and a related_to
// edge (weight n/(n+5)) to every approved concept it shares n >= theta
// sentences with. Throws UnknownCandidate, AlreadyResolved, DuplicateLabel.
ConceptId accept_candidate(std::string_view term, CandidateQueue& queue,
                           Ontology& ontology,
                           std::span<const DocumentProfile> corpus,
                           const EnrichmentConfig& config);

// Throws UnknownCandidate, AlreadyResolved.
void reject_candidate(std::string_view term, CandidateQueue& queue);

ordered_json candidate_record(const CandidateConcept& candidate);
CandidateConcept candidate_from_record(const ordered_json& record);

}  // namespace cscope
