#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cscope/config.hpp"
#include "cscope/enrichment.hpp"
#include "cscope/ingestion.hpp"
#include "cscope/ontology.hpp"
#include "cscope/search.hpp"
#include "cscope/textproc.hpp"

namespace cscope {

// Everything a reader can see. Published as an immutable snapshot.
struct EngineState {
  Ontology ontology;
  CandidateQueue queue;
  DocumentRegistry registry;
  PostingsIndex index;
  ConceptIndex concepts;
};

struct IngestRequest {
  std::string text;
  DocumentMetadata meta;
};

struct SeedSummary {
  std::size_t concepts_added = 0;
  std::size_t concepts_skipped = 0;
  std::size_t relations_added = 0;
};

// Store-backed facade over the data directory:
//
//   ontology.jsonl     concepts, relations, candidate queue
//   docs.jsonl         document metadata and the seen registry
//   index.jsonl        postings
//   occurrences.jsonl  concept occurrences
//   content/<id>.txt   normalized full text, deleted on purge
//
// Mutations are serialized through one writer; each builds a new state,
// persists it and then swaps it in, so readers holding view() see either the
// old or the new state and never a partial batch.
class Engine {
 public:
  // Creates the directory layout and empty stores when missing. Idempotent.
  static void init(const std::filesystem::path& data_dir);

  // Throws IoFailure when the directory was never initialized,
  // CorruptSnapshot when a store fails its checksum.
  explicit Engine(std::filesystem::path data_dir, Config config = {});

  std::shared_ptr<const EngineState> view() const;
  const Config& config() const { return config_; }
  const TextProcessor& text() const { return text_; }
  const std::filesystem::path& data_dir() const { return data_dir_; }

  // ontology
  ConceptId add_concept(std::string_view label, const std::set<std::string>& synonyms,
                        ConceptStatus status = ConceptStatus::approved);
  Relation add_relation(ConceptId src, ConceptId dst, RelationType type, double weight,
                        std::uint64_t evidence_count = 0);
  // Lines "label | synonym; synonym" and
  // "relation: src label | dst label | rel_type | weight". Existing labels
  // are skipped, so loading twice is harmless.
  SeedSummary load_seed(const std::filesystem::path& path);
  ConceptNode concept_node(ConceptId id) const;
  std::vector<ConceptNode> find_concepts(std::string_view term) const;
  std::vector<Neighbor> neighbors(ConceptId id, int max_hops, double min_weight) const;

  // ingestion
  IngestOutcome ingest(const IngestRequest& request);
  std::vector<IngestOutcome> ingest_batch(std::span<const IngestRequest> requests);
  FetchSummary fetch(std::string_view query, std::size_t limit, SourceClient& client,
                     Clock& clock);
  void purge(DocId id);
  DocumentRecord document(DocId id) const;
  // Throws Purged once the text is gone, NotFound for metadata-only records.
  std::string full_text(DocId id) const;

  // enrichment
  std::vector<CandidateConcept> extract();
  std::vector<CandidateConcept> list_pending() const;
  std::vector<CandidateConcept> candidates() const;
  ConceptId accept(std::string_view term);
  void reject(std::string_view term);

  // search
  SearchResponse search(const SearchQuery& query) const;
  PostingsIndex rebuild_index();

  std::filesystem::path content_path(DocId id) const;

 private:
  struct Corpus;

  void load();
  void persist(const EngineState& state) const;
  void publish(std::shared_ptr<const EngineState> next);

  template <typename F>
  auto mutate(F&& f);

  Corpus load_corpus(const EngineState& state) const;
  std::vector<DocumentProfile> profiles(const Corpus& corpus, const Ontology& ontology) const;
  void refresh_candidates(EngineState& state, const Corpus& corpus) const;
  void rematch(EngineState& state, const Corpus& corpus) const;
  IngestOutcome ingest_into(EngineState& state, const IngestRequest& request,
                            const Gazetteer& gazetteer,
                            std::vector<std::filesystem::path>& written) const;

  std::filesystem::path data_dir_;
  Config config_;
  TextProcessor text_;

  std::mutex writer_mutex_;
  mutable std::mutex state_mutex_;
  std::shared_ptr<const EngineState> state_;
};

}  // namespace cscope
