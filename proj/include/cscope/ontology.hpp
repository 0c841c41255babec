#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "cscope/ids.hpp"
#include "cscope/jsonl.hpp"

namespace cscope {

enum class ConceptStatus { approved, candidate, rejected };

enum class RelationType { related_to, is_a, treats, symptom_of, comorbidity_of };

std::string_view to_string(ConceptStatus status);
std::string_view to_string(RelationType type);
ConceptStatus parse_concept_status(std::string_view s);
RelationType parse_relation_type(std::string_view s);

struct Provenance {
  enum class Kind { manual, extraction };
  Kind kind = Kind::manual;
  std::optional<DocId> source_doc;

  static Provenance manual() { return {}; }
  static Provenance extraction(std::optional<DocId> doc) {
    return {Kind::extraction, doc};
  }

  bool operator==(const Provenance&) const = default;
};

struct ConceptNode {
  ConceptId id;
  std::string label;
  std::set<std::string> synonyms;
  ConceptStatus status = ConceptStatus::candidate;
  Provenance created_from;

  bool operator==(const ConceptNode&) const = default;
};

struct Relation {
  ConceptId src;
  ConceptId dst;
  RelationType type = RelationType::related_to;
  double weight = 1.0;
  std::uint64_t evidence_count = 0;

  bool operator==(const Relation&) const = default;
};

struct OntologySnapshot {
  std::vector<ConceptNode> concepts;  // ascending id
  std::vector<Relation> relations;    // ascending (src, dst, type)
  std::uint64_t version = 0;

  bool operator==(const OntologySnapshot&) const = default;
};

struct Neighbor {
  ConceptNode concept_node;
  double path_weight = 0.0;
};

// Weight assigned to a relation backed by `evidence` co-occurring sentences.
double relation_strength(std::uint64_t evidence);

// Lowercase, trimmed.
std::string normalize_label(std::string_view label);

// Weighted concept graph. Value type: copying yields an independent graph,
// which the engine uses to publish immutable views to readers.
class Ontology {
 public:
  Ontology() = default;

  // Throws InvalidLabel, DuplicateLabel.
  ConceptId add_concept(std::string_view label,
                        const std::set<std::string>& synonyms,
                        ConceptStatus status,
                        Provenance provenance = Provenance::manual());

  // candidate -> approved / candidate -> rejected. Throws InvalidTransition.
  void approve(ConceptId id);
  void reject(ConceptId id);

  // Upserts on (src, dst, type). Throws UnknownConcept, SelfLoop,
  // InvalidWeight.
  Relation add_relation(ConceptId src, ConceptId dst, RelationType type,
                        double weight, std::uint64_t evidence_count);

  // Case-insensitive exact match on label or synonym, non-rejected only.
  std::vector<ConceptNode> find_concepts(std::string_view term) const;

  // Max-product paths of at most `max_hops` edges through approved
  // concepts. Edges are traversed in both directions. Sorted by descending
  // path weight, then id.
  std::vector<Neighbor> neighbors(ConceptId src, int max_hops,
                                  double min_weight) const;

  const ConceptNode& concept_node(ConceptId id) const;  // throws UnknownConcept
  const ConceptNode* find(ConceptId id) const;
  bool contains(ConceptId id) const { return concepts_.contains(id); }

  // True if `name` is a label or synonym of a non-rejected concept.
  bool is_live_name(std::string_view name) const;
  // True if `name` belongs to a rejected (tombstoned) concept.
  bool is_tombstoned_name(std::string_view name) const;

  std::vector<ConceptNode> concepts() const;
  std::vector<ConceptNode> approved() const;
  std::size_t approved_count() const;
  std::vector<Relation> relations() const;
  std::vector<Relation> relations_of(ConceptId id) const;

  // Undirected adjacency over approved concepts; parallel typed edges
  // collapse to the strongest weight.
  std::map<ConceptId, std::map<ConceptId, double>> approved_adjacency() const;

  std::uint64_t version() const { return version_; }

  // Throws CorruptSnapshot if an endpoint is dangling.
  void check_integrity() const;

  OntologySnapshot snapshot() const;
  // Validates uniqueness and integrity. Throws CorruptSnapshot.
  static Ontology from_snapshot(const OntologySnapshot& snapshot);

 private:
  using RelationKey = std::tuple<ConceptId, ConceptId, RelationType>;

  void index_names(const ConceptNode& node);
  void unindex_names(const ConceptNode& node);

  std::map<ConceptId, ConceptNode> concepts_;
  std::map<RelationKey, Relation> relations_;
  std::unordered_map<std::string, ConceptId> live_names_;
  std::set<std::string, std::less<>> tombstones_;
  std::uint64_t next_id_ = 1;
  std::uint64_t version_ = 0;
};

std::vector<ordered_json> snapshot_records(const OntologySnapshot& snapshot);
// Records of other kinds are ignored.
OntologySnapshot snapshot_from_records(const std::vector<ordered_json>& records);

// Returns the saved version. Throws IoFailure.
std::uint64_t save_snapshot(const std::filesystem::path& path,
                            const OntologySnapshot& snapshot);
// Throws IoFailure, CorruptSnapshot.
OntologySnapshot load_snapshot(const std::filesystem::path& path);

}  // namespace cscope
