#include "cscope/ontology.hpp"

#include <algorithm>

#include "cscope/error.hpp"

namespace cscope {
namespace {

bool is_blank(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

ConceptNode concept_from_json(const ordered_json& j) {
  ConceptNode node;
  node.id = ConceptId(j.at("id").get<std::uint64_t>());
  node.label = j.at("label").get<std::string>();
  for (const auto& s : j.at("synonyms")) node.synonyms.insert(s.get<std::string>());
  node.status = parse_concept_status(j.at("status").get<std::string>());
  const auto& from = j.at("created_from");
  if (from.at("kind") == "extraction") {
    node.created_from.kind = Provenance::Kind::extraction;
    if (from.contains("source_doc") && !from["source_doc"].is_null()) {
      node.created_from.source_doc = DocId(from["source_doc"].get<std::uint64_t>());
    }
  }
  return node;
}

ordered_json concept_to_json(const ConceptNode& node) {
  ordered_json j;
  j["kind"] = "concept";
  j["id"] = node.id.value;
  j["label"] = node.label;
  j["synonyms"] = ordered_json::array();
  for (const auto& s : node.synonyms) j["synonyms"].push_back(s);
  j["status"] = to_string(node.status);
  ordered_json from;
  if (node.created_from.kind == Provenance::Kind::extraction) {
    from["kind"] = "extraction";
    from["source_doc"] = node.created_from.source_doc
                             ? ordered_json(node.created_from.source_doc->value)
                             : ordered_json(nullptr);
  } else {
    from["kind"] = "manual";
  }
  j["created_from"] = std::move(from);
  return j;
}

ordered_json relation_to_json(const Relation& r) {
  ordered_json j;
  j["kind"] = "relation";
  j["src"] = r.src.value;
  j["dst"] = r.dst.value;
  j["rel_type"] = to_string(r.type);
  j["weight"] = r.weight;
  j["evidence_count"] = r.evidence_count;
  return j;
}

Relation relation_from_json(const ordered_json& j) {
  Relation r;
  r.src = ConceptId(j.at("src").get<std::uint64_t>());
  r.dst = ConceptId(j.at("dst").get<std::uint64_t>());
  r.type = parse_relation_type(j.at("rel_type").get<std::string>());
  r.weight = j.at("weight").get<double>();
  r.evidence_count = j.at("evidence_count").get<std::uint64_t>();
  return r;
}

}  // namespace

std::string_view to_string(ConceptStatus status) {
  switch (status) {
    case ConceptStatus::approved: return "approved";
    case ConceptStatus::candidate: return "candidate";
    case ConceptStatus::rejected: return "rejected";
  }
  return "candidate";
}

std::string_view to_string(RelationType type) {
  switch (type) {
    case RelationType::related_to: return "related_to";
    case RelationType::is_a: return "is_a";
    case RelationType::treats: return "treats";
    case RelationType::symptom_of: return "symptom_of";
    case RelationType::comorbidity_of: return "comorbidity_of";
  }
  return "related_to";
}

ConceptStatus parse_concept_status(std::string_view s) {
  if (s == "approved") return ConceptStatus::approved;
  if (s == "candidate") return ConceptStatus::candidate;
  if (s == "rejected") return ConceptStatus::rejected;
  throw Error(ErrorCode::InvalidArgument, "unknown concept status: " + std::string(s));
}

RelationType parse_relation_type(std::string_view s) {
  if (s == "related_to") return RelationType::related_to;
  if (s == "is_a") return RelationType::is_a;
  if (s == "treats") return RelationType::treats;
  if (s == "symptom_of") return RelationType::symptom_of;
  if (s == "comorbidity_of") return RelationType::comorbidity_of;
  throw Error(ErrorCode::InvalidArgument, "unknown relation type: " + std::string(s));
}

double relation_strength(std::uint64_t evidence) {
  return static_cast<double>(evidence) / (static_cast<double>(evidence) + 5.0);
}

std::string normalize_label(std::string_view label) {
  std::size_t b = 0;
  std::size_t e = label.size();
  while (b < e && is_blank(static_cast<unsigned char>(label[b]))) ++b;
  while (e > b && is_blank(static_cast<unsigned char>(label[e - 1]))) --e;
  std::string out(label.substr(b, e - b));
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 0x20);
  }
  return out;
}

void Ontology::index_names(const ConceptNode& node) {
  live_names_[node.label] = node.id;
  for (const auto& s : node.synonyms) live_names_[s] = node.id;
}

void Ontology::unindex_names(const ConceptNode& node) {
  live_names_.erase(node.label);
  for (const auto& s : node.synonyms) live_names_.erase(s);
}

ConceptId Ontology::add_concept(std::string_view label,
                                const std::set<std::string>& synonyms,
                                ConceptStatus status, Provenance provenance) {
  ConceptNode node;
  node.label = normalize_label(label);
  if (node.label.empty()) throw Error(ErrorCode::InvalidLabel, "empty concept label");
  for (const auto& s : synonyms) {
    auto norm = normalize_label(s);
    if (!norm.empty() && norm != node.label) node.synonyms.insert(std::move(norm));
  }
  if (status != ConceptStatus::rejected) {
    auto collides = [&](const std::string& name) {
      return live_names_.contains(name);
    };
    if (collides(node.label)) {
      throw Error(ErrorCode::DuplicateLabel, "label already in use: " + node.label);
    }
    for (const auto& s : node.synonyms) {
      if (collides(s)) throw Error(ErrorCode::DuplicateLabel, "synonym already in use: " + s);
    }
  }
  node.id = ConceptId(next_id_++);
  node.status = status;
  node.created_from = provenance;
  if (status == ConceptStatus::rejected) {
    tombstones_.insert(node.label);
    tombstones_.insert(node.synonyms.begin(), node.synonyms.end());
  } else {
    index_names(node);
  }
  const auto id = node.id;
  concepts_.emplace(id, std::move(node));
  ++version_;
  return id;
}

void Ontology::approve(ConceptId id) {
  auto it = concepts_.find(id);
  if (it == concepts_.end()) throw Error(ErrorCode::UnknownConcept, "unknown concept " + id.str());
  if (it->second.status != ConceptStatus::candidate) {
    throw Error(ErrorCode::InvalidTransition, "only candidate concepts can be approved");
  }
  it->second.status = ConceptStatus::approved;
  ++version_;
}

void Ontology::reject(ConceptId id) {
  auto it = concepts_.find(id);
  if (it == concepts_.end()) throw Error(ErrorCode::UnknownConcept, "unknown concept " + id.str());
  if (it->second.status != ConceptStatus::candidate) {
    throw Error(ErrorCode::InvalidTransition, "only candidate concepts can be rejected");
  }
  it->second.status = ConceptStatus::rejected;
  unindex_names(it->second);
  tombstones_.insert(it->second.label);
  tombstones_.insert(it->second.synonyms.begin(), it->second.synonyms.end());
  ++version_;
}

Relation Ontology::add_relation(ConceptId src, ConceptId dst, RelationType type,
                                double weight, std::uint64_t evidence_count) {
  for (auto id : {src, dst}) {
    const auto* node = find(id);
    if (node == nullptr || node->status == ConceptStatus::rejected) {
      throw Error(ErrorCode::UnknownConcept, "unknown concept " + id.str());
    }
  }
  if (src == dst) throw Error(ErrorCode::SelfLoop, "relation endpoints coincide");
  if (!(weight > 0.0 && weight <= 1.0)) {
    throw Error(ErrorCode::InvalidWeight, "relation weight must lie in (0,1]");
  }
  const RelationKey key{src, dst, type};
  auto it = relations_.find(key);
  if (it == relations_.end()) {
    it = relations_.emplace(key, Relation{src, dst, type, weight, evidence_count}).first;
  } else {
    auto& r = it->second;
    r.evidence_count += evidence_count;
    // Evidence-free (manual) edges keep the latest asserted weight.
    r.weight = r.evidence_count > 0 ? relation_strength(r.evidence_count) : weight;
  }
  ++version_;
  return it->second;
}

std::vector<ConceptNode> Ontology::find_concepts(std::string_view term) const {
  auto it = live_names_.find(normalize_label(term));
  if (it == live_names_.end()) return {};
  return {concepts_.at(it->second)};
}

std::map<ConceptId, std::map<ConceptId, double>> Ontology::approved_adjacency() const {
  std::map<ConceptId, std::map<ConceptId, double>> adjacency;
  for (const auto& [key, r] : relations_) {
    if (concepts_.at(r.src).status != ConceptStatus::approved ||
        concepts_.at(r.dst).status != ConceptStatus::approved) {
      continue;
    }
    auto& ab = adjacency[r.src][r.dst];
    ab = std::max(ab, r.weight);
    auto& ba = adjacency[r.dst][r.src];
    ba = std::max(ba, r.weight);
  }
  return adjacency;
}

std::vector<Neighbor> Ontology::neighbors(ConceptId src, int max_hops,
                                          double min_weight) const {
  if (!contains(src)) throw Error(ErrorCode::UnknownConcept, "unknown concept " + src.str());
  if (max_hops < 0) throw Error(ErrorCode::InvalidArgument, "max_hops must be >= 0");

  auto usable = [&](ConceptId id) {
    return id == src || concepts_.at(id).status == ConceptStatus::approved;
  };
  // Undirected adjacency; parallel typed edges collapse to the strongest.
  std::map<ConceptId, std::map<ConceptId, double>> adjacency;
  for (const auto& [key, r] : relations_) {
    if (!usable(r.src) || !usable(r.dst)) continue;
    auto& ab = adjacency[r.src][r.dst];
    ab = std::max(ab, r.weight);
    auto& ba = adjacency[r.dst][r.src];
    ba = std::max(ba, r.weight);
  }

  // Hop-bounded relaxation. Weights are <= 1, so revisiting a node never
  // beats the simple path and this equals the best simple path.
  std::map<ConceptId, double> best{{src, 1.0}};
  for (int hop = 0; hop < max_hops; ++hop) {
    auto next = best;
    for (const auto& [u, wu] : best) {
      auto adj = adjacency.find(u);
      if (adj == adjacency.end()) continue;
      for (const auto& [v, w] : adj->second) {
        auto& slot = next[v];
        slot = std::max(slot, wu * w);
      }
    }
    if (next == best) break;
    best = std::move(next);
  }

  std::vector<Neighbor> out;
  for (const auto& [id, weight] : best) {
    if (id == src || weight < min_weight || weight <= 0.0) continue;
    out.push_back({concepts_.at(id), weight});
  }
  std::sort(out.begin(), out.end(), [](const Neighbor& a, const Neighbor& b) {
    if (a.path_weight != b.path_weight) return a.path_weight > b.path_weight;
    return a.concept_node.id < b.concept_node.id;
  });
  return out;
}

const ConceptNode& Ontology::concept_node(ConceptId id) const {
  const auto* node = find(id);
  if (node == nullptr) throw Error(ErrorCode::UnknownConcept, "unknown concept " + id.str());
  return *node;
}

const ConceptNode* Ontology::find(ConceptId id) const {
  auto it = concepts_.find(id);
  return it == concepts_.end() ? nullptr : &it->second;
}

bool Ontology::is_live_name(std::string_view name) const {
  return live_names_.contains(std::string(name));
}

bool Ontology::is_tombstoned_name(std::string_view name) const {
  return tombstones_.contains(name);
}

std::vector<ConceptNode> Ontology::concepts() const {
  std::vector<ConceptNode> out;
  out.reserve(concepts_.size());
  for (const auto& [id, node] : concepts_) out.push_back(node);
  return out;
}

std::vector<ConceptNode> Ontology::approved() const {
  std::vector<ConceptNode> out;
  for (const auto& [id, node] : concepts_) {
    if (node.status == ConceptStatus::approved) out.push_back(node);
  }
  return out;
}

std::size_t Ontology::approved_count() const {
  return static_cast<std::size_t>(std::count_if(
      concepts_.begin(), concepts_.end(),
      [](const auto& kv) { return kv.second.status == ConceptStatus::approved; }));
}

std::vector<Relation> Ontology::relations() const {
  std::vector<Relation> out;
  out.reserve(relations_.size());
  for (const auto& [key, r] : relations_) out.push_back(r);
  return out;
}

std::vector<Relation> Ontology::relations_of(ConceptId id) const {
  std::vector<Relation> out;
  for (const auto& [key, r] : relations_) {
    if (r.src == id || r.dst == id) out.push_back(r);
  }
  return out;
}

void Ontology::check_integrity() const {
  for (const auto& [key, r] : relations_) {
    if (!contains(r.src) || !contains(r.dst)) {
      throw Error(ErrorCode::CorruptSnapshot, "relation endpoint does not resolve");
    }
  }
}

OntologySnapshot Ontology::snapshot() const {
  return {concepts(), relations(), version_};
}

Ontology Ontology::from_snapshot(const OntologySnapshot& snapshot) {
  Ontology o;
  for (const auto& node : snapshot.concepts) {
    if (node.label.empty() || o.concepts_.contains(node.id)) {
      throw Error(ErrorCode::CorruptSnapshot, "bad concept record " + node.id.str());
    }
    if (node.status == ConceptStatus::rejected) {
      o.tombstones_.insert(node.label);
      o.tombstones_.insert(node.synonyms.begin(), node.synonyms.end());
    } else {
      if (o.live_names_.contains(node.label)) {
        throw Error(ErrorCode::CorruptSnapshot, "duplicate label " + node.label);
      }
      for (const auto& s : node.synonyms) {
        if (o.live_names_.contains(s)) throw Error(ErrorCode::CorruptSnapshot, "duplicate synonym " + s);
      }
      o.index_names(node);
    }
    o.next_id_ = std::max(o.next_id_, node.id.value + 1);
    o.concepts_.emplace(node.id, node);
  }
  for (const auto& r : snapshot.relations) {
    if (r.src == r.dst || !(r.weight > 0.0 && r.weight <= 1.0)) {
      throw Error(ErrorCode::CorruptSnapshot, "bad relation record");
    }
    if (!o.relations_.emplace(RelationKey{r.src, r.dst, r.type}, r).second) {
      throw Error(ErrorCode::CorruptSnapshot, "duplicate relation record");
    }
  }
  o.check_integrity();
  o.version_ = snapshot.version;
  return o;
}

std::vector<ordered_json> snapshot_records(const OntologySnapshot& snapshot) {
  std::vector<ordered_json> records;
  records.reserve(snapshot.concepts.size() + snapshot.relations.size() + 1);
  ordered_json meta;
  meta["kind"] = "meta";
  meta["version"] = snapshot.version;
  records.push_back(std::move(meta));
  for (const auto& c : snapshot.concepts) records.push_back(concept_to_json(c));
  for (const auto& r : snapshot.relations) records.push_back(relation_to_json(r));
  return records;
}

OntologySnapshot snapshot_from_records(const std::vector<ordered_json>& records) {
  OntologySnapshot snapshot;
  try {
    for (const auto& record : records) {
      const auto& kind = record.at("kind");
      if (kind == "meta") {
        snapshot.version = record.at("version").get<std::uint64_t>();
      } else if (kind == "concept") {
        snapshot.concepts.push_back(concept_from_json(record));
      } else if (kind == "relation") {
        snapshot.relations.push_back(relation_from_json(record));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::CorruptSnapshot, std::string("bad ontology record: ") + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::CorruptSnapshot, e.what());
  }
  return snapshot;
}

std::uint64_t save_snapshot(const std::filesystem::path& path,
                            const OntologySnapshot& snapshot) {
  write_checked_jsonl(path, snapshot_records(snapshot));
  return snapshot.version;
}

OntologySnapshot load_snapshot(const std::filesystem::path& path) {
  return snapshot_from_records(read_checked_jsonl(path));
}

}  // namespace cscope
