#include "cscope/api.hpp"

#include <charconv>

namespace cscope::api {
namespace {

ordered_json ids_json(const auto& ids) {
  auto out = ordered_json::array();
  for (const auto& id : ids) out.push_back(id.value);
  return out;
}

template <typename T>
ordered_json array_json(std::span<const T> items) {
  auto out = ordered_json::array();
  for (const auto& item : items) out.push_back(to_json(item));
  return out;
}

std::string string_field(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return {};
  if (!it->is_string()) {
    throw Error(ErrorCode::InvalidArgument, std::string(key) + " must be a string");
  }
  return it->get<std::string>();
}

}  // namespace

ordered_json ok(ordered_json payload) {
  ordered_json out;
  out["status"] = "ok";
  out["payload"] = std::move(payload);
  return out;
}

ordered_json error(ErrorCode code, std::string_view message) {
  ordered_json out;
  out["status"] = "error";
  out["error_code"] = error_name(code);
  out["message"] = message;
  return out;
}

ordered_json error(const Error& e) { return error(e.code(), e.what()); }

ordered_json to_json(const ConceptNode& node) {
  ordered_json j;
  j["id"] = node.id.value;
  j["label"] = node.label;
  j["synonyms"] = node.synonyms;
  j["status"] = to_string(node.status);
  j["created_from"] =
      node.created_from.kind == Provenance::Kind::manual ? "manual" : "extraction";
  if (node.created_from.source_doc) j["source_doc"] = node.created_from.source_doc->value;
  return j;
}

ordered_json to_json(const Relation& r) {
  ordered_json j;
  j["src"] = r.src.value;
  j["dst"] = r.dst.value;
  j["rel_type"] = to_string(r.type);
  j["weight"] = r.weight;
  j["evidence_count"] = r.evidence_count;
  return j;
}

ordered_json to_json(const Neighbor& n) {
  ordered_json j;
  j["concept"] = to_json(n.concept_node);
  j["path_weight"] = n.path_weight;
  return j;
}

ordered_json to_json(std::span<const Neighbor> neighbors) { return array_json(neighbors); }

ordered_json to_json(const DocumentRecord& r) {
  ordered_json j;
  j["id"] = r.id.value;
  j["doi"] = r.meta.doi;
  j["title"] = r.meta.title;
  j["author"] = r.meta.author;
  j["journal"] = r.meta.journal;
  j["year"] = r.meta.year;
  j["volume"] = r.meta.volume;
  j["content_state"] = to_string(r.content_state);
  j["content_hash"] = r.content_hash;
  j["ingest_time"] = r.ingest_time;
  return j;
}

ordered_json to_json(const IngestOutcome& o) {
  ordered_json j;
  j["id"] = o.id.value;
  j["duplicate"] = o.duplicate;
  return j;
}

ordered_json to_json(std::span<const IngestOutcome> outcomes) { return array_json(outcomes); }

ordered_json to_json(const FetchSummary& s) {
  ordered_json j;
  j["fetched"] = s.fetched;
  j["ingested"] = s.ingested;
  j["skipped_dupe"] = s.skipped_dupe;
  j["metadata_only"] = s.metadata_only;
  return j;
}

ordered_json to_json(const CandidateConcept& c) {
  ordered_json j;
  j["term"] = c.term;
  j["df"] = c.df;
  j["weight"] = c.weight;
  j["cooc"] = c.cooc;
  j["cooccurring_approved"] = ids_json(c.cooccurring_approved);
  j["status"] = to_string(c.status);
  j["source_docs"] = ids_json(c.source_docs);
  return j;
}

ordered_json to_json(std::span<const CandidateConcept> candidates) {
  return array_json(candidates);
}

ordered_json to_json(const SearchResponse& response) {
  ordered_json j;
  j["mode"] = to_string(response.mode);
  auto results = ordered_json::array();
  for (const auto& r : response.results) {
    ordered_json item;
    item["doc"] = r.doc.value;
    item["score"] = r.score;
    item["doi"] = r.doi;
    item["title"] = r.title;
    if (response.mode == SearchMode::concept_based) {
      auto matched = ordered_json::array();
      for (const auto& [id, act] : r.matched_concepts) {
        matched.push_back({{"concept", id.value}, {"activation", act}});
      }
      item["matched_concepts"] = std::move(matched);
    }
    results.push_back(std::move(item));
  }
  j["results"] = std::move(results);
  j["unmatched_tokens"] = response.unmatched_tokens;
  return j;
}

ordered_json to_json(const eval::SystemComparison& c) {
  ordered_json j;
  j["system_a"] = c.system_a;
  j["system_b"] = c.system_b;
  j["beta"] = c.beta;
  auto rows = ordered_json::array();
  for (const auto& row : c.rows) {
    rows.push_back({{"G", row.total_relevant}, {"f_a", row.f_a}, {"f_b", row.f_b}});
  }
  j["rows"] = std::move(rows);
  return j;
}

ordered_json to_json(const SeedSummary& s) {
  ordered_json j;
  j["concepts_added"] = s.concepts_added;
  j["concepts_skipped"] = s.concepts_skipped;
  j["relations_added"] = s.relations_added;
  return j;
}

ordered_json document_json(const Engine& engine, DocId id) {
  const auto record = engine.document(id);
  auto j = to_json(record);
  if (record.content_state == ContentState::full_text) j["text"] = engine.full_text(id);
  return j;
}

DocumentMetadata metadata_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "metadata must be an object");
  DocumentMetadata meta;
  meta.title = string_field(j, "title");
  meta.author = string_field(j, "author");
  meta.journal = string_field(j, "journal");
  meta.volume = string_field(j, "volume");
  meta.doi = string_field(j, "doi");
  if (auto it = j.find("year"); it != j.end() && !it->is_null()) {
    if (it->is_number_integer()) {
      meta.year = it->get<int>();
    } else if (it->is_string()) {
      meta.year = static_cast<int>(parse_uint("year", it->get<std::string>()));
    } else {
      throw Error(ErrorCode::InvalidArgument, "year must be an integer");
    }
  }
  return meta;
}

std::uint64_t parse_uint(std::string_view name, std::string_view value) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (value.empty() || ec != std::errc() || ptr != value.data() + value.size()) {
    throw Error(ErrorCode::InvalidArgument,
                std::string(name) + " must be a non-negative integer, got '" +
                    std::string(value) + "'");
  }
  return out;
}

double parse_double(std::string_view name, std::string_view value) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (value.empty() || ec != std::errc() || ptr != value.data() + value.size()) {
    throw Error(ErrorCode::InvalidArgument,
                std::string(name) + " must be a number, got '" + std::string(value) + "'");
  }
  return out;
}

SearchQuery search_query_from_params(const std::map<std::string, std::string>& params) {
  SearchQuery query;
  auto get = [&](const char* key) -> const std::string* {
    auto it = params.find(key);
    return it == params.end() ? nullptr : &it->second;
  };
  if (auto v = get("mode")) {
    try {
      query.mode = parse_search_mode(*v);
    } catch (const Error&) {
      throw Error(ErrorCode::InvalidArgument, "unknown search mode '" + *v + "'");
    }
  }
  if (auto v = get("q")) query.text = *v;
  if (auto v = get("limit")) query.limit = parse_uint("limit", *v);
  if (auto v = get("author"); v && !v->empty()) query.filters.author = *v;
  if (auto v = get("journal"); v && !v->empty()) query.filters.journal = *v;
  if (auto v = get("doi"); v && !v->empty()) query.filters.doi = *v;
  if (auto v = get("year_from"); v && !v->empty()) {
    query.filters.year_from = static_cast<int>(parse_uint("year_from", *v));
  }
  if (auto v = get("year_to"); v && !v->empty()) {
    query.filters.year_to = static_cast<int>(parse_uint("year_to", *v));
  }
  return query;
}

}  // namespace cscope::api
