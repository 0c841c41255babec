#pragma once

#include <map>
#include <string>

#include "cscope/engine.hpp"
#include "cscope/error.hpp"
#include "cscope/evaluation.hpp"
#include "cscope/jsonl.hpp"

// JSON shapes shared by the HTTP service, the CLI's --json output and the
// Python bindings.
namespace cscope::api {

ordered_json ok(ordered_json payload);
ordered_json error(ErrorCode code, std::string_view message);
ordered_json error(const Error& e);

ordered_json to_json(const ConceptNode& node);
ordered_json to_json(const Relation& relation);
ordered_json to_json(const Neighbor& neighbor);
ordered_json to_json(std::span<const Neighbor> neighbors);
// Never carries the full text; see document_json for the text field.
ordered_json to_json(const DocumentRecord& record);
ordered_json to_json(const IngestOutcome& outcome);
ordered_json to_json(std::span<const IngestOutcome> outcomes);
ordered_json to_json(const FetchSummary& summary);
ordered_json to_json(const CandidateConcept& candidate);
ordered_json to_json(std::span<const CandidateConcept> candidates);
ordered_json to_json(const SearchResponse& response);
ordered_json to_json(const eval::SystemComparison& comparison);
ordered_json to_json(const SeedSummary& summary);

// Record plus "text" while the full text is still held.
ordered_json document_json(const Engine& engine, DocId id);

// Accepts title, author, journal, year, volume, doi; missing keys stay empty.
DocumentMetadata metadata_from_json(const nlohmann::json& j);

// Query-string style parameters: mode, q, limit, author, journal, year_from,
// year_to, doi. Throws InvalidArgument on malformed numbers or modes.
SearchQuery search_query_from_params(const std::map<std::string, std::string>& params);

// Strict unsigned / double parsing for request parameters.
std::uint64_t parse_uint(std::string_view name, std::string_view value);
double parse_double(std::string_view name, std::string_view value);

}  // namespace cscope::api
