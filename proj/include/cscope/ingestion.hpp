#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cscope/error.hpp"
#include "cscope/ids.hpp"
#include "cscope/jsonl.hpp"

namespace cscope {

enum class ContentState { full_text, purged, metadata_only };

std::string_view to_string(ContentState state);
ContentState parse_content_state(std::string_view s);

struct DocumentMetadata {
  std::string title;
  std::string author;
  std::string journal;
  int year = 0;
  std::string volume;
  std::string doi;

  bool operator==(const DocumentMetadata&) const = default;
};

struct DocumentRecord {
  DocId id;
  DocumentMetadata meta;
  ContentState content_state = ContentState::full_text;
  std::string content_hash;  // hex SHA-256 of normalized text; empty if none
  std::string ingest_time;   // ISO-8601 UTC

  bool operator==(const DocumentRecord&) const = default;
};

// Outcome of an ingest attempt: either a new id or the id of the record it
// duplicates.
struct IngestOutcome {
  DocId id;
  bool duplicate = false;

  bool operator==(const IngestOutcome&) const = default;
};

// Keys already ingested ("doi:<doi>" / "sha256:<hash>"). Only grows.
class SeenRegistry {
 public:
  static std::string doi_key(std::string_view doi);
  static std::string hash_key(std::string_view hash);

  // Returns the id recorded for the key.
  std::optional<DocId> lookup(const std::string& key) const;
  void insert(const std::string& key, DocId id);
  std::size_t size() const { return keys_.size(); }
  const std::map<std::string, DocId>& keys() const { return keys_; }

  bool operator==(const SeenRegistry&) const = default;

 private:
  std::map<std::string, DocId> keys_;
};

class DocumentRegistry {
 public:
  // Dedup by DOI first, then content hash. Does not store anything.
  std::optional<DocId> find_duplicate(const DocumentMetadata& meta,
                                      std::string_view content_hash) const;

  // Records a new document and its dedup keys; assigns the next id.
  DocId add(DocumentMetadata meta, ContentState state, std::string content_hash,
            std::string ingest_time);

  const DocumentRecord& get(DocId id) const;  // throws UnknownDocument
  const DocumentRecord* find(DocId id) const;
  void set_state(DocId id, ContentState state);

  std::vector<DocumentRecord> records() const;
  std::size_t size() const { return records_.size(); }
  const SeenRegistry& seen() const { return seen_; }

  std::vector<ordered_json> to_records() const;
  static DocumentRegistry from_records(const std::vector<ordered_json>& records);

  bool operator==(const DocumentRegistry&) const = default;

 private:
  std::map<DocId, DocumentRecord> records_;
  SeenRegistry seen_;
  std::uint64_t next_id_ = 1;
};

struct RemoteDocRef {
  std::string external_id;
  std::string doi;
  std::string title;
  std::string author;
  std::string journal;
  int year = 0;
  std::string volume;
  bool open_access = false;
  std::optional<std::string> content;  // only when open_access

  DocumentMetadata metadata() const;
};

RemoteDocRef remote_ref_from_json(const nlohmann::json& j);
nlohmann::json remote_ref_to_json(const RemoteDocRef& ref);

// Remote literature source. Each call is one request against the remote
// side and is rate limited by the caller.
class SourceClient {
 public:
  virtual ~SourceClient() = default;
  // Listing without content.
  virtual std::vector<RemoteDocRef> search(std::string_view query,
                                           std::size_t limit) = 0;
  // Full reference, including content when open access.
  virtual RemoteDocRef fetch(std::string_view external_id) = 0;
};

// Reads one JSON file per reference from a local directory.
class FixtureSourceClient : public SourceClient {
 public:
  explicit FixtureSourceClient(std::filesystem::path dir);

  std::vector<RemoteDocRef> search(std::string_view query,
                                   std::size_t limit) override;
  RemoteDocRef fetch(std::string_view external_id) override;

  std::size_t request_count() const { return requests_; }

 private:
  std::vector<RemoteDocRef> load_all() const;

  std::filesystem::path dir_;
  std::size_t requests_ = 0;
};

class Clock {
 public:
  using time_point = std::chrono::steady_clock::time_point;
  virtual ~Clock() = default;
  virtual time_point now() = 0;
  virtual void sleep_until(time_point t) = 0;
};

class SteadyClock : public Clock {
 public:
  time_point now() override;
  void sleep_until(time_point t) override;
};

// Clock that only moves when slept on or advanced. For tests.
class ManualClock : public Clock {
 public:
  time_point now() override { return now_; }
  void sleep_until(time_point t) override;
  void advance(std::chrono::nanoseconds d) { now_ += d; }

 private:
  time_point now_{};
};

// Spaces consecutive acquisitions at least 1/rate seconds apart.
class RateLimiter {
 public:
  RateLimiter(double requests_per_second, Clock& clock);

  void acquire();
  const std::vector<Clock::time_point>& history() const { return history_; }

 private:
  std::chrono::nanoseconds interval_;
  Clock& clock_;
  std::optional<Clock::time_point> last_;
  std::vector<Clock::time_point> history_;
};

struct FetchSummary {
  std::size_t fetched = 0;
  std::size_t ingested = 0;  // new records, metadata-only ones included
  std::size_t skipped_dupe = 0;
  std::size_t metadata_only = 0;

  bool operator==(const FetchSummary&) const = default;
};

// Where fetch_remote hands accepted references.
class IngestSink {
 public:
  virtual ~IngestSink() = default;
  virtual bool is_seen(const RemoteDocRef& ref) const = 0;
  // Full-text ingest when content is present, metadata-only otherwise.
  virtual IngestOutcome ingest(const RemoteDocRef& ref) = 0;
};

// Thrown when the client fails mid-run; carries what was committed.
class SourceUnavailableError : public Error {
 public:
  SourceUnavailableError(const std::string& what, FetchSummary partial)
      : Error(ErrorCode::SourceUnavailable, what), partial_(partial) {}
  const FetchSummary& partial() const { return partial_; }

 private:
  FetchSummary partial_;
};

// One search request, then one fetch request per new reference, all through
// the limiter. Seen references are skipped before download.
// Throws Error(InvalidArgument) for limit == 0.
FetchSummary fetch_remote(std::string_view query, std::size_t limit,
                          SourceClient& client, RateLimiter& limiter,
                          IngestSink& sink);

std::string utc_timestamp(std::chrono::system_clock::time_point t);

}  // namespace cscope
