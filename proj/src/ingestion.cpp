#include "cscope/ingestion.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <ctime>
#include <thread>

namespace cscope {
namespace {

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string> query_words(std::string_view query) {
  std::vector<std::string> words;
  std::string current;
  for (char c : query) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '-') {
      current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!current.empty()) {
      words.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

}  // namespace

std::string_view to_string(ContentState state) {
  switch (state) {
    case ContentState::full_text: return "full_text";
    case ContentState::purged: return "purged";
    case ContentState::metadata_only: return "metadata_only";
  }
  return "full_text";
}

ContentState parse_content_state(std::string_view s) {
  if (s == "full_text") return ContentState::full_text;
  if (s == "purged") return ContentState::purged;
  if (s == "metadata_only") return ContentState::metadata_only;
  throw Error(ErrorCode::InvalidArgument, "unknown content state: " + std::string(s));
}

std::string SeenRegistry::doi_key(std::string_view doi) {
  return "doi:" + ascii_lower(doi);
}

std::string SeenRegistry::hash_key(std::string_view hash) {
  return "sha256:" + std::string(hash);
}

std::optional<DocId> SeenRegistry::lookup(const std::string& key) const {
  auto it = keys_.find(key);
  if (it == keys_.end()) return std::nullopt;
  return it->second;
}

void SeenRegistry::insert(const std::string& key, DocId id) {
  keys_.emplace(key, id);
}

std::optional<DocId> DocumentRegistry::find_duplicate(
    const DocumentMetadata& meta, std::string_view content_hash) const {
  if (!meta.doi.empty()) {
    if (auto id = seen_.lookup(SeenRegistry::doi_key(meta.doi))) return id;
  }
  if (!content_hash.empty()) {
    if (auto id = seen_.lookup(SeenRegistry::hash_key(content_hash))) return id;
  }
  return std::nullopt;
}

DocId DocumentRegistry::add(DocumentMetadata meta, ContentState state,
                            std::string content_hash, std::string ingest_time) {
  const DocId id(next_id_++);
  if (!meta.doi.empty()) seen_.insert(SeenRegistry::doi_key(meta.doi), id);
  if (!content_hash.empty()) seen_.insert(SeenRegistry::hash_key(content_hash), id);
  records_.emplace(id, DocumentRecord{id, std::move(meta), state,
                                      std::move(content_hash),
                                      std::move(ingest_time)});
  return id;
}

const DocumentRecord& DocumentRegistry::get(DocId id) const {
  const auto* r = find(id);
  if (r == nullptr) throw Error(ErrorCode::UnknownDocument, "unknown document " + id.str());
  return *r;
}

const DocumentRecord* DocumentRegistry::find(DocId id) const {
  auto it = records_.find(id);
  return it == records_.end() ? nullptr : &it->second;
}

void DocumentRegistry::set_state(DocId id, ContentState state) {
  auto it = records_.find(id);
  if (it == records_.end()) throw Error(ErrorCode::UnknownDocument, "unknown document " + id.str());
  it->second.content_state = state;
}

std::vector<DocumentRecord> DocumentRegistry::records() const {
  std::vector<DocumentRecord> out;
  out.reserve(records_.size());
  for (const auto& [id, r] : records_) out.push_back(r);
  return out;
}

std::vector<ordered_json> DocumentRegistry::to_records() const {
  std::vector<ordered_json> out;
  for (const auto& [id, r] : records_) {
    ordered_json j;
    j["kind"] = "doc";
    j["doc_id"] = id.value;
    j["title"] = r.meta.title;
    j["author"] = r.meta.author;
    j["journal"] = r.meta.journal;
    j["year"] = r.meta.year;
    j["volume"] = r.meta.volume;
    j["doi"] = r.meta.doi;
    j["content_state"] = to_string(r.content_state);
    j["content_hash"] = r.content_hash;
    j["ingest_time"] = r.ingest_time;
    out.push_back(std::move(j));
  }
  for (const auto& [key, id] : seen_.keys()) {
    ordered_json j;
    j["kind"] = "seen";
    j["key"] = key;
    j["doc_id"] = id.value;
    out.push_back(std::move(j));
  }
  return out;
}

DocumentRegistry DocumentRegistry::from_records(const std::vector<ordered_json>& records) {
  DocumentRegistry reg;
  try {
    for (const auto& j : records) {
      const auto& kind = j.at("kind");
      if (kind == "doc") {
        DocumentRecord r;
        r.id = DocId(j.at("doc_id").get<std::uint64_t>());
        r.meta.title = j.at("title").get<std::string>();
        r.meta.author = j.at("author").get<std::string>();
        r.meta.journal = j.at("journal").get<std::string>();
        r.meta.year = j.at("year").get<int>();
        r.meta.volume = j.at("volume").get<std::string>();
        r.meta.doi = j.at("doi").get<std::string>();
        r.content_state = parse_content_state(j.at("content_state").get<std::string>());
        r.content_hash = j.at("content_hash").get<std::string>();
        r.ingest_time = j.at("ingest_time").get<std::string>();
        reg.next_id_ = std::max(reg.next_id_, r.id.value + 1);
        reg.records_.emplace(r.id, std::move(r));
      } else if (kind == "seen") {
        reg.seen_.insert(j.at("key").get<std::string>(),
                         DocId(j.at("doc_id").get<std::uint64_t>()));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::CorruptSnapshot, std::string("bad document record: ") + e.what());
  }
  return reg;
}

DocumentMetadata RemoteDocRef::metadata() const {
  return {title, author, journal, year, volume, doi};
}

RemoteDocRef remote_ref_from_json(const nlohmann::json& j) {
  RemoteDocRef ref;
  ref.external_id = j.at("external_id").get<std::string>();
  ref.doi = j.value("doi", "");
  ref.title = j.value("title", "");
  ref.author = j.value("author", "");
  ref.journal = j.value("journal", "");
  ref.year = j.value("year", 0);
  ref.volume = j.value("volume", "");
  ref.open_access = j.value("open_access", false);
  if (ref.open_access && j.contains("content") && j["content"].is_string()) {
    ref.content = j["content"].get<std::string>();
  }
  return ref;
}

nlohmann::json remote_ref_to_json(const RemoteDocRef& ref) {
  nlohmann::json j{{"external_id", ref.external_id}, {"doi", ref.doi},
                   {"title", ref.title},             {"author", ref.author},
                   {"journal", ref.journal},         {"year", ref.year},
                   {"volume", ref.volume},           {"open_access", ref.open_access}};
  if (ref.content) j["content"] = *ref.content;
  return j;
}

FixtureSourceClient::FixtureSourceClient(std::filesystem::path dir)
    : dir_(std::move(dir)) {}

std::vector<RemoteDocRef> FixtureSourceClient::load_all() const {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir_, ec)) {
    throw Error(ErrorCode::SourceUnavailable, "source directory missing: " + dir_.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<RemoteDocRef> refs;
  for (const auto& f : files) {
    try {
      refs.push_back(remote_ref_from_json(nlohmann::json::parse(read_file(f))));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::SourceUnavailable, "bad fixture " + f.string() + ": " + e.what());
    }
  }
  return refs;
}

std::vector<RemoteDocRef> FixtureSourceClient::search(std::string_view query,
                                                      std::size_t limit) {
  ++requests_;
  const auto words = query_words(query);
  std::vector<RemoteDocRef> out;
  for (auto& ref : load_all()) {
    if (out.size() >= limit) break;
    const auto haystack = ascii_lower(ref.title + " " + ref.content.value_or(""));
    const bool hit = std::all_of(words.begin(), words.end(), [&](const auto& w) {
      return haystack.find(w) != std::string::npos;
    });
    if (!hit) continue;
    ref.content.reset();
    out.push_back(std::move(ref));
  }
  return out;
}

RemoteDocRef FixtureSourceClient::fetch(std::string_view external_id) {
  ++requests_;
  for (auto& ref : load_all()) {
    if (ref.external_id == external_id) return ref;
  }
  throw Error(ErrorCode::SourceUnavailable, "no such reference: " + std::string(external_id));
}

Clock::time_point SteadyClock::now() { return std::chrono::steady_clock::now(); }

void SteadyClock::sleep_until(time_point t) { std::this_thread::sleep_until(t); }

void ManualClock::sleep_until(time_point t) {
  if (t > now_) now_ = t;
}

RateLimiter::RateLimiter(double requests_per_second, Clock& clock) : clock_(clock) {
  if (!(requests_per_second > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "rate limit must be positive");
  }
  interval_ = std::chrono::nanoseconds(
      static_cast<std::int64_t>(std::ceil(1e9 / requests_per_second)));
}

void RateLimiter::acquire() {
  if (last_) {
    const auto earliest = *last_ + interval_;
    if (clock_.now() < earliest) clock_.sleep_until(earliest);
  }
  last_ = clock_.now();
  history_.push_back(*last_);
}

FetchSummary fetch_remote(std::string_view query, std::size_t limit,
                          SourceClient& client, RateLimiter& limiter,
                          IngestSink& sink) {
  if (limit == 0) throw Error(ErrorCode::InvalidArgument, "limit must be >= 1");
  FetchSummary summary;
  std::vector<RemoteDocRef> listing;
  try {
    limiter.acquire();
    listing = client.search(query, limit);
  } catch (const std::exception& e) {
    throw SourceUnavailableError(std::string("search failed: ") + e.what(), summary);
  }
  if (listing.size() > limit) listing.resize(limit);
  summary.fetched = listing.size();

  for (const auto& ref : listing) {
    if (sink.is_seen(ref)) {
      ++summary.skipped_dupe;
      continue;
    }
    RemoteDocRef full = ref;
    if (ref.open_access) {
      try {
        limiter.acquire();
        full = client.fetch(ref.external_id);
      } catch (const std::exception& e) {
        throw SourceUnavailableError(
            std::string("fetch failed: ") + e.what() + " (fetched " +
                std::to_string(summary.fetched) + ", ingested " +
                std::to_string(summary.ingested) + ", skipped " +
                std::to_string(summary.skipped_dupe) + ")",
            summary);
      }
    }
    if (!full.open_access) full.content.reset();
    if (full.doi.empty() && !full.content) continue;  // nothing to key on
    const auto outcome = sink.ingest(full);
    if (outcome.duplicate) {
      ++summary.skipped_dupe;
      continue;
    }
    ++summary.ingested;
    if (!full.content) ++summary.metadata_only;
  }
  return summary;
}

std::string utc_timestamp(std::chrono::system_clock::time_point t) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace cscope
