#include <chrono>
#include <fstream>

#include "cscope/ingestion.hpp"
#include "cscope/jsonl.hpp"
#include "test_support.hpp"

using namespace cscope;
using cscope::testing::TempDir;
using namespace std::chrono_literals;

namespace {

DocumentMetadata with_doi(std::string doi) {
  DocumentMetadata m;
  m.doi = std::move(doi);
  return m;
}

// Sink backed directly by a registry, as the engine does.
class RegistrySink : public IngestSink {
 public:
  explicit RegistrySink(DocumentRegistry& registry) : registry_(registry) {}

  bool is_seen(const RemoteDocRef& ref) const override {
    return !ref.doi.empty() && registry_.seen().lookup(SeenRegistry::doi_key(ref.doi));
  }

  IngestOutcome ingest(const RemoteDocRef& ref) override {
    const auto hash = ref.content ? sha256_hex(*ref.content) : std::string();
    if (auto id = registry_.find_duplicate(ref.metadata(), hash)) return {*id, true};
    const auto state = ref.content ? ContentState::full_text : ContentState::metadata_only;
    return {registry_.add(ref.metadata(), state, hash, "t"), false};
  }

 private:
  DocumentRegistry& registry_;
};

void write_ref(const std::filesystem::path& dir, const RemoteDocRef& ref) {
  std::ofstream(dir / (ref.external_id + ".json")) << remote_ref_to_json(ref).dump();
}

RemoteDocRef ref(std::string id, std::string doi, bool open, std::string content = "copd text") {
  RemoteDocRef r;
  r.external_id = std::move(id);
  r.doi = std::move(doi);
  r.title = "COPD study " + r.external_id;
  r.open_access = open;
  if (open) r.content = content + " " + r.external_id;
  return r;
}

// Client that fails on the n-th request.
class FlakyClient : public SourceClient {
 public:
  FlakyClient(SourceClient& inner, int fail_at) : inner_(inner), fail_at_(fail_at) {}
  std::vector<RemoteDocRef> search(std::string_view q, std::size_t limit) override {
    tick();
    return inner_.search(q, limit);
  }
  RemoteDocRef fetch(std::string_view id) override {
    tick();
    return inner_.fetch(id);
  }

 private:
  void tick() {
    if (++calls_ == fail_at_) throw std::runtime_error("connection reset");
  }
  SourceClient& inner_;
  int fail_at_;
  int calls_ = 0;
};

}  // namespace

TEST(Registry, DoiDedup) {
  DocumentRegistry r;
  const auto a = r.add(with_doi("10.1/X"), ContentState::full_text, "h1", "t");
  EXPECT_EQ(r.find_duplicate(with_doi("10.1/x"), "other"), a);
  EXPECT_EQ(r.size(), 1u);
}

TEST(Registry, HashDedupAcrossDois) {
  DocumentRegistry r;
  const auto a = r.add(with_doi("10.1/a"), ContentState::full_text, "same", "t");
  EXPECT_EQ(r.find_duplicate(with_doi("10.1/b"), "same"), a);
  EXPECT_FALSE(r.find_duplicate(with_doi("10.1/b"), "different").has_value());
}

TEST(Registry, StateAndLookupErrors) {
  DocumentRegistry r;
  const auto a = r.add(with_doi("10.1/a"), ContentState::full_text, "h", "t");
  r.set_state(a, ContentState::purged);
  EXPECT_EQ(r.get(a).content_state, ContentState::purged);
  EXPECT_EQ(r.get(a).content_hash, "h");
  EXPECT_CSCOPE_ERROR(r.get(DocId(99)), ErrorCode::UnknownDocument);
  EXPECT_EQ(r.find(DocId(99)), nullptr);
}

TEST(Registry, RecordsRoundTrip) {
  DocumentRegistry r;
  DocumentMetadata m{"Title", "Rossi M", "Chest", 2008, "12", "10.1/a"};
  r.add(m, ContentState::full_text, "h1", "2010-01-01T00:00:00Z");
  r.add(with_doi(""), ContentState::full_text, "h2", "2010-01-02T00:00:00Z");
  r.add(with_doi("10.1/c"), ContentState::metadata_only, "", "2010-01-03T00:00:00Z");
  const auto records = r.to_records();
  for (const auto& rec : records) EXPECT_EQ(rec.begin().key(), "kind");
  EXPECT_EQ(DocumentRegistry::from_records(records), r);
}

TEST(RateLimiter, SpacingUnderManualClock) {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> rate(0.2, 50.0);
  std::uniform_int_distribution<int> gap_ms(0, 3000);
  for (int round = 0; round < 200; ++round) {
    ManualClock clock;
    const double r = rate(rng);
    RateLimiter limiter(r, clock);
    for (int i = 0; i < 30; ++i) {
      clock.advance(std::chrono::milliseconds(gap_ms(rng) / 10));
      limiter.acquire();
    }
    const auto& h = limiter.history();
    const auto min_gap = std::chrono::duration<double>(1.0 / r);
    for (std::size_t i = 1; i < h.size(); ++i) {
      ASSERT_GE(std::chrono::duration<double>(h[i] - h[i - 1]).count(), min_gap.count() - 1e-9);
    }
  }
}

TEST(RateLimiter, RejectsNonPositiveRate) {
  ManualClock clock;
  EXPECT_CSCOPE_ERROR(RateLimiter(0.0, clock), ErrorCode::InvalidArgument);
}

TEST(Fetch, SkipsSeenReferences) {
  TempDir dir;
  for (int i = 1; i <= 5; ++i) write_ref(dir.path(), ref("r" + std::to_string(i), "10.9/" + std::to_string(i), true));
  DocumentRegistry registry;
  registry.add(with_doi("10.9/2"), ContentState::full_text, "x", "t");
  registry.add(with_doi("10.9/4"), ContentState::full_text, "y", "t");
  RegistrySink sink(registry);
  FixtureSourceClient client(dir.path());
  ManualClock clock;
  RateLimiter limiter(1.0, clock);

  const auto s = fetch_remote("copd", 10, client, limiter, sink);
  EXPECT_EQ(s.fetched, 5u);
  EXPECT_EQ(s.ingested, 3u);
  EXPECT_EQ(s.skipped_dupe, 2u);
  EXPECT_EQ(s.metadata_only, 0u);
  // One listing request plus one download per unseen reference.
  EXPECT_EQ(client.request_count(), 4u);
  EXPECT_EQ(limiter.history().size(), 4u);

  const auto again = fetch_remote("copd", 10, client, limiter, sink);
  EXPECT_EQ(again.ingested, 0u);
  EXPECT_EQ(again.skipped_dupe, 5u);
}

TEST(Fetch, ClosedAccessIsMetadataOnly) {
  TempDir dir;
  for (int i = 1; i <= 4; ++i) write_ref(dir.path(), ref("c" + std::to_string(i), "10.8/" + std::to_string(i), false));
  DocumentRegistry registry;
  RegistrySink sink(registry);
  FixtureSourceClient client(dir.path());
  ManualClock clock;
  RateLimiter limiter(1.0, clock);
  const auto s = fetch_remote("copd", 10, client, limiter, sink);
  EXPECT_EQ(s.metadata_only, s.fetched);
  EXPECT_EQ(s.ingested, 4u);
  EXPECT_EQ(client.request_count(), 1u);
  for (const auto& r : registry.records()) {
    EXPECT_EQ(r.content_state, ContentState::metadata_only);
    EXPECT_TRUE(r.content_hash.empty());
  }
}

TEST(Fetch, LimitAndQueryFilter) {
  TempDir dir;
  for (int i = 1; i <= 5; ++i) write_ref(dir.path(), ref("r" + std::to_string(i), "10.9/" + std::to_string(i), true));
  DocumentRegistry registry;
  RegistrySink sink(registry);
  FixtureSourceClient client(dir.path());
  ManualClock clock;
  RateLimiter limiter(1.0, clock);
  EXPECT_CSCOPE_ERROR(fetch_remote("copd", 0, client, limiter, sink), ErrorCode::InvalidArgument);
  EXPECT_EQ(fetch_remote("copd", 2, client, limiter, sink).fetched, 2u);
  EXPECT_EQ(fetch_remote("kidney", 10, client, limiter, sink).fetched, 0u);
}

TEST(Fetch, HashDuplicateCountsAsSkipped) {
  TempDir dir;
  auto a = ref("a", "10.7/a", true);
  auto b = ref("b", "10.7/b", true);
  b.content = a.content;
  write_ref(dir.path(), a);
  write_ref(dir.path(), b);
  DocumentRegistry registry;
  RegistrySink sink(registry);
  FixtureSourceClient client(dir.path());
  ManualClock clock;
  RateLimiter limiter(1.0, clock);
  const auto s = fetch_remote("copd", 10, client, limiter, sink);
  EXPECT_EQ(s.ingested, 1u);
  EXPECT_EQ(s.skipped_dupe, 1u);
}

TEST(Fetch, TransportFailureReportsPartialCounts) {
  TempDir dir;
  for (int i = 1; i <= 4; ++i) write_ref(dir.path(), ref("r" + std::to_string(i), "10.6/" + std::to_string(i), true));
  DocumentRegistry registry;
  RegistrySink sink(registry);
  FixtureSourceClient inner(dir.path());
  FlakyClient client(inner, 4);  // search, fetch, fetch, then failure
  ManualClock clock;
  RateLimiter limiter(1.0, clock);
  try {
    fetch_remote("copd", 10, client, limiter, sink);
    FAIL() << "expected SourceUnavailable";
  } catch (const SourceUnavailableError& e) {
    EXPECT_EQ(e.code(), ErrorCode::SourceUnavailable);
    EXPECT_EQ(e.partial().ingested, 2u);
    EXPECT_EQ(e.partial().fetched, 4u);
  }
  EXPECT_EQ(registry.size(), 2u);
}

TEST(NoDuplicatesProperty, RandomIngestSequences) {
  std::mt19937 rng(31);
  std::uniform_int_distribution<int> doi_pick(0, 15);
  std::uniform_int_distribution<int> text_pick(0, 15);
  for (int round = 0; round < 200; ++round) {
    DocumentRegistry registry;
    for (int step = 0; step < 40; ++step) {
      const int d = doi_pick(rng);
      const auto doi = d < 4 ? std::string() : "10.5/" + std::to_string(d);
      const auto hash = sha256_hex("text" + std::to_string(text_pick(rng)));
      if (!registry.find_duplicate(with_doi(doi), hash)) {
        registry.add(with_doi(doi), ContentState::full_text, hash, "t");
      }
    }
    std::set<std::string> dois;
    std::set<std::string> hashes;
    for (const auto& r : registry.records()) {
      if (!r.meta.doi.empty()) ASSERT_TRUE(dois.insert(r.meta.doi).second);
      ASSERT_TRUE(hashes.insert(r.content_hash).second);
    }
  }
}

TEST(Timestamp, Iso8601Utc) {
  const auto t = std::chrono::system_clock::time_point(std::chrono::seconds(1262304000));
  EXPECT_EQ(utc_timestamp(t), "2010-01-01T00:00:00Z");
}
