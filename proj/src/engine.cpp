#include "cscope/engine.hpp"

#include <chrono>

#include "cscope/error.hpp"
#include "cscope/jsonl.hpp"

namespace cscope {
namespace fs = std::filesystem;

namespace {

constexpr const char* kOntologyFile = "ontology.jsonl";
constexpr const char* kDocsFile = "docs.jsonl";
constexpr const char* kIndexFile = "index.jsonl";
constexpr const char* kOccurrencesFile = "occurrences.jsonl";
constexpr const char* kContentDir = "content";

std::string trim(std::string_view s) {
  return normalize_text(s);
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    auto next = s.find(sep, pos);
    out.push_back(trim(s.substr(pos, next == std::string_view::npos ? s.npos : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

}  // namespace

struct Engine::Corpus {
  std::vector<std::pair<DocId, std::vector<Token>>> docs;
};

void Engine::init(const fs::path& data_dir) {
  std::error_code ec;
  fs::create_directories(data_dir / kContentDir, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + data_dir.string() + ": " + ec.message());
  for (const char* name : {kOntologyFile, kDocsFile, kIndexFile, kOccurrencesFile}) {
    if (!fs::exists(data_dir / name)) write_checked_jsonl(data_dir / name, {});
  }
}

Engine::Engine(fs::path data_dir, Config config)
    : data_dir_(std::move(data_dir)),
      config_(std::move(config)),
      text_(config_.make_text_processor()) {
  if (!fs::is_directory(data_dir_) || !fs::exists(data_dir_ / kDocsFile)) {
    throw Error(ErrorCode::IoFailure,
                "data directory " + data_dir_.string() + " is not initialized (run init)");
  }
  load();
}

void Engine::load() {
  auto state = std::make_shared<EngineState>();
  const auto ontology_records = read_checked_jsonl(data_dir_ / kOntologyFile);
  state->ontology = Ontology::from_snapshot(snapshot_from_records(ontology_records));
  try {
    for (const auto& r : ontology_records) {
      if (r.at("kind") == "candidate") state->queue.insert(candidate_from_record(r));
    }
  } catch (const std::exception& e) {
    throw Error(ErrorCode::CorruptSnapshot, std::string("bad candidate record: ") + e.what());
  }
  state->registry = DocumentRegistry::from_records(read_checked_jsonl(data_dir_ / kDocsFile));
  state->index = PostingsIndex::from_records(read_checked_jsonl(data_dir_ / kIndexFile));
  state->concepts = ConceptIndex::from_records(read_checked_jsonl(data_dir_ / kOccurrencesFile));
  state_ = std::move(state);
}

void Engine::persist(const EngineState& state) const {
  auto records = snapshot_records(state.ontology.snapshot());
  for (const auto& c : state.queue.all()) records.push_back(candidate_record(c));
  write_checked_jsonl(data_dir_ / kOntologyFile, records);
  write_checked_jsonl(data_dir_ / kDocsFile, state.registry.to_records());
  write_checked_jsonl(data_dir_ / kIndexFile, state.index.to_records());
  write_checked_jsonl(data_dir_ / kOccurrencesFile, state.concepts.to_records());
}

std::shared_ptr<const EngineState> Engine::view() const {
  std::lock_guard lock(state_mutex_);
  return state_;
}

void Engine::publish(std::shared_ptr<const EngineState> next) {
  std::lock_guard lock(state_mutex_);
  state_ = std::move(next);
}

template <typename F>
auto Engine::mutate(F&& f) {
  std::lock_guard writer(writer_mutex_);
  auto next = std::make_shared<EngineState>(*view());
  if constexpr (std::is_void_v<decltype(f(*next))>) {
    f(*next);
    next->ontology.check_integrity();
    persist(*next);
    publish(std::move(next));
  } else {
    auto result = f(*next);
    next->ontology.check_integrity();
    persist(*next);
    publish(std::move(next));
    return result;
  }
}

fs::path Engine::content_path(DocId id) const {
  return data_dir_ / kContentDir / (id.str() + ".txt");
}

Engine::Corpus Engine::load_corpus(const EngineState& state) const {
  Corpus corpus;
  for (const auto& rec : state.registry.records()) {
    if (rec.content_state != ContentState::full_text) continue;
    corpus.docs.emplace_back(rec.id, text_.process(read_file(content_path(rec.id))).tokens);
  }
  return corpus;
}

std::vector<DocumentProfile> Engine::profiles(const Corpus& corpus,
                                              const Ontology& ontology) const {
  const Gazetteer gazetteer(ontology, text_);
  std::vector<DocumentProfile> out;
  out.reserve(corpus.docs.size());
  for (const auto& [id, tokens] : corpus.docs) out.push_back(build_profile(id, tokens, gazetteer));
  return out;
}

void Engine::refresh_candidates(EngineState& state, const Corpus& corpus) const {
  const auto corpus_profiles = profiles(corpus, state.ontology);
  state.queue.refresh(extract_candidates(corpus_profiles, state.ontology, state.queue, text_,
                                         config_.enrichment));
}

void Engine::rematch(EngineState& state, const Corpus& corpus) const {
  const Gazetteer gazetteer(state.ontology, text_);
  for (const auto& [id, tokens] : corpus.docs) {
    state.concepts.set_document(id, match_concepts(id, tokens, gazetteer));
  }
}

ConceptId Engine::add_concept(std::string_view label, const std::set<std::string>& synonyms,
                              ConceptStatus status) {
  return mutate([&](EngineState& s) {
    const auto id = s.ontology.add_concept(label, synonyms, status);
    if (status == ConceptStatus::approved) rematch(s, load_corpus(s));
    return id;
  });
}

Relation Engine::add_relation(ConceptId src, ConceptId dst, RelationType type, double weight,
                              std::uint64_t evidence_count) {
  return mutate([&](EngineState& s) {
    return s.ontology.add_relation(src, dst, type, weight, evidence_count);
  });
}

SeedSummary Engine::load_seed(const fs::path& path) {
  const auto bytes = read_file(path);
  return mutate([&](EngineState& s) {
    SeedSummary summary;
    std::string_view rest = bytes;
    while (!rest.empty()) {
      const auto nl = rest.find('\n');
      const auto line = trim(rest.substr(0, nl));
      rest.remove_prefix(nl == std::string_view::npos ? rest.size() : nl + 1);
      if (line.empty() || line.front() == '#') continue;
      if (line.starts_with("relation:")) {
        const auto fields = split(std::string_view(line).substr(9), '|');
        if (fields.size() != 4) {
          throw Error(ErrorCode::ParseError, "seed relation needs 4 fields: " + line);
        }
        const auto src = s.ontology.find_concepts(fields[0]);
        const auto dst = s.ontology.find_concepts(fields[1]);
        if (src.empty() || dst.empty()) {
          throw Error(ErrorCode::UnknownConcept, "seed relation endpoint missing: " + line);
        }
        const auto type = parse_relation_type(fields[2]);
        const auto existing = s.ontology.relations();
        const bool exists =
            std::any_of(existing.begin(), existing.end(), [&](const Relation& r) {
              return r.src == src[0].id && r.dst == dst[0].id && r.type == type;
            });
        if (exists) continue;
        s.ontology.add_relation(src[0].id, dst[0].id, type, std::stod(fields[3]), 0);
        ++summary.relations_added;
        continue;
      }
      const auto fields = split(line, '|');
      std::set<std::string> synonyms;
      if (fields.size() > 1) {
        for (auto& syn : split(fields[1], ';')) {
          if (!syn.empty()) synonyms.insert(std::move(syn));
        }
      }
      if (s.ontology.is_live_name(normalize_label(fields[0]))) {
        ++summary.concepts_skipped;
        continue;
      }
      s.ontology.add_concept(fields[0], synonyms, ConceptStatus::approved);
      ++summary.concepts_added;
    }
    if (summary.concepts_added > 0) rematch(s, load_corpus(s));
    return summary;
  });
}

ConceptNode Engine::concept_node(ConceptId id) const { return view()->ontology.concept_node(id); }

std::vector<ConceptNode> Engine::find_concepts(std::string_view term) const {
  return view()->ontology.find_concepts(term);
}

std::vector<Neighbor> Engine::neighbors(ConceptId id, int max_hops, double min_weight) const {
  return view()->ontology.neighbors(id, max_hops, min_weight);
}

IngestOutcome Engine::ingest_into(EngineState& state, const IngestRequest& request,
                                  const Gazetteer& gazetteer,
                                  std::vector<fs::path>& written) const {
  auto processed = text_.process(request.text);
  DocumentMetadata meta = request.meta;
  meta.doi = trim(meta.doi);
  if (processed.text.empty() && meta.doi.empty()) {
    throw Error(ErrorCode::EmptyDocument, "document has neither text nor DOI");
  }
  const auto hash = processed.text.empty() ? std::string() : sha256_hex(processed.text);
  if (auto existing = state.registry.find_duplicate(meta, hash)) return {*existing, true};

  const auto state_kind =
      processed.text.empty() ? ContentState::metadata_only : ContentState::full_text;
  const auto id = state.registry.add(std::move(meta), state_kind, hash,
                                     utc_timestamp(std::chrono::system_clock::now()));
  if (state_kind == ContentState::full_text) {
    const auto path = content_path(id);
    write_file_atomic(path, processed.text);
    written.push_back(path);
    std::vector<std::string> norms;
    norms.reserve(processed.tokens.size());
    for (const auto& t : processed.tokens) norms.push_back(t.norm);
    state.index.add_document(id, norms);
    state.concepts.set_document(id, match_concepts(id, processed.tokens, gazetteer));
  }
  return {id, false};
}

std::vector<IngestOutcome> Engine::ingest_batch(std::span<const IngestRequest> requests) {
  std::vector<fs::path> written;
  try {
    return mutate([&](EngineState& s) {
      const Gazetteer gazetteer(s.ontology, text_);
      std::vector<IngestOutcome> out;
      bool added = false;
      for (const auto& r : requests) {
        out.push_back(ingest_into(s, r, gazetteer, written));
        added = added || !out.back().duplicate;
      }
      if (added) refresh_candidates(s, load_corpus(s));
      return out;
    });
  } catch (...) {
    std::error_code ec;
    for (const auto& p : written) fs::remove(p, ec);
    throw;
  }
}

IngestOutcome Engine::ingest(const IngestRequest& request) {
  return ingest_batch(std::span(&request, 1)).front();
}

namespace {

class StateSink : public IngestSink {
 public:
  using IngestFn = std::function<IngestOutcome(const IngestRequest&)>;
  StateSink(const EngineState& state, IngestFn fn) : state_(state), fn_(std::move(fn)) {}

  bool is_seen(const RemoteDocRef& ref) const override {
    return !ref.doi.empty() &&
           state_.registry.seen().lookup(SeenRegistry::doi_key(trim(ref.doi))).has_value();
  }

  IngestOutcome ingest(const RemoteDocRef& ref) override {
    return fn_({ref.content.value_or(""), ref.metadata()});
  }

 private:
  const EngineState& state_;
  IngestFn fn_;
};

}  // namespace

FetchSummary Engine::fetch(std::string_view query, std::size_t limit, SourceClient& client,
                           Clock& clock) {
  RateLimiter limiter(config_.rate_limit, clock);
  std::vector<fs::path> written;
  std::optional<SourceUnavailableError> failure;
  FetchSummary summary;
  try {
    mutate([&](EngineState& s) {
      const Gazetteer gazetteer(s.ontology, text_);
      StateSink sink(s, [&](const IngestRequest& r) {
        return ingest_into(s, r, gazetteer, written);
      });
      try {
        summary = fetch_remote(query, limit, client, limiter, sink);
      } catch (const SourceUnavailableError& e) {
        // Commit what arrived before the failure.
        failure.emplace(e);
        summary = e.partial();
      }
      if (summary.ingested > summary.metadata_only) refresh_candidates(s, load_corpus(s));
    });
  } catch (...) {
    std::error_code ec;
    for (const auto& p : written) fs::remove(p, ec);
    throw;
  }
  if (failure) throw *failure;
  return summary;
}

void Engine::purge(DocId id) {
  mutate([&](EngineState& s) {
    const auto& rec = s.registry.get(id);
    if (rec.content_state != ContentState::full_text) {
      throw Error(ErrorCode::AlreadyPurged, "document " + id.str() + " holds no full text");
    }
    s.registry.set_state(id, ContentState::purged);
  });
  std::error_code ec;
  fs::remove(content_path(id), ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot delete " + content_path(id).string());
}

DocumentRecord Engine::document(DocId id) const { return view()->registry.get(id); }

std::string Engine::full_text(DocId id) const {
  const auto rec = document(id);
  switch (rec.content_state) {
    case ContentState::full_text:
      return read_file(content_path(id));
    case ContentState::purged:
      throw Error(ErrorCode::Purged, "full text of document " + id.str() + " was purged");
    case ContentState::metadata_only:
      break;
  }
  throw Error(ErrorCode::NotFound, "document " + id.str() + " was ingested without text");
}

std::vector<CandidateConcept> Engine::extract() {
  mutate([&](EngineState& s) { refresh_candidates(s, load_corpus(s)); });
  return list_pending();
}

std::vector<CandidateConcept> Engine::list_pending() const { return view()->queue.list_pending(); }

std::vector<CandidateConcept> Engine::candidates() const { return view()->queue.all(); }

ConceptId Engine::accept(std::string_view term) {
  return mutate([&](EngineState& s) {
    s.queue.require_pending(term);
    const auto corpus = load_corpus(s);
    const auto before = profiles(corpus, s.ontology);
    const auto id = accept_candidate(term, s.queue, s.ontology, before, config_.enrichment);
    rematch(s, corpus);
    refresh_candidates(s, corpus);
    return id;
  });
}

void Engine::reject(std::string_view term) {
  mutate([&](EngineState& s) { reject_candidate(term, s.queue); });
}

SearchResponse Engine::search(const SearchQuery& query) const {
  const auto state = view();
  const SearchContext ctx{state->ontology, state->registry, state->index, state->concepts,
                          text_, config_.search};
  return cscope::search(query, ctx);
}

PostingsIndex Engine::rebuild_index() {
  return mutate([&](EngineState& s) {
    s.index = cscope::rebuild_index(
        s.registry, [&](DocId id) { return read_file(content_path(id)); }, s.index, text_);
    return s.index;
  });
}

}  // namespace cscope
