#include "cscope/search.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "cscope/error.hpp"

namespace cscope {
namespace {

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

void check_limit(std::size_t limit) {
  if (limit == 0) throw Error(ErrorCode::InvalidArgument, "limit must be >= 1");
}

void require_text(std::string_view text) {
  if (normalize_text(text).empty()) throw Error(ErrorCode::EmptyQuery, "query is empty");
}

void rank(std::vector<SearchResult>& results, std::size_t limit) {
  std::sort(results.begin(), results.end(), [](const auto& a, const auto& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.doc < b.doc;
  });
  if (results.size() > limit) results.resize(limit);
}

void fill_metadata(SearchResult& r, const DocumentRegistry& registry) {
  if (const auto* rec = registry.find(r.doc)) {
    r.doi = rec->meta.doi;
    r.title = rec->meta.title;
  }
}

}  // namespace

void PostingsIndex::add_document(DocId doc, std::span<const std::string> norms) {
  std::map<std::string, std::uint32_t> tf;
  for (const auto& n : norms) ++tf[n];
  add_document(doc, tf, static_cast<std::uint32_t>(norms.size()));
}

void PostingsIndex::add_document(DocId doc,
                                 const std::map<std::string, std::uint32_t>& term_tf,
                                 std::uint32_t length) {
  remove_document(doc);
  if (term_tf.empty()) return;  // no postings, not counted in D
  for (const auto& [term, tf] : term_tf) {
    auto& list = terms_[term];
    auto pos = std::lower_bound(list.begin(), list.end(), doc,
                                [](const Posting& p, DocId d) { return p.doc < d; });
    list.insert(pos, Posting{doc, tf});
  }
  lengths_[doc] = length;
  total_length_ += length;
}

void PostingsIndex::remove_document(DocId doc) {
  auto it = lengths_.find(doc);
  if (it == lengths_.end()) return;
  total_length_ -= it->second;
  lengths_.erase(it);
  for (auto t = terms_.begin(); t != terms_.end();) {
    std::erase_if(t->second, [&](const Posting& p) { return p.doc == doc; });
    t = t->second.empty() ? terms_.erase(t) : std::next(t);
  }
}

std::map<std::string, std::uint32_t> PostingsIndex::document_terms(DocId doc) const {
  std::map<std::string, std::uint32_t> out;
  for (const auto& [term, list] : terms_) {
    auto pos = std::lower_bound(list.begin(), list.end(), doc,
                                [](const Posting& p, DocId d) { return p.doc < d; });
    if (pos != list.end() && pos->doc == doc) out.emplace(term, pos->tf);
  }
  return out;
}

std::span<const Posting> PostingsIndex::postings(std::string_view term) const {
  auto it = terms_.find(term);
  if (it == terms_.end()) return {};
  return it->second;
}

std::uint32_t PostingsIndex::doc_length(DocId doc) const {
  auto it = lengths_.find(doc);
  return it == lengths_.end() ? 0 : it->second;
}

double PostingsIndex::average_doc_length() const {
  if (lengths_.empty()) return 0.0;
  return static_cast<double>(total_length_) / static_cast<double>(lengths_.size());
}

std::vector<ordered_json> PostingsIndex::to_records() const {
  std::vector<ordered_json> out;
  out.reserve(lengths_.size() + terms_.size());
  for (const auto& [doc, length] : lengths_) {
    ordered_json j;
    j["kind"] = "doc";
    j["doc_id"] = doc.value;
    j["length"] = length;
    out.push_back(std::move(j));
  }
  for (const auto& [term, list] : terms_) {
    ordered_json j;
    j["kind"] = "term";
    j["term"] = term;
    auto& postings = j["postings"] = ordered_json::array();
    for (const auto& p : list) postings.push_back({p.doc.value, p.tf});
    out.push_back(std::move(j));
  }
  return out;
}

PostingsIndex PostingsIndex::from_records(const std::vector<ordered_json>& records) {
  PostingsIndex index;
  try {
    for (const auto& j : records) {
      const auto& kind = j.at("kind");
      if (kind == "doc") {
        const auto length = j.at("length").get<std::uint32_t>();
        index.lengths_[DocId(j.at("doc_id").get<std::uint64_t>())] = length;
        index.total_length_ += length;
      } else if (kind == "term") {
        auto& list = index.terms_[j.at("term").get<std::string>()];
        for (const auto& p : j.at("postings")) {
          list.push_back({DocId(p.at(0).get<std::uint64_t>()), p.at(1).get<std::uint32_t>()});
        }
        std::sort(list.begin(), list.end(),
                  [](const Posting& a, const Posting& b) { return a.doc < b.doc; });
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::CorruptSnapshot, std::string("bad index record: ") + e.what());
  }
  return index;
}

std::string PostingsIndex::serialize() const { return encode_checked_jsonl(to_records()); }

void ConceptIndex::set_document(DocId doc,
                                const std::vector<ConceptOccurrence>& occurrences) {
  for (auto it = by_concept_.begin(); it != by_concept_.end();) {
    it->second.erase(doc);
    it = it->second.empty() ? by_concept_.erase(it) : std::next(it);
  }
  for (const auto& occ : occurrences) by_concept_[occ.concept_id][doc] = occ;
}

std::vector<ConceptOccurrence> ConceptIndex::for_concept(ConceptId id) const {
  std::vector<ConceptOccurrence> out;
  auto it = by_concept_.find(id);
  if (it == by_concept_.end()) return out;
  for (const auto& [doc, occ] : it->second) out.push_back(occ);
  return out;
}

std::vector<ConceptOccurrence> ConceptIndex::for_document(DocId doc) const {
  std::vector<ConceptOccurrence> out;
  for (const auto& [id, docs] : by_concept_) {
    auto it = docs.find(doc);
    if (it != docs.end()) out.push_back(it->second);
  }
  return out;
}

std::size_t ConceptIndex::size() const {
  std::size_t n = 0;
  for (const auto& [id, docs] : by_concept_) n += docs.size();
  return n;
}

std::vector<ordered_json> ConceptIndex::to_records() const {
  std::vector<ordered_json> out;
  for (const auto& [id, docs] : by_concept_) {
    for (const auto& [doc, occ] : docs) {
      ordered_json j;
      j["kind"] = "occurrence";
      j["doc_id"] = doc.value;
      j["concept_id"] = id.value;
      j["sentence_index"] = occ.sentence_index;
      j["sentences"] = occ.sentences;
      j["tf"] = occ.tf;
      out.push_back(std::move(j));
    }
  }
  return out;
}

ConceptIndex ConceptIndex::from_records(const std::vector<ordered_json>& records) {
  ConceptIndex index;
  try {
    for (const auto& j : records) {
      if (j.at("kind") != "occurrence") continue;
      ConceptOccurrence occ;
      occ.doc = DocId(j.at("doc_id").get<std::uint64_t>());
      occ.concept_id = ConceptId(j.at("concept_id").get<std::uint64_t>());
      occ.sentence_index = j.at("sentence_index").get<std::size_t>();
      occ.sentences = j.at("sentences").get<std::vector<std::size_t>>();
      occ.tf = j.at("tf").get<std::uint32_t>();
      index.by_concept_[occ.concept_id][occ.doc] = std::move(occ);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::CorruptSnapshot, std::string("bad occurrence record: ") + e.what());
  }
  return index;
}

std::string_view to_string(SearchMode mode) {
  switch (mode) {
    case SearchMode::metadata: return "metadata";
    case SearchMode::concept_based: return "concept";
    case SearchMode::free_text: return "free_text";
  }
  return "free_text";
}

SearchMode parse_search_mode(std::string_view s) {
  if (s == "metadata") return SearchMode::metadata;
  if (s == "concept") return SearchMode::concept_based;
  if (s == "free_text" || s == "freetext" || s == "text") return SearchMode::free_text;
  throw Error(ErrorCode::InvalidArgument, "unknown search mode: " + std::string(s));
}

double bm25_idf(std::size_t df, std::size_t doc_count) {
  const double n = static_cast<double>(doc_count);
  const double d = static_cast<double>(df);
  return std::log((n - d + 0.5) / (d + 0.5) + 1.0);
}

double bm25_term_score(std::uint32_t tf, std::uint32_t doc_length,
                       double avg_doc_length, double idf, double k1, double b) {
  const double f = static_cast<double>(tf);
  const double norm =
      avg_doc_length > 0.0 ? static_cast<double>(doc_length) / avg_doc_length : 0.0;
  return idf * (f * (k1 + 1.0)) / (f + k1 * (1.0 - b + b * norm));
}

std::map<ConceptId, double> concept_activation(const Ontology& ontology,
                                               const std::vector<ConceptId>& seeds,
                                               int hops, double delta) {
  std::map<ConceptId, double> activation;
  for (auto id : seeds) activation[id] = 1.0;
  if (activation.empty() || hops <= 0) return activation;
  const auto adjacency = ontology.approved_adjacency();
  for (int hop = 0; hop < hops; ++hop) {
    auto next = activation;
    for (const auto& [u, a] : activation) {
      auto adj = adjacency.find(u);
      if (adj == adjacency.end()) continue;
      for (const auto& [v, w] : adj->second) {
        auto& slot = next[v];
        slot = std::max(slot, a * w * delta);
      }
    }
    if (next == activation) break;
    activation = std::move(next);
  }
  return activation;
}

std::vector<SearchResult> search_metadata(const MetadataFilters& filters,
                                          std::size_t limit,
                                          const DocumentRegistry& registry) {
  if (filters.empty()) throw Error(ErrorCode::NoFilter, "metadata search needs a filter");
  check_limit(limit);
  const auto author = filters.author ? ascii_lower(*filters.author) : std::string();
  const auto journal = filters.journal ? ascii_lower(*filters.journal) : std::string();
  const auto doi = filters.doi ? ascii_lower(*filters.doi) : std::string();

  std::vector<SearchResult> out;
  for (const auto& rec : registry.records()) {
    if (out.size() >= limit) break;
    if (filters.author && ascii_lower(rec.meta.author).find(author) == std::string::npos) continue;
    if (filters.journal && ascii_lower(rec.meta.journal).find(journal) == std::string::npos) continue;
    if (filters.year_from && rec.meta.year < *filters.year_from) continue;
    if (filters.year_to && rec.meta.year > *filters.year_to) continue;
    if (filters.doi && ascii_lower(rec.meta.doi) != doi) continue;
    out.push_back({rec.id, 1.0, {}, rec.meta.doi, rec.meta.title});
  }
  return out;
}

SearchResponse search_concept(std::string_view text, std::size_t limit,
                              const SearchContext& ctx) {
  require_text(text);
  check_limit(limit);
  SearchResponse response;
  response.mode = SearchMode::concept_based;

  const auto norms = ctx.text.norms(text);
  const Gazetteer gazetteer(ctx.ontology, ctx.text);
  std::vector<ConceptId> seeds;
  std::vector<bool> covered(norms.size(), false);
  for (const auto& m : gazetteer.match(norms)) {
    seeds.push_back(m.concept_id);
    std::fill_n(covered.begin() + static_cast<std::ptrdiff_t>(m.start), m.length, true);
  }
  for (std::size_t i = 0; i < norms.size(); ++i) {
    if (!covered[i]) response.unmatched_tokens.push_back(norms[i]);
  }

  const auto activation =
      concept_activation(ctx.ontology, seeds, ctx.config.hops, ctx.config.delta);
  std::map<DocId, SearchResult> by_doc;
  for (const auto& [concept_id, act] : activation) {
    if (act <= 0.0) continue;
    for (const auto& occ : ctx.concepts.for_concept(concept_id)) {
      auto& r = by_doc[occ.doc];
      r.doc = occ.doc;
      const double tf = static_cast<double>(occ.tf);
      r.score += act * (tf / (tf + 1.0));
      r.matched_concepts.emplace_back(concept_id, act);
    }
  }
  for (auto& [doc, r] : by_doc) {
    fill_metadata(r, ctx.registry);
    response.results.push_back(std::move(r));
  }
  rank(response.results, limit);
  return response;
}

SearchResponse search_freetext(std::string_view text, std::size_t limit,
                               const SearchContext& ctx) {
  require_text(text);
  check_limit(limit);
  SearchResponse response;
  response.mode = SearchMode::free_text;

  std::vector<std::string> terms;
  std::set<std::string, std::less<>> seen;
  for (auto& n : ctx.text.norms(text)) {
    if (ctx.text.is_stopword(n) || !seen.insert(n).second) continue;
    terms.push_back(std::move(n));
  }

  const auto doc_count = ctx.index.doc_count();
  const double avgdl = ctx.index.average_doc_length();
  std::map<DocId, double> scores;
  for (const auto& term : terms) {
    const auto postings = ctx.index.postings(term);
    if (postings.empty()) {
      response.unmatched_tokens.push_back(term);
      continue;
    }
    const double idf = bm25_idf(postings.size(), doc_count);
    for (const auto& p : postings) {
      scores[p.doc] += bm25_term_score(p.tf, ctx.index.doc_length(p.doc), avgdl,
                                       idf, ctx.config.k1, ctx.config.b);
    }
  }
  for (const auto& [doc, score] : scores) {
    SearchResult r{doc, score, {}, {}, {}};
    fill_metadata(r, ctx.registry);
    response.results.push_back(std::move(r));
  }
  rank(response.results, limit);
  return response;
}

SearchResponse search(const SearchQuery& query, const SearchContext& ctx) {
  switch (query.mode) {
    case SearchMode::metadata: {
      SearchResponse response;
      response.mode = SearchMode::metadata;
      response.results = search_metadata(query.filters, query.limit, ctx.registry);
      return response;
    }
    case SearchMode::concept_based:
      return search_concept(query.text, query.limit, ctx);
    case SearchMode::free_text:
      return search_freetext(query.text, query.limit, ctx);
  }
  return {};
}

PostingsIndex rebuild_index(const DocumentRegistry& registry,
                            const std::function<std::string(DocId)>& load_text,
                            const PostingsIndex& previous,
                            const TextProcessor& text) {
  PostingsIndex index;
  for (const auto& rec : registry.records()) {
    switch (rec.content_state) {
      case ContentState::full_text: {
        std::vector<std::string> norms;
        for (auto& t : text.process(load_text(rec.id)).tokens) norms.push_back(std::move(t.norm));
        index.add_document(rec.id, norms);
        break;
      }
      case ContentState::purged:
        if (previous.contains_document(rec.id)) {
          index.add_document(rec.id, previous.document_terms(rec.id),
                             previous.doc_length(rec.id));
        }
        break;
      case ContentState::metadata_only:
        break;
    }
  }
  return index;
}

}  // namespace cscope
