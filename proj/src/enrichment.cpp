#include "cscope/enrichment.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "cscope/error.hpp"

namespace cscope {
namespace {

std::string join(std::span<const std::string> norms) {
  std::string out;
  for (const auto& n : norms) {
    if (!out.empty()) out.push_back(' ');
    out += n;
  }
  return out;
}

std::vector<std::string> split_words(std::string_view term) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < term.size()) {
    auto sp = term.find(' ', pos);
    if (sp == std::string_view::npos) sp = term.size();
    if (sp > pos) out.emplace_back(term.substr(pos, sp - pos));
    pos = sp + 1;
  }
  return out;
}

bool contains_sequence(std::span<const std::string> haystack,
                       std::span<const std::string> needle) {
  if (needle.empty() || needle.size() > haystack.size()) return false;
  return std::search(haystack.begin(), haystack.end(), needle.begin(),
                     needle.end()) != haystack.end();
}

// Tokens grouped by sentence, in order.
std::vector<std::pair<std::size_t, std::vector<std::string>>> by_sentence(
    std::span<const Token> tokens) {
  std::vector<std::pair<std::size_t, std::vector<std::string>>> out;
  for (const auto& t : tokens) {
    if (out.empty() || out.back().first != t.sentence_index) {
      out.emplace_back(t.sentence_index, std::vector<std::string>{});
    }
    out.back().second.push_back(t.norm);
  }
  return out;
}

}  // namespace

Gazetteer::Gazetteer(const Ontology& ontology, const TextProcessor& text) {
  for (const auto& node : ontology.approved()) {
    add(text.norms(node.label), node.id);
    for (const auto& s : node.synonyms) add(text.norms(s), node.id);
  }
}

void Gazetteer::add(const std::vector<std::string>& norms, ConceptId id) {
  if (norms.empty()) return;
  Node* node = &root_;
  for (const auto& n : norms) node = &node->children[n];
  if (!node->concept_id || id < *node->concept_id) node->concept_id = id;
}

std::vector<GazetteerMatch> Gazetteer::match(
    std::span<const std::string> norms) const {
  std::vector<GazetteerMatch> out;
  std::size_t i = 0;
  while (i < norms.size()) {
    const Node* node = &root_;
    std::size_t best_len = 0;
    ConceptId best_id;
    for (std::size_t j = i; j < norms.size(); ++j) {
      auto it = node->children.find(norms[j]);
      if (it == node->children.end()) break;
      node = &it->second;
      if (node->concept_id) {
        best_len = j - i + 1;
        best_id = *node->concept_id;
      }
    }
    if (best_len == 0) {
      ++i;
      continue;
    }
    out.push_back({i, best_len, best_id});
    i += best_len;
  }
  return out;
}

std::vector<ConceptOccurrence> match_concepts(DocId doc,
                                              std::span<const Token> tokens,
                                              const Gazetteer& gazetteer) {
  std::map<ConceptId, ConceptOccurrence> found;
  // Matches never cross a sentence boundary.
  for (const auto& [sentence, norms] : by_sentence(tokens)) {
    for (const auto& m : gazetteer.match(norms)) {
      auto& occ = found[m.concept_id];
      if (occ.tf == 0) {
        occ.doc = doc;
        occ.concept_id = m.concept_id;
        occ.sentence_index = sentence;
      }
      occ.sentences.push_back(sentence);
      ++occ.tf;
    }
  }
  std::vector<ConceptOccurrence> out;
  out.reserve(found.size());
  for (auto& [id, occ] : found) out.push_back(std::move(occ));
  return out;
}

std::vector<ConceptOccurrence> match_concepts(DocId doc,
                                              std::span<const Token> tokens,
                                              const Ontology& ontology,
                                              const TextProcessor& text) {
  return match_concepts(doc, tokens, Gazetteer(ontology, text));
}

DocumentProfile build_profile(DocId doc, std::span<const Token> tokens,
                              const Gazetteer& gazetteer) {
  DocumentProfile profile{doc, {}};
  for (auto& [sentence, norms] : by_sentence(tokens)) {
    SentenceProfile sp;
    for (const auto& m : gazetteer.match(norms)) sp.concepts.insert(m.concept_id);
    sp.norms = std::move(norms);
    profile.sentences.push_back(std::move(sp));
  }
  return profile;
}

std::string_view to_string(CandidateStatus status) {
  switch (status) {
    case CandidateStatus::pending: return "pending";
    case CandidateStatus::accepted: return "accepted";
    case CandidateStatus::rejected: return "rejected";
  }
  return "pending";
}

CandidateStatus parse_candidate_status(std::string_view s) {
  if (s == "pending") return CandidateStatus::pending;
  if (s == "accepted") return CandidateStatus::accepted;
  if (s == "rejected") return CandidateStatus::rejected;
  throw Error(ErrorCode::InvalidArgument, "unknown candidate status: " + std::string(s));
}

double score_candidate(std::uint64_t df, std::uint64_t doc_count, double cooc,
                       double lambda) {
  if (doc_count == 0) return 0.0;
  const double share = static_cast<double>(df) / static_cast<double>(doc_count);
  const double blend = lambda + (1.0 - lambda) * cooc;
  return std::clamp(share * blend, 0.0, 1.0);
}

std::vector<std::string> sentence_ngrams(std::span<const std::string> norms,
                                         const TextProcessor& text,
                                         std::size_t max_n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < norms.size(); ++i) {
    if (text.is_stopword(norms[i])) continue;
    for (std::size_t n = 1; n <= max_n && i + n <= norms.size(); ++n) {
      const auto& last = norms[i + n - 1];
      if (is_numeric_token(last)) break;
      if (text.is_stopword(last)) continue;
      out.push_back(join(norms.subspan(i, n)));
    }
  }
  return out;
}

std::vector<CandidateConcept> extract_candidates(
    std::span<const DocumentProfile> corpus, const Ontology& ontology,
    const CandidateQueue& queue, const TextProcessor& text,
    const EnrichmentConfig& config) {
  if (corpus.empty()) return {};

  // Names blocked from candidacy, compared in their norm-joined form too.
  std::unordered_set<std::string> blocked;
  for (const auto& node : ontology.concepts()) {
    blocked.insert(join(text.norms(node.label)));
    for (const auto& s : node.synonyms) blocked.insert(join(text.norms(s)));
  }

  struct Stats {
    std::uint64_t df = 0;
    std::set<DocId> docs;
    std::set<ConceptId> cooc;
  };
  std::unordered_map<std::string, Stats> stats;
  for (const auto& doc : corpus) {
    std::unordered_set<std::string> seen_in_doc;
    for (const auto& sentence : doc.sentences) {
      for (auto& gram : sentence_ngrams(sentence.norms, text, config.max_ngram)) {
        auto& s = stats[gram];
        s.cooc.insert(sentence.concepts.begin(), sentence.concepts.end());
        if (seen_in_doc.insert(std::move(gram)).second) {
          ++s.df;
          s.docs.insert(doc.doc);
        }
      }
    }
  }

  const auto approved = ontology.approved_count();
  const double denominator = static_cast<double>(std::max<std::size_t>(1, approved));
  std::vector<CandidateConcept> out;
  for (auto& [term, s] : stats) {
    if (s.df < config.min_df) continue;
    if (ontology.is_live_name(term) || ontology.is_tombstoned_name(term) ||
        blocked.contains(term) || queue.is_resolved(term)) {
      continue;
    }
    CandidateConcept c;
    c.term = term;
    c.df = s.df;
    for (auto id : s.cooc) {
      const auto* node = ontology.find(id);
      if (node != nullptr && node->status == ConceptStatus::approved) {
        c.cooccurring_approved.insert(id);
      }
    }
    c.cooc = static_cast<double>(c.cooccurring_approved.size()) / denominator;
    c.weight = score_candidate(c.df, corpus.size(), c.cooc, config.lambda);
    c.source_docs = std::move(s.docs);
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.term < b.term; });
  return out;
}

std::map<ConceptId, std::uint64_t> cooccurrence_counts(
    std::string_view term, std::span<const DocumentProfile> corpus) {
  const auto words = split_words(term);
  std::map<ConceptId, std::uint64_t> counts;
  for (const auto& doc : corpus) {
    for (const auto& sentence : doc.sentences) {
      if (!contains_sequence(sentence.norms, words)) continue;
      for (auto id : sentence.concepts) ++counts[id];
    }
  }
  return counts;
}

void CandidateQueue::refresh(std::vector<CandidateConcept> pending) {
  std::erase_if(entries_, [](const auto& kv) {
    return kv.second.status == CandidateStatus::pending;
  });
  for (auto& c : pending) {
    if (entries_.contains(c.term)) continue;
    c.status = CandidateStatus::pending;
    auto term = c.term;
    entries_.emplace(std::move(term), std::move(c));
  }
}

std::vector<CandidateConcept> CandidateQueue::list_pending() const {
  std::vector<CandidateConcept> out;
  for (const auto& [term, c] : entries_) {
    if (c.status == CandidateStatus::pending) out.push_back(c);
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.term < b.term;
  });
  return out;
}

std::vector<CandidateConcept> CandidateQueue::all() const {
  std::vector<CandidateConcept> out;
  out.reserve(entries_.size());
  for (const auto& [term, c] : entries_) out.push_back(c);
  return out;
}

const CandidateConcept* CandidateQueue::find(std::string_view term) const {
  auto it = entries_.find(term);
  return it == entries_.end() ? nullptr : &it->second;
}

bool CandidateQueue::is_resolved(std::string_view term) const {
  const auto* c = find(term);
  return c != nullptr && c->status != CandidateStatus::pending;
}

const CandidateConcept& CandidateQueue::require_pending(std::string_view term) const {
  const auto* c = find(term);
  if (c == nullptr) {
    throw Error(ErrorCode::UnknownCandidate, "no candidate '" + std::string(term) + "'");
  }
  if (c->status != CandidateStatus::pending) {
    throw Error(ErrorCode::AlreadyResolved,
                "candidate '" + std::string(term) + "' is already " +
                    std::string(to_string(c->status)));
  }
  return *c;
}

void CandidateQueue::mark(std::string_view term, CandidateStatus status) {
  auto it = entries_.find(term);
  if (it == entries_.end()) {
    throw Error(ErrorCode::UnknownCandidate, "no candidate '" + std::string(term) + "'");
  }
  it->second.status = status;
}

void CandidateQueue::insert(CandidateConcept candidate) {
  auto term = candidate.term;
  entries_.insert_or_assign(std::move(term), std::move(candidate));
}

ConceptId accept_candidate(std::string_view term, CandidateQueue& queue,
                           Ontology& ontology,
                           std::span<const DocumentProfile> corpus,
                           const EnrichmentConfig& config) {
  const auto& candidate = queue.require_pending(term);
  std::optional<DocId> source;
  if (!candidate.source_docs.empty()) source = *candidate.source_docs.begin();

  const auto counts = cooccurrence_counts(term, corpus);
  const auto id = ontology.add_concept(term, {}, ConceptStatus::approved,
                                       Provenance::extraction(source));
  for (const auto& [other, n] : counts) {
    if (n < config.theta || n == 0 || other == id) continue;
    const auto* node = ontology.find(other);
    if (node == nullptr || node->status != ConceptStatus::approved) continue;
    ontology.add_relation(id, other, RelationType::related_to,
                          relation_strength(n), n);
  }
  queue.mark(term, CandidateStatus::accepted);
  return id;
}

void reject_candidate(std::string_view term, CandidateQueue& queue) {
  queue.require_pending(term);
  queue.mark(term, CandidateStatus::rejected);
}

ordered_json candidate_record(const CandidateConcept& c) {
  ordered_json j;
  j["kind"] = "candidate";
  j["term"] = c.term;
  j["df"] = c.df;
  j["weight"] = c.weight;
  j["cooc"] = c.cooc;
  j["cooccurring_approved"] = ordered_json::array();
  for (auto id : c.cooccurring_approved) j["cooccurring_approved"].push_back(id.value);
  j["status"] = to_string(c.status);
  j["source_docs"] = ordered_json::array();
  for (auto id : c.source_docs) j["source_docs"].push_back(id.value);
  return j;
}

CandidateConcept candidate_from_record(const ordered_json& j) {
  CandidateConcept c;
  c.term = j.at("term").get<std::string>();
  c.df = j.at("df").get<std::uint64_t>();
  c.weight = j.at("weight").get<double>();
  c.cooc = j.at("cooc").get<double>();
  for (const auto& id : j.at("cooccurring_approved")) {
    c.cooccurring_approved.insert(ConceptId(id.get<std::uint64_t>()));
  }
  c.status = parse_candidate_status(j.at("status").get<std::string>());
  for (const auto& id : j.at("source_docs")) c.source_docs.insert(DocId(id.get<std::uint64_t>()));
  return c;
}

}  // namespace cscope
