// cscope: command line front end for the literature search engine.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cscope/api.hpp"
#include "cscope/config.hpp"
#include "cscope/engine.hpp"
#include "cscope/error.hpp"
#include "cscope/evaluation.hpp"
#include "cscope/service.hpp"

namespace fs = std::filesystem;
using namespace cscope;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitClient = 3;
constexpr int kExitServer = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::string data_dir;
  std::string config_path;
  bool json = false;
};

Config load_cli_config(const Globals& g) {
  if (g.config_path.empty()) return {};
  return load_config(g.config_path);
}

void emit(const Globals& g, const ordered_json& payload, const std::function<void()>& text) {
  if (g.json) {
    std::cout << api::ok(payload).dump() << '\n';
  } else {
    text();
  }
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

// Plain-text files are read directly; anything else goes through the
// configured extraction command.
std::string document_text(const fs::path& path, const Config& config) {
  const auto ext = path.extension().string();
  if (ext == ".txt" || ext == ".text" || ext == ".md" || config.text_extract_command.empty()) {
    return read_file(path);
  }
  const auto command = config.text_extract_command + " " + shell_quote(path.string());
  FILE* pipe = popen(command.c_str(), "r");
  if (pipe == nullptr) throw Error(ErrorCode::IoFailure, "cannot run " + command);
  std::string out;
  char buf[4096];
  for (std::size_t n; (n = std::fread(buf, 1, sizeof(buf), pipe)) > 0;) out.append(buf, n);
  if (pclose(pipe) != 0) throw Error(ErrorCode::IoFailure, "text extraction failed: " + command);
  return out;
}

DocumentMetadata sidecar_metadata(const fs::path& path) {
  auto sidecar = path;
  sidecar.replace_extension(".json");
  if (!fs::exists(sidecar) || sidecar == path) return {};
  try {
    return api::metadata_from_json(nlohmann::json::parse(read_file(sidecar)));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, sidecar.string() + ": " + e.what());
  }
}

std::string format_score(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

void print_candidates(const std::vector<CandidateConcept>& items) {
  std::cout << "term\tdf\tweight\tstatus\n";
  for (const auto& c : items) {
    std::cout << c.term << '\t' << c.df << '\t' << format_score(c.weight) << '\t'
              << to_string(c.status) << '\n';
  }
}

std::vector<std::int64_t> parse_g_list(const std::string& text) {
  std::vector<std::int64_t> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.push_back(static_cast<std::int64_t>(api::parse_uint("G", item)));
  }
  return out;
}

int exit_code_for(ErrorCode code) {
  return error_class(code) == ErrorClass::server ? kExitServer : kExitClient;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ontology-backed literature search engine"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  const char* env_dir = std::getenv("CSCOPE_DATA_DIR");
  g.data_dir = env_dir != nullptr ? env_dir : "cscope-data";
  app.add_option("--data-dir", g.data_dir, "Data directory (env CSCOPE_DATA_DIR)");
  app.add_option("--config", g.config_path, "key=value configuration file");
  app.add_flag("--json", g.json, "Print JSON envelopes");

  std::function<void()> action;
  auto engine = [&] { return Engine(g.data_dir, load_cli_config(g)); };

  // init
  auto* init = app.add_subcommand("init", "Create the data directory (idempotent)");
  std::string seed;
  init->add_option("--seed", seed, "Seed ontology file");
  init->callback([&] {
    action = [&] {
      Engine::init(g.data_dir);
      ordered_json payload;
      payload["data_dir"] = g.data_dir;
      std::optional<SeedSummary> summary;
      if (!seed.empty()) {
        summary = engine().load_seed(seed);
        payload["seed"] = api::to_json(*summary);
      }
      emit(g, payload, [&] {
        std::cout << "initialized " << g.data_dir << '\n';
        if (summary) {
          std::cout << "seed: " << summary->concepts_added << " concepts, "
                    << summary->relations_added << " relations\n";
        }
      });
    };
  });

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Ingest documents (sidecar <name>.json holds metadata)");
  std::vector<std::string> files;
  ingest->add_option("files", files, "Document files")->required();
  ingest->callback([&] {
    action = [&] {
      auto e = engine();
      std::vector<IngestRequest> batch;
      for (const auto& f : files) {
        batch.push_back({document_text(f, e.config()), sidecar_metadata(f)});
      }
      const auto outcomes = e.ingest_batch(batch);
      emit(g, api::to_json(std::span<const IngestOutcome>(outcomes)), [&] {
        for (std::size_t i = 0; i < outcomes.size(); ++i) {
          std::cout << outcomes[i].id.value << '\t'
                    << (outcomes[i].duplicate ? "duplicate" : "new") << '\t' << files[i] << '\n';
        }
      });
    };
  });

  // fetch
  auto* fetch = app.add_subcommand("fetch", "Fetch new documents from the remote source");
  std::string fetch_query;
  std::size_t fetch_limit = 20;
  std::string fetch_source;
  fetch->add_option("--query", fetch_query, "Source query")->required();
  fetch->add_option("--limit", fetch_limit, "Maximum references to list");
  fetch->add_option("--source", fetch_source, "Fixture source directory");
  fetch->callback([&] {
    action = [&] {
      auto e = engine();
      fs::path dir = fetch_source.empty() ? e.config().source_dir : fs::path(fetch_source);
      if (dir.empty()) throw Error(ErrorCode::SourceUnavailable, "no remote source configured");
      FixtureSourceClient client(dir);
      SteadyClock clock;
      const auto summary = e.fetch(fetch_query, fetch_limit, client, clock);
      emit(g, api::to_json(summary), [&] {
        std::cout << "fetched " << summary.fetched << ", ingested " << summary.ingested
                  << " (" << summary.metadata_only << " metadata only), skipped "
                  << summary.skipped_dupe << " duplicates\n";
      });
    };
  });

  // extract
  auto* extract = app.add_subcommand("extract", "Recompute candidate concepts");
  extract->callback([&] {
    action = [&] {
      const auto pending = engine().extract();
      emit(g, api::to_json(std::span<const CandidateConcept>(pending)),
           [&] { print_candidates(pending); });
    };
  });

  // queue
  auto* queue = app.add_subcommand("queue", "Review candidate concepts");
  queue->require_subcommand(1);
  queue->fallthrough();
  auto* queue_list = queue->add_subcommand("list", "List pending candidates");
  queue_list->callback([&] {
    action = [&] {
      const auto pending = engine().list_pending();
      emit(g, api::to_json(std::span<const CandidateConcept>(pending)),
           [&] { print_candidates(pending); });
    };
  });
  auto* queue_accept = queue->add_subcommand("accept", "Accept candidates by term or the top N");
  std::vector<std::string> accept_terms;
  std::size_t accept_top = 0;
  queue_accept->add_option("terms", accept_terms, "Candidate terms");
  queue_accept->add_option("--top", accept_top, "Accept the N highest-weighted pending terms");
  queue_accept->callback([&] {
    action = [&] {
      if (accept_terms.empty() && accept_top == 0) throw UsageError("give a term or --top N");
      auto e = engine();
      auto terms = accept_terms;
      if (accept_top > 0) {
        auto pending = e.list_pending();
        for (std::size_t i = 0; i < pending.size() && i < accept_top; ++i) {
          terms.push_back(pending[i].term);
        }
      }
      auto accepted = ordered_json::array();
      for (const auto& t : terms) {
        // An earlier accept can refresh the queue and drop a later term.
        if (accept_top > 0 && !e.view()->queue.find(t)) continue;
        accepted.push_back(api::to_json(e.concept_node(e.accept(t))));
      }
      emit(g, accepted, [&] {
        for (const auto& c : accepted) {
          std::cout << "accepted " << c["label"].get<std::string>() << " as concept "
                    << c["id"].get<std::uint64_t>() << '\n';
        }
      });
    };
  });
  auto* queue_reject = queue->add_subcommand("reject", "Reject candidates");
  std::vector<std::string> reject_terms;
  queue_reject->add_option("terms", reject_terms, "Candidate terms")->required();
  queue_reject->callback([&] {
    action = [&] {
      auto e = engine();
      for (const auto& t : reject_terms) e.reject(t);
      emit(g, reject_terms, [&] {
        for (const auto& t : reject_terms) std::cout << "rejected " << t << '\n';
      });
    };
  });

  // search
  auto* search = app.add_subcommand("search", "Search the corpus");
  std::string mode = "free_text";
  std::string query_text;
  std::map<std::string, std::string> filters;
  std::size_t search_limit = 20;
  search->add_option("--mode", mode, "metadata | concept | free_text");
  search->add_option("--query,-q", query_text, "Query text");
  for (const char* f : {"author", "journal", "year-from", "year-to", "doi"}) {
    search->add_option_function<std::string>(
        std::string("--") + f,
        [&filters, key = std::string(f)](const std::string& v) {
          auto k = key;
          std::replace(k.begin(), k.end(), '-', '_');
          filters[k] = v;
        },
        std::string("Metadata filter: ") + f);
  }
  search->add_option("--limit", search_limit, "Maximum results");
  search->callback([&] {
    action = [&] {
      auto params = filters;
      params["mode"] = mode;
      params["q"] = query_text;
      params["limit"] = std::to_string(search_limit);
      const auto query = api::search_query_from_params(params);
      if (query.mode != SearchMode::metadata && query_text.empty()) {
        throw UsageError("search needs --query");
      }
      if (query.mode == SearchMode::metadata && query.filters.empty()) {
        throw UsageError("metadata search needs at least one filter");
      }
      const auto response = engine().search(query);
      emit(g, api::to_json(response), [&] {
        std::size_t rank = 1;
        for (const auto& r : response.results) {
          std::cout << rank++ << '\t' << r.doc.value << '\t' << format_score(r.score) << '\t'
                    << r.doi << '\t' << r.title << '\n';
        }
        if (!response.unmatched_tokens.empty()) {
          std::cout << "unmatched:";
          for (const auto& t : response.unmatched_tokens) std::cout << ' ' << t;
          std::cout << '\n';
        }
      });
    };
  });

  // purge
  auto* purge = app.add_subcommand("purge", "Delete stored full text, keeping metadata");
  std::vector<std::uint64_t> purge_ids;
  bool purge_all = false;
  purge->add_option("ids", purge_ids, "Document ids");
  purge->add_flag("--all", purge_all, "Purge every document still holding text");
  purge->callback([&] {
    action = [&] {
      if (purge_ids.empty() && !purge_all) throw UsageError("give document ids or --all");
      auto e = engine();
      std::vector<DocId> ids;
      for (auto id : purge_ids) ids.emplace_back(id);
      if (purge_all) {
        for (const auto& r : e.view()->registry.records()) {
          if (r.content_state == ContentState::full_text) ids.push_back(r.id);
        }
      }
      auto purged = ordered_json::array();
      for (auto id : ids) {
        e.purge(id);
        purged.push_back(id.value);
      }
      emit(g, purged, [&] { std::cout << "purged " << purged.size() << " documents\n"; });
    };
  });

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Retrieval evaluation");
  eval_cmd->require_subcommand(1);
  eval_cmd->fallthrough();
  auto* compare = eval_cmd->add_subcommand("compare", "Compare two systems' F-measure by G");
  std::string runs_a, runs_b, judgments_a, judgments_b, g_list, name_a = "A", name_b = "B";
  std::optional<double> beta;
  compare->add_option("--runs-a", runs_a, "Run file of system A")->required();
  compare->add_option("--runs-b", runs_b, "Run file of system B")->required();
  compare->add_option("--judgments", judgments_a, "Judgment file")->required();
  compare->add_option("--judgments-b", judgments_b, "Separate judgment file for system B");
  compare->add_option("--beta", beta, "F-measure beta (default from config, else 1)");
  compare->add_option("--g", g_list, "Comma separated G values to report");
  compare->add_option("--name-a", name_a, "Column name of system A");
  compare->add_option("--name-b", name_b, "Column name of system B");
  compare->callback([&] {
    action = [&] {
      const auto config = load_cli_config(g);
      const double b = beta.value_or(config.beta);
      if (!eval::beta_in_documented_range(b)) {
        std::cerr << "warning: beta=" << b << " lies outside the [0,1] weighting range\n";
      }
      const auto a = eval::load_runs(runs_a, name_a);
      const auto bb = eval::load_runs(runs_b, name_b);
      const auto ja = eval::load_judgments(judgments_a);
      const auto jb = judgments_b.empty() ? ja : eval::load_judgments(judgments_b);
      const auto gs = parse_g_list(g_list);
      const auto comparison = eval::compare_systems(a, bb, ja, jb, b, gs);
      emit(g, api::to_json(comparison), [&] { eval::write_comparison_tsv(std::cout, comparison); });
    };
  });
  auto* curve = eval_cmd->add_subcommand("curve", "F as a function of G for fixed g_r and N");
  std::int64_t curve_gr = 0, curve_n = 0;
  curve->add_option("--relevant-retrieved", curve_gr, "g_r")->required();
  curve->add_option("--retrieved", curve_n, "N")->required();
  curve->add_option("--g", g_list, "Comma separated G values")->required();
  curve->add_option("--beta", beta, "F-measure beta");
  curve->callback([&] {
    action = [&] {
      const auto gs = parse_g_list(g_list);
      const auto points = eval::f_curve(curve_gr, curve_n, gs, beta.value_or(1.0));
      auto payload = ordered_json::array();
      for (const auto& p : points) payload.push_back({{"G", p.total_relevant}, {"f", p.f}});
      emit(g, payload, [&] { eval::write_curve(std::cout, points); });
    };
  });

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  ServiceOptions service_options;
  std::string serve_source;
  serve->add_option("--host", service_options.host, "Bind address");
  serve->add_option("--port", service_options.port, "Port (0 picks a free one)");
  serve->add_option("--source", serve_source, "Fixture source directory for POST /fetch");
  serve->callback([&] {
    action = [&] {
      auto e = engine();
      service_options.source_dir = serve_source;
      Service service(e, service_options);
      const int port = service.bind();
      std::cout << "listening on " << service_options.host << ':' << port << std::endl;
      service.listen();
    };
  });

  // concept
  auto* concept_cmd = app.add_subcommand("concept", "Inspect and edit the ontology");
  concept_cmd->require_subcommand(1);
  concept_cmd->fallthrough();
  auto* concept_add = concept_cmd->add_subcommand("add", "Add an approved concept");
  std::string label;
  std::vector<std::string> synonyms;
  concept_add->add_option("label", label, "Preferred label")->required();
  concept_add->add_option("--synonym", synonyms, "Synonym (repeatable)");
  concept_add->callback([&] {
    action = [&] {
      auto e = engine();
      const auto id = e.add_concept(label, {synonyms.begin(), synonyms.end()});
      emit(g, api::to_json(e.concept_node(id)),
           [&] { std::cout << "concept " << id.value << '\n'; });
    };
  });
  auto* concept_show = concept_cmd->add_subcommand("show", "Show a concept");
  std::uint64_t concept_id = 0;
  concept_show->add_option("id", concept_id, "Concept id")->required();
  concept_show->callback([&] {
    action = [&] {
      const auto node = engine().concept_node(ConceptId(concept_id));
      emit(g, api::to_json(node), [&] {
        std::cout << node.id.value << '\t' << node.label << '\t' << to_string(node.status) << '\n';
      });
    };
  });
  auto* concept_neighbors = concept_cmd->add_subcommand("neighbors", "Weighted neighborhood");
  int hops = 1;
  double min_weight = 0.0;
  concept_neighbors->add_option("id", concept_id, "Concept id")->required();
  concept_neighbors->add_option("--hops", hops, "Maximum hops");
  concept_neighbors->add_option("--min-weight", min_weight, "Minimum path weight");
  concept_neighbors->callback([&] {
    action = [&] {
      const auto result = engine().neighbors(ConceptId(concept_id), hops, min_weight);
      emit(g, api::to_json(std::span<const Neighbor>(result)), [&] {
        for (const auto& n : result) {
          std::cout << n.concept_node.id.value << '\t' << n.concept_node.label << '\t'
                    << format_score(n.path_weight) << '\n';
        }
      });
    };
  });
  auto* relation_list = concept_cmd->add_subcommand("relations", "List relations");
  relation_list->callback([&] {
    action = [&] {
      const auto state = engine().view();
      auto payload = ordered_json::array();
      for (const auto& r : state->ontology.relations()) payload.push_back(api::to_json(r));
      emit(g, payload, [&] {
        for (const auto& r : state->ontology.relations()) {
          std::cout << r.src.value << '\t' << r.dst.value << '\t' << to_string(r.type) << '\t'
                    << format_score(r.weight) << '\t' << r.evidence_count << '\n';
        }
      });
    };
  });

  // doc
  auto* doc = app.add_subcommand("doc", "Show a stored document");
  std::uint64_t doc_id = 0;
  doc->add_option("id", doc_id, "Document id")->required();
  doc->callback([&] {
    action = [&] {
      auto e = engine();
      const auto payload = api::document_json(e, DocId(doc_id));
      emit(g, payload, [&] { std::cout << payload.dump(2) << '\n'; });
    };
  });

  // index
  auto* index = app.add_subcommand("reindex", "Rebuild postings from stored text");
  index->callback([&] {
    action = [&] {
      const auto rebuilt = engine().rebuild_index();
      ordered_json payload;
      payload["documents"] = rebuilt.doc_count();
      payload["terms"] = rebuilt.term_count();
      emit(g, payload, [&] {
        std::cout << rebuilt.doc_count() << " documents, " << rebuilt.term_count() << " terms\n";
      });
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    action();
    return kExitOk;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const Error& e) {
    if (g.json) {
      std::cout << api::error(e).dump() << '\n';
    }
    std::cerr << "error: " << e.name() << ": " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitServer;
  }
}
