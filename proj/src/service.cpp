#include "cscope/service.hpp"

#include <sstream>

#include <httplib.h>

#include "cscope/api.hpp"
#include "cscope/evaluation.hpp"

namespace cscope {
namespace {

void send(httplib::Response& res, int status, const ordered_json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_ok(httplib::Response& res, ordered_json payload) {
  send(res, 200, api::ok(std::move(payload)));
}

void send_error(httplib::Response& res, ErrorCode code, std::string_view message) {
  send(res, http_status(code), api::error(code, message));
}

nlohmann::json json_body(const httplib::Request& req) {
  try {
    return nlohmann::json::parse(req.body);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("request body is not JSON: ") + e.what());
  }
}

DocId doc_id(const httplib::Request& req) {
  return DocId(api::parse_uint("document id", req.matches[1].str()));
}

ConceptId concept_id(const httplib::Request& req) {
  return ConceptId(api::parse_uint("concept id", req.matches[1].str()));
}

IngestRequest ingest_request(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "document must be an object");
  IngestRequest r;
  if (auto it = j.find("text"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw Error(ErrorCode::InvalidArgument, "text must be a string");
    r.text = it->get<std::string>();
  }
  if (auto it = j.find("metadata"); it != j.end()) r.meta = api::metadata_from_json(*it);
  return r;
}

std::string form_value(const httplib::Request& req, const std::string& key, bool required) {
  if (req.has_file(key)) return req.get_file_value(key).content;
  if (req.has_param(key)) return req.get_param_value(key);
  if (required) throw Error(ErrorCode::InvalidArgument, "missing form field " + key);
  return {};
}

std::map<std::string, std::string> params(const httplib::Request& req) {
  std::map<std::string, std::string> out;
  for (const auto& [k, v] : req.params) out[k] = v;
  return out;
}

}  // namespace

Service::Service(Engine& engine, ServiceOptions options)
    : engine_(engine), options_(std::move(options)), server_(std::make_unique<httplib::Server>()) {
  routes();
}

Service::~Service() { stop(); }

int Service::bind() {
  int port = options_.port;
  if (port == 0) {
    port = server_->bind_to_any_port(options_.host);
    if (port < 0) port = 0;
  } else if (!server_->bind_to_port(options_.host, port)) {
    port = 0;
  }
  if (port <= 0) {
    throw Error(ErrorCode::BindFailure,
                "cannot bind " + options_.host + ":" + std::to_string(options_.port));
  }
  return port;
}

void Service::listen() { server_->listen_after_bind(); }

void Service::stop() {
  if (server_) server_->stop();
}

void Service::wait_until_ready() const { server_->wait_until_ready(); }

void Service::routes() {
  auto& s = *server_;
  // Address reuse only, so a port held by another listener fails to bind.
  s.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
  });

  s.set_exception_handler([](const httplib::Request&, httplib::Response& res,
                             std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const Error& e) {
      send_error(res, e.code(), e.what());
    } catch (const std::exception& e) {
      send_error(res, ErrorCode::IoFailure, e.what());
    } catch (...) {
      send_error(res, ErrorCode::IoFailure, "unknown failure");
    }
  });

  // Unrouted paths; handlers' own error bodies are left alone.
  s.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
    send_error(res, ErrorCode::NotFound, "no route for " + req.method + " " + req.path);
    return httplib::Server::HandlerResponse::Handled;
  });

  s.Post("/documents", [this](const httplib::Request& req, httplib::Response& res) {
    const auto body = json_body(req);
    if (auto it = body.find("documents"); body.is_object() && it != body.end()) {
      if (!it->is_array()) throw Error(ErrorCode::InvalidArgument, "documents must be an array");
      std::vector<IngestRequest> batch;
      for (const auto& d : *it) batch.push_back(ingest_request(d));
      send_ok(res, api::to_json(std::span<const IngestOutcome>(engine_.ingest_batch(batch))));
      return;
    }
    send_ok(res, api::to_json(engine_.ingest(ingest_request(body))));
  });

  s.Post("/fetch", [this](const httplib::Request& req, httplib::Response& res) {
    const auto body = json_body(req);
    if (!body.is_object()) throw Error(ErrorCode::InvalidArgument, "body must be an object");
    const auto query = body.value("query", std::string());
    const auto limit = body.value("limit", std::uint64_t{20});
    const auto dir = options_.source_dir.empty() ? engine_.config().source_dir : options_.source_dir;
    if (dir.empty()) throw Error(ErrorCode::SourceUnavailable, "no remote source configured");
    FixtureSourceClient client(dir);
    SteadyClock clock;
    send_ok(res, api::to_json(engine_.fetch(query, limit, client, clock)));
  });

  s.Get(R"(/documents/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    send_ok(res, api::document_json(engine_, doc_id(req)));
  });

  s.Post(R"(/documents/([^/]+)/purge)",
         [this](const httplib::Request& req, httplib::Response& res) {
           const auto id = doc_id(req);
           engine_.purge(id);
           send_ok(res, api::to_json(engine_.document(id)));
         });

  s.Get("/candidates", [this](const httplib::Request& req, httplib::Response& res) {
    const auto status = req.has_param("status") ? req.get_param_value("status") : "pending";
    if (status == "pending") {
      send_ok(res, api::to_json(std::span<const CandidateConcept>(engine_.list_pending())));
      return;
    }
    if (status != "all") {
      const auto wanted = parse_candidate_status(status);
      std::vector<CandidateConcept> out;
      for (auto& c : engine_.candidates()) {
        if (c.status == wanted) out.push_back(std::move(c));
      }
      send_ok(res, api::to_json(std::span<const CandidateConcept>(out)));
      return;
    }
    send_ok(res, api::to_json(std::span<const CandidateConcept>(engine_.candidates())));
  });

  s.Post(R"(/candidates/([^/]+)/accept)",
         [this](const httplib::Request& req, httplib::Response& res) {
           const auto id = engine_.accept(req.matches[1].str());
           send_ok(res, api::to_json(engine_.concept_node(id)));
         });

  s.Post(R"(/candidates/([^/]+)/reject)",
         [this](const httplib::Request& req, httplib::Response& res) {
           const auto term = req.matches[1].str();
           engine_.reject(term);
           ordered_json payload;
           payload["term"] = term;
           payload["status"] = "rejected";
           send_ok(res, std::move(payload));
         });

  s.Get("/search", [this](const httplib::Request& req, httplib::Response& res) {
    send_ok(res, api::to_json(engine_.search(api::search_query_from_params(params(req)))));
  });

  s.Get(R"(/concepts/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    send_ok(res, api::to_json(engine_.concept_node(concept_id(req))));
  });

  s.Get(R"(/concepts/([^/]+)/neighbors)",
        [this](const httplib::Request& req, httplib::Response& res) {
          const int hops = req.has_param("hops")
                               ? static_cast<int>(api::parse_uint("hops", req.get_param_value("hops")))
                               : 1;
          const double min_weight =
              req.has_param("min_weight")
                  ? api::parse_double("min_weight", req.get_param_value("min_weight"))
                  : 0.0;
          const auto neighbors = engine_.neighbors(concept_id(req), hops, min_weight);
          send_ok(res, api::to_json(std::span<const Neighbor>(neighbors)));
        });

  s.Post("/eval/compare", [this](const httplib::Request& req, httplib::Response& res) {
    std::istringstream runs_a(form_value(req, "runs_a", true));
    std::istringstream runs_b(form_value(req, "runs_b", true));
    std::istringstream judgments_a(form_value(req, "judgments", true));
    const auto judgments_b_text = form_value(req, "judgments_b", false);
    const auto beta_text = form_value(req, "beta", false);
    const double beta =
        beta_text.empty() ? engine_.config().beta : api::parse_double("beta", beta_text);

    const auto a = eval::parse_runs(runs_a, "A");
    const auto b = eval::parse_runs(runs_b, "B");
    const auto ja = eval::parse_judgments(judgments_a);
    eval::Judgments jb = ja;
    if (!judgments_b_text.empty()) {
      std::istringstream in(judgments_b_text);
      jb = eval::parse_judgments(in);
    }
    auto payload = api::to_json(eval::compare_systems(a, b, ja, jb, beta));
    if (!eval::beta_in_documented_range(beta)) {
      payload["warning"] = "beta lies outside the [0,1] weighting range";
    }
    send_ok(res, std::move(payload));
  });
}

}  // namespace cscope
