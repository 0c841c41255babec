#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "cscope/api.hpp"
#include "cscope/service.hpp"
#include "test_support.hpp"

using namespace cscope;
using cscope::testing::fixture;
using cscope::testing::TempDir;
using nlohmann::json;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Seeded engine with a running server on an ephemeral port.
class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    Engine::init(dir_.path());
    engine_ = std::make_unique<Engine>(dir_.path());
    engine_->load_seed(fixture("seed_ontology.txt"));
    ServiceOptions opts;
    opts.port = 0;
    opts.source_dir = fixture("source");
    service_ = std::make_unique<Service>(*engine_, opts);
    port_ = service_->bind();
    thread_ = std::thread([this] { service_->listen(); });
    service_->wait_until_ready();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
  }

  void TearDown() override {
    service_->stop();
    thread_.join();
  }

  json post_json(const std::string& path, const json& body, int expect_status = 200) {
    auto res = client_->Post(path, body.dump(), "application/json");
    EXPECT_TRUE(res);
    EXPECT_EQ(res->status, expect_status) << res->body;
    return json::parse(res->body);
  }

  json get(const std::string& path, int expect_status = 200) {
    auto res = client_->Get(path);
    EXPECT_TRUE(res);
    EXPECT_EQ(res->status, expect_status) << res->body;
    return json::parse(res->body);
  }

  json ingest_abstracts(int count) {
    json docs = json::array();
    for (int i = 1; i <= count; ++i) {
      char stem[32];
      std::snprintf(stem, sizeof stem, "abstracts/abstract_%02d", i);
      docs.push_back({{"text", slurp(fixture(std::string(stem) + ".txt"))},
                      {"metadata", json::parse(slurp(fixture(std::string(stem) + ".json")))}});
    }
    return post_json("/documents", {{"documents", docs}});
  }

  TempDir dir_;
  std::unique_ptr<Engine> engine_;
  std::unique_ptr<Service> service_;
  std::unique_ptr<httplib::Client> client_;
  std::thread thread_;
  int port_ = 0;
};

std::string encode(const std::string& s) {
  std::string out;
  for (char c : s) out += c == ' ' ? std::string("%20") : std::string(1, c);
  return out;
}

}  // namespace

TEST_F(ServiceTest, IngestAndFetchDocument) {
  const auto r = ingest_abstracts(5);
  ASSERT_EQ(r["status"], "ok");
  ASSERT_EQ(r["payload"].size(), 5u);
  const auto id = r["payload"][0]["id"].get<std::uint64_t>();
  const auto doc = get("/documents/" + std::to_string(id));
  EXPECT_EQ(doc["payload"]["content_state"], "full_text");
  EXPECT_TRUE(doc["payload"].contains("text"));

  const auto dup = post_json("/documents", {{"text", slurp(fixture("abstracts/abstract_01.txt"))}});
  EXPECT_EQ(dup["payload"]["duplicate"], true);
  const auto empty = post_json("/documents", {{"text", "  "}}, 400);
  EXPECT_EQ(empty["status"], "error");
  EXPECT_EQ(empty["error_code"], "EmptyDocument");
  EXPECT_EQ(post_json("/documents", json("not an object"), 400)["error_code"], "InvalidArgument");
  auto raw = client_->Post("/documents", "{broken", "application/json");
  EXPECT_EQ(json::parse(raw->body)["error_code"], "ParseError");
}

TEST_F(ServiceTest, SearchMatchesLibrary) {
  ingest_abstracts(20);
  for (const auto& [mode, q] : std::vector<std::pair<std::string, std::string>>{
           {"free_text", "copd exacerbation"}, {"concept", "chronic kidney disease"}}) {
    const auto body = get("/search?mode=" + mode + "&q=" + encode(q) + "&limit=10");
    SearchQuery query;
    query.mode = parse_search_mode(mode);
    query.text = q;
    query.limit = 10;
    const auto expected = api::ok(api::to_json(engine_->search(query)));
    EXPECT_EQ(body.dump(), json::parse(expected.dump()).dump());
    EXPECT_FALSE(body["payload"]["results"].empty());
  }
  const auto meta = get("/search?mode=metadata&year_from=2008&year_to=2008");
  for (const auto& r : meta["payload"]["results"]) EXPECT_EQ(r["score"], 1.0);
  EXPECT_EQ(get("/search?mode=metadata", 400)["error_code"], "NoFilter");
  EXPECT_EQ(get("/search?mode=free_text&q=", 400)["error_code"], "EmptyQuery");
  EXPECT_EQ(get("/search?mode=fuzzy&q=x", 400)["error_code"], "InvalidArgument");
  EXPECT_EQ(get("/search?q=copd&limit=abc", 400)["error_code"], "InvalidArgument");
}

TEST_F(ServiceTest, CandidateQueueFlow) {
  ingest_abstracts(20);
  engine_->extract();
  const auto pending = get("/candidates");
  ASSERT_FALSE(pending["payload"].empty());
  const auto term = pending["payload"][0]["term"].get<std::string>();
  const auto accepted = post_json("/candidates/" + encode(term) + "/accept", json::object());
  EXPECT_EQ(accepted["payload"]["status"], "approved");
  EXPECT_EQ(accepted["payload"]["label"], term);
  const auto again = post_json("/candidates/" + encode(term) + "/accept", json::object(), 409);
  EXPECT_EQ(again["error_code"], "AlreadyResolved");
  EXPECT_EQ(post_json("/candidates/nonexistent/reject", json::object(), 404)["error_code"],
            "UnknownCandidate");
  const auto accepted_list = get("/candidates?status=accepted");
  ASSERT_EQ(accepted_list["payload"].size(), 1u);
  EXPECT_EQ(accepted_list["payload"][0]["term"], term);

  const auto id = accepted["payload"]["id"].get<std::uint64_t>();
  EXPECT_EQ(get("/concepts/" + std::to_string(id))["payload"]["label"], term);
  EXPECT_EQ(get("/concepts/99999", 404)["error_code"], "UnknownConcept");
}

TEST_F(ServiceTest, PurgedDocumentHasNoText) {
  const auto r = ingest_abstracts(3);
  const auto id = std::to_string(r["payload"][1]["id"].get<std::uint64_t>());
  const auto purged = post_json("/documents/" + id + "/purge", json::object());
  EXPECT_EQ(purged["payload"]["content_state"], "purged");
  const auto doc = get("/documents/" + id);
  EXPECT_EQ(doc["payload"]["content_state"], "purged");
  EXPECT_FALSE(doc["payload"].contains("text"));
  EXPECT_EQ(post_json("/documents/" + id + "/purge", json::object(), 409)["error_code"],
            "AlreadyPurged");
  EXPECT_EQ(get("/documents/424242", 404)["error_code"], "UnknownDocument");
}

TEST_F(ServiceTest, NeighborsAndUnknownRoutes) {
  const auto copd = engine_->find_concepts("copd").at(0).id;
  const auto n = get("/concepts/" + std::to_string(copd.value) + "/neighbors?hops=2&min_weight=0.5");
  ASSERT_FALSE(n["payload"].empty());
  for (const auto& row : n["payload"]) EXPECT_GE(row["path_weight"].get<double>(), 0.5);
  const auto missing = get("/nowhere", 404);
  EXPECT_EQ(missing["status"], "error");
  EXPECT_EQ(missing["error_code"], "NotFound");
}

TEST_F(ServiceTest, FetchRerunIngestsNothing) {
  const auto first = post_json("/fetch", {{"query", "chronic"}, {"limit", 3}});
  EXPECT_EQ(first["payload"]["fetched"], 3);
  const auto second = post_json("/fetch", {{"query", "chronic"}, {"limit", 3}});
  EXPECT_EQ(second["payload"]["ingested"], 0);
  EXPECT_EQ(post_json("/fetch", {{"query", "x"}, {"limit", 0}}, 400)["error_code"],
            "InvalidArgument");
}

TEST_F(ServiceTest, EvalCompareMultipart) {
  httplib::MultipartFormDataItems items{
      {"runs_a", slurp(fixture("comparison/runs_a.txt")), "runs_a.txt", "text/plain"},
      {"runs_b", slurp(fixture("comparison/runs_b.txt")), "runs_b.txt", "text/plain"},
      {"judgments", slurp(fixture("comparison/judgments.txt")), "judgments.txt", "text/plain"},
  };
  auto res = client_->Post("/eval/compare", items);
  ASSERT_TRUE(res);
  ASSERT_EQ(res->status, 200) << res->body;
  const auto body = json::parse(res->body);
  const auto& rows = body["payload"]["rows"];
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_NEAR(rows[0]["f_a"].get<double>(), 0.724637681, 1e-9);
  EXPECT_NEAR(rows[2]["f_b"].get<double>(), 0.271739130, 1e-9);
  EXPECT_FALSE(body["payload"].contains("warning"));

  items.push_back({"beta", "2", "", ""});
  const auto warned = json::parse(client_->Post("/eval/compare", items)->body);
  EXPECT_TRUE(warned["payload"].contains("warning"));

  httplib::MultipartFormDataItems partial{items[0]};
  auto bad = client_->Post("/eval/compare", partial);
  EXPECT_EQ(bad->status, 400);
  EXPECT_EQ(json::parse(bad->body)["error_code"], "InvalidArgument");
}

TEST(ServiceBind, BusyPortIsBindFailure) {
  TempDir dir;
  Engine::init(dir.path());
  Engine engine(dir.path());
  ServiceOptions a;
  a.port = 0;
  Service first(engine, a);
  const int port = first.bind();
  std::thread t([&] { first.listen(); });
  first.wait_until_ready();
  ServiceOptions b;
  b.port = port;
  Service second(engine, b);
  EXPECT_CSCOPE_ERROR(second.bind(), ErrorCode::BindFailure);
  first.stop();
  t.join();
}
