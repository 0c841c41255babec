// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cscope/enrichment.hpp"
#include "cscope/evaluation.hpp"
#include "cscope/jsonl.hpp"
#include "cscope/ontology.hpp"
#include "cscope/search.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cscope;

namespace {

// Tolerances and budgets.
constexpr double table_tolerance = 1e-9;
constexpr double closed_form_tolerance = 1e-12;
constexpr double bm25_tolerance = 1e-3;
constexpr double table_budget_s = 1.0;
constexpr double oracle_budget_s = 30.0;
constexpr double pipeline_budget_s = 60.0;
constexpr int closed_form_cases = 10000;
constexpr int gazetteer_cases = 500;
constexpr int expansion_cases = 200;
constexpr int snapshot_cases = 100;

const fs::path fixtures = CSCOPE_FIXTURE_DIR;
const std::string cli = CSCOPE_CLI;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool cond, const std::string& what) {
  if (!cond) throw Failure(what);
}

std::string quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) out += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return out + "'";
}

// Runs the CLI and returns stdout; throws on a non-zero exit.
std::string run_cli(const fs::path& data_dir, const std::vector<std::string>& args) {
  std::string cmd = quote(cli) + " --data-dir " + quote(data_dir.string());
  for (const auto& a : args) cmd += " " + quote(a);
  cmd += " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  require(pipe != nullptr, "cannot start " + cmd);
  std::string out;
  std::array<char, 4096> buf{};
  while (auto n = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  const int status = pclose(pipe);
  require(status == 0, "command failed: " + cmd + "\n" + out);
  return out;
}

json cli_json(const fs::path& data_dir, std::vector<std::string> args) {
  args.insert(args.begin(), "--json");
  const auto out = run_cli(data_dir, args);
  const auto j = json::parse(out);
  require(j.at("status") == "ok", "error envelope: " + out);
  return j.at("payload");
}

class ScratchDir {
 public:
  explicit ScratchDir(const std::string& name) {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("cscope-accept-" + name + "-" + std::to_string(rd()));
    fs::remove_all(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string sci(double v) {
  std::ostringstream ss;
  ss.precision(2);
  ss << std::scientific << v;
  return ss.str();
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(9);
  ss << std::fixed << v;
  return ss.str();
}

// ---- criteria -------------------------------------------------------------

Outcome comparison_table() {
  ScratchDir dir("table");
  const auto t0 = std::chrono::steady_clock::now();
  const auto tsv = run_cli(dir.path(), {"eval", "compare",
                                        "--runs-a", (fixtures / "comparison/runs_a.txt").string(),
                                        "--runs-b", (fixtures / "comparison/runs_b.txt").string(),
                                        "--judgments", (fixtures / "comparison/judgments.txt").string()});
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const std::array<long, 3> gs{500, 1000, 2000};
  const std::array<double, 3> fa{0.724637681, 0.531914894, 0.347222222};
  const std::array<double, 3> fb{0.595238095, 0.426136364, 0.271739130};
  std::istringstream in(tsv);
  std::string header;
  std::getline(in, header);
  double worst = 0.0;
  for (std::size_t i = 0; i < gs.size(); ++i) {
    long g = 0;
    double a = 0.0;
    double b = 0.0;
    require(static_cast<bool>(in >> g >> a >> b), "short comparison output:\n" + tsv);
    require(g == gs[i], "unexpected G " + std::to_string(g));
    worst = std::max({worst, std::abs(a - fa[i]), std::abs(b - fb[i])});
  }
  require(worst <= table_tolerance, "max deviation " + sci(worst));
  require(elapsed < table_budget_s, "took " + std::to_string(elapsed) + " s");
  return {true, "max deviation " + sci(worst) + ", " + fmt(elapsed) + " s"};
}

Outcome f_closed_form() {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::int64_t> big(1, 1'000'000);
  double worst = 0.0;
  for (int i = 0; i < closed_form_cases; ++i) {
    const auto n = big(rng);
    const auto g_total = big(rng);
    std::uniform_int_distribution<std::int64_t> pick(0, std::min(n, g_total));
    const auto g = pick(rng);
    const double f = eval::f_measure(eval::precision(g, n), eval::recall(g, g_total), 1.0);
    const double expected = 2.0 * static_cast<double>(g) / static_cast<double>(n + g_total);
    worst = std::max(worst, std::abs(f - expected));
  }
  require(worst <= closed_form_tolerance, "max deviation " + sci(worst));
  return {true, std::to_string(closed_form_cases) + " cases, max deviation " + sci(worst)};
}

Outcome oracle_equivalence() {
  const TextProcessor tp;
  std::mt19937 rng(7);

  auto t0 = std::chrono::steady_clock::now();
  std::uniform_int_distribution<std::size_t> doc_len(0, 50);
  for (int round = 0; round < gazetteer_cases; ++round) {
    const auto o = oracle::random_ontology(rng, 10, 0, 6);
    std::vector<std::string> norms;
    for (auto n = doc_len(rng); n > 0; --n) norms.push_back(oracle::random_word(rng, 6));
    const Gazetteer g(o, tp);
    require(g.match(norms) == oracle::longest_match(oracle::dictionary(o, tp), norms),
            "gazetteer disagrees in round " + std::to_string(round));
  }
  const double gaz_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  require(gaz_s < oracle_budget_s, "gazetteer suite took " + std::to_string(gaz_s) + " s");

  t0 = std::chrono::steady_clock::now();
  for (int round = 0; round < expansion_cases; ++round) {
    const auto o = oracle::random_ontology(rng, 12, 30);
    std::vector<ConceptId> seeds;
    std::uniform_int_distribution<int> coin(0, 2);
    for (const auto& c : o.concepts()) {
      if (c.status == ConceptStatus::approved && coin(rng) == 0) seeds.push_back(c.id);
    }
    for (int hops = 1; hops <= 3; ++hops) {
      const auto got = concept_activation(o, seeds, hops, 0.5);
      const auto want = oracle::activation(o, seeds, hops, 0.5);
      bool same = got.size() == want.size();
      for (const auto& [id, a] : want) {
        same = same && got.contains(id) && std::abs(got.at(id) - a) <= 1e-12;
      }
      require(same, "expansion disagrees in round " + std::to_string(round));
    }
  }
  const double exp_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  require(exp_s < oracle_budget_s, "expansion suite took " + std::to_string(exp_s) + " s");
  return {true, std::to_string(gazetteer_cases) + " gazetteer cases in " + fmt(gaz_s) + " s, " +
                    std::to_string(expansion_cases) + " graphs in " + fmt(exp_s) + " s"};
}

Outcome bm25_hand_value() {
  ScratchDir dir("bm25");
  run_cli(dir.path(), {"init"});
  run_cli(dir.path(), {"ingest", (fixtures / "bm25/doc1.txt").string(),
                       (fixtures / "bm25/doc2.txt").string()});
  const auto r = cli_json(dir.path(), {"search", "--mode", "free_text", "-q", "copd"});
  const auto& results = r.at("results");
  require(results.size() == 1, "expected one hit, got " + results.dump());
  const double hand = std::log(2.0) * (2.0 * 2.2) / (2.0 + 1.2 * (0.25 + 0.75 * 3.0 / 2.5));
  const double score = results[0].at("score").get<double>();
  require(std::abs(score - hand) <= bm25_tolerance && std::abs(score - 0.9023) <= bm25_tolerance,
          "score " + std::to_string(score));
  return {true, "score " + fmt(score)};
}

Outcome pipeline() {
  ScratchDir dir("pipeline");
  const auto t0 = std::chrono::steady_clock::now();
  run_cli(dir.path(), {"init", "--seed", (fixtures / "seed_ontology.txt").string()});
  std::vector<std::string> ingest{"ingest"};
  for (int i = 1; i <= 50; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "abstract_%02d.txt", i);
    ingest.push_back((fixtures / "abstracts" / name).string());
  }
  const auto ingested = cli_json(dir.path(), ingest);
  std::size_t fresh = 0;
  for (const auto& o : ingested) fresh += o.at("duplicate").get<bool>() ? 0 : 1;
  require(fresh == 50, "ingested " + std::to_string(fresh) + " of 50");

  run_cli(dir.path(), {"extract"});
  const auto accepted = cli_json(dir.path(), {"queue", "accept", "--top", "10"});
  require(accepted.size() == 10, "accepted " + std::to_string(accepted.size()));

  std::size_t derived = 0;
  for (const auto& r : cli_json(dir.path(), {"concept", "relations"})) {
    if (r.at("rel_type") == "related_to" && r.at("evidence_count").get<std::uint64_t>() > 0) ++derived;
  }
  require(derived >= 1, "no derived related_to relation");

  const std::vector<std::vector<std::string>> queries{
      {"search", "--mode", "metadata", "--year-from", "2008", "--year-to", "2008"},
      {"search", "--mode", "concept", "-q", "copd exacerbation"},
      {"search", "--mode", "free_text", "-q", "dyspnea in chronic kidney disease"}};
  std::vector<std::string> before;
  for (const auto& q : queries) {
    const auto r = cli_json(dir.path(), q);
    require(!r.at("results").empty(), "no results for " + q[2]);
    before.push_back(r.dump());
  }
  run_cli(dir.path(), {"purge", "--all"});
  for (std::size_t i = 0; i < queries.size(); ++i) {
    require(cli_json(dir.path(), queries[i]).dump() == before[i],
            "results changed after purge for mode " + queries[i][2]);
  }
  require(fs::is_empty(dir.path() / "content"), "content files left after purge");
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  require(elapsed < pipeline_budget_s, "took " + std::to_string(elapsed) + " s");
  return {true, std::to_string(derived) + " derived relations, " + fmt(elapsed) + " s"};
}

Outcome fetch_rerun() {
  ScratchDir dir("fetch");
  run_cli(dir.path(), {"init"});
  const auto config = dir.path() / "fast.conf";
  std::ofstream(config) << "rate_limit=1000\n";
  const std::vector<std::string> args{"--config", config.string(), "fetch", "--query", "chronic",
                                      "--limit", "50", "--source", (fixtures / "source").string()};
  const auto first = cli_json(dir.path(), args);
  const auto second = cli_json(dir.path(), args);
  require(first.at("ingested").get<int>() > 0, "first fetch ingested nothing");
  require(second.at("ingested").get<int>() == 0,
          "rerun ingested " + second.at("ingested").dump());
  require(second.at("skipped_dupe") == second.at("fetched"), "rerun did not skip every reference");
  return {true, "first run " + first.at("ingested").dump() + " new, rerun 0 new of " +
                    second.at("fetched").dump()};
}

Outcome snapshot_round_trip() {
  ScratchDir dir("snapshot");
  fs::create_directories(dir.path());
  std::mt19937 rng(100);
  for (int i = 0; i < snapshot_cases; ++i) {
    const auto o = oracle::random_ontology(rng, 80, 160);
    const auto path = dir.path() / ("o" + std::to_string(i) + ".jsonl");
    const auto snap = o.snapshot();
    save_snapshot(path, snap);
    const auto loaded = load_snapshot(path);
    require(loaded == snap, "snapshot differs in case " + std::to_string(i));
    require(Ontology::from_snapshot(loaded).snapshot() == snap,
            "rebuilt ontology differs in case " + std::to_string(i));
  }
  return {true, std::to_string(snapshot_cases) + " random ontologies"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"system comparison table", comparison_table},
      {"F-measure closed form", f_closed_form},
      {"gazetteer and expansion oracles", oracle_equivalence},
      {"BM25 hand value", bm25_hand_value},
      {"end-to-end pipeline", pipeline},
      {"fetch dedup on rerun", fetch_rerun},
      {"snapshot round trip", snapshot_round_trip},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome outcome;
    try {
      outcome = check();
    } catch (const std::exception& e) {
      outcome = {false, e.what()};
    }
    if (!outcome.pass) ++failed;
    std::cout << (outcome.pass ? "PASS" : "FAIL") << "  " << name << "  (" << outcome.detail << ")"
              << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
