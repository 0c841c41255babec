#include "cscope/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cscope/error.hpp"

namespace cscope::eval {
namespace {

[[noreturn]] void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

std::string format9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9f", v);
  return buf;
}

QueryEvaluation evaluate_query(const RunResult& run, const QueryJudgment& judgment,
                               double beta) {
  QueryEvaluation q;
  q.query_id = run.query_id;
  q.retrieved = static_cast<std::int64_t>(run.retrieved.size());
  q.total_relevant = judgment.total_relevant;
  q.relevant_retrieved = static_cast<std::int64_t>(
      std::count_if(run.retrieved.begin(), run.retrieved.end(),
                    [&](const std::string& d) { return judgment.relevant.contains(d); }));
  q.precision = precision(q.relevant_retrieved, q.retrieved);
  q.recall = recall(q.relevant_retrieved, q.total_relevant);
  q.f = f_measure(q.precision, q.recall, beta);
  return q;
}

const QueryJudgment& judgment_for(const Judgments& judgments, const std::string& query) {
  auto it = judgments.find(query);
  if (it == judgments.end()) fail(ErrorCode::MissingJudgment, "no judgments for query " + query);
  return it->second;
}

std::map<std::string, const RunResult*> index_runs(std::span<const RunResult> runs) {
  std::map<std::string, const RunResult*> out;
  for (const auto& r : runs) out[r.query_id] = &r;
  return out;
}

}  // namespace

double precision(std::int64_t relevant_retrieved, std::int64_t retrieved) {
  if (relevant_retrieved < 0 || retrieved < 0) fail(ErrorCode::NegativeCount, "negative count");
  if (relevant_retrieved > retrieved) {
    fail(ErrorCode::GExceedsN, "relevant retrieved exceeds retrieved");
  }
  if (retrieved == 0) return 0.0;
  return static_cast<double>(relevant_retrieved) / static_cast<double>(retrieved);
}

double recall(std::int64_t relevant_retrieved, std::int64_t relevant_total) {
  if (relevant_retrieved < 0) fail(ErrorCode::NegativeCount, "negative count");
  if (relevant_total < 1) fail(ErrorCode::InvalidG, "G must be >= 1");
  if (relevant_retrieved > relevant_total) {
    fail(ErrorCode::InvalidG, "relevant retrieved exceeds G");
  }
  return static_cast<double>(relevant_retrieved) / static_cast<double>(relevant_total);
}

double f_measure(double p, double r, double beta) {
  if (!(p >= 0.0 && p <= 1.0) || !(r >= 0.0 && r <= 1.0)) {
    fail(ErrorCode::OutOfRange, "precision and recall must lie in [0,1]");
  }
  if (!(beta >= 0.0)) fail(ErrorCode::OutOfRange, "beta must be >= 0");
  const double b2 = beta * beta;
  const double denominator = b2 * p + r;
  if (denominator == 0.0) return 0.0;
  return (b2 + 1.0) * p * r / denominator;
}

EvalReport evaluate_run(std::span<const RunResult> runs, const Judgments& judgments,
                        double beta) {
  EvalReport report;
  report.beta = beta;
  if (!runs.empty()) report.system = runs.front().system;
  for (const auto& [query, run] : index_runs(runs)) {
    report.queries.push_back(evaluate_query(*run, judgment_for(judgments, query), beta));
  }
  if (!report.queries.empty()) {
    const double n = static_cast<double>(report.queries.size());
    for (const auto& q : report.queries) {
      report.mean_precision += q.precision;
      report.mean_recall += q.recall;
      report.mean_f += q.f;
    }
    report.mean_precision /= n;
    report.mean_recall /= n;
    report.mean_f /= n;
  }
  return report;
}

SystemComparison compare_systems(std::span<const RunResult> runs_a,
                                 std::span<const RunResult> runs_b,
                                 const Judgments& judgments_a,
                                 const Judgments& judgments_b, double beta,
                                 std::span<const std::int64_t> g_values) {
  const auto a = index_runs(runs_a);
  const auto b = index_runs(runs_b);
  auto keys = [](const auto& m) {
    std::vector<std::string> k;
    for (const auto& [q, r] : m) k.push_back(q);
    return k;
  };
  if (keys(a) != keys(b)) {
    fail(ErrorCode::QuerySetMismatch, "systems were run on different query sets");
  }

  struct Sums {
    double f_a = 0.0;
    double f_b = 0.0;
    std::size_t n = 0;
  };
  std::map<std::int64_t, Sums> by_g;
  for (const auto& [query, run_a] : a) {
    const auto& ja = judgment_for(judgments_a, query);
    const auto& jb = judgment_for(judgments_b, query);
    if (ja.total_relevant != jb.total_relevant) {
      fail(ErrorCode::GMismatch, "systems disagree on G for query " + query);
    }
    auto& s = by_g[ja.total_relevant];
    s.f_a += evaluate_query(*run_a, ja, beta).f;
    s.f_b += evaluate_query(*b.at(query), jb, beta).f;
    ++s.n;
  }

  SystemComparison out;
  out.system_a = runs_a.empty() ? "A" : runs_a.front().system;
  out.system_b = runs_b.empty() ? "B" : runs_b.front().system;
  out.beta = beta;
  auto row = [&](std::int64_t g) {
    auto it = by_g.find(g);
    if (it == by_g.end()) fail(ErrorCode::GMismatch, "no query judged with G=" + std::to_string(g));
    const double n = static_cast<double>(it->second.n);
    out.rows.push_back({g, it->second.f_a / n, it->second.f_b / n});
  };
  if (g_values.empty()) {
    for (const auto& [g, s] : by_g) row(g);
  } else {
    for (auto g : g_values) row(g);
  }
  return out;
}

SystemComparison compare_systems(std::span<const RunResult> runs_a,
                                 std::span<const RunResult> runs_b,
                                 const Judgments& judgments, double beta,
                                 std::span<const std::int64_t> g_values) {
  return compare_systems(runs_a, runs_b, judgments, judgments, beta, g_values);
}

std::vector<CurvePoint> f_curve(std::int64_t relevant_retrieved, std::int64_t retrieved,
                                std::span<const std::int64_t> g_values, double beta) {
  std::vector<CurvePoint> out;
  out.reserve(g_values.size());
  const double p = precision(relevant_retrieved, retrieved);
  for (auto g : g_values) {
    out.push_back({g, f_measure(p, recall(relevant_retrieved, g), beta)});
  }
  return out;
}

std::vector<RunResult> parse_runs(std::istream& in, std::string_view system) {
  // query -> doc -> best rank
  std::map<std::string, std::map<std::string, long>> ranks;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    std::istringstream ss(line);
    std::string query, doc;
    long rank = 0;
    if (!(ss >> query)) continue;
    if (!(ss >> doc >> rank)) {
      fail(ErrorCode::ParseError, "run line " + std::to_string(line_no) + ": expected 'query doc rank'");
    }
    auto [it, inserted] = ranks[query].emplace(doc, rank);
    if (!inserted) it->second = std::min(it->second, rank);
  }
  std::vector<RunResult> out;
  for (auto& [query, docs] : ranks) {
    std::vector<std::pair<long, std::string>> ordered;
    for (auto& [doc, rank] : docs) ordered.emplace_back(rank, doc);
    std::sort(ordered.begin(), ordered.end());
    RunResult r{query, std::string(system), {}};
    for (auto& [rank, doc] : ordered) r.retrieved.push_back(std::move(doc));
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<RunResult> load_runs(const std::string& path, std::string_view system) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoFailure, "cannot read " + path);
  return parse_runs(in, system);
}

Judgments parse_judgments(std::istream& in) {
  Judgments out;
  std::set<std::string> with_g;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    std::istringstream ss(line);
    std::vector<std::string> fields;
    for (std::string f; ss >> f;) fields.push_back(std::move(f));
    if (fields.empty()) continue;
    if (fields.size() == 3 && fields[0] == "G") {
      std::int64_t g = 0;
      try {
        g = std::stoll(fields[2]);
      } catch (const std::exception&) {
        fail(ErrorCode::ParseError, "judgment line " + std::to_string(line_no) + ": bad G");
      }
      if (g < 1) fail(ErrorCode::InvalidG, "G must be >= 1 for query " + fields[1]);
      out[fields[1]].total_relevant = g;
      with_g.insert(fields[1]);
    } else if (fields.size() == 2) {
      out[fields[0]].relevant.insert(fields[1]);
    } else {
      fail(ErrorCode::ParseError, "judgment line " + std::to_string(line_no) +
                                      ": expected 'query doc' or 'G query count'");
    }
  }
  for (auto& [query, j] : out) {
    if (!with_g.contains(query)) {
      // Without a directive, G is the listed relevant set.
      j.total_relevant = static_cast<std::int64_t>(j.relevant.size());
      if (j.total_relevant < 1) fail(ErrorCode::InvalidG, "no relevant documents for " + query);
    }
    if (static_cast<std::int64_t>(j.relevant.size()) > j.total_relevant) {
      fail(ErrorCode::InvalidG, "query " + query + " lists more relevant documents than G");
    }
  }
  return out;
}

Judgments load_judgments(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoFailure, "cannot read " + path);
  return parse_judgments(in);
}

void write_comparison_tsv(std::ostream& out, const SystemComparison& comparison) {
  out << "G\t" << comparison.system_a << '\t' << comparison.system_b << '\n';
  for (const auto& row : comparison.rows) {
    out << row.total_relevant << '\t' << format9(row.f_a) << '\t' << format9(row.f_b) << '\n';
  }
}

void write_curve(std::ostream& out, std::span<const CurvePoint> curve) {
  out << "G\tF\n";
  for (const auto& p : curve) out << p.total_relevant << '\t' << format9(p.f) << '\n';
}

bool beta_in_documented_range(double beta) { return beta >= 0.0 && beta <= 1.0; }

}  // namespace cscope::eval
