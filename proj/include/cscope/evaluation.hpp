#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cscope::eval {

// g_r / N; 0 when nothing was retrieved.
// Throws NegativeCount, GExceedsN.
double precision(std::int64_t relevant_retrieved, std::int64_t retrieved);

// g_r / G. Throws NegativeCount, InvalidG (G < 1 or g_r > G).
double recall(std::int64_t relevant_retrieved, std::int64_t relevant_total);

// (beta^2 + 1) P R / (beta^2 P + R); 0 when P = R = 0.
// Throws OutOfRange for P, R outside [0,1] or beta < 0.
double f_measure(double precision, double recall, double beta = 1.0);

struct QueryJudgment {
  std::set<std::string> relevant;
  std::int64_t total_relevant = 0;  // G

  bool operator==(const QueryJudgment&) const = default;
};

// query id -> judgment
using Judgments = std::map<std::string, QueryJudgment>;

struct RunResult {
  std::string query_id;
  std::string system;
  std::vector<std::string> retrieved;  // rank order, no duplicates
};

struct QueryEvaluation {
  std::string query_id;
  std::int64_t relevant_retrieved = 0;  // g_r
  std::int64_t retrieved = 0;           // N
  std::int64_t total_relevant = 0;      // G
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
};

struct EvalReport {
  std::string system;
  double beta = 1.0;
  std::vector<QueryEvaluation> queries;  // ascending query id
  double mean_precision = 0.0;
  double mean_recall = 0.0;
  double mean_f = 0.0;
};

// Throws MissingJudgment, InvalidG.
EvalReport evaluate_run(std::span<const RunResult> runs, const Judgments& judgments,
                        double beta = 1.0);

struct ComparisonRow {
  std::int64_t total_relevant = 0;  // G
  double f_a = 0.0;
  double f_b = 0.0;
};

struct SystemComparison {
  std::string system_a;
  std::string system_b;
  double beta = 1.0;
  std::vector<ComparisonRow> rows;
};

// One row per G: the mean F of each system over the queries judged with
// that G. An empty `g_values` means every G present, ascending.
// Throws QuerySetMismatch when the systems ran different queries, GMismatch
// when the two judgment sets disagree on a query's G or a requested G has
// no query.
SystemComparison compare_systems(std::span<const RunResult> runs_a,
                                 std::span<const RunResult> runs_b,
                                 const Judgments& judgments_a,
                                 const Judgments& judgments_b, double beta,
                                 std::span<const std::int64_t> g_values = {});

SystemComparison compare_systems(std::span<const RunResult> runs_a,
                                 std::span<const RunResult> runs_b,
                                 const Judgments& judgments, double beta,
                                 std::span<const std::int64_t> g_values = {});

struct CurvePoint {
  std::int64_t total_relevant = 0;
  double f = 0.0;
};

// F as a function of G with g_r and N held fixed.
std::vector<CurvePoint> f_curve(std::int64_t relevant_retrieved, std::int64_t retrieved,
                                std::span<const std::int64_t> g_values, double beta = 1.0);

// Run file: "query_id doc_id rank" per line (whitespace separated; '#'
// comments). Duplicate (query, doc) lines keep the best rank.
std::vector<RunResult> parse_runs(std::istream& in, std::string_view system);
std::vector<RunResult> load_runs(const std::string& path, std::string_view system);

// Judgment file: "query_id doc_id" lines plus one "G query_id count"
// directive per query. Throws ParseError, InvalidG.
Judgments parse_judgments(std::istream& in);
Judgments load_judgments(const std::string& path);

// "G\t<system a>\t<system b>" header, then one row per G, 9 decimals.
void write_comparison_tsv(std::ostream& out, const SystemComparison& comparison);
// "G\tF" header, then one point per line.
void write_curve(std::ostream& out, std::span<const CurvePoint> curve);

// True when beta lies in the documented [0,1] weighting range.
bool beta_in_documented_range(double beta);

}  // namespace cscope::eval
