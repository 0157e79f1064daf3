#pragma once

#include "evoplan/fitness.h"
#include "evoplan/search.h"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace evoplan {

enum class OutcomeClass { Solved, OOT, OOM, Other };

std::string to_string(OutcomeClass c);
std::optional<OutcomeClass> parse_outcome_class(const std::string &text);
OutcomeClass classify(SearchOutcome outcome);

struct MatrixRow {
    std::string heuristic;
    std::string domain;
    std::string task;
    OutcomeClass outcome_class = OutcomeClass::Other;
    // Detailed search outcome, e.g. UNSOLVABLE inside class OTHER.
    std::string outcome;
    double time = 0;
    std::uint64_t evaluations = 0;
    std::uint64_t expansions = 0;
    Cost plan_cost = 0;
};

// Per (heuristic, task) outcomes. Heuristic and task orders are those of
// first appearance.
class OutcomeMatrix {
public:
    void add(MatrixRow row);
    const std::vector<MatrixRow> &rows() const { return rows_; }
    std::vector<std::string> heuristics() const;
    std::vector<std::string> tasks() const;
    const MatrixRow *find(const std::string &heuristic, const std::string &task) const;
    // Every heuristic has exactly one row for every task.
    bool complete() const;

    // CSV header: heuristic,domain,task,class,outcome,time,evaluations,
    // expansions,plan_cost. Throws std::invalid_argument on malformed input.
    static OutcomeMatrix read_csv(std::istream &in);
    static OutcomeMatrix load(const std::string &path);
    void write_csv(std::ostream &out) const;

private:
    std::vector<MatrixRow> rows_;
};

struct CactusPoint {
    std::string heuristic;
    double time = 0;
    int solved = 0;
};

// Per heuristic: solve times ascending with the cumulative count.
std::vector<CactusPoint> report_cactus(const OutcomeMatrix &matrix);
void write_cactus_csv(std::ostream &out, const std::vector<CactusPoint> &points);

struct ParetoEntry {
    std::string heuristic;
    double informedness = 0;
    double speed = 0;
};

struct ParetoReport {
    std::vector<ParetoEntry> entries;
    // Heuristics solving fewer than a third of the tasks.
    std::vector<std::string> excluded;
    // Tasks solved by every retained heuristic.
    std::vector<std::string> common_tasks;
    // Nonempty when no common task remains.
    std::string warning;
};

// Keeps heuristics solving at least a third of all tasks, restricts to
// tasks all of them solve, and reports per heuristic the geometric means of
// e_ff/e_h (informedness) and (e_h/t_h)/(e_ff/t_ff) (speed). Times below
// MIN_TIME count as MIN_TIME. Throws std::invalid_argument if the reference
// heuristic is missing.
ParetoReport report_pareto(const OutcomeMatrix &matrix, const std::string &reference = "ff");
void write_pareto_csv(std::ostream &out, const ParetoReport &report);

struct SimilarityReport {
    std::vector<std::string> heuristics;
    // jaccard[i][j] = |S_i & S_j| / |S_i | S_j|, 1 when both are empty.
    std::vector<std::vector<double>> jaccard;
    // domination[i][j] = |S_i \ S_j| / number of tasks.
    std::vector<std::vector<double>> domination;
};

SimilarityReport report_similarity(const OutcomeMatrix &matrix);
// Square matrix CSV: header "heuristic,<h1>,<h2>,...".
void write_matrix_csv(std::ostream &out, const std::vector<std::string> &names,
                      const std::vector<std::vector<double>> &values);

struct BenchOptions {
    SearchLimits limits;
    // JSONL file of finished runs; empty disables caching.
    std::string cache_path;
    int workers = 1;
};

// Runs every heuristic on every manifest task (manifest order, heuristics in
// the given order). Cached results keyed by heuristic, task and limits are
// reused; new results are appended to the cache as they finish. Unknown
// heuristic names throw UnknownHeuristicError before any run.
OutcomeMatrix run_bench(const std::vector<ManifestEntry> &manifest,
                        const std::vector<std::string> &heuristics, const BenchOptions &options);

// Key used by the bench cache.
std::string bench_cache_key(const std::string &heuristic, const std::string &task,
                            const SearchLimits &limits);

}  // namespace evoplan
