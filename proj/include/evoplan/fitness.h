#pragma once

#include "evoplan/genome.h"
#include "evoplan/heuristic.h"
#include "evoplan/search.h"

#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace evoplan {

// One "domain task-path" pair per line; '#' starts a comment. Relative
// paths are resolved against the manifest's directory.
struct ManifestEntry {
    std::string domain;
    std::string path;
};

// Throws std::invalid_argument on unreadable files or malformed lines.
std::vector<ManifestEntry> read_manifest(const std::string &path);

struct TrainingTask {
    std::string domain;
    std::string path;
    // FF calibration baseline: seconds and state evaluations.
    double t_ff = 0;
    double e_ff = 0;
    std::shared_ptr<const Task> task;
};

struct TrainingDomain {
    std::string name;
    // Ascending t_ff, ties by path.
    std::vector<TrainingTask> tasks;
};

// Domains keep first-appearance order.
struct TrainingSet {
    std::vector<TrainingDomain> domains;

    std::size_t num_tasks() const;
    // Inserts into the task's domain, keeping the domain sorted; throws
    // std::invalid_argument for non-finite or negative baselines.
    void add(TrainingTask task);
};

// Calibration file: CSV with header "domain,path,t_ff,e_ff". Relative paths
// are resolved against the file's directory when loading tasks.
TrainingSet load_calibration(const std::string &path);
void save_calibration(const TrainingSet &training, const std::string &path);

struct FitnessConfig {
    double alpha = 0.25;
    // T_p = max(budget_floor, budget_factor * t_ff).
    double budget_floor = 30.0;
    double budget_factor = 1.3;
    // Clock, memory limit and work-unit scale; time_limit is replaced by T_p.
    SearchLimits limits;
    // Domains evaluated concurrently; tasks within a domain stay sequential.
    int workers = 1;
};

double task_budget(double t_ff, double floor = 30.0, double factor = 1.3);

// 1 for t <= 1, 1 - ln(t)/ln(T) for 1 < t <= T, 0 beyond. Requires T > 1.
double agile(double t, double T);

struct EvalRecord {
    std::string domain;
    std::string path;
    bool solved = false;
    // False when the abort rule skipped the task.
    bool executed = false;
    SearchOutcome outcome = SearchOutcome::Crash;
    double time = 0;
    std::uint64_t evaluations = 0;
    double budget = 0;
    double e_ff = 0;

    nlohmann::json to_json() const;
};

constexpr double EVALS_FAILURE_SENTINEL = 10.0;
constexpr double SPEED_FAILURE_SENTINEL = 0.0;
// Solve times below this are treated as this value in the speed feature.
constexpr double MIN_TIME = 1e-6;

// Mean of alpha*solved + (1-alpha)*agile(t, budget); 0 for no records.
double fitness_score(const std::vector<EvalRecord> &records, double alpha);

struct FeatureValues {
    double evals = EVALS_FAILURE_SENTINEL;
    double speed = SPEED_FAILURE_SENTINEL;
};

// evals: mean of e/e_ff (solved) or 10; speed: mean of e/t (solved) or 0.
// Solved tasks may push evals above 10.
FeatureValues fitness_features(const std::vector<EvalRecord> &records);

struct FitnessReport {
    // Smoke check failed; nothing was run.
    bool rejected = false;
    std::string diagnostic;
    double score = 0;
    FeatureValues features;
    std::vector<EvalRecord> records;

    nlohmann::json to_json() const;
};

// Counts search runs per task path. Safe for concurrent use.
class ExecutionCounters {
public:
    void record(const std::string &path);
    int count(const std::string &path) const;
    int total() const;

private:
    mutable std::mutex mutex_;
    std::map<std::string, int> counts_;
};

using HeuristicFactory = std::function<std::unique_ptr<Heuristic>()>;

// Smoke-checks a fresh heuristic on the flip task, then runs gbfs on every
// training task with time limit T_p. Within a domain, the first unsolved
// task marks every later task of that domain as failed without running it.
FitnessReport evaluate_heuristic(const HeuristicFactory &factory, const TrainingSet &training,
                                 const FitnessConfig &config,
                                 ExecutionCounters *counters = nullptr);

FitnessReport evaluate_genome(const Genome &genome, const TrainingSet &training,
                              const FitnessConfig &config,
                              ExecutionCounters *counters = nullptr);

// Runs FF on every manifest task with the given limits; unsolved tasks are
// dropped and listed in 'dropped' when non-null.
TrainingSet calibrate(const std::vector<ManifestEntry> &manifest, const SearchLimits &limits,
                      std::vector<std::string> *dropped = nullptr);

}  // namespace evoplan
