#include "evoplan/fitness.h"

#include "evoplan/heuristics_base.h"
#include "evoplan/sas_io.h"
#include "evoplan/csv.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

using namespace std;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace evoplan {
static string resolve(const fs::path &base_dir, const string &path) {
    fs::path p(path);
    if (p.is_absolute())
        return p.string();
    return (base_dir / p).lexically_normal().string();
}

vector<ManifestEntry> read_manifest(const string &path) {
    ifstream in(path);
    if (!in)
        throw invalid_argument("cannot open manifest '" + path + "'");
    fs::path dir = fs::path(path).parent_path();
    vector<ManifestEntry> entries;
    string line;
    int line_no = 0;
    while (getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != string::npos)
            line.erase(hash);
        istringstream fields(line);
        ManifestEntry entry;
        if (!(fields >> entry.domain))
            continue;
        string extra;
        if (!(fields >> entry.path) || (fields >> extra))
            throw invalid_argument(path + ":" + to_string(line_no) +
                                   ": expected 'domain task-path'");
        entry.path = resolve(dir, entry.path);
        entries.push_back(move(entry));
    }
    return entries;
}

size_t TrainingSet::num_tasks() const {
    size_t n = 0;
    for (const auto &domain : domains)
        n += domain.tasks.size();
    return n;
}

void TrainingSet::add(TrainingTask task) {
    if (!isfinite(task.t_ff) || task.t_ff < 0 || !isfinite(task.e_ff) || task.e_ff < 0)
        throw invalid_argument("calibration baseline for '" + task.path +
                               "' must be finite and nonnegative");
    auto it = find_if(domains.begin(), domains.end(),
                      [&](const TrainingDomain &d) { return d.name == task.domain; });
    if (it == domains.end()) {
        domains.push_back({task.domain, {}});
        it = prev(domains.end());
    }
    auto &tasks = it->tasks;
    auto pos = upper_bound(tasks.begin(), tasks.end(), task,
                           [](const TrainingTask &a, const TrainingTask &b) {
                               return a.t_ff != b.t_ff ? a.t_ff < b.t_ff : a.path < b.path;
                           });
    tasks.insert(pos, move(task));
}

TrainingSet load_calibration(const string &path) {
    ifstream in(path);
    if (!in)
        throw invalid_argument("cannot open calibration file '" + path + "'");
    fs::path dir = fs::path(path).parent_path();
    vector<vector<string>> rows = read_csv(in);
    if (rows.empty() || rows[0] != vector<string>{"domain", "path", "t_ff", "e_ff"})
        throw invalid_argument(path + ": expected header domain,path,t_ff,e_ff");
    TrainingSet training;
    for (size_t i = 1; i < rows.size(); ++i) {
        const auto &row = rows[i];
        if (row.size() != 4)
            throw invalid_argument(path + ": row " + to_string(i + 1) + " needs 4 fields");
        TrainingTask task;
        task.domain = row[0];
        task.path = resolve(dir, row[1]);
        try {
            task.t_ff = stod(row[2]);
            task.e_ff = stod(row[3]);
        } catch (const exception &) {
            throw invalid_argument(path + ": row " + to_string(i + 1) + " has bad numbers");
        }
        try {
            task.task = make_shared<const Task>(load_sas_file(task.path));
        } catch (const exception &e) {
            throw invalid_argument(task.path + ": " + e.what());
        }
        training.add(move(task));
    }
    return training;
}

void save_calibration(const TrainingSet &training, const string &path) {
    ofstream out(path);
    if (!out)
        throw runtime_error("cannot write calibration file '" + path + "'");
    fs::path dir = fs::absolute(fs::path(path)).parent_path();
    write_csv_row(out, {"domain", "path", "t_ff", "e_ff"});
    for (const auto &domain : training.domains) {
        for (const auto &task : domain.tasks) {
            string rel = fs::absolute(task.path).lexically_relative(dir).string();
            write_csv_row(out, {domain.name, rel.empty() ? task.path : rel,
                                format_double(task.t_ff), format_double(task.e_ff)});
        }
    }
}

double task_budget(double t_ff, double floor, double factor) {
    return max(floor, factor * t_ff);
}

double agile(double t, double T) {
    if (t <= 1)
        return 1.0;
    if (t > T)
        return 0.0;
    return 1.0 - log(t) / log(T);
}

json EvalRecord::to_json() const {
    return json{{"domain", domain},   {"path", path},     {"solved", solved},
                {"executed", executed}, {"outcome", to_string(outcome)},
                {"time", time},       {"evaluations", evaluations},
                {"budget", budget},   {"e_ff", e_ff}};
}

double fitness_score(const vector<EvalRecord> &records, double alpha) {
    if (records.empty())
        return 0.0;
    double total = 0;
    for (const auto &r : records) {
        if (r.solved)
            total += alpha + (1 - alpha) * agile(r.time, r.budget);
    }
    return total / static_cast<double>(records.size());
}

FeatureValues fitness_features(const vector<EvalRecord> &records) {
    FeatureValues values;
    if (records.empty())
        return values;
    double evals = 0;
    double speed = 0;
    for (const auto &r : records) {
        if (r.solved) {
            evals += r.e_ff > 0 ? static_cast<double>(r.evaluations) / r.e_ff
                                : EVALS_FAILURE_SENTINEL;
            speed += static_cast<double>(r.evaluations) / max(r.time, MIN_TIME);
        } else {
            evals += EVALS_FAILURE_SENTINEL;
            speed += SPEED_FAILURE_SENTINEL;
        }
    }
    double n = static_cast<double>(records.size());
    values.evals = evals / n;
    values.speed = speed / n;
    return values;
}

json FitnessReport::to_json() const {
    json j = {{"rejected", rejected},
              {"diagnostic", diagnostic},
              {"score", score},
              {"evals", features.evals},
              {"speed", features.speed}};
    j["records"] = json::array();
    for (const auto &r : records)
        j["records"].push_back(r.to_json());
    return j;
}

void ExecutionCounters::record(const string &path) {
    lock_guard<mutex> lock(mutex_);
    ++counts_[path];
}

int ExecutionCounters::count(const string &path) const {
    lock_guard<mutex> lock(mutex_);
    auto it = counts_.find(path);
    return it == counts_.end() ? 0 : it->second;
}

int ExecutionCounters::total() const {
    lock_guard<mutex> lock(mutex_);
    int n = 0;
    for (const auto &[path, count] : counts_)
        n += count;
    return n;
}

static string smoke_check_factory(const HeuristicFactory &factory) {
    try {
        unique_ptr<Heuristic> h = factory();
        if (!h)
            return "heuristic factory returned nothing";
        Task task = make_flip_task();
        h->initialize(task);
        h->evaluate(task.initial_state());
        return "";
    } catch (const exception &e) {
        return e.what();
    }
}

static void run_domain(const HeuristicFactory &factory, const TrainingDomain &domain,
                       const FitnessConfig &config, ExecutionCounters *counters,
                       EvalRecord *out) {
    bool aborted = false;
    for (size_t i = 0; i < domain.tasks.size(); ++i) {
        const TrainingTask &task = domain.tasks[i];
        EvalRecord &record = out[i];
        record.domain = domain.name;
        record.path = task.path;
        record.e_ff = task.e_ff;
        record.budget = task_budget(task.t_ff, config.budget_floor, config.budget_factor);
        if (aborted)
            continue;
        record.executed = true;
        if (counters)
            counters->record(task.path);
        SearchLimits limits = config.limits;
        limits.time_limit = record.budget;
        SearchResult result;
        try {
            unique_ptr<Heuristic> h = factory();
            result = gbfs(*task.task, *h, limits);
        } catch (const exception &e) {
            result.outcome = SearchOutcome::Crash;
            result.diagnostic = e.what();
        }
        record.outcome = result.outcome;
        record.time = result.wall_time;
        record.evaluations = result.evaluations;
        record.solved = result.outcome == SearchOutcome::Solved && result.wall_time <= record.budget;
        if (!record.solved)
            aborted = true;
    }
}

FitnessReport evaluate_heuristic(const HeuristicFactory &factory, const TrainingSet &training,
                                 const FitnessConfig &config, ExecutionCounters *counters) {
    FitnessReport report;
    report.diagnostic = smoke_check_factory(factory);
    if (!report.diagnostic.empty()) {
        report.rejected = true;
        return report;
    }
    vector<size_t> offsets;
    size_t n = 0;
    for (const auto &domain : training.domains) {
        offsets.push_back(n);
        n += domain.tasks.size();
    }
    report.records.resize(n);
    int workers = max(1, min<int>(config.workers, static_cast<int>(training.domains.size())));
    if (workers == 1) {
        for (size_t d = 0; d < training.domains.size(); ++d)
            run_domain(factory, training.domains[d], config, counters,
                       report.records.data() + offsets[d]);
    } else {
        atomic<size_t> next{0};
        vector<thread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&]() {
                for (size_t d = next++; d < training.domains.size(); d = next++)
                    run_domain(factory, training.domains[d], config, counters,
                               report.records.data() + offsets[d]);
            });
        }
        for (auto &t : pool)
            t.join();
    }
    report.score = fitness_score(report.records, config.alpha);
    report.features = fitness_features(report.records);
    return report;
}

FitnessReport evaluate_genome(const Genome &genome, const TrainingSet &training,
                              const FitnessConfig &config, ExecutionCounters *counters) {
    return evaluate_heuristic([&genome]() { return make_genome_heuristic(genome); }, training,
                              config, counters);
}

TrainingSet calibrate(const vector<ManifestEntry> &manifest, const SearchLimits &limits,
                      vector<string> *dropped) {
    TrainingSet training;
    for (const auto &entry : manifest) {
        auto task = make_shared<const Task>(load_sas_file(entry.path));
        FFHeuristic ff;
        SearchResult result = gbfs(*task, ff, limits);
        if (result.outcome != SearchOutcome::Solved) {
            if (dropped)
                dropped->push_back(entry.path);
            continue;
        }
        TrainingTask t;
        t.domain = entry.domain;
        t.path = entry.path;
        t.t_ff = result.wall_time;
        t.e_ff = static_cast<double>(result.evaluations);
        t.task = move(task);
        training.add(move(t));
    }
    return training;
}
}  // namespace evoplan
