#include "evoplan/report.h"

#include "evoplan/csv.h"
#include "evoplan/heuristic_registry.h"
#include "evoplan/sas_io.h"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

using namespace std;
using json = nlohmann::json;

namespace evoplan {
string to_string(OutcomeClass c) {
    switch (c) {
    case OutcomeClass::Solved: return "SOLVED";
    case OutcomeClass::OOT: return "OOT";
    case OutcomeClass::OOM: return "OOM";
    case OutcomeClass::Other: return "OTHER";
    }
    return "OTHER";
}

optional<OutcomeClass> parse_outcome_class(const string &text) {
    for (OutcomeClass c :
         {OutcomeClass::Solved, OutcomeClass::OOT, OutcomeClass::OOM, OutcomeClass::Other}) {
        if (to_string(c) == text)
            return c;
    }
    return nullopt;
}

OutcomeClass classify(SearchOutcome outcome) {
    switch (outcome) {
    case SearchOutcome::Solved: return OutcomeClass::Solved;
    case SearchOutcome::OutOfTime: return OutcomeClass::OOT;
    case SearchOutcome::OutOfMemory: return OutcomeClass::OOM;
    default: return OutcomeClass::Other;
    }
}

void OutcomeMatrix::add(MatrixRow row) {
    rows_.push_back(move(row));
}

vector<string> OutcomeMatrix::heuristics() const {
    vector<string> names;
    for (const auto &row : rows_) {
        if (find_if(names.begin(), names.end(), [&](const string &n) { return n == row.heuristic; }) ==
            names.end())
            names.push_back(row.heuristic);
    }
    return names;
}

vector<string> OutcomeMatrix::tasks() const {
    vector<string> names;
    set<string> seen;
    for (const auto &row : rows_) {
        if (seen.insert(row.task).second)
            names.push_back(row.task);
    }
    return names;
}

const MatrixRow *OutcomeMatrix::find(const string &heuristic, const string &task) const {
    for (const auto &row : rows_) {
        if (row.heuristic == heuristic && row.task == task)
            return &row;
    }
    return nullptr;
}

bool OutcomeMatrix::complete() const {
    set<pair<string, string>> cells;
    for (const auto &row : rows_) {
        if (!cells.insert({row.heuristic, row.task}).second)
            return false;
    }
    return cells.size() == heuristics().size() * tasks().size();
}

static const vector<string> MATRIX_HEADER = {"heuristic", "domain",      "task",
                                             "class",     "outcome",     "time",
                                             "evaluations", "expansions", "plan_cost"};

OutcomeMatrix OutcomeMatrix::read_csv(istream &in) {
    vector<vector<string>> rows = evoplan::read_csv(in);
    if (rows.empty() || rows[0] != MATRIX_HEADER)
        throw invalid_argument("outcome matrix: unexpected header");
    OutcomeMatrix matrix;
    for (size_t i = 1; i < rows.size(); ++i) {
        const auto &r = rows[i];
        string where = "outcome matrix row " + to_string(i + 1);
        if (r.size() != MATRIX_HEADER.size())
            throw invalid_argument(where + ": expected 9 fields");
        MatrixRow row;
        row.heuristic = r[0];
        row.domain = r[1];
        row.task = r[2];
        auto cls = parse_outcome_class(r[3]);
        if (!cls)
            throw invalid_argument(where + ": unknown class '" + r[3] + "'");
        row.outcome_class = *cls;
        row.outcome = r[4];
        try {
            size_t used = 0;
            row.time = stod(r[5], &used);
            row.evaluations = stoull(r[6]);
            row.expansions = stoull(r[7]);
            row.plan_cost = stoll(r[8]);
        } catch (const exception &) {
            throw invalid_argument(where + ": malformed number");
        }
        matrix.add(move(row));
    }
    return matrix;
}

OutcomeMatrix OutcomeMatrix::load(const string &path) {
    ifstream in(path);
    if (!in)
        throw invalid_argument("cannot open outcome matrix '" + path + "'");
    return read_csv(in);
}

void OutcomeMatrix::write_csv(ostream &out) const {
    write_csv_row(out, MATRIX_HEADER);
    for (const auto &row : rows_) {
        write_csv_row(out, {row.heuristic, row.domain, row.task, to_string(row.outcome_class),
                            row.outcome, format_double(row.time), std::to_string(row.evaluations),
                            std::to_string(row.expansions), std::to_string(row.plan_cost)});
    }
}

static bool solved(const MatrixRow *row) {
    return row && row->outcome_class == OutcomeClass::Solved;
}

vector<CactusPoint> report_cactus(const OutcomeMatrix &matrix) {
    vector<CactusPoint> points;
    for (const string &h : matrix.heuristics()) {
        vector<double> times;
        for (const auto &row : matrix.rows()) {
            if (row.heuristic == h && row.outcome_class == OutcomeClass::Solved)
                times.push_back(row.time);
        }
        stable_sort(times.begin(), times.end());
        for (size_t i = 0; i < times.size(); ++i)
            points.push_back({h, times[i], static_cast<int>(i + 1)});
    }
    return points;
}

void write_cactus_csv(ostream &out, const vector<CactusPoint> &points) {
    write_csv_row(out, {"heuristic", "time", "solved"});
    for (const auto &p : points)
        write_csv_row(out, {p.heuristic, format_double(p.time), std::to_string(p.solved)});
}

ParetoReport report_pareto(const OutcomeMatrix &matrix, const string &reference) {
    vector<string> heuristics = matrix.heuristics();
    vector<string> tasks = matrix.tasks();
    if (find(heuristics.begin(), heuristics.end(), reference) == heuristics.end())
        throw invalid_argument("reference heuristic '" + reference + "' is not in the matrix");
    ParetoReport report;
    vector<string> kept;
    for (const string &h : heuristics) {
        size_t count = 0;
        for (const string &t : tasks)
            count += solved(matrix.find(h, t));
        if (3 * count >= tasks.size() && count > 0)
            kept.push_back(h);
        else
            report.excluded.push_back(h);
    }
    for (const string &t : tasks) {
        bool all = solved(matrix.find(reference, t));
        for (const string &h : kept)
            all = all && solved(matrix.find(h, t));
        if (all)
            report.common_tasks.push_back(t);
    }
    if (report.common_tasks.empty()) {
        report.warning = "no task is solved by every retained heuristic; report is empty";
        return report;
    }
    for (const string &h : kept) {
        double log_inf = 0;
        double log_speed = 0;
        for (const string &t : report.common_tasks) {
            const MatrixRow *r = matrix.find(h, t);
            const MatrixRow *f = matrix.find(reference, t);
            double e_h = max<double>(1.0, static_cast<double>(r->evaluations));
            double e_f = max<double>(1.0, static_cast<double>(f->evaluations));
            double t_h = max(r->time, MIN_TIME);
            double t_f = max(f->time, MIN_TIME);
            log_inf += log(e_f / e_h);
            log_speed += log((e_h / t_h) / (e_f / t_f));
        }
        double n = static_cast<double>(report.common_tasks.size());
        report.entries.push_back({h, exp(log_inf / n), exp(log_speed / n)});
    }
    return report;
}

void write_pareto_csv(ostream &out, const ParetoReport &report) {
    write_csv_row(out, {"heuristic", "informedness", "speed"});
    for (const auto &e : report.entries)
        write_csv_row(out, {e.heuristic, format_double(e.informedness), format_double(e.speed)});
}

SimilarityReport report_similarity(const OutcomeMatrix &matrix) {
    SimilarityReport report;
    report.heuristics = matrix.heuristics();
    vector<string> tasks = matrix.tasks();
    vector<set<string>> sets;
    for (const string &h : report.heuristics) {
        set<string> s;
        for (const string &t : tasks) {
            if (solved(matrix.find(h, t)))
                s.insert(t);
        }
        sets.push_back(move(s));
    }
    size_t n = sets.size();
    double total = static_cast<double>(tasks.size());
    report.jaccard.assign(n, vector<double>(n, 0.0));
    report.domination.assign(n, vector<double>(n, 0.0));
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
            size_t inter = 0;
            for (const string &t : sets[i])
                inter += sets[j].count(t);
            size_t uni = sets[i].size() + sets[j].size() - inter;
            report.jaccard[i][j] = uni == 0 ? 1.0 : static_cast<double>(inter) / uni;
            report.domination[i][j] =
                total == 0 ? 0.0 : static_cast<double>(sets[i].size() - inter) / total;
        }
    }
    return report;
}

void write_matrix_csv(ostream &out, const vector<string> &names,
                      const vector<vector<double>> &values) {
    vector<string> header = {"heuristic"};
    header.insert(header.end(), names.begin(), names.end());
    write_csv_row(out, header);
    for (size_t i = 0; i < names.size(); ++i) {
        vector<string> row = {names[i]};
        for (double v : values[i])
            row.push_back(format_double(v));
        write_csv_row(out, row);
    }
}

string bench_cache_key(const string &heuristic, const string &task, const SearchLimits &limits) {
    ostringstream key;
    key << heuristic << '|' << task << '|' << format_double(limits.time_limit) << '|'
        << limits.memory_limit << '|' << (limits.clock == ClockMode::Work ? "work" : "wall")
        << '|' << format_double(limits.seconds_per_work_unit) << '|'
        << (limits.verify_dead_ends ? 1 : 0);
    return key.str();
}

static json row_to_json(const MatrixRow &row) {
    return json{{"heuristic", row.heuristic},   {"domain", row.domain},
                {"task", row.task},             {"class", to_string(row.outcome_class)},
                {"outcome", row.outcome},       {"time", row.time},
                {"evaluations", row.evaluations}, {"expansions", row.expansions},
                {"plan_cost", row.plan_cost}};
}

static optional<MatrixRow> row_from_json(const json &j) {
    try {
        MatrixRow row;
        row.heuristic = j.at("heuristic");
        row.domain = j.at("domain");
        row.task = j.at("task");
        auto cls = parse_outcome_class(j.at("class").get<string>());
        if (!cls)
            return nullopt;
        row.outcome_class = *cls;
        row.outcome = j.at("outcome");
        row.time = j.at("time");
        row.evaluations = j.at("evaluations");
        row.expansions = j.at("expansions");
        row.plan_cost = j.at("plan_cost");
        return row;
    } catch (const json::exception &) {
        return nullopt;
    }
}

static MatrixRow run_one(const ManifestEntry &entry, const string &heuristic,
                         const SearchLimits &limits) {
    MatrixRow row;
    row.heuristic = heuristic;
    row.domain = entry.domain;
    row.task = entry.path;
    try {
        Task task = load_sas_file(entry.path);
        unique_ptr<Heuristic> h = make_heuristic(heuristic);
        SearchResult result = gbfs(task, *h, limits);
        row.outcome_class = classify(result.outcome);
        row.outcome = to_string(result.outcome);
        row.time = result.wall_time;
        row.evaluations = result.evaluations;
        row.expansions = result.expansions;
        row.plan_cost = result.plan_cost;
    } catch (const exception &) {
        row.outcome_class = OutcomeClass::Other;
        row.outcome = to_string(SearchOutcome::Crash);
    }
    return row;
}

OutcomeMatrix run_bench(const vector<ManifestEntry> &manifest, const vector<string> &heuristics,
                        const BenchOptions &options) {
    for (const string &h : heuristics)
        make_heuristic(h);

    map<string, MatrixRow> cache;
    if (!options.cache_path.empty()) {
        ifstream in(options.cache_path);
        string line;
        while (getline(in, line)) {
            if (line.empty())
                continue;
            json j = json::parse(line, nullptr, false);
            if (j.is_discarded() || !j.contains("key") || !j.contains("row"))
                continue;
            if (auto row = row_from_json(j["row"]))
                cache[j["key"].get<string>()] = *row;
        }
    }

    struct Job {
        const ManifestEntry *entry;
        string heuristic;
        string key;
    };
    vector<Job> jobs;
    for (const string &h : heuristics) {
        for (const auto &entry : manifest)
            jobs.push_back({&entry, h, bench_cache_key(h, entry.path, options.limits)});
    }
    vector<optional<MatrixRow>> results(jobs.size());
    vector<size_t> pending;
    for (size_t i = 0; i < jobs.size(); ++i) {
        auto it = cache.find(jobs[i].key);
        if (it != cache.end()) {
            results[i] = it->second;
            results[i]->domain = jobs[i].entry->domain;
        } else {
            pending.push_back(i);
        }
    }

    ofstream cache_out;
    if (!options.cache_path.empty() && !pending.empty())
        cache_out.open(options.cache_path, ios::app);
    mutex cache_mutex;
    atomic<size_t> next{0};
    auto worker = [&]() {
        for (size_t k = next++; k < pending.size(); k = next++) {
            const Job &job = jobs[pending[k]];
            MatrixRow row = run_one(*job.entry, job.heuristic, options.limits);
            if (cache_out.is_open()) {
                lock_guard<mutex> lock(cache_mutex);
                cache_out << json{{"key", job.key}, {"row", row_to_json(row)}}.dump() << "\n";
                cache_out.flush();
            }
            results[pending[k]] = move(row);
        }
    };
    int workers = max(1, min<int>(options.workers, static_cast<int>(pending.size())));
    if (workers == 1) {
        worker();
    } else {
        vector<thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back(worker);
        for (auto &t : pool)
            t.join();
    }

    OutcomeMatrix matrix;
    for (auto &r : results)
        matrix.add(move(*r));
    return matrix;
}
}  // namespace evoplan
