#include "evoplan/fitness.h"
#include "evoplan/heuristic_registry.h"
#include "evoplan/report.h"
#include "evoplan/run.h"
#include "evoplan/sas_io.h"
#include "evoplan/search.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <functional>
#include <iostream>

using namespace std;
using namespace evoplan;
using json = nlohmann::json;

namespace {
enum ExitCode { EXIT_OK = 0, EXIT_USAGE = 1, EXIT_INPUT = 2, EXIT_INTERNAL = 3 };

class UsageError : public runtime_error {
public:
    using runtime_error::runtime_error;
};

class InputError : public runtime_error {
public:
    using runtime_error::runtime_error;
};

struct LimitOptions {
    double time_limit = 1800;
    double memory_mb = 8192;
    string clock = "wall";
    double work_unit = 1e-6;

    void add(CLI::App *app) {
        app->add_option("--time-limit", time_limit, "Search time limit in seconds")
            ->check(CLI::PositiveNumber);
        app->add_option("--memory-limit", memory_mb, "Memory limit in MiB")
            ->check(CLI::PositiveNumber);
        app->add_option("--clock", clock, "Time source: wall or work")
            ->check(CLI::IsMember({"wall", "work"}));
        app->add_option("--work-unit", work_unit, "Seconds per work unit for the work clock")
            ->check(CLI::PositiveNumber);
    }

    SearchLimits limits() const {
        SearchLimits l;
        l.time_limit = time_limit;
        l.memory_limit = static_cast<uint64_t>(memory_mb * 1024 * 1024);
        l.clock = clock == "work" ? ClockMode::Work : ClockMode::Wall;
        l.seconds_per_work_unit = work_unit;
        return l;
    }
};

// Writes to path, or stdout for "" and "-".
void with_output(const string &path, const function<void(ostream &)> &fn) {
    if (path.empty() || path == "-") {
        fn(cout);
        return;
    }
    ofstream out(path);
    if (!out)
        throw InputError("cannot write '" + path + "'");
    fn(out);
}

OutcomeMatrix load_matrix(const string &path) {
    try {
        return OutcomeMatrix::load(path);
    } catch (const invalid_argument &e) {
        throw InputError(e.what());
    }
}

unique_ptr<Heuristic> heuristic_or_usage(const string &spec) {
    try {
        return make_heuristic(spec);
    } catch (const UnknownHeuristicError &e) {
        throw UsageError(e.what());
    } catch (const exception &e) {
        throw InputError(e.what());
    }
}

int cmd_solve(const string &task_path, const string &heuristic, const LimitOptions &lo,
              const string &plan_file) {
    unique_ptr<Heuristic> h = heuristic_or_usage(heuristic);
    Task task;
    try {
        task = load_sas_file(task_path);
    } catch (const SasError &e) {
        throw InputError(task_path + ": " + e.what());
    }
    SearchResult r = gbfs(task, *h, lo.limits());
    if (r.plan && !plan_file.empty()) {
        with_output(plan_file, [&](ostream &out) { write_plan(out, task, *r.plan); });
    }
    cout << "outcome=" << to_string(r.outcome) << " class=" << to_string(classify(r.outcome))
         << " time=" << r.wall_time << " evaluations=" << r.evaluations
         << " expansions=" << r.expansions << " generated=" << r.generated
         << " cost=" << (r.plan ? to_string(r.plan_cost) : string("-"))
         << " plan_length=" << (r.plan ? to_string(r.plan->size()) : string("-"))
         << " dead_end_at_root=" << (r.dead_end_at_root ? 1 : 0) << "\n";
    if (!r.diagnostic.empty())
        cerr << "diagnostic: " << r.diagnostic << "\n";
    return EXIT_OK;
}

int cmd_bench(const string &manifest_path, const vector<string> &heuristics,
              const LimitOptions &lo, const string &cache, int workers, const string &out_path,
              bool as_json) {
    for (const string &h : heuristics)
        heuristic_or_usage(h);
    vector<ManifestEntry> manifest;
    try {
        manifest = read_manifest(manifest_path);
    } catch (const invalid_argument &e) {
        throw InputError(e.what());
    }
    BenchOptions options;
    options.limits = lo.limits();
    options.cache_path = cache;
    options.workers = workers;
    OutcomeMatrix matrix = run_bench(manifest, heuristics, options);
    with_output(out_path, [&](ostream &out) {
        if (!as_json) {
            matrix.write_csv(out);
            return;
        }
        json rows = json::array();
        for (const auto &r : matrix.rows())
            rows.push_back({{"heuristic", r.heuristic}, {"domain", r.domain}, {"task", r.task},
                            {"class", to_string(r.outcome_class)}, {"outcome", r.outcome},
                            {"time", r.time}, {"evaluations", r.evaluations},
                            {"expansions", r.expansions}, {"plan_cost", r.plan_cost}});
        out << rows.dump(2) << "\n";
    });
    return EXIT_OK;
}

int cmd_calibrate(const string &manifest_path, const LimitOptions &lo, const string &out_path) {
    vector<ManifestEntry> manifest;
    try {
        manifest = read_manifest(manifest_path);
    } catch (const invalid_argument &e) {
        throw InputError(e.what());
    }
    vector<string> dropped;
    TrainingSet training = calibrate(manifest, lo.limits(), &dropped);
    for (const auto &path : dropped)
        cerr << "dropped (FF did not solve it): " << path << "\n";
    save_calibration(training, out_path);
    cout << "calibrated " << training.num_tasks() << " tasks\n";
    return EXIT_OK;
}

int cmd_evolve(const string &config_path, const string &output_dir) {
    RunConfig config;
    try {
        config = load_run_config(config_path);
    } catch (const ConfigError &e) {
        throw InputError(e.what());
    }
    if (!output_dir.empty())
        config.output_dir = output_dir;
    RunSummary summary;
    try {
        summary = run_evolution(config);
    } catch (const ConfigError &e) {
        throw InputError(e.what());
    } catch (const PromptError &e) {
        throw InputError(e.what());
    } catch (const invalid_argument &e) {
        throw InputError(e.what());
    }
    cout << "best score=" << *summary.best.score << " genome=" << summary.best.genome.describe()
         << "\nrun log: " << summary.run_log_path << "\nbest genome: "
         << summary.best_genome_path << "\n";
    return EXIT_OK;
}

int cmd_report_cactus(const string &matrix_path, const string &out_path, bool as_json) {
    auto points = report_cactus(load_matrix(matrix_path));
    with_output(out_path, [&](ostream &out) {
        if (!as_json) {
            write_cactus_csv(out, points);
            return;
        }
        json j = json::array();
        for (const auto &p : points)
            j.push_back({{"heuristic", p.heuristic}, {"time", p.time}, {"solved", p.solved}});
        out << j.dump(2) << "\n";
    });
    return EXIT_OK;
}

int cmd_report_pareto(const string &matrix_path, const string &reference, const string &out_path,
                      bool as_json) {
    OutcomeMatrix matrix = load_matrix(matrix_path);
    ParetoReport report;
    try {
        report = report_pareto(matrix, reference);
    } catch (const invalid_argument &e) {
        throw InputError(e.what());
    }
    if (!report.warning.empty())
        cerr << "warning: " << report.warning << "\n";
    for (const auto &h : report.excluded)
        cerr << "excluded (solves under a third of the tasks): " << h << "\n";
    with_output(out_path, [&](ostream &out) {
        if (!as_json) {
            write_pareto_csv(out, report);
            return;
        }
        json j = {{"entries", json::array()},
                  {"excluded", report.excluded},
                  {"common_tasks", report.common_tasks},
                  {"warning", report.warning}};
        for (const auto &e : report.entries)
            j["entries"].push_back(
                {{"heuristic", e.heuristic}, {"informedness", e.informedness}, {"speed", e.speed}});
        out << j.dump(2) << "\n";
    });
    return EXIT_OK;
}

int cmd_report_similarity(const string &matrix_path, const string &jaccard_path,
                          const string &domination_path, bool as_json) {
    SimilarityReport report = report_similarity(load_matrix(matrix_path));
    auto emit = [&](const string &path, const vector<vector<double>> &values) {
        with_output(path, [&](ostream &out) {
            if (!as_json) {
                write_matrix_csv(out, report.heuristics, values);
                return;
            }
            out << json{{"heuristics", report.heuristics}, {"values", values}}.dump(2) << "\n";
        });
    };
    emit(jaccard_path, report.jaccard);
    if (domination_path == jaccard_path && (jaccard_path.empty() || jaccard_path == "-"))
        cout << "\n";
    emit(domination_path, report.domination);
    return EXIT_OK;
}
}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Heuristic evolution toolkit for SAS+ planning tasks"};
    app.require_subcommand(1);

    auto *solve = app.add_subcommand("solve", "Run greedy best-first search on one task");
    string task_path, heuristic = "ff", plan_file;
    LimitOptions solve_limits;
    solve->add_option("task", task_path, "SAS+ task file")->required()->check(CLI::ExistingFile);
    solve->add_option("-H,--heuristic", heuristic, "Heuristic name or spec");
    solve->add_option("--plan-file", plan_file, "Write the plan here on success");
    solve_limits.add(solve);

    auto *bench = app.add_subcommand("bench", "Run heuristics over a suite manifest");
    string manifest, cache, bench_out;
    vector<string> heuristics;
    int workers = 1;
    bool bench_json = false;
    LimitOptions bench_limits;
    bench->add_option("manifest", manifest, "Suite manifest")->required()->check(CLI::ExistingFile);
    bench->add_option("-H,--heuristic", heuristics, "Heuristic (repeatable)")->required();
    bench->add_option("--cache", cache, "JSONL result cache");
    bench->add_option("--workers", workers, "Parallel runs")->check(CLI::PositiveNumber);
    bench->add_option("-o,--out", bench_out, "Outcome matrix CSV (default stdout)");
    bench->add_flag("--json", bench_json, "Write JSON instead of CSV");
    bench_limits.add(bench);

    auto *cal = app.add_subcommand("calibrate", "Record FF baselines for a training manifest");
    string cal_manifest, cal_out;
    LimitOptions cal_limits;
    cal->add_option("manifest", cal_manifest, "Training manifest")->required()->check(CLI::ExistingFile);
    cal->add_option("-o,--out", cal_out, "Calibration CSV")->required();
    cal_limits.add(cal);

    auto *evolve = app.add_subcommand("evolve", "Run heuristic evolution from a config file");
    string config_path, output_dir;
    evolve->add_option("config", config_path, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
    evolve->add_option("--output-dir", output_dir, "Override output_dir");

    string matrix_path, report_out, reference = "ff", jaccard_out, domination_out;
    bool report_json = false;
    auto *cactus = app.add_subcommand("report-cactus", "Cumulative solved-over-time table");
    cactus->add_option("matrix", matrix_path, "Outcome matrix CSV")->required()->check(CLI::ExistingFile);
    cactus->add_option("-o,--out", report_out, "Output file (default stdout)");
    cactus->add_flag("--json", report_json, "Write JSON instead of CSV");

    auto *pareto = app.add_subcommand("report-pareto", "FF-normalized informedness and speed");
    pareto->add_option("matrix", matrix_path, "Outcome matrix CSV")->required()->check(CLI::ExistingFile);
    pareto->add_option("--reference", reference, "Normalizing heuristic");
    pareto->add_option("-o,--out", report_out, "Output file (default stdout)");
    pareto->add_flag("--json", report_json, "Write JSON instead of CSV");

    auto *similarity = app.add_subcommand("report-similarity", "Jaccard and domination matrices");
    similarity->add_option("matrix", matrix_path, "Outcome matrix CSV")->required()->check(CLI::ExistingFile);
    similarity->add_option("--jaccard-out", jaccard_out, "Jaccard CSV (default stdout)");
    similarity->add_option("--domination-out", domination_out, "Domination CSV (default stdout)");
    similarity->add_flag("--json", report_json, "Write JSON instead of CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? EXIT_OK : EXIT_USAGE;
    }

    try {
        if (*solve)
            return cmd_solve(task_path, heuristic, solve_limits, plan_file);
        if (*bench)
            return cmd_bench(manifest, heuristics, bench_limits, cache, workers, bench_out,
                             bench_json);
        if (*cal)
            return cmd_calibrate(cal_manifest, cal_limits, cal_out);
        if (*evolve)
            return cmd_evolve(config_path, output_dir);
        if (*cactus)
            return cmd_report_cactus(matrix_path, report_out, report_json);
        if (*pareto)
            return cmd_report_pareto(matrix_path, reference, report_out, report_json);
        if (*similarity)
            return cmd_report_similarity(matrix_path, jaccard_out, domination_out, report_json);
    } catch (const UsageError &e) {
        cerr << "error: " << e.what() << "\n";
        return EXIT_USAGE;
    } catch (const InputError &e) {
        cerr << "error: " << e.what() << "\n";
        return EXIT_INPUT;
    } catch (const exception &e) {
        cerr << "internal error: " << e.what() << "\n";
        return EXIT_INTERNAL;
    }
    return EXIT_USAGE;
}
