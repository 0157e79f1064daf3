#include "test_support.h"

#include "evoplan/fitness.h"
#include "evoplan/heuristics_base.h"
#include "evoplan/sas_io.h"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace std;
using namespace evoplan;

namespace {
EvalRecord solved(double t, double budget, uint64_t e = 1, double e_ff = 1) {
    EvalRecord r;
    r.solved = true;
    r.executed = true;
    r.outcome = SearchOutcome::Solved;
    r.time = t;
    r.budget = budget;
    r.evaluations = e;
    r.e_ff = e_ff;
    return r;
}

EvalRecord failed(double budget = 30) {
    EvalRecord r;
    r.budget = budget;
    r.e_ff = 1;
    return r;
}

TrainingTask training_task(const string &domain, const string &fixture, double t_ff,
                           double e_ff = 1) {
    TrainingTask t;
    t.domain = domain;
    t.path = test::fixture_path(fixture);
    t.t_ff = t_ff;
    t.e_ff = e_ff;
    t.task = make_shared<const Task>(test::load_fixture(fixture));
    return t;
}

FitnessConfig work_config(double floor) {
    FitnessConfig config;
    config.budget_floor = floor;
    config.limits.clock = ClockMode::Work;
    config.limits.seconds_per_work_unit = 1e-3;
    return config;
}

HeuristicFactory blind_factory() {
    return [] { return make_unique<BlindHeuristic>(); };
}
}  // namespace

TEST_SUITE("fitness_features") {
TEST_CASE("task budgets") {
    CHECK(task_budget(10) == 30.0);
    CHECK(task_budget(100) == 1.3 * 100);
    CHECK(fabs(task_budget(100) - 130.0) < 1e-12);
    double boundary = 30.0 / 1.3;
    CHECK(task_budget(boundary) == max(30.0, 1.3 * boundary));
    CHECK(fabs(task_budget(boundary) - 30.0) < 1e-12);
    CHECK(task_budget(5, 2, 2) == 10.0);
}

TEST_CASE("agile decays from one to zero") {
    CHECK(agile(0.5, 30) == 1.0);
    CHECK(agile(1, 30) == 1.0);
    CHECK(agile(30, 30) == 0.0);
    CHECK(agile(31, 30) == 0.0);
    CHECK(fabs(agile(sqrt(30.0), 30) - 0.5) < 1e-9);
    CHECK(fabs(agile(10, 100) - 0.5) < 1e-9);
    double prev = 1.0;
    for (double t = 0.5; t < 40; t += 0.25) {
        double a = agile(t, 30);
        CHECK(a <= prev);
        CHECK(a >= 0.0);
        prev = a;
    }
}

TEST_CASE("score closed forms with alpha 0.25") {
    CHECK(fitness_score({solved(0.5, 30), solved(1, 30)}, 0.25) == 1.0);
    CHECK(fitness_score({solved(30, 30)}, 0.25) == 0.25);
    CHECK(fitness_score({failed(), solved(1, 30)}, 0.25) == 0.5);
    CHECK(fitness_score({failed(), failed()}, 0.25) == 0.0);
    CHECK(fitness_score({}, 0.25) == 0.0);
    double mixed = fitness_score({solved(1, 30), solved(30, 30), failed(), solved(sqrt(30.0), 30)}, 0.25);
    CHECK(fabs(mixed - (1.0 + 0.25 + 0.0 + 0.625) / 4) < 1e-12);
}

TEST_CASE("features and failure sentinels") {
    FeatureValues none = fitness_features({failed(), failed(), failed()});
    CHECK(none.evals == 10.0);
    CHECK(none.speed == 0.0);
    FeatureValues empty = fitness_features({});
    CHECK(empty.evals == EVALS_FAILURE_SENTINEL);
    CHECK(empty.speed == SPEED_FAILURE_SENTINEL);
    FeatureValues one = fitness_features({solved(2, 30, 500, 500)});
    CHECK(one.evals == 1.0);
    CHECK(one.speed == 250.0);
    FeatureValues heavy = fitness_features({solved(2, 30, 5000, 100)});
    CHECK(heavy.evals == 50.0);
    FeatureValues instant = fitness_features({solved(0, 30, 3, 3)});
    CHECK(instant.speed == 3 / MIN_TIME);
    FeatureValues a = fitness_features({solved(2, 30, 500, 250), failed()});
    FeatureValues b = fitness_features({failed(), solved(2, 30, 500, 250)});
    CHECK(a.evals == b.evals);
    CHECK(a.speed == b.speed);
    CHECK(a.evals == 6.0);
}

TEST_CASE("training tasks are ordered by FF time within a domain") {
    TrainingSet set;
    set.add(training_task("d", "chain10.sas", 3));
    set.add(training_task("d", "flip.sas", 1));
    set.add(training_task("e", "gripper1.sas", 2));
    REQUIRE(set.domains.size() == 2);
    CHECK(set.num_tasks() == 3);
    CHECK(set.domains[0].tasks[0].path == test::fixture_path("flip.sas"));
    CHECK(set.domains[0].tasks[1].path == test::fixture_path("chain10.sas"));
}

TEST_CASE("a timeout aborts the rest of its domain only") {
    TrainingSet set;
    set.add(training_task("crafted", "flip.sas", 0.001));
    set.add(training_task("crafted", "visitall5x4.sas", 0.002));
    set.add(training_task("crafted", "chain10.sas", 0.003));
    set.add(training_task("other", "flip.sas", 0.001));
    set.add(training_task("other", "chain10.sas", 0.002));
    FitnessConfig config = work_config(1.0);
    ExecutionCounters counters;
    FitnessReport report = evaluate_heuristic(blind_factory(), set, config, &counters);
    REQUIRE(report.records.size() == 5);
    const auto &r = report.records;
    CHECK(r[0].solved);
    CHECK(r[1].executed);
    CHECK(r[1].outcome == SearchOutcome::OutOfTime);
    CHECK_FALSE(r[1].solved);
    CHECK_FALSE(r[2].executed);
    CHECK_FALSE(r[2].solved);
    CHECK(r[3].solved);
    CHECK(r[4].solved);
    CHECK(counters.count(test::fixture_path("visitall5x4.sas")) == 1);
    CHECK(counters.count(test::fixture_path("chain10.sas")) == 1);
    CHECK(counters.count(test::fixture_path("flip.sas")) == 2);
    CHECK(counters.total() == 4);
}

TEST_CASE("parallel domain evaluation matches sequential evaluation") {
    TrainingSet set = load_calibration(test::fixture_path("training_calibration.csv"));
    FitnessConfig config = work_config(30);
    Genome g = Genome::from_weights({0.5, 0, 1, 0.25});
    FitnessReport seq = evaluate_genome(g, set, config);
    config.workers = 4;
    FitnessReport par = evaluate_genome(g, set, config);
    CHECK(seq.score == par.score);
    CHECK(seq.features.evals == par.features.evals);
    CHECK(seq.features.speed == par.features.speed);
    CHECK(seq.to_json() == par.to_json());
    CHECK(seq.score > 0);
    CHECK(seq.score <= 1);
}

TEST_CASE("FF scores itself with unit informedness") {
    TrainingSet set = load_calibration(test::fixture_path("training_calibration.csv"));
    FitnessConfig config = work_config(30);
    FitnessReport report =
        evaluate_heuristic([] { return make_unique<FFHeuristic>(); }, set, config);
    CHECK(report.features.evals == doctest::Approx(1.0).epsilon(1e-12));
    for (const auto &r : report.records)
        CHECK(r.solved);
}

TEST_CASE("rejected heuristics carry a diagnostic") {
    TrainingSet set;
    set.add(training_task("d", "flip.sas", 0.001));
    FitnessReport report = evaluate_genome(Genome::from_source("ff +"), set, FitnessConfig{});
    CHECK(report.rejected);
    CHECK_FALSE(report.diagnostic.empty());
    CHECK(report.records.empty());
}

TEST_CASE("empty training set scores zero with sentinel features") {
    FitnessReport report = evaluate_heuristic(blind_factory(), TrainingSet{}, FitnessConfig{});
    CHECK(report.score == 0.0);
    CHECK(report.features.evals == 10.0);
    CHECK(report.features.speed == 0.0);
}

TEST_CASE("manifests and calibration files") {
    auto dir = filesystem::temp_directory_path() / "evoplan_fitness_test";
    filesystem::create_directories(dir);
    filesystem::copy_file(test::fixture_path("flip.sas"), dir / "flip.sas",
                          filesystem::copy_options::overwrite_existing);
    filesystem::copy_file(test::fixture_path("unsolvable.sas"), dir / "unsolvable.sas",
                          filesystem::copy_options::overwrite_existing);
    {
        ofstream out(dir / "m.manifest");
        out << "# comment\n\ntoy flip.sas\ntoy unsolvable.sas\n";
    }
    vector<ManifestEntry> manifest = read_manifest((dir / "m.manifest").string());
    REQUIRE(manifest.size() == 2);
    CHECK(manifest[0].domain == "toy");
    CHECK(filesystem::path(manifest[0].path) == dir / "flip.sas");

    SearchLimits limits;
    limits.clock = ClockMode::Work;
    vector<string> dropped;
    TrainingSet set = calibrate(manifest, limits, &dropped);
    CHECK(set.num_tasks() == 1);
    CHECK(dropped.size() == 1);
    CHECK(set.domains[0].tasks[0].e_ff == 2);

    string csv = (dir / "cal.csv").string();
    save_calibration(set, csv);
    TrainingSet back = load_calibration(csv);
    REQUIRE(back.num_tasks() == 1);
    CHECK(back.domains[0].tasks[0].t_ff == set.domains[0].tasks[0].t_ff);
    CHECK(back.domains[0].tasks[0].e_ff == 2);
    CHECK(*back.domains[0].tasks[0].task == *set.domains[0].tasks[0].task);
    filesystem::remove_all(dir);
}
}
