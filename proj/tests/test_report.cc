#include "test_support.h"

#include "evoplan/report.h"
#include "evoplan/heuristic_registry.h"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace std;
using namespace evoplan;

namespace {
void add(OutcomeMatrix &m, const string &h, const string &task, bool ok, double time,
         uint64_t evals) {
    MatrixRow row;
    row.heuristic = h;
    row.domain = "d";
    row.task = task;
    row.outcome_class = ok ? OutcomeClass::Solved : OutcomeClass::OOT;
    row.outcome = ok ? "SOLVED" : "OUT_OF_TIME";
    row.time = time;
    row.evaluations = evals;
    m.add(row);
}

// ff, a, b solve all three tasks; c solves none.
OutcomeMatrix three_task_matrix() {
    OutcomeMatrix m;
    const double ff_t[] = {1, 2, 4};
    const uint64_t ff_e[] = {100, 200, 400};
    const double a_t[] = {0.5, 4, 2};
    const uint64_t a_e[] = {50, 100, 800};
    const double b_t[] = {2, 2, 2};
    const uint64_t b_e[] = {100, 400, 100};
    for (int i = 0; i < 3; ++i) {
        string task = "t" + to_string(i + 1);
        add(m, "ff", task, true, ff_t[i], ff_e[i]);
        add(m, "a", task, true, a_t[i], a_e[i]);
        add(m, "b", task, true, b_t[i], b_e[i]);
        add(m, "c", task, false, 10, 0);
    }
    return m;
}

const ParetoEntry &entry(const ParetoReport &r, const string &h) {
    for (const auto &e : r.entries) {
        if (e.heuristic == h)
            return e;
    }
    FAIL("missing entry " << h);
    return r.entries.front();
}

int run_cli(const string &args) {
    string cmd = string(EVOPLAN_CLI) + " " + args + " > /dev/null 2>&1";
    int status = system(cmd.c_str());
    return WEXITSTATUS(status);
}

string read_file(const filesystem::path &p) {
    ifstream in(p);
    stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}
}  // namespace

TEST_SUITE("reports") {
TEST_CASE("outcome classes") {
    CHECK(classify(SearchOutcome::Solved) == OutcomeClass::Solved);
    CHECK(classify(SearchOutcome::OutOfTime) == OutcomeClass::OOT);
    CHECK(classify(SearchOutcome::OutOfMemory) == OutcomeClass::OOM);
    CHECK(classify(SearchOutcome::Unsolvable) == OutcomeClass::Other);
    CHECK(classify(SearchOutcome::Crash) == OutcomeClass::Other);
    CHECK(classify(SearchOutcome::DeadEndFalse) == OutcomeClass::Other);
    for (auto c : {OutcomeClass::Solved, OutcomeClass::OOT, OutcomeClass::OOM, OutcomeClass::Other})
        CHECK(parse_outcome_class(to_string(c)) == c);
}

TEST_CASE("Pareto geometric means on a hand-computed matrix") {
    ParetoReport r = report_pareto(three_task_matrix());
    CHECK(r.excluded == vector<string>{"c"});
    CHECK(r.common_tasks == vector<string>{"t1", "t2", "t3"});
    CHECK(entry(r, "ff").informedness == 1.0);
    CHECK(entry(r, "ff").speed == 1.0);
    CHECK(fabs(entry(r, "a").informedness - cbrt(2.0)) < 1e-9);
    CHECK(fabs(entry(r, "a").speed - 1.0) < 1e-9);
    CHECK(fabs(entry(r, "b").informedness - cbrt(2.0)) < 1e-9);
    CHECK(fabs(entry(r, "b").speed - cbrt(0.5)) < 1e-9);
}

TEST_CASE("the one-third coverage filter") {
    OutcomeMatrix m;
    for (int i = 0; i < 6; ++i) {
        string task = "t" + to_string(i);
        add(m, "ff", task, true, 1, 10);
        add(m, "two", task, i < 2, 1, 5);
        add(m, "one", task, i < 1, 1, 5);
    }
    ParetoReport r = report_pareto(m);
    CHECK(r.excluded == vector<string>{"one"});
    CHECK(r.entries.size() == 2);
    CHECK(r.common_tasks == vector<string>{"t0", "t1"});
    CHECK(entry(r, "two").informedness == 2.0);
    CHECK_THROWS_AS(report_pareto(m, "missing"), invalid_argument);
}

TEST_CASE("no common task yields a warning") {
    OutcomeMatrix m;
    add(m, "ff", "t1", true, 1, 10);
    add(m, "ff", "t2", false, 1, 10);
    add(m, "x", "t1", false, 1, 10);
    add(m, "x", "t2", true, 1, 10);
    ParetoReport r = report_pareto(m);
    CHECK(r.entries.empty());
    CHECK_FALSE(r.warning.empty());
}

TEST_CASE("cactus rows are cumulative") {
    OutcomeMatrix m = three_task_matrix();
    vector<CactusPoint> points = report_cactus(m);
    map<string, vector<CactusPoint>> per;
    for (const auto &p : points)
        per[p.heuristic].push_back(p);
    CHECK(per["c"].empty());
    REQUIRE(per["a"].size() == 3);
    CHECK(per["a"][0].time == 0.5);
    CHECK(per["a"][2].time == 4);
    for (auto &[h, list] : per) {
        for (size_t i = 0; i < list.size(); ++i) {
            CHECK(list[i].solved == static_cast<int>(i) + 1);
            if (i)
                CHECK(list[i].time >= list[i - 1].time);
        }
    }
    ostringstream out;
    write_cactus_csv(out, points);
    CHECK(out.str().rfind("heuristic,time,solved\n", 0) == 0);
}

TEST_CASE("similarity matrices") {
    OutcomeMatrix m;
    add(m, "p", "t1", true, 1, 1);
    add(m, "p", "t2", true, 1, 1);
    add(m, "p", "t3", false, 1, 1);
    add(m, "q", "t1", false, 1, 1);
    add(m, "q", "t2", true, 1, 1);
    add(m, "q", "t3", true, 1, 1);
    add(m, "z", "t1", false, 1, 1);
    add(m, "z", "t2", false, 1, 1);
    add(m, "z", "t3", false, 1, 1);
    SimilarityReport r = report_similarity(m);
    size_t n = r.heuristics.size();
    REQUIRE(n == 3);
    for (size_t i = 0; i < n; ++i) {
        CHECK(r.jaccard[i][i] == 1.0);
        CHECK(r.domination[i][i] == 0.0);
        for (size_t j = 0; j < n; ++j)
            CHECK(r.jaccard[i][j] == r.jaccard[j][i]);
    }
    CHECK(r.jaccard[0][1] == 1.0 / 3);
    CHECK(r.jaccard[0][2] == 0.0);
    CHECK(r.domination[0][1] == 1.0 / 3);
    CHECK(r.domination[0][2] == 2.0 / 3);
    CHECK(r.domination[2][0] == 0.0);
    ostringstream out;
    write_matrix_csv(out, r.heuristics, r.jaccard);
    CHECK(out.str().rfind("heuristic,p,q,z\n", 0) == 0);
}

TEST_CASE("matrix CSV round trip and validation") {
    OutcomeMatrix m = three_task_matrix();
    CHECK(m.complete());
    ostringstream out;
    m.write_csv(out);
    istringstream in(out.str());
    OutcomeMatrix back = OutcomeMatrix::read_csv(in);
    ostringstream again;
    back.write_csv(again);
    CHECK(again.str() == out.str());
    istringstream bad_header("a,b\n");
    CHECK_THROWS_AS(OutcomeMatrix::read_csv(bad_header), invalid_argument);
    istringstream bad_class(
        "heuristic,domain,task,class,outcome,time,evaluations,expansions,plan_cost\n"
        "ff,d,t,WHAT,SOLVED,1,1,1,1\n");
    CHECK_THROWS_AS(OutcomeMatrix::read_csv(bad_class), invalid_argument);
    OutcomeMatrix partial;
    add(partial, "ff", "t1", true, 1, 1);
    add(partial, "x", "t2", true, 1, 1);
    CHECK_FALSE(partial.complete());
}
}

TEST_SUITE("bench") {
TEST_CASE("bench runs every pair and reuses its cache") {
    auto dir = filesystem::temp_directory_path() / "evoplan_bench_test";
    filesystem::remove_all(dir);
    filesystem::create_directories(dir);
    vector<ManifestEntry> manifest = {{"toy", test::fixture_path("flip.sas")},
                                      {"toy", test::fixture_path("unsolvable.sas")},
                                      {"truck", test::fixture_path("truck2.sas")}};
    BenchOptions options;
    options.limits.clock = ClockMode::Work;
    options.cache_path = (dir / "cache.jsonl").string();
    options.workers = 3;
    OutcomeMatrix first = run_bench(manifest, {"blind", "ff"}, options);
    CHECK(first.rows().size() == 6);
    CHECK(first.complete());
    const MatrixRow *row = first.find("ff", test::fixture_path("unsolvable.sas"));
    REQUIRE(row);
    CHECK(row->outcome_class == OutcomeClass::Other);
    CHECK(row->outcome == "UNSOLVABLE");
    string cache = read_file(options.cache_path);
    CHECK(count(cache.begin(), cache.end(), '\n') == 6);

    OutcomeMatrix second = run_bench(manifest, {"blind", "ff"}, options);
    CHECK(read_file(options.cache_path) == cache);
    ostringstream a;
    ostringstream b;
    first.write_csv(a);
    second.write_csv(b);
    CHECK(a.str() == b.str());
    CHECK_THROWS_AS(run_bench(manifest, {"ff", "nope"}, options), UnknownHeuristicError);
    CHECK(bench_cache_key("ff", "x", options.limits) != bench_cache_key("ff", "y", options.limits));
    filesystem::remove_all(dir);
}
}

TEST_SUITE("cli") {
TEST_CASE("solve writes a plan and exits zero") {
    auto plan = filesystem::temp_directory_path() / "evoplan_cli_plan.txt";
    CHECK(run_cli("solve " + test::fixture_path("flip.sas") + " -H blind --plan-file " +
                  plan.string()) == 0);
    CHECK(read_file(plan) == "(switch-on)\n; cost = 1 (unit cost)\n");
    filesystem::remove(plan);
    CHECK(run_cli("solve " + test::fixture_path("unsolvable.sas") +
                  " -H evolved_blind_medium_conf") == 0);
}

TEST_CASE("exit codes for usage and input errors") {
    CHECK(run_cli("") == 1);
    CHECK(run_cli("frobnicate") == 1);
    CHECK(run_cli("solve /nonexistent/task.sas") == 1);
    CHECK(run_cli("solve " + test::fixture_path("flip.sas") + " -H bogus") == 1);
    CHECK(run_cli("solve " + test::fixture_path("axiom.sas")) == 2);
    CHECK(run_cli("solve " + test::fixture_path("flip.sas") + " --clock sundial") == 1);
    CHECK(run_cli("--help") == 0);
}

TEST_CASE("bench and report subcommands") {
    auto dir = filesystem::temp_directory_path() / "evoplan_cli_reports";
    filesystem::remove_all(dir);
    filesystem::create_directories(dir);
    string matrix = (dir / "matrix.csv").string();
    CHECK(run_cli("bench " + test::fixture_path("suite.manifest") +
                  " -H blind -H ff -H evolved_ff_none_3 --clock work --time-limit 2 -o " + matrix) == 0);
    OutcomeMatrix m = OutcomeMatrix::load(matrix);
    CHECK(m.complete());
    CHECK(m.heuristics().size() == 3);
    CHECK(run_cli("report-cactus " + matrix + " -o " + (dir / "cactus.csv").string()) == 0);
    CHECK(run_cli("report-pareto " + matrix + " -o " + (dir / "pareto.csv").string()) == 0);
    string pareto = read_file(dir / "pareto.csv");
    CHECK(pareto.find("ff,1,1\n") != string::npos);
    CHECK(run_cli("report-similarity " + matrix + " --jaccard-out " + (dir / "j.csv").string() +
                  " --domination-out " + (dir / "d.csv").string()) == 0);
    CHECK(run_cli("report-pareto " + matrix + " --json -o " + (dir / "p.json").string()) == 0);
    CHECK(nlohmann::json::parse(read_file(dir / "p.json"), nullptr, false).is_discarded() == false);
    CHECK(run_cli("report-pareto " + matrix + " --reference nobody") == 2);
    {
        ofstream bad(dir / "bad.csv");
        bad << "not,a,matrix\n";
    }
    CHECK(run_cli("report-cactus " + (dir / "bad.csv").string()) == 2);
    {
        ofstream cfg(dir / "bad.json");
        cfg << "{\"iterations\": \"many\"}";
    }
    CHECK(run_cli("evolve " + (dir / "bad.json").string()) == 2);
    filesystem::remove_all(dir);
}
}
