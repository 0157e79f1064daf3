#include "test_support.h"

#include "evoplan/qd.h"

#include <doctest.h>

#include <map>
#include <set>
#include <sstream>

using namespace std;
using namespace evoplan;

namespace {
Individual make_ind(int id, double score, double evals, double speed) {
    Individual ind;
    ind.id = id;
    ind.genome = Genome::from_weights({static_cast<double>(id), 0, 0, 0});
    ind.score = score;
    ind.features = array<double, 2>{evals, speed};
    return ind;
}

TrainingSet small_training() {
    TrainingSet set;
    for (const string &fixture : {"flip.sas", "chain10.sas", "gripper2.sas", "truck2.sas"}) {
        TrainingTask t;
        t.domain = fixture == string("truck2.sas") ? "truck" : "misc";
        t.path = test::fixture_path(fixture);
        t.task = make_shared<const Task>(test::load_fixture(fixture));
        t.t_ff = 0.01;
        t.e_ff = 10;
        set.add(move(t));
    }
    return set;
}

EvolutionConfig small_config(int iterations) {
    EvolutionConfig config;
    config.iterations = iterations;
    config.seed = 5;
    config.fitness.limits.clock = ClockMode::Work;
    config.fitness.limits.seconds_per_work_unit = 1e-3;
    return config;
}

// Always proposes a genome that fails the smoke check; counts repair calls.
class BrokenMutator : public Mutator {
public:
    string name() const override { return "broken"; }
    Genome propose(const Individual &, const vector<Individual> &) override {
        return Genome::from_source("ff +");
    }
    Genome repair(const Genome &broken, const string &diagnostic) override {
        ++repairs;
        CHECK(broken == Genome::from_source("ff +"));
        CHECK_FALSE(diagnostic.empty());
        return broken;
    }
    int repairs = 0;
};

// Fails the first proposal, then succeeds on the k-th repair.
class RepairOnKth : public Mutator {
public:
    explicit RepairOnKth(int k) : k_(k) {}
    string name() const override { return "kth"; }
    Genome propose(const Individual &, const vector<Individual> &) override {
        calls_ = 0;
        throw MutatorError("no diff in response");
    }
    Genome repair(const Genome &, const string &) override {
        if (++calls_ == k_)
            return Genome::from_weights({0, 0, 1, 0});
        throw MutatorError("still broken");
    }

private:
    int k_;
    int calls_ = 0;
};
}  // namespace

TEST_SUITE("qd_archive") {
TEST_CASE("binning is uniform between the observed bounds") {
    Archive archive(4, 4);
    archive.insert(make_ind(0, 0.1, 0, 0));
    archive.insert(make_ind(1, 0.1, 8, 4));
    CHECK(archive.cell_of({0, 0}) == 0);
    CHECK(archive.cell_of({8, 4}) == 15);
    CHECK(archive.cell_of({2, 0}) == 4);
    CHECK(archive.cell_of({1.99, 1}) == 1);
    CHECK(archive.cell_of({-5, 100}) == 3);
    Archive degenerate(4, 4);
    degenerate.insert(make_ind(0, 0.5, 3, 3));
    CHECK(degenerate.cell_of({3, 3}) == 0);
    CHECK_THROWS_AS(Archive(0, 4), invalid_argument);
}

TEST_CASE("each cell keeps the best individual mapped to it") {
    mt19937_64 rng(17);
    uniform_real_distribution<double> unit(0, 1);
    Archive archive(4, 4);
    archive.insert(make_ind(0, 0.0, 0, 0));
    archive.insert(make_ind(1, 0.0, 1, 1));
    map<int, pair<double, int>> best;
    best[0] = {0.0, 0};
    best[15] = {0.0, 1};
    for (int id = 2; id < 2000; ++id) {
        double score = floor(unit(rng) * 20) / 20;
        Individual ind = make_ind(id, score, unit(rng), unit(rng));
        int cell = archive.cell_of(*ind.features);
        InsertReport report = archive.insert(ind);
        CHECK_FALSE(report.rebinned);
        CHECK(report.cell == cell);
        auto it = best.find(cell);
        bool expect = it == best.end() || score > it->second.first;
        CHECK(report.placed == expect);
        if (expect)
            best[cell] = {score, id};
    }
    for (auto [cell, entry] : best) {
        REQUIRE(archive.at(cell).has_value());
        CHECK(archive.at(cell)->id == entry.second);
    }
    CHECK(archive.occupied() == best.size());
}

TEST_CASE("re-binning never loses the archive maximum") {
    for (uint64_t seed = 0; seed < 20; ++seed) {
        mt19937_64 rng(seed);
        uniform_real_distribution<double> unit(0, 1);
        Archive archive(4, 4);
        double max_score = -1;
        bool any_rebin = false;
        for (int id = 0; id < 300; ++id) {
            double spread = 1 + id * 0.05;
            Individual ind = make_ind(id, unit(rng), unit(rng) * spread, unit(rng) * spread);
            max_score = max(max_score, *ind.score);
            InsertReport report = archive.insert(ind);
            any_rebin |= report.rebinned;
            REQUIRE(archive.best() != nullptr);
            CHECK(*archive.best()->score == max_score);
            for (int cell : archive.occupied_cells())
                CHECK(archive.cell_of(*archive.at(cell)->features) == cell);
        }
        CHECK(any_rebin);
    }
}

TEST_CASE("re-binning collisions keep the higher score") {
    Archive archive(2, 2);
    archive.insert(make_ind(0, 0.2, 0, 0));
    archive.insert(make_ind(1, 0.9, 1, 1));
    archive.insert(make_ind(2, 0.5, 0.9, 0.9));
    CHECK(archive.occupied() == 2);
    InsertReport report = archive.insert(make_ind(3, 0.1, 10, 10));
    CHECK(report.rebinned);
    CHECK(report.displaced == 1);
    CHECK(archive.at(0)->id == 1);
    CHECK(archive.at(3)->id == 3);
}

TEST_CASE("top-k ordering excludes the given id") {
    Archive archive(4, 4);
    archive.insert(make_ind(0, 0.1, 0, 0));
    archive.insert(make_ind(1, 0.9, 1, 1));
    archive.insert(make_ind(2, 0.5, 0.5, 0.5));
    archive.insert(make_ind(3, 0.5, 0, 1));
    vector<Individual> top = archive.top(3, 1);
    REQUIRE(top.size() == 3);
    CHECK(top[0].id == 2);
    CHECK(top[1].id == 3);
    CHECK(top[2].id == 0);
    CHECK(archive.top(10).size() == 4);
}

TEST_CASE("unevaluated individuals are rejected") {
    Archive archive;
    Individual ind;
    CHECK_THROWS_AS(archive.insert(ind), ContractViolation);
}

TEST_CASE("archive JSON round trip") {
    Archive archive(4, 4);
    archive.insert(make_ind(0, 0.1, 0, 0));
    archive.insert(make_ind(1, 0.9, 1, 1));
    Archive back = Archive::from_json(archive.to_json());
    CHECK(back.to_json() == archive.to_json());
    CHECK_THROWS_AS(Archive::from_json(nlohmann::json::object()), invalid_argument);
}
}

TEST_SUITE("qd_islands") {
TEST_CASE("round-robin visits non-empty islands in order") {
    IslandSet set(3, 4, 4);
    mt19937_64 rng(1);
    CHECK_THROWS_AS(set.sample_parent(rng), ContractViolation);
    set.island(0).insert(make_ind(0, 0.5, 0, 0));
    set.island(2).insert(make_ind(1, 0.5, 0, 0));
    vector<int> seq;
    for (int i = 0; i < 6; ++i)
        seq.push_back(set.sample_parent(rng).first);
    CHECK(seq == vector<int>{0, 2, 0, 2, 0, 2});
    set.island(1).insert(make_ind(2, 0.5, 0, 0));
    seq.clear();
    for (int i = 0; i < 7; ++i)
        seq.push_back(set.sample_parent(rng).first);
    CHECK(seq == vector<int>{0, 1, 2, 0, 1, 2, 0});
}

TEST_CASE("parent sampling is uniform over occupied cells") {
    IslandSet set(1, 4, 4);
    set.island(0).insert(make_ind(0, 0.1, 0, 0));
    set.island(0).insert(make_ind(1, 0.2, 4, 4));
    set.island(0).insert(make_ind(2, 0.3, 1.5, 0));
    set.island(0).insert(make_ind(3, 0.4, 3.5, 1.5));
    set.island(0).insert(make_ind(4, 0.5, 0, 3.5));
    REQUIRE(set.island(0).occupied() == 5);
    mt19937_64 rng(2024);
    const int draws = 10000;
    map<int, int> counts;
    for (int i = 0; i < draws; ++i)
        ++counts[set.sample_parent(rng).second.id];
    double p = 1.0 / 5;
    double sigma = sqrt(draws * p * (1 - p));
    REQUIRE(counts.size() == 5);
    for (auto [id, count] : counts)
        CHECK(fabs(count - draws * p) <= 5 * sigma);
}

TEST_CASE("migration copies the best elite and never lowers any island's best") {
    mt19937_64 rng(9);
    uniform_real_distribution<double> unit(0, 1);
    IslandSet set(3, 4, 4);
    int id = 0;
    for (int round = 0; round < 200; ++round) {
        int island = round % 3;
        set.island(island).insert(make_ind(id++, unit(rng), unit(rng), unit(rng)));
        vector<double> before;
        for (int i = 0; i < 3; ++i)
            before.push_back(set.island(i).empty() ? -1 : *set.island(i).best()->score);
        MigrationReport report = set.migrate(island);
        CHECK(report.migrant_id == set.island(island).best()->id);
        for (int i = 0; i < 3; ++i) {
            double after = *set.island(i).best()->score;
            CHECK(after >= before[i]);
            CHECK(after >= *set.island(island).best()->score);
        }
    }
    MigrationReport empty = IslandSet(2).migrate(0);
    CHECK(empty.migrant_id == -1);
}

TEST_CASE("island set JSON round trip") {
    IslandSet set(3, 4, 4);
    set.island(1).insert(make_ind(0, 0.5, 0, 0));
    set.set_cursor(2);
    IslandSet back = IslandSet::from_json(set.to_json());
    CHECK(back.to_json() == set.to_json());
    CHECK(back.cursor() == 2);
}
}

TEST_SUITE("qd_evolution") {
TEST_CASE("identity mutation keeps the seed as the only elite") {
    IdentityMutator identity;
    EvolutionResult result = evolve_loop(Genome::blind(), identity, small_training(), small_config(12));
    double seed_score = *result.seed.score;
    for (const auto &rec : result.log)
        CHECK(rec.best_score == seed_score);
    for (int i = 0; i < result.islands.size(); ++i) {
        CHECK(result.islands.island(i).occupied() == 1);
        CHECK(result.islands.island(i).best()->id == 0);
    }
}

TEST_CASE("exhausting the repair budget discards the child") {
    BrokenMutator broken;
    EvolutionConfig config = small_config(3);
    EvolutionResult result = evolve_loop(Genome::blind(), broken, small_training(), config);
    CHECK(broken.repairs == 3 * 4);
    for (const auto &rec : result.log) {
        CHECK(rec.outcome == RepairOutcome::Failed);
        CHECK(rec.repairs == 4);
        CHECK(rec.outcome_label() == "failed");
        CHECK_FALSE(rec.placed);
        CHECK_FALSE(rec.diagnostic.empty());
    }
    CHECK(result.repair_histogram == vector<int>{0, 0, 0, 0, 0, 3});
}

TEST_CASE("repaired children are labelled with their repair count") {
    for (int k = 1; k <= 4; ++k) {
        RepairOnKth mutator(k);
        EvolutionResult result = evolve_loop(Genome::blind(), mutator, small_training(), small_config(2));
        for (const auto &rec : result.log) {
            CHECK(rec.outcome == RepairOutcome::Repaired);
            CHECK(rec.repairs == k);
            CHECK(rec.outcome_label() == "repaired_" + to_string(k));
        }
        CHECK(result.repair_histogram[k] == 2);
    }
}

TEST_CASE("a rejected seed aborts the run") {
    IdentityMutator identity;
    CHECK_THROWS_AS(evolve_loop(Genome::from_source("1 / 0"), identity, small_training(), small_config(1)),
                    EvolutionError);
}

TEST_CASE("parametric evolution is deterministic and keeps lineage closed") {
    auto run = [](ostringstream &log) {
        ParametricMutator mutator(7);
        return evolve_loop(Genome::blind(), mutator, small_training(), small_config(40), &log);
    };
    ostringstream log_a;
    ostringstream log_b;
    EvolutionResult a = run(log_a);
    EvolutionResult b = run(log_b);
    string text = log_a.str();
    CHECK(text == log_b.str());
    CHECK(count(text.begin(), text.end(), '\n') == 41);

    double best = *a.seed.score;
    map<int, int> parent_of;
    for (const auto &rec : a.log) {
        CHECK(rec.best_score >= best);
        best = rec.best_score;
        parent_of[rec.child_id] = rec.parent_id;
    }
    for (int i = 0; i < a.islands.size(); ++i) {
        for (const Individual &elite : a.islands.island(i).elites()) {
            int id = elite.id;
            int steps = 0;
            while (id != 0 && steps++ < 100)
                id = parent_of.at(id);
            CHECK(id == 0);
        }
    }
    int migrations = 0;
    for (const auto &rec : a.log)
        migrations += rec.migration.has_value();
    // Islands run 14, 13 and 13 iterations; each migrates once.
    CHECK(migrations == 3);
}
}
