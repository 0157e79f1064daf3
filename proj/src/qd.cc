#include "evoplan/qd.h"

#include <algorithm>
#include <cmath>
#include <ostream>

using namespace std;
using json = nlohmann::json;

namespace evoplan {
static bool better(const Individual &a, const Individual &b) {
    if (*a.score != *b.score)
        return *a.score > *b.score;
    return a.id < b.id;
}

Archive::Archive(int rows, int cols) : dims_{rows, cols} {
    if (rows < 1 || cols < 1)
        throw invalid_argument("archive dimensions must be positive");
    cells_.resize(static_cast<size_t>(rows) * cols);
}

int Archive::cell_of(const array<double, 2> &features) const {
    array<int, 2> bin{0, 0};
    for (int axis = 0; axis < 2; ++axis) {
        double width = hi_[axis] - lo_[axis];
        if (!has_bounds_ || !(width > 0))
            continue;
        double t = (features[axis] - lo_[axis]) / width;
        int b = static_cast<int>(floor(t * dims_[axis]));
        bin[axis] = clamp(b, 0, dims_[axis] - 1);
    }
    return bin[0] * dims_[1] + bin[1];
}

size_t Archive::occupied() const {
    return count_if(cells_.begin(), cells_.end(), [](const auto &c) { return c.has_value(); });
}

vector<int> Archive::occupied_cells() const {
    vector<int> result;
    for (size_t i = 0; i < cells_.size(); ++i) {
        if (cells_[i])
            result.push_back(static_cast<int>(i));
    }
    return result;
}

vector<Individual> Archive::elites() const {
    vector<Individual> result;
    for (const auto &cell : cells_) {
        if (cell)
            result.push_back(*cell);
    }
    return result;
}

const Individual *Archive::best() const {
    const Individual *result = nullptr;
    for (const auto &cell : cells_) {
        if (cell && (!result || better(*cell, *result)))
            result = &*cell;
    }
    return result;
}

vector<Individual> Archive::top(size_t k, int exclude_id) const {
    vector<Individual> result;
    for (const auto &cell : cells_) {
        if (cell && cell->id != exclude_id)
            result.push_back(*cell);
    }
    sort(result.begin(), result.end(), better);
    if (result.size() > k)
        result.resize(k);
    return result;
}

void Archive::rebin() {
    vector<Individual> all = elites();
    sort(all.begin(), all.end(), better);
    for (auto &cell : cells_)
        cell.reset();
    for (auto &ind : all) {
        int c = cell_of(*ind.features);
        if (!cells_[c])
            cells_[c] = move(ind);
    }
}

InsertReport Archive::insert(const Individual &individual) {
    if (!individual.score || !individual.features)
        throw ContractViolation("only evaluated individuals can enter an archive");
    const auto &f = *individual.features;
    InsertReport report;
    if (!has_bounds_) {
        has_bounds_ = true;
        lo_ = hi_ = f;
    } else {
        bool widened = false;
        for (int axis = 0; axis < 2; ++axis) {
            if (f[axis] < lo_[axis]) {
                lo_[axis] = f[axis];
                widened = true;
            }
            if (f[axis] > hi_[axis]) {
                hi_[axis] = f[axis];
                widened = true;
            }
        }
        if (widened) {
            size_t before = occupied();
            rebin();
            report.rebinned = true;
            report.displaced = static_cast<int>(before - occupied());
        }
    }
    report.cell = cell_of(f);
    auto &incumbent = cells_[report.cell];
    if (!incumbent || *individual.score > *incumbent->score) {
        incumbent = individual;
        report.placed = true;
    }
    return report;
}

json Archive::to_json() const {
    json j = {{"rows", dims_[0]}, {"cols", dims_[1]}, {"has_bounds", has_bounds_},
              {"lower", lo_},     {"upper", hi_}};
    j["cells"] = json::array();
    for (size_t i = 0; i < cells_.size(); ++i) {
        if (cells_[i])
            j["cells"].push_back({{"cell", i}, {"individual", cells_[i]->to_json()}});
    }
    return j;
}

Archive Archive::from_json(const json &j) {
    try {
        Archive archive(j.at("rows").get<int>(), j.at("cols").get<int>());
        archive.has_bounds_ = j.at("has_bounds").get<bool>();
        archive.lo_ = j.at("lower").get<array<double, 2>>();
        archive.hi_ = j.at("upper").get<array<double, 2>>();
        for (const auto &entry : j.at("cells")) {
            size_t cell = entry.at("cell").get<size_t>();
            if (cell >= archive.cells_.size())
                throw invalid_argument("archive cell index out of range");
            archive.cells_[cell] = Individual::from_json(entry.at("individual"));
        }
        return archive;
    } catch (const json::exception &e) {
        throw invalid_argument(string("malformed archive: ") + e.what());
    }
}

IslandSet::IslandSet(int num_islands, int rows, int cols) {
    if (num_islands < 1)
        throw invalid_argument("at least one island is required");
    islands_.assign(num_islands, Archive(rows, cols));
}

pair<int, Individual> IslandSet::sample_parent(mt19937_64 &rng) {
    int n = size();
    for (int step = 0; step < n; ++step) {
        int i = (cursor_ + step) % n;
        vector<int> cells = islands_[i].occupied_cells();
        if (cells.empty())
            continue;
        cursor_ = (i + 1) % n;
        uniform_int_distribution<size_t> pick(0, cells.size() - 1);
        return {i, *islands_[i].at(cells[pick(rng)])};
    }
    throw ContractViolation("cannot sample a parent: every island is empty");
}

MigrationReport IslandSet::migrate(int source) {
    MigrationReport report;
    report.source = source;
    const Individual *best = islands_[source].best();
    if (!best)
        return report;
    Individual migrant = *best;
    report.migrant_id = migrant.id;
    for (int i = 0; i < size(); ++i) {
        if (i != source && islands_[i].insert(migrant).placed)
            report.placed_on.push_back(i);
    }
    return report;
}

const Individual *IslandSet::best() const {
    const Individual *result = nullptr;
    for (const auto &island : islands_) {
        const Individual *b = island.best();
        if (b && (!result || better(*b, *result)))
            result = b;
    }
    return result;
}

json IslandSet::to_json() const {
    json j = {{"cursor", cursor_}, {"islands", json::array()}};
    for (const auto &island : islands_)
        j["islands"].push_back(island.to_json());
    return j;
}

IslandSet IslandSet::from_json(const json &j) {
    try {
        const auto &list = j.at("islands");
        if (list.empty())
            throw invalid_argument("snapshot has no islands");
        IslandSet set(static_cast<int>(list.size()));
        for (size_t i = 0; i < list.size(); ++i)
            set.islands_[i] = Archive::from_json(list[i]);
        set.cursor_ = j.at("cursor").get<int>() % set.size();
        return set;
    } catch (const json::exception &e) {
        throw invalid_argument(string("malformed snapshot: ") + e.what());
    }
}

string IterationRecord::outcome_label() const {
    switch (outcome) {
    case RepairOutcome::NoRepair: return "no_repair";
    case RepairOutcome::Repaired: return "repaired_" + to_string(repairs);
    case RepairOutcome::Failed: return "failed";
    }
    return "failed";
}

json IterationRecord::to_json() const {
    json j = {{"iteration", iteration}, {"island", island},     {"parent", parent_id},
              {"child", child_id},      {"outcome", outcome_label()}, {"repairs", repairs},
              {"placed", placed},       {"cell", cell},         {"best", best_score},
              {"genome", genome}};
    j["score"] = score ? json(*score) : json(nullptr);
    j["features"] = features ? json(*features) : json(nullptr);
    if (migration) {
        j["migration"] = {{"source", migration->source},
                          {"migrant", migration->migrant_id},
                          {"placed_on", migration->placed_on}};
    }
    if (!diagnostic.empty())
        j["diagnostic"] = diagnostic;
    return j;
}

static void evaluate_into(Individual &ind, const TrainingSet &training,
                          const FitnessConfig &config, string &diagnostic) {
    FitnessReport report = evaluate_genome(ind.genome, training, config);
    if (report.rejected) {
        diagnostic = report.diagnostic;
        return;
    }
    ind.score = report.score;
    ind.features = array<double, 2>{report.features.evals, report.features.speed};
}

EvolutionResult evolve_loop(const Genome &seed, Mutator &mutator, const TrainingSet &training,
                            const EvolutionConfig &config, ostream *run_log) {
    if (config.repair_budget < 0 || config.migration_interval < 1 || config.iterations < 0 ||
        config.inspirations < 0)
        throw invalid_argument("invalid evolution configuration");
    EvolutionResult result{IslandSet(config.islands, config.rows, config.cols), {}, {}, {}, {}};
    result.repair_histogram.assign(config.repair_budget + 2, 0);

    Individual &seed_ind = result.seed;
    seed_ind.id = 0;
    seed_ind.genome = seed;
    string diagnostic = smoke_check(seed);
    if (diagnostic.empty())
        evaluate_into(seed_ind, training, config.fitness, diagnostic);
    if (!diagnostic.empty())
        throw EvolutionError("seed genome rejected: " + diagnostic);
    for (int i = 0; i < result.islands.size(); ++i)
        result.islands.island(i).insert(seed_ind);
    if (run_log) {
        json j = {{"iteration", 0},
                  {"event", "seed"},
                  {"child", 0},
                  {"genome", seed.describe()},
                  {"score", *seed_ind.score},
                  {"features", *seed_ind.features}};
        *run_log << j.dump() << "\n";
    }

    mt19937_64 rng(config.seed);
    vector<int> island_iterations(result.islands.size(), 0);
    int next_id = 1;
    for (int it = 1; it <= config.iterations; ++it) {
        IterationRecord rec;
        rec.iteration = it;
        auto [island, parent] = result.islands.sample_parent(rng);
        rec.island = island;
        rec.parent_id = parent.id;
        rec.child_id = next_id++;
        vector<Individual> inspirations =
            result.islands.island(island).top(config.inspirations, parent.id);

        optional<Genome> candidate;
        string diag;
        try {
            candidate = mutator.propose(parent, inspirations);
            diag = smoke_check(*candidate);
        } catch (const MutatorError &e) {
            diag = e.what();
            if (diag.empty())
                diag = "mutator failed";
        }
        Genome broken = candidate ? *candidate : parent.genome;
        bool ok = diag.empty();
        while (!ok && rec.repairs < config.repair_budget) {
            ++rec.repairs;
            try {
                Genome fixed = mutator.repair(broken, diag);
                string d = smoke_check(fixed);
                if (d.empty()) {
                    candidate = fixed;
                    ok = true;
                } else {
                    diag = d;
                }
            } catch (const MutatorError &e) {
                diag = e.what();
                if (diag.empty())
                    diag = "mutator failed";
            }
        }

        Individual child;
        child.id = rec.child_id;
        child.parent_id = parent.id;
        child.island = island;
        child.iteration = it;
        child.repair_attempts = rec.repairs;
        if (ok) {
            child.genome = *candidate;
            rec.genome = child.genome.describe();
            string eval_diag;
            evaluate_into(child, training, config.fitness, eval_diag);
            if (!eval_diag.empty()) {
                ok = false;
                diag = eval_diag;
            }
        }
        if (ok) {
            rec.outcome = rec.repairs == 0 ? RepairOutcome::NoRepair : RepairOutcome::Repaired;
            rec.score = child.score;
            rec.features = child.features;
            InsertReport placement = result.islands.island(island).insert(child);
            rec.placed = placement.placed;
            rec.cell = placement.cell;
            ++result.repair_histogram[rec.repairs];
        } else {
            rec.outcome = RepairOutcome::Failed;
            rec.diagnostic = diag;
            ++result.repair_histogram.back();
        }

        if (++island_iterations[island] % config.migration_interval == 0)
            rec.migration = result.islands.migrate(island);
        rec.best_score = *result.islands.best()->score;
        if (run_log)
            *run_log << rec.to_json().dump() << "\n";
        result.log.push_back(move(rec));
    }
    result.best = *result.islands.best();
    return result;
}
}  // namespace evoplan
