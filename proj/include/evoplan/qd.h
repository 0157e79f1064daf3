#pragma once

#include "evoplan/fitness.h"
#include "evoplan/genome.h"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace evoplan {

struct InsertReport {
    bool placed = false;
    // Cell index row * cols + col under the binning after the insert.
    int cell = -1;
    bool rebinned = false;
    // Elites dropped because re-binning put two of them in one cell.
    int displaced = 0;
};

// MAP-Elites grid over (evals, speed). Bin edges are evenly spaced between
// the lowest and highest feature values seen so far on each axis; a
// degenerate axis (min == max) maps everything to bin 0.
//
// When an insert widens the bounds, all elites are re-mapped and collisions
// keep the higher score (lower id on ties). A newcomer takes a cell only if
// the cell is empty or its score is strictly higher than the incumbent's.
class Archive {
public:
    explicit Archive(int rows = 4, int cols = 4);

    // Requires individual.score and individual.features.
    InsertReport insert(const Individual &individual);

    int rows() const { return dims_[0]; }
    int cols() const { return dims_[1]; }
    int cell_of(const std::array<double, 2> &features) const;
    bool empty() const { return occupied() == 0; }
    std::size_t occupied() const;
    // Occupied cells in ascending cell order.
    std::vector<int> occupied_cells() const;
    const std::optional<Individual> &at(int cell) const { return cells_[cell]; }
    // Elites in ascending cell order.
    std::vector<Individual> elites() const;
    // Highest score, lowest id on ties; nullptr when empty.
    const Individual *best() const;
    // Up to k elites by descending score (ascending id on ties), skipping
    // exclude_id.
    std::vector<Individual> top(std::size_t k, int exclude_id = -1) const;
    bool has_bounds() const { return has_bounds_; }
    std::array<double, 2> lower() const { return lo_; }
    std::array<double, 2> upper() const { return hi_; }

    nlohmann::json to_json() const;
    static Archive from_json(const nlohmann::json &j);

private:
    void rebin();

    std::array<int, 2> dims_;
    bool has_bounds_ = false;
    std::array<double, 2> lo_{};
    std::array<double, 2> hi_{};
    std::vector<std::optional<Individual>> cells_;
};

struct MigrationReport {
    int source = -1;
    int migrant_id = -1;
    // Destination islands where the migrant took a cell.
    std::vector<int> placed_on;
};

// Parent sampling visits islands round-robin, skipping empty ones, and picks
// uniformly among the chosen island's occupied cells.
class IslandSet {
public:
    IslandSet(int num_islands = 3, int rows = 4, int cols = 4);

    int size() const { return static_cast<int>(islands_.size()); }
    Archive &island(int i) { return islands_[i]; }
    const Archive &island(int i) const { return islands_[i]; }
    int cursor() const { return cursor_; }
    void set_cursor(int cursor) { cursor_ = cursor; }

    // Throws ContractViolation if every island is empty.
    std::pair<int, Individual> sample_parent(std::mt19937_64 &rng);
    // Offers island 'source''s best elite to every other island.
    MigrationReport migrate(int source);
    const Individual *best() const;

    nlohmann::json to_json() const;
    static IslandSet from_json(const nlohmann::json &j);

private:
    std::vector<Archive> islands_;
    int cursor_ = 0;
};

struct EvolutionConfig {
    int rows = 4;
    int cols = 4;
    int islands = 3;
    int migration_interval = 10;
    int repair_budget = 4;
    int iterations = 320;
    int inspirations = 3;
    std::uint64_t seed = 1;
    FitnessConfig fitness;
};

enum class RepairOutcome { NoRepair, Repaired, Failed };

struct IterationRecord {
    int iteration = 0;
    int island = 0;
    int parent_id = -1;
    int child_id = -1;
    RepairOutcome outcome = RepairOutcome::NoRepair;
    int repairs = 0;
    std::optional<double> score;
    std::optional<std::array<double, 2>> features;
    bool placed = false;
    int cell = -1;
    double best_score = 0;
    std::optional<MigrationReport> migration;
    std::string genome;
    std::string diagnostic;

    // "no_repair", "repaired_<k>" or "failed".
    std::string outcome_label() const;
    nlohmann::json to_json() const;
};

struct EvolutionResult {
    IslandSet islands;
    std::vector<IterationRecord> log;
    Individual seed;
    Individual best;
    // Index k counts children that needed k repairs; the last slot counts
    // failures.
    std::vector<int> repair_histogram;
};

class EvolutionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Runs the generate, check, repair, evaluate, store loop. When run_log is
// non-null each record is written to it as one JSON line as soon as it is
// complete. Throws EvolutionError if the seed fails its smoke check or
// evaluation.
EvolutionResult evolve_loop(const Genome &seed, Mutator &mutator, const TrainingSet &training,
                            const EvolutionConfig &config, std::ostream *run_log = nullptr);

}  // namespace evoplan
