#pragma once

#include "evoplan/heuristic.h"
#include "evoplan/task.h"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace evoplan {

enum class SearchOutcome {
    Solved,
    OutOfTime,
    OutOfMemory,
    // The heuristic pruned a state as a dead end, the search space was
    // exhausted, and a goal turned out to be reachable after all.
    DeadEndFalse,
    Crash,
    // Search space exhausted and no goal reachable from the initial state.
    Unsolvable,
};

std::string to_string(SearchOutcome outcome);
std::optional<SearchOutcome> parse_search_outcome(const std::string &text);

// Wall: elapsed time is measured with a steady clock.
// Work: elapsed time is (expansions + generated states + heuristic work)
//       times seconds_per_work_unit, which makes budgets and timings
//       reproducible across machines and runs.
enum class ClockMode { Wall, Work };

struct SearchLimits {
    double time_limit = 1800.0;
    std::uint64_t memory_limit = 8ULL << 30;
    ClockMode clock = ClockMode::Wall;
    double seconds_per_work_unit = 1e-6;
    // On exhaustion after dead-end pruning, re-explore without the
    // heuristic to tell Unsolvable from DeadEndFalse.
    bool verify_dead_ends = true;
};

struct SearchResult {
    SearchOutcome outcome = SearchOutcome::Crash;
    std::optional<std::vector<int>> plan;
    Cost plan_cost = 0;
    std::uint64_t evaluations = 0;
    std::uint64_t expansions = 0;
    std::uint64_t generated = 0;
    std::uint64_t pruned_dead_ends = 0;
    bool dead_end_at_root = false;
    // Seconds in the configured clock (includes heuristic initialization
    // when gbfs performs it).
    double wall_time = 0.0;
    // Estimated bytes held by the search's own structures.
    std::uint64_t peak_memory = 0;
    std::string diagnostic;
};

// Eager greedy best-first search. Successors are evaluated once, when first
// generated; states with dead-end values are never queued; the open list
// pops the lowest h, oldest entry first; goal tests happen on expansion.
// The heuristic is initialized inside the timed region if it is not yet.
SearchResult gbfs(const Task &task, Heuristic &heuristic, const SearchLimits &limits);

struct PlanValidation {
    bool valid = false;
    // Index of the first inapplicable step, or -1.
    int failed_step = -1;
    std::string reason;
};

PlanValidation validate_plan(const Task &task, std::span<const int> plan);

Cost plan_cost(const Task &task, std::span<const int> plan);

// One "(operator name)" line per step and a trailing cost comment.
void write_plan(std::ostream &out, const Task &task, std::span<const int> plan);

class OracleCapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Exact goal distances h* of every state reachable from the initial state,
// by uniform-cost search over the reversed transition relation seeded with
// all reachable goal states.
class OptimalCostOracle {
public:
    static constexpr std::size_t DEFAULT_CAP = 50000;

    // Throws OracleCapExceeded if more than cap states are reachable.
    explicit OptimalCostOracle(const Task &task, std::size_t cap = DEFAULT_CAP);

    const std::vector<State> &states() const { return states_; }
    std::size_t size() const { return states_.size(); }
    Cost h_star(std::size_t index) const { return h_star_[index]; }
    // INF_COST for dead ends; throws std::out_of_range for unknown states.
    Cost h_star(const State &state) const;
    bool contains(const State &state) const { return index_.count(state) != 0; }

private:
    std::vector<State> states_;
    std::vector<Cost> h_star_;
    std::unordered_map<State, std::size_t, StateHash> index_;
};

OptimalCostOracle optimal_cost_oracle(const Task &task,
                                      std::size_t cap = OptimalCostOracle::DEFAULT_CAP);

}  // namespace evoplan
