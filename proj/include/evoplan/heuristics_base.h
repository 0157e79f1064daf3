#pragma once

#include "evoplan/heuristic.h"
#include "evoplan/relaxation.h"

#include <memory>
#include <optional>
#include <vector>

namespace evoplan {

// 0 at goal states, the task's min_positive_cost elsewhere.
class BlindHeuristic : public Heuristic {
public:
    std::string name() const override { return "blind"; }

protected:
    void do_initialize(const Task &) override {}
    HeuristicValue compute(const State &state) override;
};

// Number of goal facts the state violates.
class GoalCountHeuristic : public Heuristic {
public:
    std::string name() const override { return "goalcount"; }

protected:
    void do_initialize(const Task &) override {}
    HeuristicValue compute(const State &state) override;
};

struct HaddHmaxResult {
    std::vector<Cost> add_costs;
    std::vector<Cost> max_costs;
    // INF_COST when a goal fact is unreachable under the relaxation.
    Cost h_add = 0;
    Cost h_max = 0;
};

// Runs both generalized-Dijkstra passes (sum and max combination).
HaddHmaxResult hadd_hmax_pass(RelaxedExploration &exploration, const State &state,
                              bool early_stop);

class HMaxHeuristic : public Heuristic {
public:
    std::string name() const override { return "hmax"; }

protected:
    void do_initialize(const Task &task) override;
    HeuristicValue compute(const State &state) override;

private:
    std::unique_ptr<RelaxedExploration> exploration_;
};

class HAddHeuristic : public Heuristic {
public:
    std::string name() const override { return "hadd"; }

protected:
    void do_initialize(const Task &task) override;
    HeuristicValue compute(const State &state) override;

private:
    std::unique_ptr<RelaxedExploration> exploration_;
};

// Sum (or maximum) over goal variables of the cheapest DTG distance from the
// current value to the goal value.
class DtgDistanceHeuristic : public Heuristic {
public:
    explicit DtgDistanceHeuristic(bool use_max = false) : use_max_(use_max) {}
    std::string name() const override { return use_max_ ? "dtg_max" : "dtg_sum"; }

protected:
    void do_initialize(const Task &task) override;
    HeuristicValue compute(const State &state) override;

private:
    bool use_max_;
    std::vector<int> goal_vars_;
    std::vector<std::vector<Cost>> dist_;
};

struct RelaxedPlanResult {
    bool dead_end = false;
    Cost h_ff = 0;
    // Operators in the order extraction first counted them.
    std::vector<int> plan_ops;
    // h_add of each goal fact, aligned with task.goal().
    std::vector<Cost> h_add_per_goal;
    Cost h_add_total = 0;
};

// FF: relaxed plan extracted backward from the goal facts along h_add best
// supporters, each operator counted once; the estimate is its cost.
//
// Extraction visits goal facts in goal order and recurses depth first: when
// a fact's supporter is first reached it is appended to plan_ops, then its
// preconditions are processed in ascending fact order. Facts true in the
// state have no supporter and end the recursion.
class FFHeuristic : public Heuristic {
public:
    std::string name() const override { return "ff"; }

    RelaxedPlanResult relaxed_plan(const State &state);

protected:
    void do_initialize(const Task &task) override;
    HeuristicValue compute(const State &state) override;

private:
    void extract(int fact, RelaxedPlanResult &result);

    std::unique_ptr<RelaxedExploration> exploration_;
    std::vector<bool> fact_marked_;
    std::vector<bool> op_marked_;
};

}  // namespace evoplan
