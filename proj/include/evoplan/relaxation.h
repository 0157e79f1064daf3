#pragma once

#include "evoplan/task.h"

#include <cstdint>
#include <vector>

namespace evoplan {

// Fact-level view of a task for delete-relaxation heuristics. Facts
// (var, value) are numbered densely; precondition_of lists are in
// ascending operator order.
class RelaxedTask {
public:
    struct RelaxedOperator {
        std::vector<int> preconditions;
        std::vector<int> effects;
        Cost cost = 0;
    };

    explicit RelaxedTask(const Task &task);

    int num_facts() const { return num_facts_; }
    int num_operators() const { return static_cast<int>(operators_.size()); }
    int fact_id(int var, int value) const { return offsets_[var] + value; }
    int fact_id(const Fact &fact) const { return fact_id(fact.var, fact.value); }
    Fact fact(int id) const;

    const RelaxedOperator &op(int id) const { return operators_[id]; }
    const std::vector<int> &precondition_of(int fact) const { return precondition_of_[fact]; }
    const std::vector<int> &operators_without_preconditions() const { return no_pre_ops_; }
    // In goal order (sorted by variable).
    const std::vector<int> &goal_facts() const { return goal_facts_; }
    bool is_goal_fact(int fact) const { return is_goal_fact_[fact]; }

private:
    std::vector<int> offsets_;
    std::vector<int> fact_var_;
    int num_facts_ = 0;
    std::vector<RelaxedOperator> operators_;
    std::vector<std::vector<int>> precondition_of_;
    std::vector<int> no_pre_ops_;
    std::vector<int> goal_facts_;
    std::vector<bool> is_goal_fact_;
};

enum class CostCombine { Sum, Max };

// Generalized Dijkstra over facts (Bonet & Geffner's h_add / h_max pass).
//
// A fact's cost is the cheapest cost(op) + combine(precondition costs) over
// its achievers; facts of the evaluated state cost 0. Facts leave a priority
// queue keyed by (cost, fact id). The best supporter of a fact is the achiever
// with the lowest (cost, operator id) among those triggered before the fact
// is popped; once popped, cost and supporter are frozen.
class RelaxedExploration {
public:
    explicit RelaxedExploration(const Task &task);

    const RelaxedTask &relaxed_task() const { return relaxed_; }

    // With early_stop the pass ends as soon as every goal fact has been
    // popped; costs of facts not popped by then are upper bounds only.
    void run(const State &state, CostCombine combine, bool early_stop = false);

    Cost fact_cost(int fact) const { return cost_[fact]; }
    // -1 for facts true in the state or unreached.
    int supporter(int fact) const { return supporter_[fact]; }
    const std::vector<Cost> &fact_costs() const { return cost_; }

    // Sum / maximum over goal fact costs; INF_COST if some goal is unreachable.
    Cost goal_sum() const { return goal_sum_; }
    Cost goal_max() const { return goal_max_; }

    std::uint64_t work() const { return work_; }

private:
    void offer(int fact, Cost cost, int op);

    RelaxedTask relaxed_;
    std::vector<Cost> cost_;
    std::vector<int> supporter_;
    std::vector<bool> closed_;
    std::vector<int> unsatisfied_;
    std::vector<Cost> accumulated_;
    std::vector<std::pair<Cost, int>> heap_;
    Cost goal_sum_ = 0;
    Cost goal_max_ = 0;
    std::uint64_t work_ = 0;
};

}  // namespace evoplan
