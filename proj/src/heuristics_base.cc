#include "evoplan/heuristics_base.h"

#include "evoplan/task_graphs.h"

#include <algorithm>

using namespace std;

namespace evoplan {
HeuristicValue BlindHeuristic::compute(const State &state) {
    if (task().is_goal(state))
        return 0;
    return task().min_positive_cost();
}

HeuristicValue GoalCountHeuristic::compute(const State &state) {
    Cost unsatisfied = 0;
    for (const Fact &goal : task().goal()) {
        if (state[goal.var] != goal.value)
            ++unsatisfied;
    }
    add_work(task().goal().size());
    return unsatisfied;
}

HaddHmaxResult hadd_hmax_pass(RelaxedExploration &exploration, const State &state,
                              bool early_stop) {
    HaddHmaxResult result;
    exploration.run(state, CostCombine::Sum, early_stop);
    result.add_costs = exploration.fact_costs();
    result.h_add = exploration.goal_sum();
    exploration.run(state, CostCombine::Max, early_stop);
    result.max_costs = exploration.fact_costs();
    result.h_max = exploration.goal_max();
    return result;
}

void HMaxHeuristic::do_initialize(const Task &task) {
    exploration_ = make_unique<RelaxedExploration>(task);
}

HeuristicValue HMaxHeuristic::compute(const State &state) {
    uint64_t before = exploration_->work();
    exploration_->run(state, CostCombine::Max);
    add_work(exploration_->work() - before);
    return exploration_->goal_max();
}

void HAddHeuristic::do_initialize(const Task &task) {
    exploration_ = make_unique<RelaxedExploration>(task);
}

HeuristicValue HAddHeuristic::compute(const State &state) {
    uint64_t before = exploration_->work();
    exploration_->run(state, CostCombine::Sum);
    add_work(exploration_->work() - before);
    return exploration_->goal_sum();
}

void FFHeuristic::do_initialize(const Task &task) {
    exploration_ = make_unique<RelaxedExploration>(task);
    fact_marked_.assign(exploration_->relaxed_task().num_facts(), false);
    op_marked_.assign(task.num_operators(), false);
}

void FFHeuristic::extract(int fact, RelaxedPlanResult &result) {
    if (fact_marked_[fact])
        return;
    fact_marked_[fact] = true;
    int op = exploration_->supporter(fact);
    if (op == -1 || op_marked_[op])
        return;
    op_marked_[op] = true;
    result.plan_ops.push_back(op);
    const auto &rop = exploration_->relaxed_task().op(op);
    result.h_ff = saturating_add(result.h_ff, rop.cost);
    for (int pre : rop.preconditions)
        extract(pre, result);
}

RelaxedPlanResult FFHeuristic::relaxed_plan(const State &state) {
    const Task &t = task();
    uint64_t before = exploration_->work();
    exploration_->run(state, CostCombine::Sum);
    add_work(exploration_->work() - before);

    RelaxedPlanResult result;
    const auto &goals = exploration_->relaxed_task().goal_facts();
    result.h_add_total = exploration_->goal_sum();
    for (int goal : goals)
        result.h_add_per_goal.push_back(exploration_->fact_cost(goal));
    if (result.h_add_total == INF_COST) {
        result.dead_end = true;
        result.h_ff = INF_COST;
        return result;
    }

    fill(fact_marked_.begin(), fact_marked_.end(), false);
    fill(op_marked_.begin(), op_marked_.end(), false);
    add_work(fact_marked_.size() + t.num_operators());
    for (int goal : goals)
        extract(goal, result);
    add_work(result.plan_ops.size());
    return result;
}

HeuristicValue FFHeuristic::compute(const State &state) {
    RelaxedPlanResult result = relaxed_plan(state);
    if (result.dead_end)
        return HeuristicValue::dead_end();
    return result.h_ff;
}

void DtgDistanceHeuristic::do_initialize(const Task &task) {
    goal_vars_.clear();
    dist_.clear();
    for (const Fact &goal : task.goal()) {
        DomainTransitionGraph dtg(task, goal.var);
        goal_vars_.push_back(goal.var);
        dist_.push_back(backward_goal_distances(dtg, goal.value).dist);
        add_work(dtg.edges().size() + dtg.domain_size());
    }
}

HeuristicValue DtgDistanceHeuristic::compute(const State &state) {
    Cost h = 0;
    for (size_t i = 0; i < goal_vars_.size(); ++i) {
        Cost d = dist_[i][state[goal_vars_[i]]];
        if (d == INF_COST)
            return HeuristicValue::dead_end();
        h = use_max_ ? std::max(h, d) : saturating_add(h, d);
    }
    add_work(goal_vars_.size());
    return h;
}
}  // namespace evoplan
