#include "evoplan/relaxation.h"

#include <algorithm>
#include <functional>

using namespace std;

namespace evoplan {
RelaxedTask::RelaxedTask(const Task &task) {
    offsets_.reserve(task.num_variables());
    for (int var = 0; var < task.num_variables(); ++var) {
        offsets_.push_back(num_facts_);
        for (int value = 0; value < task.variables()[var].domain_size; ++value)
            fact_var_.push_back(var);
        num_facts_ += task.variables()[var].domain_size;
    }
    precondition_of_.resize(num_facts_);
    operators_.reserve(task.num_operators());
    for (int op_id = 0; op_id < task.num_operators(); ++op_id) {
        const Operator &op = task.op(op_id);
        RelaxedOperator rop;
        rop.cost = op.cost;
        for (const Fact &pre : op.precondition) {
            rop.preconditions.push_back(fact_id(pre));
            precondition_of_[fact_id(pre)].push_back(op_id);
        }
        for (const Fact &eff : op.effect)
            rop.effects.push_back(fact_id(eff));
        if (rop.preconditions.empty())
            no_pre_ops_.push_back(op_id);
        operators_.push_back(move(rop));
    }
    is_goal_fact_.assign(num_facts_, false);
    for (const Fact &goal : task.goal()) {
        goal_facts_.push_back(fact_id(goal));
        is_goal_fact_[fact_id(goal)] = true;
    }
}

Fact RelaxedTask::fact(int id) const {
    int var = fact_var_[id];
    return {var, id - offsets_[var]};
}

RelaxedExploration::RelaxedExploration(const Task &task)
    : relaxed_(task),
      cost_(relaxed_.num_facts(), INF_COST),
      supporter_(relaxed_.num_facts(), -1),
      closed_(relaxed_.num_facts(), false),
      unsatisfied_(relaxed_.num_operators(), 0),
      accumulated_(relaxed_.num_operators(), 0) {
}

void RelaxedExploration::offer(int fact, Cost cost, int op) {
    if (closed_[fact])
        return;
    bool better = cost < cost_[fact] ||
                  (cost == cost_[fact] && supporter_[fact] >= 0 && op < supporter_[fact]);
    if (!better)
        return;
    bool improved = cost < cost_[fact];
    cost_[fact] = cost;
    supporter_[fact] = op;
    if (improved) {
        heap_.emplace_back(cost, fact);
        push_heap(heap_.begin(), heap_.end(), greater<>());
    }
}

void RelaxedExploration::run(const State &state, CostCombine combine, bool early_stop) {
    fill(cost_.begin(), cost_.end(), INF_COST);
    fill(supporter_.begin(), supporter_.end(), -1);
    fill(closed_.begin(), closed_.end(), false);
    fill(accumulated_.begin(), accumulated_.end(), 0);
    for (int op = 0; op < relaxed_.num_operators(); ++op)
        unsatisfied_[op] = static_cast<int>(relaxed_.op(op).preconditions.size());
    heap_.clear();
    work_ += relaxed_.num_facts() + relaxed_.num_operators();

    for (size_t var = 0; var < state.size(); ++var) {
        int fact = relaxed_.fact_id(static_cast<int>(var), state[var]);
        cost_[fact] = 0;
        heap_.emplace_back(0, fact);
    }
    make_heap(heap_.begin(), heap_.end(), greater<>());
    for (int op : relaxed_.operators_without_preconditions()) {
        for (int eff : relaxed_.op(op).effects)
            offer(eff, relaxed_.op(op).cost, op);
    }

    int unreached_goals = static_cast<int>(relaxed_.goal_facts().size());
    while (!heap_.empty() && !(early_stop && unreached_goals == 0)) {
        pop_heap(heap_.begin(), heap_.end(), greater<>());
        auto [cost, fact] = heap_.back();
        heap_.pop_back();
        ++work_;
        if (closed_[fact] || cost != cost_[fact])
            continue;
        closed_[fact] = true;
        if (relaxed_.is_goal_fact(fact))
            --unreached_goals;
        for (int op : relaxed_.precondition_of(fact)) {
            ++work_;
            if (combine == CostCombine::Sum)
                accumulated_[op] = saturating_add(accumulated_[op], cost);
            else
                accumulated_[op] = max(accumulated_[op], cost);
            if (--unsatisfied_[op] == 0) {
                const auto &rop = relaxed_.op(op);
                Cost op_cost = saturating_add(rop.cost, accumulated_[op]);
                for (int eff : rop.effects)
                    offer(eff, op_cost, op);
            }
        }
    }

    goal_sum_ = 0;
    goal_max_ = 0;
    for (int goal : relaxed_.goal_facts()) {
        goal_sum_ = saturating_add(goal_sum_, cost_[goal]);
        goal_max_ = max(goal_max_, cost_[goal]);
    }
}
}  // namespace evoplan
