#include "evoplan/heuristics_evolved.h"

#include <algorithm>
#include <cmath>
#include <functional>

using namespace std;

namespace evoplan {
void GenerationScratch::resize(size_t size) {
    stamps_.assign(size, 0);
    generation_ = 1;
}

void GenerationScratch::next_generation() {
    if (++generation_ == 0) {
        fill(stamps_.begin(), stamps_.end(), 0);
        generation_ = 1;
    }
}

/* evolved_blind_medium_2 */

void EvolvedBlindMedium2::do_initialize(const Task &task) {
    exploration_ = make_unique<RelaxedExploration>(task);
    fact_marks_.resize(exploration_->relaxed_task().num_facts());
    op_marks_.resize(task.num_operators());
    touched_vars_.resize(task.num_variables());
}

void EvolvedBlindMedium2::extract(int fact) {
    if (fact_marks_.is_set(fact))
        return;
    fact_marks_.set(fact);
    int op = exploration_->supporter(fact);
    if (op == -1 || op_marks_.is_set(op))
        return;
    op_marks_.set(op);
    last_.plan_ops.push_back(op);
    const auto &rop = exploration_->relaxed_task().op(op);
    last_.h_ff = saturating_add(last_.h_ff, rop.cost);
    for (int pre : rop.preconditions)
        extract(pre);
}

HeuristicValue EvolvedBlindMedium2::compute(const State &state) {
    const Task &t = task();
    uint64_t before = exploration_->work();
    exploration_->run(state, CostCombine::Sum);
    add_work(exploration_->work() - before);

    last_ = Breakdown{};
    if (exploration_->goal_sum() == INF_COST)
        return HeuristicValue::dead_end();

    fact_marks_.next_generation();
    op_marks_.next_generation();
    touched_vars_.next_generation();
    const auto &goals = exploration_->relaxed_task().goal_facts();
    for (int goal : goals)
        extract(goal);

    const Cost c_min = t.min_positive_cost();
    Cost conflicts = 0;
    for (int op : last_.plan_ops) {
        for (const Fact &eff : t.op(op).effect) {
            if (touched_vars_.is_set(eff.var))
                conflicts = saturating_add(conflicts, t.is_goal_variable(eff.var) ? 2 * c_min : c_min);
            else
                touched_vars_.set(eff.var);
        }
    }
    Cost unsatisfied = 0;
    for (size_t i = 0; i < goals.size(); ++i) {
        const Fact &goal = t.goal().facts()[i];
        if (state[goal.var] != goal.value)
            unsatisfied = saturating_add(unsatisfied, min(exploration_->fact_cost(goals[i]), last_.h_ff));
    }
    last_.conflict_penalty = conflicts;
    last_.unsatisfied_penalty = unsatisfied;
    add_work(last_.plan_ops.size() + goals.size());

    Cost penalty = saturating_add(conflicts, unsatisfied);
    Cost rounded_up = penalty / c_min + (penalty % c_min != 0 ? 1 : 0);
    return saturating_add(last_.h_ff, rounded_up);
}

/* evolved_ff_none_3 */

void EvolvedFfNone3::do_initialize(const Task &task) {
    relaxed_ = make_unique<RelaxedTask>(task);
    int facts = relaxed_->num_facts();
    int ops = relaxed_->num_operators();
    cost_.assign(facts, INF_COST);
    supporter_.assign(facts, -1);
    reached_.resize(facts);
    closed_.resize(facts);
    fact_marked_.resize(facts);
    op_seen_.resize(ops);
    unsatisfied_.assign(ops, 0);
    accumulated_.assign(ops, 0);
    op_in_plan_.assign(ops, false);
    add_work(facts + ops);
}

void EvolvedFfNone3::touch_operator(int op) {
    if (op_seen_.is_set(op))
        return;
    op_seen_.set(op);
    unsatisfied_[op] = static_cast<int>(relaxed_->op(op).preconditions.size());
    accumulated_[op] = 0;
}

void EvolvedFfNone3::offer(int fact, Cost cost, int op) {
    if (closed_.is_set(fact))
        return;
    bool reached = reached_.is_set(fact);
    Cost current = reached ? cost_[fact] : INF_COST;
    int current_supporter = reached ? supporter_[fact] : -1;
    bool better = cost < current ||
                  (cost == current && current_supporter >= 0 && op < current_supporter);
    if (!better)
        return;
    reached_.set(fact);
    cost_[fact] = cost;
    supporter_[fact] = op;
    if (cost < current) {
        heap_.emplace_back(cost, fact);
        push_heap(heap_.begin(), heap_.end(), greater<>());
    }
}

void EvolvedFfNone3::mark_plan(int fact) {
    if (fact_marked_.is_set(fact))
        return;
    fact_marked_.set(fact);
    int op = supporter_[fact];
    if (op == -1 || op_in_plan_[op])
        return;
    op_in_plan_[op] = true;
    plan_side_list_.push_back(op);
    for (int pre : relaxed_->op(op).preconditions)
        mark_plan(pre);
}

HeuristicValue EvolvedFfNone3::compute(const State &state) {
    reached_.next_generation();
    closed_.next_generation();
    op_seen_.next_generation();
    fact_marked_.next_generation();
    heap_.clear();

    for (size_t var = 0; var < state.size(); ++var) {
        int fact = relaxed_->fact_id(static_cast<int>(var), state[var]);
        reached_.set(fact);
        cost_[fact] = 0;
        supporter_[fact] = -1;
        heap_.emplace_back(0, fact);
    }
    make_heap(heap_.begin(), heap_.end(), greater<>());
    for (int op : relaxed_->operators_without_preconditions()) {
        for (int eff : relaxed_->op(op).effects)
            offer(eff, relaxed_->op(op).cost, op);
    }
    add_work(state.size());

    int unreached_goals = static_cast<int>(relaxed_->goal_facts().size());
    while (!heap_.empty() && unreached_goals > 0) {
        pop_heap(heap_.begin(), heap_.end(), greater<>());
        auto [cost, fact] = heap_.back();
        heap_.pop_back();
        add_work(1);
        if (closed_.is_set(fact) || cost != cost_[fact])
            continue;
        closed_.set(fact);
        if (relaxed_->is_goal_fact(fact))
            --unreached_goals;
        for (int op : relaxed_->precondition_of(fact)) {
            add_work(1);
            touch_operator(op);
            accumulated_[op] = saturating_add(accumulated_[op], cost);
            if (--unsatisfied_[op] == 0) {
                Cost op_cost = saturating_add(relaxed_->op(op).cost, accumulated_[op]);
                for (int eff : relaxed_->op(op).effects)
                    offer(eff, op_cost, op);
            }
        }
    }
    if (unreached_goals > 0)
        return HeuristicValue::dead_end();

    for (int goal : relaxed_->goal_facts())
        mark_plan(goal);
    Cost h = 0;
    for (int op : plan_side_list_) {
        h = saturating_add(h, relaxed_->op(op).cost);
        op_in_plan_[op] = false;
    }
    add_work(plan_side_list_.size());
    plan_side_list_.clear();
    return h;
}

/* evolved_blind_none_3 */

namespace {
constexpr int MAX_REFINEMENT_ROUNDS = 3;
constexpr int MAX_LEVEL = 3;
}  // namespace

void EvolvedBlindNone3::do_initialize(const Task &task) {
    tables_ = DtgWeightedTables{};
    CausalGraph cg(task);
    vector<DomainTransitionGraph> dtgs;
    dtgs.reserve(task.num_variables());
    for (int var = 0; var < task.num_variables(); ++var)
        dtgs.emplace_back(task, var);

    // Position of each goal variable in the goal list, -1 for others.
    vector<int> goal_index(task.num_variables(), -1);
    for (const Fact &goal : task.goal()) {
        goal_index[goal.var] = static_cast<int>(tables_.goal_vars.size());
        tables_.goal_vars.push_back(goal.var);
        tables_.base.push_back(backward_goal_distances(dtgs[goal.var], goal.value));
    }
    const int num_goals = static_cast<int>(tables_.goal_vars.size());

    // A static non-goal variable (no changing edge) can only satisfy a
    // precondition by already holding the value, so it contributes 0.
    vector<Cost> non_goal_cost(task.num_variables(), 0);
    for (int var = 0; var < task.num_variables(); ++var) {
        Cost cheapest = cheapest_changing_edge(dtgs[var]);
        non_goal_cost[var] = cheapest == INF_COST ? 0 : cheapest;
    }

    tables_.refined = tables_.base;
    for (int round = 0; round < MAX_REFINEMENT_ROUNDS; ++round) {
        vector<DtgDistanceTable> next;
        next.reserve(num_goals);
        for (int i = 0; i < num_goals; ++i) {
            int var = tables_.goal_vars[i];
            const DomainTransitionGraph &dtg = dtgs[var];
            vector<Cost> weights;
            weights.reserve(dtg.edges().size());
            for (const DtgEdge &edge : dtg.edges()) {
                Cost w = edge.cost;
                for (const Fact &pre : task.op(edge.op).precondition) {
                    if (pre.var == var)
                        continue;
                    int other = goal_index[pre.var];
                    Cost extra = other >= 0 ? tables_.refined[other].dist[pre.value]
                                            : non_goal_cost[pre.var];
                    w = saturating_add(w, extra);
                }
                weights.push_back(w);
            }
            add_work(weights.size());
            next.push_back(backward_goal_distances(dtg, task.goal().facts()[i].value, &weights));
        }
        bool unchanged = true;
        for (int i = 0; i < num_goals; ++i)
            unchanged = unchanged && next[i].dist == tables_.refined[i].dist;
        tables_.refined = move(next);
        tables_.refinement_rounds = round + 1;
        if (unchanged)
            break;
    }

    // Longest-chain depth over the causal graph restricted to goal
    // variables; cycles are cut off after num_goals sweeps.
    vector<int> raw_level(num_goals, 0);
    for (int sweep = 0; sweep < num_goals; ++sweep) {
        bool changed = false;
        for (int i = 0; i < num_goals; ++i) {
            for (int pred : cg.predecessors(tables_.goal_vars[i])) {
                int j = goal_index[pred];
                if (j >= 0 && raw_level[j] + 1 > raw_level[i]) {
                    raw_level[i] = raw_level[j] + 1;
                    changed = true;
                }
            }
        }
        if (!changed)
            break;
    }
    int max_raw = raw_level.empty() ? 0 : *max_element(raw_level.begin(), raw_level.end());
    for (int i = 0; i < num_goals; ++i) {
        int level = max_raw > 0 ? raw_level[i] * MAX_LEVEL / max_raw : 0;
        tables_.level.push_back(level);
        tables_.max_level = max(tables_.max_level, level);
        int var = tables_.goal_vars[i];
        int preds = static_cast<int>(cg.predecessors(var).size());
        double transitions = dtgs[var].transition_count();
        tables_.weight.push_back(preds + min(transitions / 4.0, 5.0));
        tables_.num_deps.push_back(max(1, preds));
    }
}

HeuristicValue EvolvedBlindNone3::compute(const State &state) {
    const auto &goals = task().goal().facts();
    double h = 0;
    Cost h_max = 0;
    double unsatisfied_levels = 0;
    for (size_t i = 0; i < goals.size(); ++i) {
        int value = state[goals[i].var];
        if (value == goals[i].value)
            continue;
        Cost d = tables_.refined[i].dist[value];
        if (d == INF_COST)
            return HeuristicValue::dead_end();
        double scaled = static_cast<double>(d) * (1 + tables_.level[i]);
        h += scaled * (1 + tables_.weight[i] / 4.0) + tables_.num_deps[i];
        h_max = max(h_max, d);
        unsatisfied_levels += 1 + tables_.level[i];
    }
    add_work(goals.size());
    double total = h + static_cast<double>(h_max) + 2.0 * tables_.max_level + 2.0 * unsatisfied_levels;
    if (total >= static_cast<double>(MAX_FINITE_COST))
        return MAX_FINITE_COST;
    return static_cast<Cost>(floor(total));
}

/* evolved_blind_medium_conf */

void EvolvedBlindMediumConf::do_initialize(const Task &task) {
    tables_ = DtgGoalTables{};
    CausalGraph cg(task);
    for (const Fact &goal : task.goal()) {
        DomainTransitionGraph dtg(task, goal.var);
        DtgDistanceTable table = backward_goal_distances(dtg, goal.value);
        tables_.goal_vars.push_back(goal.var);
        tables_.next_op.push_back(next_on_path_operators(dtg, table));
        tables_.dist.push_back(move(table));
        tables_.cg_preds.push_back(static_cast<int>(cg.predecessors(goal.var).size()));
        add_work(dtg.edges().size() + dtg.domain_size());
    }
}

HeuristicValue EvolvedBlindMediumConf::compute(const State &state) {
    const Task &t = task();
    Cost h = 0;
    for (size_t i = 0; i < tables_.goal_vars.size(); ++i) {
        int value = state[tables_.goal_vars[i]];
        Cost d = tables_.dist[i].dist[value];
        if (d == INF_COST)
            return HeuristicValue::dead_end();
        h = saturating_add(h, saturating_mul(d, 1 + tables_.cg_preds[i]));
        if (d == 0)
            continue;
        int op = tables_.next_op[i][value];
        Cost unmet = 0;
        for (const Fact &pre : t.op(op).precondition) {
            if (state[pre.var] != pre.value)
                ++unmet;
        }
        add_work(t.op(op).precondition.size());
        h = saturating_add(h, unmet);
    }
    add_work(tables_.goal_vars.size());
    return h;
}
}  // namespace evoplan
