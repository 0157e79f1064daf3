#include "evoplan/task.h"

#include <algorithm>
#include <sstream>

using namespace std;

namespace evoplan {
PartialAssignment::PartialAssignment(vector<Fact> facts) : facts_(move(facts)) {
    sort(facts_.begin(), facts_.end());
    for (size_t i = 1; i < facts_.size(); ++i) {
        if (facts_[i].var == facts_[i - 1].var)
            throw invalid_argument(
                "partial assignment assigns variable " +
                to_string(facts_[i].var) + " twice");
    }
}

int PartialAssignment::value_of(int var) const {
    auto it = lower_bound(facts_.begin(), facts_.end(), Fact{var, -1},
                          [](const Fact &a, const Fact &b) { return a.var < b.var; });
    if (it != facts_.end() && it->var == var)
        return it->value;
    return -1;
}

bool State::satisfies(const PartialAssignment &partial) const {
    for (const Fact &fact : partial) {
        if (values_[fact.var] != fact.value)
            return false;
    }
    return true;
}

size_t hash_values(span<const int> values) {
    // FNV-1a over the value words.
    uint64_t h = 1469598103934665603ULL;
    for (int v : values) {
        h ^= static_cast<uint32_t>(v);
        h *= 1099511628211ULL;
    }
    return static_cast<size_t>(h ^ (h >> 29));
}

size_t StateHash::operator()(const State &state) const {
    return hash_values(state.values());
}

namespace {
void check_fact(const vector<Variable> &variables, const Fact &fact, const string &where) {
    if (fact.var < 0 || fact.var >= static_cast<int>(variables.size()))
        throw invalid_argument(where + ": variable index " + to_string(fact.var) +
                               " out of range");
    if (fact.value < 0 || fact.value >= variables[fact.var].domain_size)
        throw invalid_argument(where + ": value " + to_string(fact.value) +
                               " out of range for variable " + to_string(fact.var));
}
}  // namespace

Task::Task(vector<Variable> variables, vector<Operator> operators,
           State initial_state, PartialAssignment goal, bool metric_uses_costs)
    : variables_(move(variables)),
      operators_(move(operators)),
      initial_state_(move(initial_state)),
      goal_(move(goal)),
      metric_uses_costs_(metric_uses_costs) {
    for (size_t var = 0; var < variables_.size(); ++var) {
        const Variable &v = variables_[var];
        if (v.domain_size < 1)
            throw invalid_argument("variable " + to_string(var) + " has empty domain");
        if (static_cast<int>(v.value_names.size()) != v.domain_size)
            throw invalid_argument("variable " + to_string(var) +
                                   ": value name count differs from domain size");
    }
    if (initial_state_.size() != variables_.size())
        throw invalid_argument("initial state has wrong length");
    for (size_t var = 0; var < variables_.size(); ++var)
        check_fact(variables_, Fact{static_cast<int>(var), initial_state_[var]}, "initial state");
    for (const Fact &fact : goal_)
        check_fact(variables_, fact, "goal");

    min_positive_cost_ = 0;
    for (size_t id = 0; id < operators_.size(); ++id) {
        const Operator &op = operators_[id];
        string where = "operator " + to_string(id) + " (" + op.name + ")";
        if (op.effect.empty())
            throw invalid_argument(where + " has no effect");
        if (op.cost < 0)
            throw invalid_argument(where + " has negative cost");
        for (const Fact &fact : op.precondition)
            check_fact(variables_, fact, where);
        for (const Fact &fact : op.effect)
            check_fact(variables_, fact, where);
        if (op.cost > 0 && (min_positive_cost_ == 0 || op.cost < min_positive_cost_))
            min_positive_cost_ = op.cost;
    }
    if (min_positive_cost_ == 0)
        min_positive_cost_ = 1;
}

bool Task::is_unit_cost() const {
    return all_of(operators_.begin(), operators_.end(),
                  [](const Operator &op) { return op.cost == 1; });
}

bool Task::is_applicable(const State &state, int op_id) const {
    return state.satisfies(operators_[op_id].precondition);
}

vector<int> Task::applicable_operators(const State &state) const {
    vector<int> result;
    for (int id = 0; id < num_operators(); ++id) {
        if (is_applicable(state, id))
            result.push_back(id);
    }
    return result;
}

State Task::apply(const State &state, int op_id) const {
    if (op_id < 0 || op_id >= num_operators())
        throw ContractViolation("operator id " + to_string(op_id) + " out of range");
    if (!is_applicable(state, op_id))
        throw ContractViolation("operator " + operators_[op_id].name +
                                " is not applicable");
    State succ = state;
    for (const Fact &fact : operators_[op_id].effect)
        succ[fact.var] = fact.value;
    return succ;
}

Task make_flip_task() {
    Variable var{"var0", 2, {"Atom off()", "Atom on()"}};
    Operator flip{"flip", PartialAssignment({{0, 0}}), PartialAssignment({{0, 1}}), 1};
    return Task({var}, {flip}, State({0}), PartialAssignment({{0, 1}}), false);
}
}  // namespace evoplan
