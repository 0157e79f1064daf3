#pragma once

#include "evoplan/cost.h"

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace evoplan {

// Raised when a caller breaks an operation's precondition (e.g. applying an
// operator that is not applicable).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct Fact {
    int var = -1;
    int value = -1;

    friend bool operator==(const Fact &, const Fact &) = default;
    friend auto operator<=>(const Fact &, const Fact &) = default;
};

// Sorted by variable, at most one entry per variable.
class PartialAssignment {
public:
    PartialAssignment() = default;
    // Throws std::invalid_argument on duplicate variables.
    explicit PartialAssignment(std::vector<Fact> facts);

    const std::vector<Fact> &facts() const { return facts_; }
    std::size_t size() const { return facts_.size(); }
    bool empty() const { return facts_.empty(); }
    auto begin() const { return facts_.begin(); }
    auto end() const { return facts_.end(); }

    // Value assigned to var, or -1.
    int value_of(int var) const;
    bool assigns(int var) const { return value_of(var) != -1; }

    friend bool operator==(const PartialAssignment &, const PartialAssignment &) = default;

private:
    std::vector<Fact> facts_;
};

struct Variable {
    std::string name;
    int domain_size = 0;
    std::vector<std::string> value_names;

    friend bool operator==(const Variable &, const Variable &) = default;
};

struct Operator {
    std::string name;
    PartialAssignment precondition;
    PartialAssignment effect;
    Cost cost = 1;

    friend bool operator==(const Operator &, const Operator &) = default;
};

class State {
public:
    State() = default;
    explicit State(std::vector<int> values) : values_(std::move(values)) {}

    int operator[](std::size_t var) const { return values_[var]; }
    int &operator[](std::size_t var) { return values_[var]; }
    std::size_t size() const { return values_.size(); }
    std::span<const int> values() const { return values_; }
    const std::vector<int> &vector() const { return values_; }

    bool satisfies(const PartialAssignment &partial) const;

    friend bool operator==(const State &, const State &) = default;

private:
    std::vector<int> values_;
};

struct StateHash {
    std::size_t operator()(const State &state) const;
};

std::size_t hash_values(std::span<const int> values);

class Task {
public:
    Task() = default;
    // Validates value ranges and derives min_positive_cost. Throws
    // std::invalid_argument on malformed input.
    Task(std::vector<Variable> variables, std::vector<Operator> operators,
         State initial_state, PartialAssignment goal, bool metric_uses_costs);

    const std::vector<Variable> &variables() const { return variables_; }
    const std::vector<Operator> &operators() const { return operators_; }
    const Operator &op(int id) const { return operators_[id]; }
    const State &initial_state() const { return initial_state_; }
    const PartialAssignment &goal() const { return goal_; }
    bool metric_uses_costs() const { return metric_uses_costs_; }
    Cost min_positive_cost() const { return min_positive_cost_; }

    int num_variables() const { return static_cast<int>(variables_.size()); }
    int num_operators() const { return static_cast<int>(operators_.size()); }

    // True iff every operator costs exactly 1.
    bool is_unit_cost() const;
    bool is_goal_variable(int var) const { return goal_.assigns(var); }

    bool is_goal(const State &state) const { return state.satisfies(goal_); }
    bool is_applicable(const State &state, int op_id) const;
    std::vector<int> applicable_operators(const State &state) const;
    // Throws ContractViolation if op_id is not applicable in state.
    State apply(const State &state, int op_id) const;

    friend bool operator==(const Task &, const Task &) = default;

private:
    std::vector<Variable> variables_;
    std::vector<Operator> operators_;
    State initial_state_;
    PartialAssignment goal_;
    bool metric_uses_costs_ = false;
    Cost min_positive_cost_ = 1;
};

// Minimal one-variable task whose single operator flips the value 0 to 1.
// Used for smoke checks.
Task make_flip_task();

}  // namespace evoplan
