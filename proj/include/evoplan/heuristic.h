#pragma once

#include "evoplan/cost.h"
#include "evoplan/task.h"

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>

namespace evoplan {

class HeuristicValue {
public:
    constexpr HeuristicValue() = default;
    // INF_COST maps to the dead-end value; negative values are rejected.
    constexpr HeuristicValue(Cost value) : value_(value) {
        if (value < 0)
            throw std::invalid_argument("heuristic values must be nonnegative");
    }

    static constexpr HeuristicValue dead_end() { return HeuristicValue(INF_COST); }

    constexpr bool is_dead_end() const { return value_ == INF_COST; }
    // INF_COST for dead ends.
    constexpr Cost value() const { return value_; }

    friend constexpr bool operator==(HeuristicValue, HeuristicValue) = default;

private:
    Cost value_ = 0;
};

std::string to_string(HeuristicValue value);

// Raised by evaluate() on a heuristic that was never initialized.
class HeuristicError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A state evaluator bound to one task. Instances own mutable scratch space
// and must not be shared between concurrent searches; the bound Task must
// outlive the heuristic.
class Heuristic {
public:
    virtual ~Heuristic() = default;

    virtual std::string name() const = 0;

    void initialize(const Task &task);
    HeuristicValue evaluate(const State &state);

    bool initialized() const { return task_ != nullptr; }
    const Task &task() const;

    // Deterministic count of elementary steps performed so far, including
    // initialization. Drives the work-based search clock.
    std::uint64_t work() const { return work_; }

protected:
    virtual void do_initialize(const Task &task) = 0;
    virtual HeuristicValue compute(const State &state) = 0;

    void add_work(std::uint64_t units) { work_ += units; }

private:
    const Task *task_ = nullptr;
    std::uint64_t work_ = 0;
};

}  // namespace evoplan
