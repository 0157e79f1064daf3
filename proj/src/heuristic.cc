#include "evoplan/heuristic.h"

namespace evoplan {
std::string to_string(HeuristicValue value) {
    if (value.is_dead_end())
        return "infinity";
    return std::to_string(value.value());
}

void Heuristic::initialize(const Task &task) {
    task_ = &task;
    add_work(1);
    do_initialize(task);
}

HeuristicValue Heuristic::evaluate(const State &state) {
    if (!task_)
        throw HeuristicError("heuristic '" + name() + "' evaluated before initialize()");
    add_work(1);
    return compute(state);
}

const Task &Heuristic::task() const {
    if (!task_)
        throw HeuristicError("heuristic '" + name() + "' is not initialized");
    return *task_;
}
}  // namespace evoplan
