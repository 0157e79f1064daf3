#pragma once

#include "evoplan/task.h"

#include <cstdint>
#include <string>
#include <vector>

namespace evoplan::test {

std::string fixture_path(const std::string &name);
std::string repo_path(const std::string &relative);
Task load_fixture(const std::string &name);

// Every parsable fixture, sorted.
const std::vector<std::string> &all_fixtures();
// Fixtures whose reachable state space fits the optimal-cost oracle.
const std::vector<std::string> &oracle_fixtures();

struct DeleteFreeRun {
    // Every plan operator became applicable at some point.
    bool all_applied = false;
    bool goals_reached = false;
    Cost cost = 0;
};

// Applies plan operators ignoring delete effects until a fixpoint, in any
// order their preconditions allow.
DeleteFreeRun simulate_delete_free(const Task &task, const State &state,
                                   const std::vector<int> &plan_ops);

// Small random task with 2..4 variables, domains of 2..3 values and 2..8
// operators with costs in [0, 3]. Deterministic in seed.
Task random_task(std::uint64_t seed);

}  // namespace evoplan::test
