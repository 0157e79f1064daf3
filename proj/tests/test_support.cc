#include "test_support.h"

#include "evoplan/sas_io.h"

#include <algorithm>
#include <random>
#include <set>

using namespace std;

namespace evoplan::test {
string repo_path(const string &relative) {
    return string(EVOPLAN_SOURCE_DIR) + "/" + relative;
}

string fixture_path(const string &name) {
    return repo_path("tests/fixtures/" + name);
}

Task load_fixture(const string &name) {
    return load_sas_file(fixture_path(name));
}

const vector<string> &all_fixtures() {
    static const vector<string> names = [] {
        vector<string> result = oracle_fixtures();
        for (const char *n : {"blocks7.sas", "truck-6.sas", "truck-7.sas", "truck-8.sas",
                              "visitall4x4.sas", "visitall5x4.sas"})
            result.push_back(n);
        sort(result.begin(), result.end());
        return result;
    }();
    return names;
}

const vector<string> &oracle_fixtures() {
    static const vector<string> names = {
        "blocks3.sas",     "blocks4.sas",   "blocks5.sas",     "blocks6.sas",
        "chain10.sas",     "counter.sas",   "flip.sas",        "gripper1.sas",
        "gripper2.sas",    "gripper3.sas",  "gripper4.sas",    "gripper5.sas",
        "gripper6.sas",    "mutual_lock.sas", "oneway.sas",    "translator_gripper1.sas",
        "truck-4.sas",     "truck-5.sas",   "truck2.sas",      "truck3.sas",
        "unsolvable.sas",  "visitall2x2.sas", "visitall3x2.sas", "visitall3x3.sas",
        "visitall4x3.sas"};
    return names;
}

DeleteFreeRun simulate_delete_free(const Task &task, const State &state,
                                   const vector<int> &plan_ops) {
    set<Fact> facts;
    for (int var = 0; var < task.num_variables(); ++var)
        facts.insert({var, state[var]});
    vector<bool> applied(plan_ops.size(), false);
    DeleteFreeRun run;
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t i = 0; i < plan_ops.size(); ++i) {
            if (applied[i])
                continue;
            const Operator &op = task.op(plan_ops[i]);
            bool ok = all_of(op.precondition.begin(), op.precondition.end(),
                             [&](const Fact &f) { return facts.count(f) != 0; });
            if (!ok)
                continue;
            for (const Fact &f : op.effect)
                facts.insert(f);
            applied[i] = true;
            run.cost += op.cost;
            changed = true;
        }
    }
    run.all_applied = all_of(applied.begin(), applied.end(), [](bool b) { return b; });
    run.goals_reached = all_of(task.goal().begin(), task.goal().end(),
                               [&](const Fact &f) { return facts.count(f) != 0; });
    return run;
}

Task random_task(uint64_t seed) {
    mt19937_64 rng(seed);
    auto uniform = [&](int lo, int hi) { return uniform_int_distribution<int>(lo, hi)(rng); };
    int num_vars = uniform(2, 4);
    vector<Variable> vars;
    vector<int> init;
    for (int v = 0; v < num_vars; ++v) {
        Variable var;
        var.name = "v" + to_string(v);
        var.domain_size = uniform(2, 3);
        for (int d = 0; d < var.domain_size; ++d)
            var.value_names.push_back("Atom val" + to_string(v) + "_" + to_string(d) + "()");
        init.push_back(uniform(0, var.domain_size - 1));
        vars.push_back(move(var));
    }
    vector<Operator> ops;
    int num_ops = uniform(2, 8);
    for (int o = 0; o < num_ops; ++o) {
        vector<Fact> pre;
        vector<Fact> eff;
        for (int v = 0; v < num_vars; ++v) {
            int roll = uniform(0, 5);
            if (roll == 0)
                pre.push_back({v, uniform(0, vars[v].domain_size - 1)});
            else if (roll == 1)
                eff.push_back({v, uniform(0, vars[v].domain_size - 1)});
            else if (roll == 2) {
                pre.push_back({v, uniform(0, vars[v].domain_size - 1)});
                eff.push_back({v, uniform(0, vars[v].domain_size - 1)});
            }
        }
        if (eff.empty()) {
            int v = uniform(0, num_vars - 1);
            eff.push_back({v, uniform(0, vars[v].domain_size - 1)});
        }
        Operator op;
        op.name = "op" + to_string(o);
        op.precondition = PartialAssignment(pre);
        op.effect = PartialAssignment(eff);
        op.cost = uniform(0, 3);
        ops.push_back(move(op));
    }
    vector<Fact> goal;
    for (int v = 0; v < num_vars; ++v) {
        if (goal.empty() || uniform(0, 1) == 0)
            goal.push_back({v, uniform(0, vars[v].domain_size - 1)});
    }
    return Task(move(vars), move(ops), State(init), PartialAssignment(goal), true);
}
}  // namespace evoplan::test
