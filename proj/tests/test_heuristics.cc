#include "test_support.h"

#include "evoplan/heuristic_registry.h"
#include "evoplan/heuristics_base.h"
#include "evoplan/heuristics_evolved.h"
#include "evoplan/search.h"

#include <doctest.h>

using namespace std;
using namespace evoplan;

namespace {
Cost value_or_inf(HeuristicValue h) {
    return h.is_dead_end() ? INF_COST : h.value();
}

struct Sweep {
    Task task;
    OptimalCostOracle oracle;
    explicit Sweep(Task t) : task(move(t)), oracle(task) {}
};

// Fixtures plus random tasks, with their reachable state spaces.
vector<unique_ptr<Sweep>> sweeps(bool with_random) {
    vector<unique_ptr<Sweep>> result;
    for (const string &name : test::oracle_fixtures())
        result.push_back(make_unique<Sweep>(test::load_fixture(name)));
    if (with_random) {
        for (uint64_t seed = 0; seed < 300; ++seed)
            result.push_back(make_unique<Sweep>(test::random_task(seed)));
    }
    return result;
}
}  // namespace

TEST_SUITE("heuristics_base") {
TEST_CASE("heuristic values") {
    CHECK(HeuristicValue::dead_end().is_dead_end());
    CHECK_FALSE(HeuristicValue(3).is_dead_end());
    CHECK_THROWS_AS(HeuristicValue(-1), invalid_argument);
    CHECK(to_string(HeuristicValue::dead_end()) == "infinity");
}

TEST_CASE("evaluating before initialization throws") {
    BlindHeuristic h;
    CHECK_THROWS_AS(h.evaluate(State({0})), HeuristicError);
}

TEST_CASE("blind and goalcount on the flip task") {
    Task task = make_flip_task();
    BlindHeuristic blind;
    GoalCountHeuristic gc;
    blind.initialize(task);
    gc.initialize(task);
    CHECK(blind.evaluate(State({0})).value() == 1);
    CHECK(blind.evaluate(State({1})).value() == 0);
    CHECK(gc.evaluate(State({0})).value() == 1);
    CHECK(gc.evaluate(State({1})).value() == 0);
}

TEST_CASE("registered heuristics are zero on goal states") {
    for (const string &name : heuristic_names()) {
        // Its goal-state value is the constant 2 * Level_CG_max, tested below.
        if (name == "evolved_blind_none_3")
            continue;
        CAPTURE(name);
        for (const string &fixture : {"truck2.sas", "blocks4.sas", "counter.sas"}) {
            Task task = test::load_fixture(fixture);
            auto h = make_heuristic(name);
            h->initialize(task);
            OptimalCostOracle oracle(task);
            for (const State &s : oracle.states()) {
                if (task.is_goal(s))
                    CHECK(h->evaluate(s).value() == 0);
            }
        }
    }
}

TEST_CASE("admissibility of h_max and blind, h_add dominates h_max") {
    for (auto &sw : sweeps(true)) {
        HMaxHeuristic hmax;
        HAddHeuristic hadd;
        BlindHeuristic blind;
        hmax.initialize(sw->task);
        hadd.initialize(sw->task);
        blind.initialize(sw->task);
        bool zero_cost_ops = false;
        for (const Operator &op : sw->task.operators())
            zero_cost_ops |= op.cost == 0;
        for (size_t i = 0; i < sw->oracle.size(); ++i) {
            const State &s = sw->oracle.states()[i];
            Cost star = sw->oracle.h_star(i);
            Cost hm = value_or_inf(hmax.evaluate(s));
            Cost ha = value_or_inf(hadd.evaluate(s));
            CHECK(hm <= star);
            CHECK(ha >= hm);
            CHECK((hm == INF_COST) == (ha == INF_COST));
            if (!zero_cost_ops)
                CHECK(value_or_inf(blind.evaluate(s)) <= star);
        }
    }
}

TEST_CASE("FF relaxed plans are delete-free plans whose cost is h_ff") {
    for (auto &sw : sweeps(true)) {
        FFHeuristic ff;
        HMaxHeuristic hmax;
        HAddHeuristic hadd;
        ff.initialize(sw->task);
        hmax.initialize(sw->task);
        hadd.initialize(sw->task);
        for (const State &s : sw->oracle.states()) {
            RelaxedPlanResult plan = ff.relaxed_plan(s);
            Cost hm = value_or_inf(hmax.evaluate(s));
            if (plan.dead_end) {
                CHECK(hm == INF_COST);
                continue;
            }
            test::DeleteFreeRun run = test::simulate_delete_free(sw->task, s, plan.plan_ops);
            CHECK(run.all_applied);
            CHECK(run.goals_reached);
            CHECK(run.cost == plan.h_ff);
            CHECK(ff.evaluate(s).value() == plan.h_ff);
            CHECK(plan.h_ff >= hm);
            CHECK(plan.h_ff <= hadd.evaluate(s).value());
            CHECK(plan.h_add_total == hadd.evaluate(s).value());
            vector<int> sorted = plan.plan_ops;
            sort(sorted.begin(), sorted.end());
            CHECK(adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
        }
    }
}

TEST_CASE("h_max and h_add on a hand-computed task") {
    // Goals g1 (needs p, cost 2 each) and g2 (needs p, cost 3), p costs 1.
    vector<Variable> vars = {{"p", 2, {"n", "y"}}, {"g1", 2, {"n", "y"}}, {"g2", 2, {"n", "y"}}};
    vector<Operator> ops = {
        {"make-p", PartialAssignment({{0, 0}}), PartialAssignment({{0, 1}}), 1},
        {"make-g1", PartialAssignment({{0, 1}}), PartialAssignment({{1, 1}}), 2},
        {"make-g2", PartialAssignment({{0, 1}}), PartialAssignment({{2, 1}}), 3},
    };
    Task task(vars, ops, State({0, 0, 0}), PartialAssignment({{1, 1}, {2, 1}}), true);
    HMaxHeuristic hmax;
    HAddHeuristic hadd;
    FFHeuristic ff;
    hmax.initialize(task);
    hadd.initialize(task);
    ff.initialize(task);
    CHECK(hmax.evaluate(task.initial_state()).value() == 4);
    CHECK(hadd.evaluate(task.initial_state()).value() == 7);
    CHECK(ff.evaluate(task.initial_state()).value() == 6);
}

TEST_CASE("DTG distance heuristics detect only true dead ends") {
    for (auto &sw : sweeps(true)) {
        DtgDistanceHeuristic sum(false);
        DtgDistanceHeuristic mx(true);
        sum.initialize(sw->task);
        mx.initialize(sw->task);
        for (size_t i = 0; i < sw->oracle.size(); ++i) {
            const State &s = sw->oracle.states()[i];
            HeuristicValue a = sum.evaluate(s);
            HeuristicValue b = mx.evaluate(s);
            CHECK(a.is_dead_end() == b.is_dead_end());
            if (a.is_dead_end())
                CHECK(sw->oracle.h_star(i) == INF_COST);
            else
                CHECK(b.value() <= a.value());
        }
    }
}
}

TEST_SUITE("heuristics_evolved") {
TEST_CASE("generation scratch resets in constant time and survives wrap-around") {
    GenerationScratch scratch(4);
    scratch.set(1);
    CHECK(scratch.is_set(1));
    CHECK_FALSE(scratch.is_set(0));
    scratch.next_generation();
    CHECK_FALSE(scratch.is_set(1));
    scratch.set(2);
    scratch.set_generation_for_testing(numeric_limits<uint32_t>::max());
    scratch.set(3);
    scratch.next_generation();
    CHECK(scratch.generation() == 1);
    for (size_t i = 0; i < 4; ++i)
        CHECK_FALSE(scratch.is_set(i));
}

TEST_CASE("evolved_ff_none_3 equals FF on every reachable state") {
    for (auto &sw : sweeps(true)) {
        FFHeuristic ff;
        EvolvedFfNone3 fast;
        ff.initialize(sw->task);
        fast.initialize(sw->task);
        for (const State &s : sw->oracle.states())
            CHECK(fast.evaluate(s) == ff.evaluate(s));
    }
}

TEST_CASE("DTG-based evolved heuristics only report true dead ends") {
    for (auto &sw : sweeps(true)) {
        EvolvedBlindNone3 alg3;
        EvolvedBlindMediumConf alg4;
        alg3.initialize(sw->task);
        alg4.initialize(sw->task);
        for (size_t i = 0; i < sw->oracle.size(); ++i) {
            const State &s = sw->oracle.states()[i];
            if (alg3.evaluate(s).is_dead_end())
                CHECK(sw->oracle.h_star(i) == INF_COST);
            if (alg4.evaluate(s).is_dead_end())
                CHECK(sw->oracle.h_star(i) == INF_COST);
        }
    }
}

TEST_CASE("the unsolvable fixture is a root dead end for the DTG heuristics") {
    Task task = test::load_fixture("unsolvable.sas");
    EvolvedBlindNone3 alg3;
    EvolvedBlindMediumConf alg4;
    alg3.initialize(task);
    alg4.initialize(task);
    CHECK(alg3.evaluate(task.initial_state()).is_dead_end());
    CHECK(alg4.evaluate(task.initial_state()).is_dead_end());
}

TEST_CASE("evolved_blind_medium_2 adds nonnegative penalties to FF") {
    for (auto &sw : sweeps(true)) {
        FFHeuristic ff;
        EvolvedBlindMedium2 alg1;
        ff.initialize(sw->task);
        alg1.initialize(sw->task);
        for (const State &s : sw->oracle.states()) {
            HeuristicValue base = ff.evaluate(s);
            HeuristicValue value = alg1.evaluate(s);
            CHECK(base.is_dead_end() == value.is_dead_end());
            if (base.is_dead_end())
                continue;
            const auto &parts = alg1.last_breakdown();
            CHECK(parts.h_ff == base.value());
            CHECK(parts.conflict_penalty >= 0);
            CHECK(parts.unsatisfied_penalty >= 0);
            Cost cmin = sw->task.min_positive_cost();
            Cost extra = (parts.conflict_penalty + parts.unsatisfied_penalty + cmin - 1) / cmin;
            CHECK(value.value() == base.value() + extra);
        }
    }
}

TEST_CASE("evolved_blind_medium_2 counts the unsatisfied-goal penalty") {
    Task task = make_flip_task();
    EvolvedBlindMedium2 alg1;
    alg1.initialize(task);
    // h_ff = 1, no conflicts, p_u = min(h_add(g), h_ff) = 1.
    CHECK(alg1.evaluate(task.initial_state()).value() == 2);
    CHECK(alg1.last_breakdown().unsatisfied_penalty == 1);
    CHECK(alg1.last_breakdown().conflict_penalty == 0);
}

TEST_CASE("evolved_blind_none_3 closed form on a three-step chain") {
    // d = 3, level 0, weight = 3 / 4, numDeps 1, U = 1:
    // floor(3 * (1 + 0.1875) + 1 + 3 + 0 + 2) = 9.
    vector<Variable> vars = {{"x", 4, {"x0", "x1", "x2", "x3"}}};
    vector<Operator> ops;
    for (int v = 0; v < 3; ++v)
        ops.push_back({"step" + to_string(v), PartialAssignment({{0, v}}),
                       PartialAssignment({{0, v + 1}}), 1});
    Task task(vars, ops, State({0}), PartialAssignment({{0, 3}}), false);
    EvolvedBlindNone3 alg3;
    alg3.initialize(task);
    CHECK(alg3.tables().weight[0] == 0.75);
    CHECK(alg3.tables().max_level == 0);
    CHECK(alg3.evaluate(State({0})).value() == 9);
    CHECK(alg3.evaluate(State({3})).value() == 0);
}

TEST_CASE("evolved_blind_none_3 emits its level constant on goal states") {
    for (const string &fixture : {"truck3.sas", "blocks4.sas", "gripper3.sas"}) {
        Task task = test::load_fixture(fixture);
        EvolvedBlindNone3 alg3;
        alg3.initialize(task);
        OptimalCostOracle oracle(task);
        for (const State &s : oracle.states()) {
            if (task.is_goal(s))
                CHECK(alg3.evaluate(s).value() == 2 * alg3.tables().max_level);
        }
    }
}

TEST_CASE("evolved_blind_medium_conf closed forms") {
    Task flip = make_flip_task();
    EvolvedBlindMediumConf alg4;
    alg4.initialize(flip);
    CHECK(alg4.evaluate(State({0})).value() == 1);
    CHECK(alg4.evaluate(State({1})).value() == 0);
}

TEST_CASE("DTG tables of evolved_blind_none_3") {
    Task task = test::load_fixture("truck3.sas");
    EvolvedBlindNone3 alg3;
    alg3.initialize(task);
    const DtgWeightedTables &t = alg3.tables();
    CHECK(t.goal_vars.size() == task.goal().size());
    CHECK(t.refinement_rounds <= 3);
    for (int level : t.level) {
        CHECK(level >= 0);
        CHECK(level <= 3);
    }
    for (int deps : t.num_deps)
        CHECK(deps >= 1);
}
}

TEST_SUITE("heuristic_registry") {
TEST_CASE("every built-in name and the parametric forms construct") {
    for (const string &name : heuristic_names())
        CHECK(make_heuristic(name)->name() == name);
    CHECK(make_heuristic("add")->name() == "hadd");
    CHECK(make_heuristic("weights:1,0,0,0")->name() == "weights");
    CHECK(make_heuristic("expr:ff + goalcount")->name() == "expr");
}

TEST_CASE("unknown heuristics are rejected with the known list") {
    try {
        make_heuristic("bogus");
        FAIL("bogus accepted");
    } catch (const UnknownHeuristicError &e) {
        CHECK(string(e.what()).find("evolved_ff_none_3") != string::npos);
    }
    CHECK_THROWS(make_heuristic("weights:1,2"));
    CHECK_THROWS(make_heuristic("weights:1,2,3,-4"));
}
}
