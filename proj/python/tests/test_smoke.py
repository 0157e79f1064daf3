import json
import math
import os
from pathlib import Path

import pytest

import evoplan

SOURCE_DIR = Path(os.environ.get("EVOPLAN_SOURCE_DIR", Path(__file__).resolve().parents[2]))
FIXTURES = SOURCE_DIR / "tests" / "fixtures"


def load(name):
    return evoplan.load_sas(str(FIXTURES / name))


def test_round_trip_is_identity():
    task = load("gripper2.sas")
    text = evoplan.serialize_sas(task)
    again = evoplan.parse_sas(text)
    assert again == task
    assert evoplan.serialize_sas(again) == text


def test_axioms_are_rejected():
    with pytest.raises(evoplan.SasError):
        load("axiom.sas")
    assert issubclass(evoplan.SasError, ValueError)


def test_solve_returns_valid_plan():
    task = load("chain10.sas")
    result = evoplan.solve(task, "ff")
    assert result["outcome"] == "SOLVED"
    assert len(result["plan"]) == 10
    assert result["plan_cost"] == 10
    names = task.operator_names
    assert evoplan.validate_plan(task, [names.index(n) for n in result["plan"]])


def test_unknown_heuristic_is_value_error():
    with pytest.raises(ValueError):
        evoplan.solve(load("flip.sas"), "no_such_heuristic")


def test_unsolvable_task():
    assert evoplan.solve(load("unsolvable.sas"), "blind")["outcome"] == "UNSOLVABLE"


def test_admissible_heuristics_bounded_by_optimal_cost():
    task = load("blocks4.sas")
    hmax = evoplan.Heuristic("hmax", task)
    hadd = evoplan.Heuristic("hadd", task)
    ff = evoplan.Heuristic("ff", task)
    for state, h_star in evoplan.optimal_costs(task):
        assert hmax(state) <= h_star
        assert hadd(state) >= hmax(state)
        if task.is_goal(state):
            assert ff(state) == 0


def test_dead_end_is_infinite():
    task = load("unsolvable.sas")
    h = evoplan.Heuristic("hmax", task)
    assert h(task.initial_state) == math.inf


def test_every_registered_heuristic_evaluates():
    task = load("gripper1.sas")
    for name in evoplan.heuristic_names():
        value = evoplan.Heuristic(name, task)(task.initial_state)
        assert value >= 0


def test_state_validation():
    task = load("flip.sas")
    h = evoplan.Heuristic("ff", task)
    with pytest.raises(ValueError):
        h([0] * (task.num_variables + 1))


def test_fitness_formulas():
    assert evoplan.task_budget(10.0) == 30.0
    assert evoplan.task_budget(100.0) == pytest.approx(130.0)
    assert evoplan.agile(0.5, 30.0) == 1.0
    assert evoplan.agile(30.0, 30.0) == pytest.approx(0.0)
    records = [
        {"solved": True, "time": 0.5, "budget": 30.0, "evaluations": 5, "e_ff": 10},
        {"solved": False, "time": 30.0, "budget": 30.0},
    ]
    assert evoplan.fitness_score(records, 0.25) == pytest.approx(0.5 * (0.25 + 0.75 * 1.0))
    assert evoplan.fitness_features([{"solved": False, "time": 1.0, "budget": 30.0}]) == (10.0, 0.0)


MATRIX = """heuristic,domain,task,class,outcome,time,evaluations,expansions,plan_cost
ff,d,t1,SOLVED,SOLVED,1,10,5,3
ff,d,t2,SOLVED,SOLVED,2,20,10,3
ff,d,t3,SOLVED,SOLVED,4,40,20,3
blind,d,t1,SOLVED,SOLVED,1,100,50,3
blind,d,t2,OOT,OUT_OF_TIME,9,900,900,0
blind,d,t3,OOT,OUT_OF_TIME,9,900,900,0
"""


def test_reports():
    pareto = evoplan.report_pareto(MATRIX)
    assert pareto["entries"]["ff"] == (1.0, 1.0)
    assert pareto["common_tasks"] == ["t1"]
    assert pareto["entries"]["blind"][0] == pytest.approx(0.1)
    cactus = evoplan.report_cactus(MATRIX)
    assert [n for _, n in cactus["ff"]] == [1, 2, 3]
    sim = evoplan.report_similarity(MATRIX)
    jac = sim["jaccard"]
    assert jac[0][0] == 1.0 and jac[1][1] == 1.0
    assert jac[0][1] == jac[1][0] == pytest.approx(1 / 3)


def test_short_evolution_run(tmp_path):
    summary = evoplan.run_evolution(
        str(SOURCE_DIR / "configs" / "desk_parametric.json"), str(tmp_path), 6
    )
    assert summary["best_score"] is not None
    assert json.loads(summary["best_genome"])
    lines = Path(summary["run_log"]).read_text().splitlines()
    assert lines
