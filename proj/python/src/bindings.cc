#include "evoplan/fitness.h"
#include "evoplan/heuristic_registry.h"
#include "evoplan/report.h"
#include "evoplan/run.h"
#include "evoplan/sas_io.h"
#include "evoplan/search.h"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <memory>
#include <sstream>

using namespace std;
using namespace evoplan;
namespace py = pybind11;

namespace {
SearchLimits make_limits(double time_limit, const string &clock, double memory_limit_mb,
                         double seconds_per_work_unit) {
    SearchLimits limits;
    limits.time_limit = time_limit;
    if (clock == "work")
        limits.clock = ClockMode::Work;
    else if (clock != "wall")
        throw invalid_argument("clock must be 'wall' or 'work'");
    limits.memory_limit = static_cast<uint64_t>(memory_limit_mb * 1024 * 1024);
    limits.seconds_per_work_unit = seconds_per_work_unit;
    return limits;
}

State to_state(const Task &task, const vector<int> &values) {
    if (static_cast<int>(values.size()) != task.num_variables())
        throw invalid_argument("state must assign every variable");
    for (int var = 0; var < task.num_variables(); ++var) {
        if (values[var] < 0 || values[var] >= task.variables()[var].domain_size)
            throw invalid_argument("state value out of range for variable " + to_string(var));
    }
    return State(values);
}

py::object heuristic_to_py(HeuristicValue value) {
    if (value.is_dead_end())
        return py::float_(INFINITY);
    return py::int_(value.value());
}

// Keeps the task alive for as long as the heuristic refers to it.
struct BoundHeuristic {
    shared_ptr<const Task> task;
    unique_ptr<Heuristic> heuristic;
};

py::dict result_to_dict(const Task &task, const SearchResult &r) {
    py::dict d;
    d["outcome"] = to_string(r.outcome);
    if (r.plan) {
        py::list names;
        for (int op : *r.plan)
            names.append(task.op(op).name);
        d["plan"] = names;
    } else {
        d["plan"] = py::none();
    }
    d["plan_cost"] = r.plan_cost;
    d["evaluations"] = r.evaluations;
    d["expansions"] = r.expansions;
    d["generated"] = r.generated;
    d["time"] = r.wall_time;
    d["diagnostic"] = r.diagnostic;
    return d;
}

OutcomeMatrix matrix_from_csv(const string &text) {
    istringstream in(text);
    return OutcomeMatrix::read_csv(in);
}

EvalRecord record_from_dict(const py::dict &d) {
    EvalRecord r;
    r.solved = d["solved"].cast<bool>();
    r.executed = d.contains("executed") ? d["executed"].cast<bool>() : true;
    r.time = d["time"].cast<double>();
    r.budget = d["budget"].cast<double>();
    r.evaluations = d.contains("evaluations") ? d["evaluations"].cast<uint64_t>() : 0;
    r.e_ff = d.contains("e_ff") ? d["e_ff"].cast<double>() : 0;
    return r;
}
}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Planning heuristics, greedy search, fitness and reports.";

    py::register_exception<SasError>(m, "SasError", PyExc_ValueError);
    py::register_exception_translator([](exception_ptr p) {
        try {
            if (p)
                rethrow_exception(p);
        } catch (const ContractViolation &e) {
            py::set_error(PyExc_ValueError, e.what());
        }
    });

    py::class_<Task, shared_ptr<Task>>(m, "Task")
        .def_property_readonly("num_variables", &Task::num_variables)
        .def_property_readonly("num_operators", &Task::num_operators)
        .def_property_readonly("initial_state",
                               [](const Task &t) { return t.initial_state().vector(); })
        .def_property_readonly("goal",
                               [](const Task &t) {
                                   vector<pair<int, int>> facts;
                                   for (const Fact &f : t.goal())
                                       facts.emplace_back(f.var, f.value);
                                   return facts;
                               })
        .def_property_readonly("operator_names",
                               [](const Task &t) {
                                   vector<string> names;
                                   for (const Operator &op : t.operators())
                                       names.push_back(op.name);
                                   return names;
                               })
        .def_property_readonly("metric_uses_costs", &Task::metric_uses_costs)
        .def("is_goal",
             [](const Task &t, const vector<int> &s) { return t.is_goal(to_state(t, s)); })
        .def("applicable_operators",
             [](const Task &t, const vector<int> &s) {
                 return t.applicable_operators(to_state(t, s));
             })
        .def("apply",
             [](const Task &t, const vector<int> &s, int op) {
                 if (op < 0 || op >= t.num_operators())
                     throw invalid_argument("operator id out of range");
                 return t.apply(to_state(t, s), op).vector();
             })
        .def("__eq__", [](const Task &a, const Task &b) { return a == b; });

    m.def("parse_sas", [](const string &text) { return make_shared<Task>(parse_sas(text)); },
          py::arg("text"));
    m.def("load_sas", [](const string &path) { return make_shared<Task>(load_sas_file(path)); },
          py::arg("path"));
    m.def("serialize_sas", [](const Task &t) { return serialize_sas(t); }, py::arg("task"));

    m.def("heuristic_names", &heuristic_names);

    py::class_<BoundHeuristic>(m, "Heuristic")
        .def(py::init([](const string &name, shared_ptr<Task> task) {
                 auto bound = make_unique<BoundHeuristic>();
                 bound->task = task;
                 bound->heuristic = make_heuristic(name);
                 bound->heuristic->initialize(*task);
                 return bound;
             }),
             py::arg("name"), py::arg("task"))
        .def_property_readonly("name",
                               [](const BoundHeuristic &b) { return b.heuristic->name(); })
        .def(
            "__call__",
            [](BoundHeuristic &b, const vector<int> &s) {
                return heuristic_to_py(b.heuristic->evaluate(to_state(*b.task, s)));
            },
            py::arg("state"));

    m.def(
        "solve",
        [](shared_ptr<Task> task, const string &heuristic, double time_limit, const string &clock,
           double memory_limit_mb, double seconds_per_work_unit) {
            SearchLimits limits =
                make_limits(time_limit, clock, memory_limit_mb, seconds_per_work_unit);
            unique_ptr<Heuristic> h = make_heuristic(heuristic);
            SearchResult result;
            {
                py::gil_scoped_release release;
                result = gbfs(*task, *h, limits);
            }
            return result_to_dict(*task, result);
        },
        py::arg("task"), py::arg("heuristic") = "ff", py::arg("time_limit") = 1800.0,
        py::arg("clock") = "wall", py::arg("memory_limit_mb") = 8192.0,
        py::arg("seconds_per_work_unit") = 1e-6);

    m.def(
        "validate_plan",
        [](const Task &task, const vector<int> &plan) { return validate_plan(task, plan).valid; },
        py::arg("task"), py::arg("plan"));

    m.def(
        "optimal_costs",
        [](const Task &task, size_t cap) {
            OptimalCostOracle oracle(task, cap);
            vector<pair<vector<int>, py::object>> out;
            for (size_t i = 0; i < oracle.size(); ++i) {
                Cost c = oracle.h_star(i);
                out.emplace_back(oracle.states()[i].vector(),
                                 c == INF_COST ? py::object(py::float_(INFINITY))
                                               : py::object(py::int_(c)));
            }
            return out;
        },
        py::arg("task"), py::arg("cap") = OptimalCostOracle::DEFAULT_CAP);

    m.def("task_budget", &task_budget, py::arg("t_ff"), py::arg("floor") = 30.0,
          py::arg("factor") = 1.3);
    m.def("agile", &agile, py::arg("t"), py::arg("budget"));
    m.def(
        "fitness_score",
        [](const vector<py::dict> &records, double alpha) {
            vector<EvalRecord> rs;
            for (const auto &d : records)
                rs.push_back(record_from_dict(d));
            return fitness_score(rs, alpha);
        },
        py::arg("records"), py::arg("alpha") = 0.25);
    m.def(
        "fitness_features",
        [](const vector<py::dict> &records) {
            vector<EvalRecord> rs;
            for (const auto &d : records)
                rs.push_back(record_from_dict(d));
            FeatureValues f = fitness_features(rs);
            return make_pair(f.evals, f.speed);
        },
        py::arg("records"));

    m.def(
        "report_pareto",
        [](const string &csv_text, const string &reference) {
            ParetoReport r = report_pareto(matrix_from_csv(csv_text), reference);
            py::dict d;
            py::dict entries;
            for (const auto &e : r.entries)
                entries[py::str(e.heuristic)] = make_pair(e.informedness, e.speed);
            d["entries"] = entries;
            d["excluded"] = r.excluded;
            d["common_tasks"] = r.common_tasks;
            d["warning"] = r.warning;
            return d;
        },
        py::arg("csv_text"), py::arg("reference") = "ff");
    m.def(
        "report_cactus",
        [](const string &csv_text) {
            py::dict d;
            for (const auto &p : report_cactus(matrix_from_csv(csv_text))) {
                py::str key(p.heuristic);
                if (!d.contains(key))
                    d[key] = py::list();
                d[key].cast<py::list>().append(make_pair(p.time, p.solved));
            }
            return d;
        },
        py::arg("csv_text"));
    m.def(
        "report_similarity",
        [](const string &csv_text) {
            SimilarityReport r = report_similarity(matrix_from_csv(csv_text));
            py::dict d;
            d["heuristics"] = r.heuristics;
            d["jaccard"] = r.jaccard;
            d["domination"] = r.domination;
            return d;
        },
        py::arg("csv_text"));

    m.def(
        "run_evolution",
        [](const string &config_path, const string &output_dir, int iterations) {
            RunConfig config = load_run_config(config_path);
            if (!output_dir.empty())
                config.output_dir = output_dir;
            if (iterations >= 0)
                config.evolution.iterations = iterations;
            RunSummary summary;
            {
                py::gil_scoped_release release;
                summary = run_evolution(config);
            }
            py::dict d;
            d["best_score"] = summary.best.score ? py::object(py::float_(*summary.best.score))
                                                 : py::object(py::none());
            d["best_genome"] = summary.best.genome.to_json().dump();
            d["repair_histogram"] = summary.repair_histogram;
            d["run_log"] = summary.run_log_path;
            d["snapshot"] = summary.snapshot_path;
            d["best_genome_path"] = summary.best_genome_path;
            return d;
        },
        py::arg("config_path"), py::arg("output_dir") = "", py::arg("iterations") = -1);
}
