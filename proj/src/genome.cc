#include "evoplan/genome.h"

#include "evoplan/expression.h"
#include "evoplan/heuristics_base.h"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

using namespace std;
using json = nlohmann::json;

namespace evoplan {
const array<const char *, Genome::NUM_WEIGHTS> Genome::WEIGHT_NAMES = {
    "ff", "hadd", "goalcount", "dtg_sum"};

Genome Genome::from_weights(array<double, NUM_WEIGHTS> weights) {
    for (double w : weights) {
        if (!(w >= 0) || !isfinite(w))
            throw invalid_argument("genome weights must be finite and nonnegative");
    }
    Genome genome;
    genome.kind = Kind::Weights;
    genome.weights = weights;
    return genome;
}

Genome Genome::from_source(string source) {
    Genome genome;
    genome.kind = Kind::Source;
    genome.source = move(source);
    return genome;
}

json Genome::to_json() const {
    if (kind == Kind::Source)
        return json{{"kind", "source"}, {"source", source}};
    return json{{"kind", "weights"}, {"weights", weights}};
}

Genome Genome::from_json(const json &j) {
    try {
        string kind = j.at("kind").get<string>();
        if (kind == "source")
            return from_source(j.at("source").get<string>());
        if (kind == "weights") {
            auto w = j.at("weights").get<vector<double>>();
            if (w.size() != NUM_WEIGHTS)
                throw invalid_argument("weights genome needs exactly 4 weights");
            return from_weights({w[0], w[1], w[2], w[3]});
        }
        throw invalid_argument("unknown genome kind '" + kind + "'");
    } catch (const json::exception &e) {
        throw invalid_argument(string("malformed genome: ") + e.what());
    }
}

string Genome::describe() const {
    if (kind == Kind::Source)
        return "expr:" + source;
    ostringstream out;
    out << "weights:";
    for (int i = 0; i < NUM_WEIGHTS; ++i)
        out << (i ? "," : "") << setprecision(6) << weights[i];
    return out.str();
}

Genome load_genome_file(const string &path) {
    ifstream in(path);
    if (!in)
        throw invalid_argument("cannot open genome file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception &e) {
        throw invalid_argument("genome file '" + path + "': " + e.what());
    }
    return Genome::from_json(j);
}

void save_genome_file(const Genome &genome, const string &path) {
    ofstream out(path);
    if (!out)
        throw runtime_error("cannot write genome file '" + path + "'");
    out << genome.to_json().dump(2) << "\n";
}

WeightedSumHeuristic::WeightedSumHeuristic(array<double, Genome::NUM_WEIGHTS> weights)
    : weights_(weights) {
}

WeightedSumHeuristic::~WeightedSumHeuristic() = default;

void WeightedSumHeuristic::do_initialize(const Task &task) {
    ff_.reset();
    goalcount_.reset();
    dtg_.reset();
    if (weights_[0] > 0 || weights_[1] > 0) {
        ff_ = make_unique<FFHeuristic>();
        ff_->initialize(task);
        add_work(ff_->work());
    }
    if (weights_[2] > 0) {
        goalcount_ = make_unique<GoalCountHeuristic>();
        goalcount_->initialize(task);
        add_work(goalcount_->work());
    }
    if (weights_[3] > 0) {
        dtg_ = make_unique<DtgDistanceHeuristic>(false);
        dtg_->initialize(task);
        add_work(dtg_->work());
    }
}

HeuristicValue WeightedSumHeuristic::compute(const State &state) {
    const Task &t = task();
    add_work(t.goal().size());
    if (t.is_goal(state))
        return 0;
    double sum = 0;
    if (ff_) {
        uint64_t before = ff_->work();
        RelaxedPlanResult plan = ff_->relaxed_plan(state);
        add_work(ff_->work() - before);
        if (plan.dead_end)
            return HeuristicValue::dead_end();
        sum += weights_[0] * static_cast<double>(plan.h_ff) +
               weights_[1] * static_cast<double>(plan.h_add_total);
    }
    if (goalcount_) {
        uint64_t before = goalcount_->work();
        sum += weights_[2] * static_cast<double>(goalcount_->evaluate(state).value());
        add_work(goalcount_->work() - before);
    }
    if (dtg_) {
        uint64_t before = dtg_->work();
        HeuristicValue d = dtg_->evaluate(state);
        add_work(dtg_->work() - before);
        if (d.is_dead_end())
            return HeuristicValue::dead_end();
        sum += weights_[3] * static_cast<double>(d.value());
    }
    double rounded = round(sum);
    if (rounded >= static_cast<double>(MAX_FINITE_COST))
        return MAX_FINITE_COST;
    return max(t.min_positive_cost(), static_cast<Cost>(rounded));
}

unique_ptr<Heuristic> make_genome_heuristic(const Genome &genome) {
    if (genome.kind == Genome::Kind::Source)
        return make_unique<ExpressionHeuristic>(genome.source);
    return make_unique<WeightedSumHeuristic>(genome.weights);
}

string smoke_check(const Genome &genome) {
    try {
        unique_ptr<Heuristic> h = make_genome_heuristic(genome);
        Task task = make_flip_task();
        h->initialize(task);
        h->evaluate(task.initial_state());
        State goal_state = task.apply(task.initial_state(), 0);
        h->evaluate(goal_state);
        return "";
    } catch (const exception &e) {
        string what = e.what();
        return what.empty() ? "smoke check failed" : what;
    }
}

json Individual::to_json() const {
    json j = {{"id", id},
              {"genome", genome.to_json()},
              {"parent", parent_id},
              {"island", island},
              {"iteration", iteration},
              {"repairs", repair_attempts}};
    j["score"] = score ? json(*score) : json(nullptr);
    j["features"] = features ? json(*features) : json(nullptr);
    return j;
}

Individual Individual::from_json(const json &j) {
    Individual ind;
    try {
        ind.id = j.at("id").get<int>();
        ind.genome = Genome::from_json(j.at("genome"));
        ind.parent_id = j.at("parent").get<int>();
        ind.island = j.at("island").get<int>();
        ind.iteration = j.at("iteration").get<int>();
        ind.repair_attempts = j.at("repairs").get<int>();
        if (!j.at("score").is_null())
            ind.score = j.at("score").get<double>();
        if (!j.at("features").is_null())
            ind.features = j.at("features").get<array<double, 2>>();
    } catch (const json::exception &e) {
        throw invalid_argument(string("malformed individual: ") + e.what());
    }
    return ind;
}

ParametricMutator::ParametricMutator(uint64_t seed, ParametricMutatorOptions options)
    : rng_(seed), options_(options) {
}

Genome ParametricMutator::propose(const Individual &parent,
                                  const vector<Individual> &inspirations) {
    if (parent.genome.kind != Genome::Kind::Weights)
        throw MutatorError("parametric mutator needs a weights genome");
    uniform_real_distribution<double> unit(0.0, 1.0);
    if (!inspirations.empty() && unit(rng_) < options_.crossover_probability) {
        uniform_int_distribution<size_t> pick(0, inspirations.size() - 1);
        const Genome &other = inspirations[pick(rng_)].genome;
        if (other.kind == Genome::Kind::Weights) {
            Genome child = crossover(parent.genome, other);
            if (child != parent.genome)
                return child;
        }
    }
    return mutate(parent.genome);
}

Genome ParametricMutator::repair(const Genome &broken, const string &diagnostic) {
    if (broken.kind != Genome::Kind::Weights)
        throw MutatorError("parametric mutator cannot repair: " + diagnostic);
    Genome fixed = broken;
    for (double &w : fixed.weights) {
        if (!isfinite(w) || w < 0)
            w = 0;
    }
    return fixed;
}

Genome ParametricMutator::mutate(const Genome &parent) {
    uniform_real_distribution<double> unit(0.0, 1.0);
    normal_distribution<double> step(0.0, options_.log_sigma);
    uniform_int_distribution<int> pick(0, Genome::NUM_WEIGHTS - 1);
    Genome child = parent;
    while (child == parent) {
        int count = unit(rng_) < options_.two_weight_probability ? 2 : 1;
        int first = pick(rng_);
        int second = first;
        while (count == 2 && second == first)
            second = pick(rng_);
        for (int i : {first, second}) {
            double &w = child.weights[i];
            if (w == 0)
                w = options_.fresh_median * exp(step(rng_));
            else if (unit(rng_) < options_.zero_probability)
                w = 0;
            else
                w *= exp(step(rng_));
            w = min(w, options_.max_weight);
            if (count == 1)
                break;
        }
    }
    return child;
}

Genome ParametricMutator::crossover(const Genome &a, const Genome &b) {
    uniform_real_distribution<double> unit(0.0, 1.0);
    Genome child = a;
    for (int i = 0; i < Genome::NUM_WEIGHTS; ++i) {
        double u = unit(rng_);
        child.weights[i] = a.weights[i] + u * (b.weights[i] - a.weights[i]);
        double lo = min(a.weights[i], b.weights[i]);
        double hi = max(a.weights[i], b.weights[i]);
        child.weights[i] = clamp(child.weights[i], lo, hi);
    }
    return child;
}
}  // namespace evoplan
