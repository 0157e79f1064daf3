#pragma once

#include "evoplan/heuristic.h"

#include <json.hpp>

#include <array>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace evoplan {
class DtgDistanceHeuristic;
class FFHeuristic;
class GoalCountHeuristic;

// Heritable payload of an individual. Weights genomes parameterize a fixed
// template over four features (see WeightedSumHeuristic); source genomes
// hold a program in the expression language.
struct Genome {
    enum class Kind { Weights, Source };
    static constexpr int NUM_WEIGHTS = 4;
    static const std::array<const char *, NUM_WEIGHTS> WEIGHT_NAMES;

    Kind kind = Kind::Weights;
    std::array<double, NUM_WEIGHTS> weights{};
    std::string source;

    static Genome from_weights(std::array<double, NUM_WEIGHTS> weights);
    static Genome from_source(std::string source);
    // All weights zero: behaves exactly like the blind heuristic.
    static Genome blind() { return from_weights({0, 0, 0, 0}); }
    static Genome ff() { return from_weights({1, 0, 0, 0}); }

    nlohmann::json to_json() const;
    // Throws std::invalid_argument on malformed input.
    static Genome from_json(const nlohmann::json &j);
    // Short human-readable form for logs.
    std::string describe() const;

    friend bool operator==(const Genome &, const Genome &) = default;
};

Genome load_genome_file(const std::string &path);
void save_genome_file(const Genome &genome, const std::string &path);

// h(s) = 0 on goal states, otherwise
//   max(cmin, round(w_ff*h_ff + w_hadd*h_add + w_gc*goalcount + w_dtg*dtg_sum)).
// Features with zero weight are not computed. A dead end reported by any
// weighted feature makes the state a dead end.
class WeightedSumHeuristic : public Heuristic {
public:
    explicit WeightedSumHeuristic(std::array<double, Genome::NUM_WEIGHTS> weights);
    ~WeightedSumHeuristic() override;
    std::string name() const override { return "weights"; }
    const std::array<double, Genome::NUM_WEIGHTS> &weights() const { return weights_; }

protected:
    void do_initialize(const Task &task) override;
    HeuristicValue compute(const State &state) override;

private:
    std::array<double, Genome::NUM_WEIGHTS> weights_;
    std::unique_ptr<FFHeuristic> ff_;
    std::unique_ptr<GoalCountHeuristic> goalcount_;
    std::unique_ptr<DtgDistanceHeuristic> dtg_;
};

// Throws ExpressionError for unparsable source genomes.
std::unique_ptr<Heuristic> make_genome_heuristic(const Genome &genome);

// Builds the heuristic and evaluates it on the flip task. Returns an empty
// string on success, otherwise the diagnostic.
std::string smoke_check(const Genome &genome);

struct Individual {
    int id = -1;
    Genome genome;
    // Present iff evaluation completed.
    std::optional<double> score;
    // (evals, speed); present iff evaluation completed.
    std::optional<std::array<double, 2>> features;
    int parent_id = -1;
    int island = 0;
    int iteration = 0;
    int repair_attempts = 0;

    nlohmann::json to_json() const;
    static Individual from_json(const nlohmann::json &j);
};

// Raised by mutators that cannot produce a child; carries the diagnostic.
class MutatorError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class Mutator {
public:
    virtual ~Mutator() = default;
    virtual std::string name() const = 0;
    virtual Genome propose(const Individual &parent,
                           const std::vector<Individual> &inspirations) = 0;
    // Called with the genome that failed the smoke check and its diagnostic.
    virtual Genome repair(const Genome &broken, const std::string &diagnostic) = 0;
};

class IdentityMutator : public Mutator {
public:
    std::string name() const override { return "identity"; }
    Genome propose(const Individual &parent, const std::vector<Individual> &) override {
        return parent.genome;
    }
    Genome repair(const Genome &broken, const std::string &) override { return broken; }
};

struct ParametricMutatorOptions {
    double crossover_probability = 0.2;
    double zero_probability = 0.1;
    double two_weight_probability = 0.5;
    // Standard deviation of the log-normal multiplicative step.
    double log_sigma = 0.5;
    // Median of the draw for weights that are currently zero.
    double fresh_median = 0.5;
    double max_weight = 100.0;
};

// LLM-free mutation of weights genomes. Mutation multiplies one or two
// weights by exp(N(0, log_sigma)), draws fresh values for zero weights and
// occasionally zeroes a weight; crossover blends parent and an inspiration
// per weight with independent uniform factors, staying inside their
// bounding box. Children of mutation always differ from the parent.
class ParametricMutator : public Mutator {
public:
    explicit ParametricMutator(std::uint64_t seed, ParametricMutatorOptions options = {});
    std::string name() const override { return "parametric"; }
    Genome propose(const Individual &parent,
                   const std::vector<Individual> &inspirations) override;
    Genome repair(const Genome &broken, const std::string &diagnostic) override;

    Genome mutate(const Genome &parent);
    Genome crossover(const Genome &a, const Genome &b);

private:
    std::mt19937_64 rng_;
    ParametricMutatorOptions options_;
};

}  // namespace evoplan
