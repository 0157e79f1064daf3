#pragma once

#include "evoplan/heuristic.h"
#include "evoplan/relaxation.h"
#include "evoplan/task_graphs.h"

#include <cstdint>
#include <memory>
#include <vector>

namespace evoplan {

// Per-slot flags that reset in O(1): a slot is set iff its stamp equals the
// current generation.
class GenerationScratch {
public:
    explicit GenerationScratch(std::size_t size = 0) : stamps_(size, 0) {}

    void resize(std::size_t size);
    void next_generation();
    bool is_set(std::size_t slot) const { return stamps_[slot] == generation_; }
    void set(std::size_t slot) { stamps_[slot] = generation_; }
    std::uint32_t generation() const { return generation_; }
    // Test hook: jump close to the wrap-around point.
    void set_generation_for_testing(std::uint32_t generation) { generation_ = generation; }

private:
    std::vector<std::uint32_t> stamps_;
    std::uint32_t generation_ = 1;
};

// FF with two corrective penalties (evolved from a blind seed):
//   p_c: for every effect variable of a relaxed-plan operator that an
//        earlier plan operator (extraction order) already wrote, add
//        min_positive_cost, doubled for goal variables;
//   p_u: for every unsatisfied goal g, min(h_add(g), h_FF).
// Returns h_FF + ceil((p_c + p_u) / min_positive_cost).
class EvolvedBlindMedium2 : public Heuristic {
public:
    std::string name() const override { return "evolved_blind_medium_2"; }

    struct Breakdown {
        Cost h_ff = 0;
        Cost conflict_penalty = 0;
        Cost unsatisfied_penalty = 0;
        std::vector<int> plan_ops;
    };
    // Components of the last compute() call.
    const Breakdown &last_breakdown() const { return last_; }

protected:
    void do_initialize(const Task &task) override;
    HeuristicValue compute(const State &state) override;

private:
    void extract(int fact);

    std::unique_ptr<RelaxedExploration> exploration_;
    GenerationScratch fact_marks_;
    GenerationScratch op_marks_;
    GenerationScratch touched_vars_;
    Breakdown last_;
};

// FF value computed with an early-terminating h_add pass, generation-stamped
// fact tables and a side list of marked plan operators, so resetting costs
// are proportional to the relaxed plan length. Returns exactly FF's value.
class EvolvedFfNone3 : public Heuristic {
public:
    std::string name() const override { return "evolved_ff_none_3"; }

protected:
    void do_initialize(const Task &task) override;
    HeuristicValue compute(const State &state) override;

private:
    void offer(int fact, Cost cost, int op);
    void touch_operator(int op);
    void mark_plan(int fact);

    std::unique_ptr<RelaxedTask> relaxed_;
    std::vector<Cost> cost_;
    std::vector<int> supporter_;
    GenerationScratch reached_;
    GenerationScratch closed_;
    GenerationScratch op_seen_;
    GenerationScratch fact_marked_;
    std::vector<int> unsatisfied_;
    std::vector<Cost> accumulated_;
    std::vector<bool> op_in_plan_;
    std::vector<int> plan_side_list_;
    std::vector<std::pair<Cost, int>> heap_;
};

struct DtgWeightedTables {
    // Indexed by goal position (task.goal() order).
    std::vector<int> goal_vars;
    std::vector<DtgDistanceTable> base;
    std::vector<DtgDistanceTable> refined;
    std::vector<int> level;       // rescaled to [0, 3]
    std::vector<double> weight;   // |preds_CG| + min(transitions / 4, 5)
    std::vector<int> num_deps;    // max(1, |preds_CG|)
    int max_level = 0;
    int refinement_rounds = 0;
};

// DTG-distance heuristic with landmark-level, depth and causal-graph
// weighting (evolved from a blind seed). Goal-variable DTG edge weights are
// refined up to three times by adding approximate costs of each operator's
// other preconditions: the current distance table for goal variables, the
// cheapest value-changing edge for other variables.
class EvolvedBlindNone3 : public Heuristic {
public:
    std::string name() const override { return "evolved_blind_none_3"; }

    const DtgWeightedTables &tables() const { return tables_; }

protected:
    void do_initialize(const Task &task) override;
    HeuristicValue compute(const State &state) override;

private:
    DtgWeightedTables tables_;
};

struct DtgGoalTables {
    std::vector<int> goal_vars;
    std::vector<DtgDistanceTable> dist;
    // next_op[i][value]: first operator on a cheapest DTG path to the goal.
    std::vector<std::vector<int>> next_op;
    std::vector<int> cg_preds;
};

// Sum over goals of DTG distance weighted by 1 + |preds_CG|, plus the number
// of unmet preconditions of the next on-path operator.
class EvolvedBlindMediumConf : public Heuristic {
public:
    std::string name() const override { return "evolved_blind_medium_conf"; }

    const DtgGoalTables &tables() const { return tables_; }

protected:
    void do_initialize(const Task &task) override;
    HeuristicValue compute(const State &state) override;

private:
    DtgGoalTables tables_;
};

}  // namespace evoplan
