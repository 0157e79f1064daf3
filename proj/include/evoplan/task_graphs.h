#pragma once

#include "evoplan/task.h"

#include <optional>
#include <string>
#include <vector>

namespace evoplan {

// Source value of an edge whose operator has no precondition on the
// variable. Such an edge leaves every value of the domain.
inline constexpr int WILDCARD = -1;

struct DtgEdge {
    int from = WILDCARD;
    int to = -1;
    int op = -1;
    Cost cost = 0;

    bool changes_value() const { return from != to; }
};

// Domain transition graph of a single variable. Edges keep their operator id
// so that the outside preconditions (the edge label) can be recovered.
class DomainTransitionGraph {
public:
    DomainTransitionGraph(const Task &task, int var);

    int variable() const { return var_; }
    int domain_size() const { return domain_size_; }
    const std::vector<DtgEdge> &edges() const { return edges_; }

    // Edge indices leaving value (not counting wildcard edges).
    const std::vector<int> &outgoing(int value) const { return outgoing_[value]; }
    const std::vector<int> &incoming(int value) const { return incoming_[value]; }
    const std::vector<int> &wildcard_edges() const { return wildcard_; }

    // Number of value-changing edges.
    int transition_count() const;

private:
    int var_;
    int domain_size_;
    std::vector<DtgEdge> edges_;
    std::vector<std::vector<int>> outgoing_;
    std::vector<std::vector<int>> incoming_;
    std::vector<int> wildcard_;
};

DomainTransitionGraph build_dtg(const Task &task, int var);

class CausalGraph {
public:
    explicit CausalGraph(const Task &task);

    int num_variables() const { return static_cast<int>(preds_.size()); }
    // Sorted, duplicate-free, no self-loops.
    const std::vector<int> &predecessors(int var) const { return preds_[var]; }
    const std::vector<int> &successors(int var) const { return succs_[var]; }
    bool has_edge(int from, int to) const;
    int num_edges() const;

private:
    std::vector<std::vector<int>> preds_;
    std::vector<std::vector<int>> succs_;
};

CausalGraph build_causal_graph(const Task &task);

struct DtgDistanceTable {
    int var = -1;
    int goal_value = -1;
    // INF_COST marks values that cannot reach goal_value.
    std::vector<Cost> dist;
};

// Backward Dijkstra from goal_value. weights, if given, holds one weight per
// DTG edge (same indexing as dtg.edges()); otherwise edge costs are used.
DtgDistanceTable backward_goal_distances(const DomainTransitionGraph &dtg, int goal_value,
                                         const std::vector<Cost> *weights = nullptr);

// Cheapest value-changing edge (wildcards count as changing), or INF_COST.
Cost cheapest_changing_edge(const DomainTransitionGraph &dtg);

// For every value with 0 < dist < INF, the lowest-id operator labelling the
// first edge of a shortest path to the goal value; -1 elsewhere.
std::vector<int> next_on_path_operators(const DomainTransitionGraph &dtg,
                                        const DtgDistanceTable &table,
                                        const std::vector<Cost> *weights = nullptr);

std::string dtg_to_dot(const Task &task, const DomainTransitionGraph &dtg);
std::string causal_graph_to_dot(const Task &task, const CausalGraph &cg);

}  // namespace evoplan
