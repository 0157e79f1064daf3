#include "evoplan/task_graphs.h"

#include <algorithm>
#include <queue>
#include <sstream>

using namespace std;

namespace evoplan {
DomainTransitionGraph::DomainTransitionGraph(const Task &task, int var)
    : var_(var),
      domain_size_(task.variables().at(var).domain_size),
      outgoing_(domain_size_),
      incoming_(domain_size_) {
    for (int op_id = 0; op_id < task.num_operators(); ++op_id) {
        const Operator &op = task.op(op_id);
        int to = op.effect.value_of(var);
        if (to == -1)
            continue;
        int from = op.precondition.value_of(var);
        int index = static_cast<int>(edges_.size());
        edges_.push_back({from == -1 ? WILDCARD : from, to, op_id, op.cost});
        if (from == -1)
            wildcard_.push_back(index);
        else
            outgoing_[from].push_back(index);
        incoming_[to].push_back(index);
    }
}

int DomainTransitionGraph::transition_count() const {
    return static_cast<int>(count_if(edges_.begin(), edges_.end(),
                                     [](const DtgEdge &e) { return e.changes_value(); }));
}

DomainTransitionGraph build_dtg(const Task &task, int var) {
    return DomainTransitionGraph(task, var);
}

CausalGraph::CausalGraph(const Task &task)
    : preds_(task.num_variables()), succs_(task.num_variables()) {
    for (const Operator &op : task.operators()) {
        for (const Fact &eff : op.effect) {
            int target = eff.var;
            for (const Fact &pre : op.precondition) {
                if (pre.var != target)
                    preds_[target].push_back(pre.var);
            }
            for (const Fact &other : op.effect) {
                if (other.var != target)
                    preds_[target].push_back(other.var);
            }
        }
    }
    for (int var = 0; var < task.num_variables(); ++var) {
        auto &p = preds_[var];
        sort(p.begin(), p.end());
        p.erase(unique(p.begin(), p.end()), p.end());
        for (int pred : p)
            succs_[pred].push_back(var);
    }
    // succs_ lists are filled in increasing target order, hence sorted.
}

bool CausalGraph::has_edge(int from, int to) const {
    return binary_search(preds_[to].begin(), preds_[to].end(), from);
}

int CausalGraph::num_edges() const {
    int n = 0;
    for (const auto &p : preds_)
        n += static_cast<int>(p.size());
    return n;
}

CausalGraph build_causal_graph(const Task &task) {
    return CausalGraph(task);
}

DtgDistanceTable backward_goal_distances(const DomainTransitionGraph &dtg, int goal_value,
                                         const vector<Cost> *weights) {
    DtgDistanceTable table;
    table.var = dtg.variable();
    table.goal_value = goal_value;
    table.dist.assign(dtg.domain_size(), INF_COST);

    auto weight = [&](int edge) {
        return weights ? (*weights)[edge] : dtg.edges()[edge].cost;
    };

    using Entry = pair<Cost, int>;
    priority_queue<Entry, vector<Entry>, greater<>> queue;
    vector<bool> done(dtg.domain_size(), false);
    table.dist[goal_value] = 0;
    queue.push({0, goal_value});
    auto relax = [&](int value, Cost d) {
        if (d < table.dist[value]) {
            table.dist[value] = d;
            queue.push({d, value});
        }
    };
    while (!queue.empty()) {
        auto [d, value] = queue.top();
        queue.pop();
        if (done[value])
            continue;
        done[value] = true;
        for (int edge : dtg.incoming(value)) {
            const DtgEdge &e = dtg.edges()[edge];
            Cost nd = saturating_add(d, weight(edge));
            if (nd == INF_COST)
                continue;
            if (e.from == WILDCARD) {
                for (int source = 0; source < dtg.domain_size(); ++source)
                    relax(source, nd);
            } else {
                relax(e.from, nd);
            }
        }
    }
    return table;
}

Cost cheapest_changing_edge(const DomainTransitionGraph &dtg) {
    Cost best = INF_COST;
    for (const DtgEdge &e : dtg.edges()) {
        if (e.changes_value())
            best = min(best, e.cost);
    }
    return best;
}

vector<int> next_on_path_operators(const DomainTransitionGraph &dtg,
                                   const DtgDistanceTable &table,
                                   const vector<Cost> *weights) {
    vector<int> next(dtg.domain_size(), -1);
    auto weight = [&](int edge) {
        return weights ? (*weights)[edge] : dtg.edges()[edge].cost;
    };
    auto consider = [&](int value, int edge) {
        const DtgEdge &e = dtg.edges()[edge];
        if (e.to == value)
            return;
        if (saturating_add(weight(edge), table.dist[e.to]) != table.dist[value])
            return;
        if (next[value] == -1 || e.op < next[value])
            next[value] = e.op;
    };
    for (int value = 0; value < dtg.domain_size(); ++value) {
        Cost d = table.dist[value];
        if (d == 0 || d == INF_COST)
            continue;
        for (int edge : dtg.outgoing(value))
            consider(value, edge);
        for (int edge : dtg.wildcard_edges())
            consider(value, edge);
    }
    return next;
}

string dtg_to_dot(const Task &task, const DomainTransitionGraph &dtg) {
    ostringstream out;
    const Variable &var = task.variables()[dtg.variable()];
    out << "digraph \"dtg_" << var.name << "\" {\n";
    for (int value = 0; value < dtg.domain_size(); ++value)
        out << "  v" << value << " [label=\"" << value << "\"];\n";
    if (!dtg.wildcard_edges().empty())
        out << "  any [label=\"*\", shape=point];\n";
    for (const DtgEdge &e : dtg.edges()) {
        out << "  " << (e.from == WILDCARD ? string("any") : "v" + to_string(e.from))
            << " -> v" << e.to << " [label=\"" << task.op(e.op).name << " / " << e.cost
            << "\"];\n";
    }
    out << "}\n";
    return out.str();
}

string causal_graph_to_dot(const Task &task, const CausalGraph &cg) {
    ostringstream out;
    out << "digraph causal_graph {\n";
    for (int var = 0; var < cg.num_variables(); ++var)
        out << "  v" << var << " [label=\"" << task.variables()[var].name << "\"];\n";
    for (int var = 0; var < cg.num_variables(); ++var) {
        for (int succ : cg.successors(var))
            out << "  v" << var << " -> v" << succ << ";\n";
    }
    out << "}\n";
    return out.str();
}
}  // namespace evoplan
