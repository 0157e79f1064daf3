#include "evoplan/search.h"

#include <algorithm>
#include <chrono>
#include <deque>
#include <functional>
#include <ostream>
#include <queue>
#include <unordered_set>

using namespace std;

namespace evoplan {
string to_string(SearchOutcome outcome) {
    switch (outcome) {
    case SearchOutcome::Solved: return "SOLVED";
    case SearchOutcome::OutOfTime: return "OUT_OF_TIME";
    case SearchOutcome::OutOfMemory: return "OUT_OF_MEMORY";
    case SearchOutcome::DeadEndFalse: return "DEAD_END_FALSE";
    case SearchOutcome::Crash: return "CRASH";
    case SearchOutcome::Unsolvable: return "UNSOLVABLE";
    }
    return "CRASH";
}

optional<SearchOutcome> parse_search_outcome(const string &text) {
    for (SearchOutcome o : {SearchOutcome::Solved, SearchOutcome::OutOfTime,
                            SearchOutcome::OutOfMemory, SearchOutcome::DeadEndFalse,
                            SearchOutcome::Crash, SearchOutcome::Unsolvable}) {
        if (to_string(o) == text)
            return o;
    }
    return nullopt;
}

namespace {
// Packed state store with duplicate detection on full assignments.
class StateRegistry {
public:
    explicit StateRegistry(size_t num_vars)
        : num_vars_(num_vars), ids_(0, Hash{this}, Equal{this}) {}

    // Returns (id, newly inserted).
    pair<int, bool> insert(const State &state) {
        int candidate = static_cast<int>(size_);
        data_.insert(data_.end(), state.values().begin(), state.values().end());
        auto [it, inserted] = ids_.insert(candidate);
        if (!inserted) {
            data_.resize(data_.size() - num_vars_);
            return {*it, false};
        }
        ++size_;
        return {candidate, true};
    }

    State state(int id) const {
        auto begin = data_.begin() + static_cast<ptrdiff_t>(id * num_vars_);
        return State(vector<int>(begin, begin + static_cast<ptrdiff_t>(num_vars_)));
    }

    size_t size() const { return size_; }

    uint64_t memory_bytes() const {
        return data_.capacity() * sizeof(int) + ids_.size() * (sizeof(int) + 2 * sizeof(void *)) +
               ids_.bucket_count() * sizeof(void *);
    }

private:
    span<const int> values(int id) const {
        return span<const int>(data_.data() + id * num_vars_, num_vars_);
    }

    struct Hash {
        const StateRegistry *registry;
        size_t operator()(int id) const { return hash_values(registry->values(id)); }
    };
    struct Equal {
        const StateRegistry *registry;
        bool operator()(int a, int b) const {
            auto va = registry->values(a);
            auto vb = registry->values(b);
            return equal(va.begin(), va.end(), vb.begin());
        }
    };

    size_t num_vars_;
    size_t size_ = 0;
    vector<int> data_;
    unordered_set<int, Hash, Equal> ids_;
};

class Budget {
public:
    Budget(const SearchLimits &limits, const Heuristic &heuristic)
        : limits_(limits),
          heuristic_(heuristic),
          start_(chrono::steady_clock::now()),
          heuristic_work_start_(heuristic.work()) {}

    void add_work(uint64_t units) { search_work_ += units; }

    double elapsed() const {
        if (limits_.clock == ClockMode::Work) {
            uint64_t work = search_work_ + (heuristic_.work() - heuristic_work_start_);
            return static_cast<double>(work) * limits_.seconds_per_work_unit;
        }
        return chrono::duration<double>(chrono::steady_clock::now() - start_).count();
    }

    bool out_of_time() const { return elapsed() > limits_.time_limit; }

    bool out_of_memory(uint64_t bytes) {
        peak_memory_ = max(peak_memory_, bytes);
        return bytes > limits_.memory_limit;
    }

    uint64_t peak_memory() const { return peak_memory_; }

private:
    const SearchLimits &limits_;
    const Heuristic &heuristic_;
    chrono::steady_clock::time_point start_;
    uint64_t heuristic_work_start_;
    uint64_t search_work_ = 0;
    uint64_t peak_memory_ = 0;
};

struct OpenEntry {
    Cost h;
    uint64_t seq;
    int id;
    bool operator>(const OpenEntry &other) const {
        return h != other.h ? h > other.h : seq > other.seq;
    }
};

// Breadth-first exploration from the initial state ignoring the heuristic.
// Returns Solved if a goal is reachable, Unsolvable if not, or a budget
// outcome.
SearchOutcome verify_reachability(const Task &task, Budget &budget) {
    StateRegistry seen(task.num_variables());
    deque<int> queue;
    seen.insert(task.initial_state());
    queue.push_back(0);
    uint64_t steps = 0;
    while (!queue.empty()) {
        int id = queue.front();
        queue.pop_front();
        State state = seen.state(id);
        if (task.is_goal(state))
            return SearchOutcome::Solved;
        for (int op : task.applicable_operators(state)) {
            budget.add_work(1);
            auto [succ_id, inserted] = seen.insert(task.apply(state, op));
            if (inserted)
                queue.push_back(succ_id);
        }
        if ((++steps & 63) == 0) {
            if (budget.out_of_time())
                return SearchOutcome::OutOfTime;
            if (budget.out_of_memory(seen.memory_bytes() + queue.size() * sizeof(int)))
                return SearchOutcome::OutOfMemory;
        }
    }
    return SearchOutcome::Unsolvable;
}
}  // namespace

SearchResult gbfs(const Task &task, Heuristic &heuristic, const SearchLimits &limits) {
    SearchResult result;
    Budget budget(limits, heuristic);
    auto finish = [&](SearchOutcome outcome) {
        result.outcome = outcome;
        result.wall_time = budget.elapsed();
        result.peak_memory = budget.peak_memory();
        return result;
    };

    try {
        if (!heuristic.initialized() || &heuristic.task() != &task)
            heuristic.initialize(task);
    } catch (const exception &err) {
        result.diagnostic = string("heuristic initialization failed: ") + err.what();
        return finish(SearchOutcome::Crash);
    }

    StateRegistry registry(task.num_variables());
    struct Node {
        int parent;
        int op;
    };
    vector<Node> nodes;
    vector<bool> closed;
    priority_queue<OpenEntry, vector<OpenEntry>, greater<>> open;
    uint64_t seq = 0;

    auto evaluate = [&](const State &state) {
        ++result.evaluations;
        return heuristic.evaluate(state);
    };
    auto memory_in_use = [&]() {
        return registry.memory_bytes() + nodes.capacity() * sizeof(Node) + closed.capacity() / 8 +
               open.size() * sizeof(OpenEntry);
    };

    try {
        const State &init = task.initial_state();
        registry.insert(init);
        nodes.push_back({-1, -1});
        closed.push_back(false);
        HeuristicValue h0 = evaluate(init);
        if (h0.is_dead_end()) {
            result.dead_end_at_root = true;
            ++result.pruned_dead_ends;
        } else {
            open.push({h0.value(), seq++, 0});
        }

        while (!open.empty()) {
            OpenEntry entry = open.top();
            open.pop();
            if (closed[entry.id])
                continue;
            closed[entry.id] = true;
            State state = registry.state(entry.id);
            if (task.is_goal(state)) {
                vector<int> plan;
                for (int id = entry.id; nodes[id].parent != -1; id = nodes[id].parent)
                    plan.push_back(nodes[id].op);
                reverse(plan.begin(), plan.end());
                result.plan_cost = plan_cost(task, plan);
                result.plan = move(plan);
                return finish(SearchOutcome::Solved);
            }
            ++result.expansions;
            budget.add_work(1);
            for (int op : task.applicable_operators(state)) {
                ++result.generated;
                budget.add_work(1);
                auto [succ_id, inserted] = registry.insert(task.apply(state, op));
                if (!inserted)
                    continue;
                nodes.push_back({entry.id, op});
                closed.push_back(false);
                HeuristicValue h = evaluate(registry.state(succ_id));
                if (h.is_dead_end())
                    ++result.pruned_dead_ends;
                else
                    open.push({h.value(), seq++, succ_id});
                if (budget.out_of_time())
                    return finish(SearchOutcome::OutOfTime);
            }
            if (budget.out_of_memory(memory_in_use()))
                return finish(SearchOutcome::OutOfMemory);
            if (budget.out_of_time())
                return finish(SearchOutcome::OutOfTime);
        }
    } catch (const exception &err) {
        result.diagnostic = string("heuristic evaluation failed: ") + err.what();
        return finish(SearchOutcome::Crash);
    }

    if (result.pruned_dead_ends == 0)
        return finish(SearchOutcome::Unsolvable);
    if (!limits.verify_dead_ends) {
        result.diagnostic = "search space exhausted after dead-end pruning (not verified)";
        return finish(SearchOutcome::Unsolvable);
    }
    SearchOutcome check = verify_reachability(task, budget);
    if (check == SearchOutcome::Solved) {
        result.diagnostic = "heuristic reported a dead end on a state from which the goal is reachable";
        return finish(SearchOutcome::DeadEndFalse);
    }
    return finish(check);
}

PlanValidation validate_plan(const Task &task, span<const int> plan) {
    PlanValidation validation;
    State state = task.initial_state();
    for (size_t step = 0; step < plan.size(); ++step) {
        int op = plan[step];
        if (op < 0 || op >= task.num_operators()) {
            validation.failed_step = static_cast<int>(step);
            validation.reason = "step " + std::to_string(step) + ": operator id " +
                                std::to_string(op) + " out of range";
            return validation;
        }
        if (!task.is_applicable(state, op)) {
            validation.failed_step = static_cast<int>(step);
            validation.reason = "step " + std::to_string(step) + ": operator '" +
                                task.op(op).name + "' is not applicable";
            return validation;
        }
        state = task.apply(state, op);
    }
    if (!task.is_goal(state)) {
        validation.reason = "final state does not satisfy the goal";
        return validation;
    }
    validation.valid = true;
    return validation;
}

Cost plan_cost(const Task &task, span<const int> plan) {
    Cost total = 0;
    for (int op : plan)
        total = saturating_add(total, task.op(op).cost);
    return total;
}

void write_plan(ostream &out, const Task &task, span<const int> plan) {
    for (int op : plan)
        out << '(' << task.op(op).name << ")\n";
    out << "; cost = " << plan_cost(task, plan)
        << (task.is_unit_cost() ? " (unit cost)" : " (general cost)") << '\n';
}

OptimalCostOracle::OptimalCostOracle(const Task &task, size_t cap) {
    vector<vector<pair<size_t, Cost>>> reverse_edges;
    auto intern = [&](State state) -> pair<size_t, bool> {
        auto [it, inserted] = index_.try_emplace(state, states_.size());
        if (inserted) {
            if (states_.size() >= cap)
                throw OracleCapExceeded("reachable state space exceeds cap of " +
                                        std::to_string(cap) + " states");
            states_.push_back(move(state));
            reverse_edges.emplace_back();
        }
        return {it->second, inserted};
    };

    deque<size_t> frontier;
    intern(task.initial_state());
    frontier.push_back(0);
    while (!frontier.empty()) {
        size_t id = frontier.front();
        frontier.pop_front();
        for (int op : task.applicable_operators(states_[id])) {
            auto [succ, inserted] = intern(task.apply(states_[id], op));
            reverse_edges[succ].push_back({id, task.op(op).cost});
            if (inserted)
                frontier.push_back(succ);
        }
    }

    h_star_.assign(states_.size(), INF_COST);
    using Entry = pair<Cost, size_t>;
    priority_queue<Entry, vector<Entry>, greater<>> queue;
    for (size_t id = 0; id < states_.size(); ++id) {
        if (task.is_goal(states_[id])) {
            h_star_[id] = 0;
            queue.push({0, id});
        }
    }
    while (!queue.empty()) {
        auto [d, id] = queue.top();
        queue.pop();
        if (d != h_star_[id])
            continue;
        for (auto [pred, cost] : reverse_edges[id]) {
            Cost nd = saturating_add(d, cost);
            if (nd < h_star_[pred]) {
                h_star_[pred] = nd;
                queue.push({nd, pred});
            }
        }
    }
}

Cost OptimalCostOracle::h_star(const State &state) const {
    auto it = index_.find(state);
    if (it == index_.end())
        throw out_of_range("state not reachable from the initial state");
    return h_star_[it->second];
}

OptimalCostOracle optimal_cost_oracle(const Task &task, size_t cap) {
    return OptimalCostOracle(task, cap);
}
}  // namespace evoplan
