#include "evoplan/sas_io.h"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

using namespace std;

namespace evoplan {
SasParseError::SasParseError(int line, const string &what)
    : SasError("line " + to_string(line) + ": " + what), line_(line) {
}

UnsupportedVersionError::UnsupportedVersionError(int version)
    : SasError("unsupported SAS file version " + to_string(version) +
               " (expected 3)"),
      version_(version) {
}

UnsupportedFeatureError::UnsupportedFeatureError(int line, const string &feature)
    : SasError("line " + to_string(line) + ": unsupported feature: " + feature) {
}

namespace {
class LineReader {
public:
    explicit LineReader(istream &in) : in_(in) {}

    bool at_end() {
        skip_blank();
        return !has_pending_;
    }

    string next_line(const char *what) {
        skip_blank();
        if (!has_pending_)
            throw SasParseError(line_no_ + 1, string("unexpected end of file, expected ") + what);
        has_pending_ = false;
        return pending_;
    }

    void expect(const string &marker) {
        string line = next_line(marker.c_str());
        if (line == "begin_rule")
            throw UnsupportedFeatureError(line_no_, "axiom rule (begin_rule)");
        if (line != marker)
            throw SasParseError(line_no_, "expected '" + marker + "', found '" + line + "'");
    }

    int next_int(const char *what) {
        return parse_int(next_line(what), what);
    }

    // Whitespace-separated integers of a single line.
    vector<int> next_ints(const char *what) {
        string line = next_line(what);
        vector<int> result;
        istringstream tokens(line);
        string token;
        while (tokens >> token)
            result.push_back(parse_int(token, what));
        return result;
    }

    int line() const { return line_no_; }

private:
    int parse_int(const string &token, const char *what) const {
        int value = 0;
        auto [ptr, ec] = from_chars(token.data(), token.data() + token.size(), value);
        if (ec != errc() || ptr != token.data() + token.size())
            throw SasParseError(line_no_, string("expected integer for ") + what +
                                ", found '" + token + "'");
        return value;
    }

    void skip_blank() {
        while (!has_pending_) {
            string raw;
            if (!getline(in_, raw))
                return;
            ++line_no_;
            while (!raw.empty() && (raw.back() == '\r' || raw.back() == ' ' || raw.back() == '\t'))
                raw.pop_back();
            if (raw.empty())
                continue;
            pending_ = move(raw);
            has_pending_ = true;
        }
    }

    istream &in_;
    string pending_;
    bool has_pending_ = false;
    int line_no_ = 0;
};

void check_var(const LineReader &reader, const vector<Variable> &variables, int var, int value,
               bool allow_none = false) {
    if (var < 0 || var >= static_cast<int>(variables.size()))
        throw SasParseError(reader.line(), "variable index " + to_string(var) + " out of range");
    if (allow_none && value == -1)
        return;
    if (value < 0 || value >= variables[var].domain_size)
        throw SasParseError(reader.line(), "value " + to_string(value) +
                            " out of range for variable " + to_string(var));
}

PartialAssignment make_partial(const LineReader &reader, vector<Fact> facts, const char *what) {
    try {
        return PartialAssignment(move(facts));
    } catch (const invalid_argument &err) {
        throw SasParseError(reader.line(), string(what) + ": " + err.what());
    }
}
}  // namespace

Task parse_sas(istream &in) {
    LineReader reader(in);

    reader.expect("begin_version");
    int version = reader.next_int("version");
    if (version != 3)
        throw UnsupportedVersionError(version);
    reader.expect("end_version");

    reader.expect("begin_metric");
    int metric = reader.next_int("metric flag");
    if (metric != 0 && metric != 1)
        throw SasParseError(reader.line(), "metric flag must be 0 or 1");
    reader.expect("end_metric");

    int num_vars = reader.next_int("variable count");
    if (num_vars < 0)
        throw SasParseError(reader.line(), "negative variable count");
    vector<Variable> variables;
    variables.reserve(num_vars);
    for (int var = 0; var < num_vars; ++var) {
        reader.expect("begin_variable");
        Variable v;
        v.name = reader.next_line("variable name");
        int axiom_layer = reader.next_int("axiom layer");
        if (axiom_layer != -1)
            throw UnsupportedFeatureError(reader.line(), "derived variable (axiom layer " +
                                          to_string(axiom_layer) + ")");
        v.domain_size = reader.next_int("domain size");
        if (v.domain_size < 1)
            throw SasParseError(reader.line(), "domain size must be positive");
        for (int value = 0; value < v.domain_size; ++value)
            v.value_names.push_back(reader.next_line("value name"));
        reader.expect("end_variable");
        variables.push_back(move(v));
    }

    int num_mutexes = reader.next_int("mutex group count");
    for (int i = 0; i < num_mutexes; ++i) {
        reader.expect("begin_mutex_group");
        int size = reader.next_int("mutex group size");
        for (int j = 0; j < size; ++j) {
            vector<int> pair = reader.next_ints("mutex fact");
            if (pair.size() != 2)
                throw SasParseError(reader.line(), "mutex fact must be 'var value'");
            check_var(reader, variables, pair[0], pair[1]);
        }
        reader.expect("end_mutex_group");
    }

    reader.expect("begin_state");
    vector<int> init(num_vars);
    for (int var = 0; var < num_vars; ++var) {
        init[var] = reader.next_int("initial state value");
        check_var(reader, variables, var, init[var]);
    }
    reader.expect("end_state");

    reader.expect("begin_goal");
    int num_goals = reader.next_int("goal count");
    vector<Fact> goal_facts;
    for (int i = 0; i < num_goals; ++i) {
        vector<int> pair = reader.next_ints("goal fact");
        if (pair.size() != 2)
            throw SasParseError(reader.line(), "goal fact must be 'var value'");
        check_var(reader, variables, pair[0], pair[1]);
        goal_facts.push_back({pair[0], pair[1]});
    }
    PartialAssignment goal = make_partial(reader, move(goal_facts), "goal");
    reader.expect("end_goal");

    int num_ops = reader.next_int("operator count");
    vector<Operator> operators;
    operators.reserve(max(num_ops, 0));
    for (int i = 0; i < num_ops; ++i) {
        reader.expect("begin_operator");
        Operator op;
        op.name = reader.next_line("operator name");
        vector<Fact> pre;
        vector<Fact> eff;
        int num_prevail = reader.next_int("prevail count");
        for (int j = 0; j < num_prevail; ++j) {
            vector<int> pair = reader.next_ints("prevail condition");
            if (pair.size() != 2)
                throw SasParseError(reader.line(), "prevail condition must be 'var value'");
            check_var(reader, variables, pair[0], pair[1]);
            pre.push_back({pair[0], pair[1]});
        }
        int num_effects = reader.next_int("effect count");
        for (int j = 0; j < num_effects; ++j) {
            vector<int> fields = reader.next_ints("pre-post effect");
            if (fields.empty())
                throw SasParseError(reader.line(), "empty effect line");
            if (fields[0] != 0)
                throw UnsupportedFeatureError(reader.line(), "conditional effect");
            if (fields.size() != 4)
                throw SasParseError(reader.line(), "effect must be '0 var pre post'");
            int var = fields[1];
            check_var(reader, variables, var, fields[2], true);
            check_var(reader, variables, var, fields[3]);
            if (fields[2] != -1)
                pre.push_back({var, fields[2]});
            eff.push_back({var, fields[3]});
        }
        int cost = reader.next_int("operator cost");
        if (cost < 0)
            throw SasParseError(reader.line(), "negative operator cost");
        op.cost = metric ? cost : 1;
        op.precondition = make_partial(reader, move(pre), "operator precondition");
        op.effect = make_partial(reader, move(eff), "operator effect");
        if (op.effect.empty())
            throw SasParseError(reader.line(), "operator '" + op.name + "' has no effect");
        reader.expect("end_operator");
        operators.push_back(move(op));
    }

    if (!reader.at_end()) {
        string line = reader.next_line("axiom count");
        if (line == "begin_rule")
            throw UnsupportedFeatureError(reader.line(), "axiom rule (begin_rule)");
        int num_axioms = 0;
        auto [ptr, ec] = from_chars(line.data(), line.data() + line.size(), num_axioms);
        if (ec != errc() || ptr != line.data() + line.size())
            throw SasParseError(reader.line(), "expected axiom count, found '" + line + "'");
        if (num_axioms != 0)
            throw UnsupportedFeatureError(reader.line(), to_string(num_axioms) + " axiom rule(s)");
        if (!reader.at_end()) {
            string trailing = reader.next_line("end of file");
            if (trailing == "begin_rule")
                throw UnsupportedFeatureError(reader.line(), "axiom rule (begin_rule)");
            throw SasParseError(reader.line(), "trailing content '" + trailing + "'");
        }
    }

    try {
        return Task(move(variables), move(operators), State(move(init)), move(goal), metric == 1);
    } catch (const invalid_argument &err) {
        throw SasParseError(reader.line(), err.what());
    }
}

Task parse_sas(const string &text) {
    istringstream in(text);
    return parse_sas(in);
}

Task load_sas_file(const filesystem::path &path) {
    ifstream in(path);
    if (!in)
        throw SasError("cannot open SAS file '" + path.string() + "'");
    return parse_sas(in);
}

void serialize_sas(const Task &task, ostream &out) {
    out << "begin_version\n3\nend_version\n";
    out << "begin_metric\n" << (task.metric_uses_costs() ? 1 : 0) << "\nend_metric\n";
    out << task.num_variables() << '\n';
    for (const Variable &var : task.variables()) {
        out << "begin_variable\n" << var.name << "\n-1\n" << var.domain_size << '\n';
        for (const string &name : var.value_names)
            out << name << '\n';
        out << "end_variable\n";
    }
    out << "0\n";
    out << "begin_state\n";
    for (int value : task.initial_state().values())
        out << value << '\n';
    out << "end_state\n";
    out << "begin_goal\n" << task.goal().size() << '\n';
    for (const Fact &fact : task.goal())
        out << fact.var << ' ' << fact.value << '\n';
    out << "end_goal\n";
    out << task.num_operators() << '\n';
    for (const Operator &op : task.operators()) {
        out << "begin_operator\n" << op.name << '\n';
        vector<Fact> prevail;
        for (const Fact &fact : op.precondition) {
            if (!op.effect.assigns(fact.var))
                prevail.push_back(fact);
        }
        out << prevail.size() << '\n';
        for (const Fact &fact : prevail)
            out << fact.var << ' ' << fact.value << '\n';
        out << op.effect.size() << '\n';
        for (const Fact &fact : op.effect)
            out << "0 " << fact.var << ' ' << op.precondition.value_of(fact.var) << ' '
                << fact.value << '\n';
        out << op.cost << '\n';
        out << "end_operator\n";
    }
    out << "0\n";
}

string serialize_sas(const Task &task) {
    ostringstream out;
    serialize_sas(task, out);
    return out.str();
}
}  // namespace evoplan
