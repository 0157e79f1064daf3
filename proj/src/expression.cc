#include "evoplan/expression.h"

#include "evoplan/heuristics_base.h"
#include "evoplan/heuristics_evolved.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <map>

using namespace std;

namespace evoplan {
ExpressionError::ExpressionError(int line, int column, const string &what)
    : runtime_error("line " + to_string(line) + ", column " + to_string(column) + ": " + what),
      line_(line),
      column_(column) {
}

namespace {
unique_ptr<Heuristic> make_feature(const string &name) {
    if (name == "blind") return make_unique<BlindHeuristic>();
    if (name == "goalcount") return make_unique<GoalCountHeuristic>();
    if (name == "hmax") return make_unique<HMaxHeuristic>();
    if (name == "hadd") return make_unique<HAddHeuristic>();
    if (name == "ff") return make_unique<FFHeuristic>();
    if (name == "dtg_sum") return make_unique<DtgDistanceHeuristic>(false);
    if (name == "dtg_max") return make_unique<DtgDistanceHeuristic>(true);
    if (name == "evolved_blind_medium_2") return make_unique<EvolvedBlindMedium2>();
    if (name == "evolved_ff_none_3") return make_unique<EvolvedFfNone3>();
    if (name == "evolved_blind_none_3") return make_unique<EvolvedBlindNone3>();
    if (name == "evolved_blind_medium_conf") return make_unique<EvolvedBlindMediumConf>();
    return nullptr;
}

enum class Constant { MinCost, NumGoals, NumVars };

const map<string, Constant> &constants() {
    static const map<string, Constant> table = {
        {"cmin", Constant::MinCost}, {"num_goals", Constant::NumGoals}, {"num_vars", Constant::NumVars}};
    return table;
}

struct Function {
    int min_args;
    int max_args;  // -1: variadic
};

const map<string, Function> &functions() {
    static const map<string, Function> table = {
        {"min", {1, -1}},  {"max", {1, -1}},  {"ceil", {1, 1}}, {"floor", {1, 1}},
        {"round", {1, 1}}, {"abs", {1, 1}},   {"log", {1, 1}},  {"sqrt", {1, 1}}};
    return table;
}

struct Node {
    enum class Kind { Number, Feature, Constant, Negate, Binary, Call } kind;
    double number = 0;
    int index = -1;
    Constant constant = Constant::MinCost;
    char op = 0;
    string function;
    vector<unique_ptr<Node>> children;
};

struct Token {
    enum class Kind { Number, Name, Symbol, End } kind;
    string text;
    double number = 0;
    int line = 1;
    int column = 1;
};

vector<Token> tokenize(const string &source) {
    vector<Token> tokens;
    int line = 1;
    int column = 1;
    size_t i = 0;
    auto advance = [&]() {
        if (source[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
        ++i;
    };
    while (i < source.size()) {
        char c = source[i];
        if (c == '#') {
            while (i < source.size() && source[i] != '\n')
                advance();
            continue;
        }
        if (isspace(static_cast<unsigned char>(c))) {
            advance();
            continue;
        }
        Token token;
        token.line = line;
        token.column = column;
        if (isdigit(static_cast<unsigned char>(c)) || c == '.') {
            size_t start = i;
            while (i < source.size() &&
                   (isdigit(static_cast<unsigned char>(source[i])) || source[i] == '.' ||
                    source[i] == 'e' || source[i] == 'E' ||
                    ((source[i] == '+' || source[i] == '-') && i > start &&
                     (source[i - 1] == 'e' || source[i - 1] == 'E'))))
                advance();
            token.kind = Token::Kind::Number;
            token.text = source.substr(start, i - start);
            size_t used = 0;
            try {
                token.number = stod(token.text, &used);
            } catch (const exception &) {
                used = 0;
            }
            if (used != token.text.size())
                throw ExpressionError(token.line, token.column, "malformed number '" + token.text + "'");
        } else if (isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = i;
            while (i < source.size() &&
                   (isalnum(static_cast<unsigned char>(source[i])) || source[i] == '_'))
                advance();
            token.kind = Token::Kind::Name;
            token.text = source.substr(start, i - start);
        } else if (string("+-*/(),").find(c) != string::npos) {
            token.kind = Token::Kind::Symbol;
            token.text = string(1, c);
            advance();
        } else {
            throw ExpressionError(line, column, string("unexpected character '") + c + "'");
        }
        tokens.push_back(move(token));
    }
    Token end;
    end.kind = Token::Kind::End;
    end.line = line;
    end.column = column;
    tokens.push_back(end);
    return tokens;
}

class Parser {
public:
    Parser(vector<Token> tokens, vector<string> &features)
        : tokens_(move(tokens)), features_(features) {}

    unique_ptr<Node> parse_program() {
        if (peek().kind == Token::Kind::End)
            throw ExpressionError(peek().line, peek().column, "empty program");
        auto node = parse_sum();
        if (peek().kind != Token::Kind::End)
            fail("unexpected '" + peek().text + "' after expression");
        return node;
    }

private:
    const Token &peek() const { return tokens_[pos_]; }
    Token take() { return tokens_[pos_++]; }
    bool accept(const string &symbol) {
        if (peek().kind == Token::Kind::Symbol && peek().text == symbol) {
            ++pos_;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const string &what) const {
        throw ExpressionError(peek().line, peek().column, what);
    }
    void expect(const string &symbol) {
        if (!accept(symbol))
            fail("expected '" + symbol + "'" +
                 (peek().kind == Token::Kind::End ? string(" before end of program")
                                                  : ", found '" + peek().text + "'"));
    }

    unique_ptr<Node> binary(char op, unique_ptr<Node> lhs, unique_ptr<Node> rhs) {
        auto node = make_unique<Node>();
        node->kind = Node::Kind::Binary;
        node->op = op;
        node->children.push_back(move(lhs));
        node->children.push_back(move(rhs));
        return node;
    }

    unique_ptr<Node> parse_sum() {
        auto lhs = parse_product();
        while (true) {
            if (accept("+"))
                lhs = binary('+', move(lhs), parse_product());
            else if (accept("-"))
                lhs = binary('-', move(lhs), parse_product());
            else
                return lhs;
        }
    }

    unique_ptr<Node> parse_product() {
        auto lhs = parse_unary();
        while (true) {
            if (accept("*"))
                lhs = binary('*', move(lhs), parse_unary());
            else if (accept("/"))
                lhs = binary('/', move(lhs), parse_unary());
            else
                return lhs;
        }
    }

    unique_ptr<Node> parse_unary() {
        if (accept("-")) {
            auto node = make_unique<Node>();
            node->kind = Node::Kind::Negate;
            node->children.push_back(parse_unary());
            return node;
        }
        if (accept("+"))
            return parse_unary();
        return parse_primary();
    }

    unique_ptr<Node> parse_primary() {
        if (accept("(")) {
            auto inner = parse_sum();
            expect(")");
            return inner;
        }
        const Token &token = peek();
        if (token.kind == Token::Kind::Number) {
            auto node = make_unique<Node>();
            node->kind = Node::Kind::Number;
            node->number = take().number;
            return node;
        }
        if (token.kind != Token::Kind::Name)
            fail(token.kind == Token::Kind::End ? "unexpected end of program"
                                                : "unexpected '" + token.text + "'");
        Token name = take();
        auto node = make_unique<Node>();
        if (accept("(")) {
            auto fn = functions().find(name.text);
            if (fn == functions().end())
                throw ExpressionError(name.line, name.column, "unknown function '" + name.text + "'");
            node->kind = Node::Kind::Call;
            node->function = name.text;
            if (!accept(")")) {
                do {
                    node->children.push_back(parse_sum());
                } while (accept(","));
                expect(")");
            }
            int n = static_cast<int>(node->children.size());
            if (n < fn->second.min_args || (fn->second.max_args >= 0 && n > fn->second.max_args))
                throw ExpressionError(name.line, name.column,
                                      "wrong number of arguments to '" + name.text + "'");
            return node;
        }
        if (auto c = constants().find(name.text); c != constants().end()) {
            node->kind = Node::Kind::Constant;
            node->constant = c->second;
            return node;
        }
        if (!make_feature(name.text))
            throw ExpressionError(name.line, name.column, "unknown name '" + name.text + "'");
        node->kind = Node::Kind::Feature;
        auto it = find(features_.begin(), features_.end(), name.text);
        node->index = static_cast<int>(it - features_.begin());
        if (it == features_.end())
            features_.push_back(name.text);
        return node;
    }

    vector<Token> tokens_;
    size_t pos_ = 0;
    vector<string> &features_;
};
}  // namespace

struct ExpressionHeuristic::Program {
    unique_ptr<Node> root;
    vector<string> feature_names;
    vector<unique_ptr<Heuristic>> features;
    vector<double> feature_values;
    double min_cost = 1;
    double num_goals = 0;
    double num_vars = 0;

    double eval(const Node &node) const {
        switch (node.kind) {
        case Node::Kind::Number: return node.number;
        case Node::Kind::Feature: return feature_values[node.index];
        case Node::Kind::Constant:
            switch (node.constant) {
            case Constant::MinCost: return min_cost;
            case Constant::NumGoals: return num_goals;
            case Constant::NumVars: return num_vars;
            }
            return 0;
        case Node::Kind::Negate: return -eval(*node.children[0]);
        case Node::Kind::Binary: {
            double a = eval(*node.children[0]);
            double b = eval(*node.children[1]);
            switch (node.op) {
            case '+': return a + b;
            case '-': return a - b;
            case '*': return a * b;
            default:
                if (b == 0)
                    throw runtime_error("division by zero");
                return a / b;
            }
        }
        case Node::Kind::Call: {
            vector<double> args;
            for (const auto &child : node.children)
                args.push_back(eval(*child));
            const string &f = node.function;
            if (f == "min") return *min_element(args.begin(), args.end());
            if (f == "max") return *max_element(args.begin(), args.end());
            if (f == "ceil") return ceil(args[0]);
            if (f == "floor") return floor(args[0]);
            if (f == "round") return round(args[0]);
            if (f == "abs") return fabs(args[0]);
            if (f == "sqrt") {
                if (args[0] < 0)
                    throw runtime_error("sqrt of negative value");
                return sqrt(args[0]);
            }
            if (args[0] <= 0)
                throw runtime_error("log of nonpositive value");
            return log(args[0]);
        }
        }
        return 0;
    }
};

ExpressionHeuristic::ExpressionHeuristic(string source)
    : source_(move(source)), program_(make_unique<Program>()) {
    program_->root = Parser(tokenize(source_), program_->feature_names).parse_program();
    for (const string &name : program_->feature_names)
        program_->features.push_back(make_feature(name));
    program_->feature_values.assign(program_->features.size(), 0);
}

ExpressionHeuristic::~ExpressionHeuristic() = default;

vector<string> ExpressionHeuristic::features() const {
    return program_->feature_names;
}

void ExpressionHeuristic::do_initialize(const Task &task) {
    program_->min_cost = static_cast<double>(task.min_positive_cost());
    program_->num_goals = static_cast<double>(task.goal().size());
    program_->num_vars = static_cast<double>(task.num_variables());
    for (auto &feature : program_->features) {
        uint64_t before = feature->work();
        feature->initialize(task);
        add_work(feature->work() - before);
    }
}

HeuristicValue ExpressionHeuristic::compute(const State &state) {
    for (size_t i = 0; i < program_->features.size(); ++i) {
        Heuristic &feature = *program_->features[i];
        uint64_t before = feature.work();
        HeuristicValue value = feature.evaluate(state);
        add_work(feature.work() - before);
        if (value.is_dead_end())
            return HeuristicValue::dead_end();
        program_->feature_values[i] = static_cast<double>(value.value());
    }
    double value = program_->eval(*program_->root);
    if (!isfinite(value))
        throw runtime_error("program produced a non-finite value");
    if (value <= 0)
        return 0;
    if (value >= static_cast<double>(MAX_FINITE_COST))
        return MAX_FINITE_COST;
    return static_cast<Cost>(llround(value));
}
}  // namespace evoplan
