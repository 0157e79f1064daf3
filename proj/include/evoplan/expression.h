#pragma once

#include "evoplan/heuristic.h"

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace evoplan {

// A small arithmetic language over heuristic features, used as the program
// text of source genomes:
//
//   # comment lines start with '#'
//   ff + 0.5 * max(goalcount, dtg_sum) / cmin
//
// Features: blind, goalcount, hmax, hadd, ff, dtg_sum, dtg_max,
// evolved_blind_medium_2, evolved_ff_none_3, evolved_blind_none_3,
// evolved_blind_medium_conf. Constants: cmin (minimum positive action cost),
// num_goals, num_vars, number literals. Functions: min, max (variadic),
// ceil, floor, round, abs, log, sqrt. Operators: + - * / with the usual
// precedence, unary minus, parentheses.
//
// If any referenced feature reports a dead end, so does the program.
// Otherwise the value is rounded to the nearest integer and clamped at 0.

class ExpressionError : public std::runtime_error {
public:
    ExpressionError(int line, int column, const std::string &what);
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

class ExpressionHeuristic : public Heuristic {
public:
    // Throws ExpressionError on syntax errors or unknown names.
    explicit ExpressionHeuristic(std::string source);
    ~ExpressionHeuristic() override;

    std::string name() const override { return "expr"; }
    const std::string &source() const { return source_; }
    // Distinct feature names the program reads, in first-use order.
    std::vector<std::string> features() const;

protected:
    void do_initialize(const Task &task) override;
    // Throws std::runtime_error on non-finite intermediate values.
    HeuristicValue compute(const State &state) override;

private:
    struct Program;
    std::string source_;
    std::unique_ptr<Program> program_;
};

}  // namespace evoplan
