#pragma once

#include "evoplan/heuristic.h"

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace evoplan {

class UnknownHeuristicError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Accepted specs: a built-in name (see heuristic_names()), "add" as an alias
// of "hadd", "weights:w1,w2,w3,w4", "expr:<program>", "genome:<json file>".
std::unique_ptr<Heuristic> make_heuristic(const std::string &spec);

std::vector<std::string> heuristic_names();

}  // namespace evoplan
