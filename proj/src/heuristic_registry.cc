#include "evoplan/heuristic_registry.h"

#include "evoplan/expression.h"
#include "evoplan/genome.h"
#include "evoplan/heuristics_base.h"
#include "evoplan/heuristics_evolved.h"

#include <sstream>

using namespace std;

namespace evoplan {
vector<string> heuristic_names() {
    return {"blind", "goalcount", "hmax", "hadd", "ff", "dtg_sum", "dtg_max",
            "evolved_blind_medium_2", "evolved_ff_none_3", "evolved_blind_none_3",
            "evolved_blind_medium_conf"};
}

static array<double, Genome::NUM_WEIGHTS> parse_weights(const string &text) {
    array<double, Genome::NUM_WEIGHTS> weights{};
    stringstream in(text);
    string item;
    int n = 0;
    while (getline(in, item, ',')) {
        if (n == Genome::NUM_WEIGHTS)
            throw UnknownHeuristicError("weights spec needs exactly 4 values");
        size_t used = 0;
        try {
            weights[n] = stod(item, &used);
        } catch (const exception &) {
            used = 0;
        }
        if (used == 0 || used != item.size())
            throw UnknownHeuristicError("bad weight '" + item + "'");
        ++n;
    }
    if (n != Genome::NUM_WEIGHTS)
        throw UnknownHeuristicError("weights spec needs exactly 4 values");
    return weights;
}

unique_ptr<Heuristic> make_heuristic(const string &spec) {
    if (spec == "blind") return make_unique<BlindHeuristic>();
    if (spec == "goalcount") return make_unique<GoalCountHeuristic>();
    if (spec == "hmax") return make_unique<HMaxHeuristic>();
    if (spec == "hadd" || spec == "add") return make_unique<HAddHeuristic>();
    if (spec == "ff") return make_unique<FFHeuristic>();
    if (spec == "dtg_sum") return make_unique<DtgDistanceHeuristic>(false);
    if (spec == "dtg_max") return make_unique<DtgDistanceHeuristic>(true);
    if (spec == "evolved_blind_medium_2") return make_unique<EvolvedBlindMedium2>();
    if (spec == "evolved_ff_none_3") return make_unique<EvolvedFfNone3>();
    if (spec == "evolved_blind_none_3") return make_unique<EvolvedBlindNone3>();
    if (spec == "evolved_blind_medium_conf") return make_unique<EvolvedBlindMediumConf>();
    if (spec.starts_with("weights:")) {
        try {
            return make_genome_heuristic(Genome::from_weights(parse_weights(spec.substr(8))));
        } catch (const UnknownHeuristicError &) {
            throw;
        } catch (const invalid_argument &e) {
            throw UnknownHeuristicError(e.what());
        }
    }
    if (spec.starts_with("expr:"))
        return make_unique<ExpressionHeuristic>(spec.substr(5));
    if (spec.starts_with("genome:"))
        return make_genome_heuristic(load_genome_file(spec.substr(7)));
    string known;
    for (const string &name : heuristic_names())
        known += (known.empty() ? "" : ", ") + name;
    throw UnknownHeuristicError("unknown heuristic '" + spec + "' (known: " + known +
                                ", weights:..., expr:..., genome:<file>)");
}
}  // namespace evoplan
