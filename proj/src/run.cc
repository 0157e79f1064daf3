#include "evoplan/run.h"

#include <filesystem>
#include <fstream>
#include <set>

using namespace std;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace evoplan {
static string resolve(const string &base_dir, const string &path) {
    fs::path p(path);
    if (p.is_absolute() || base_dir.empty())
        return p.string();
    return (fs::path(base_dir) / p).lexically_normal().string();
}

namespace {
class Checker {
public:
    explicit Checker(const json &j) : j_(j) {}

    template<typename T>
    void number(const string &key, T &out, double lo, double hi) {
        if (!j_.contains(key))
            return;
        const json &v = j_[key];
        bool integral = is_integral_v<T>;
        if (!v.is_number() || (integral && !v.is_number_integer())) {
            problems.push_back(key + " must be " + (integral ? "an integer" : "a number"));
            return;
        }
        double d = v.get<double>();
        if (d < lo || d > hi) {
            problems.push_back(key + " is out of range");
            return;
        }
        out = v.get<T>();
    }

    void text(const string &key, string &out) {
        if (!j_.contains(key))
            return;
        if (!j_[key].is_string())
            problems.push_back(key + " must be a string");
        else
            out = j_[key];
    }

    void known(const set<string> &keys, const string &where) {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!keys.count(it.key()))
                problems.push_back("unknown key " + where + it.key());
        }
    }

    vector<string> problems;

private:
    const json &j_;
};
}  // namespace

RunConfig parse_run_config(const json &j, const string &base_dir) {
    if (!j.is_object())
        throw ConfigError("configuration must be a JSON object");
    RunConfig config;
    Checker c(j);
    c.known({"iterations", "seed", "grid", "islands", "migration_interval", "alpha",
             "repair_budget", "inspirations", "workers", "mutator",
             "seed_genome", "training", "limits", "llm", "output_dir"},
            "");
    EvolutionConfig &ev = config.evolution;
    c.number("iterations", ev.iterations, 0, 1e7);
    c.number("seed", ev.seed, 0, 1.8e19);
    c.number("islands", ev.islands, 1, 1000);
    c.number("migration_interval", ev.migration_interval, 1, 1e7);
    c.number("alpha", ev.fitness.alpha, 0, 1);
    c.number("repair_budget", ev.repair_budget, 0, 100);
    c.number("inspirations", ev.inspirations, 0, 100);
    c.number("workers", ev.fitness.workers, 1, 1024);
    if (j.contains("grid")) {
        const json &g = j["grid"];
        if (!g.is_array() || g.size() != 2 || !g[0].is_number_integer() ||
            !g[1].is_number_integer() || g[0].get<int>() < 1 || g[1].get<int>() < 1) {
            c.problems.push_back("grid must be [rows, cols] with positive integers");
        } else {
            ev.rows = g[0];
            ev.cols = g[1];
        }
    }
    c.text("mutator", config.mutator);
    if (config.mutator != "parametric" && config.mutator != "identity" && config.mutator != "llm")
        c.problems.push_back("mutator must be parametric, identity or llm");
    c.text("seed_genome", config.seed_genome);
    if (config.seed_genome != "blind" && config.seed_genome != "ff") {
        config.seed_genome = resolve(base_dir, config.seed_genome);
        if (!fs::exists(config.seed_genome))
            c.problems.push_back("seed_genome file '" + config.seed_genome + "' does not exist");
    }
    c.text("output_dir", config.output_dir);
    config.output_dir = resolve(base_dir, config.output_dir);

    if (!j.contains("training") || !j["training"].is_object()) {
        c.problems.push_back("training must be an object with calibration or manifest");
    } else {
        const json &t = j["training"];
        Checker tc(t);
        tc.known({"calibration", "manifest"}, "training.");
        tc.text("calibration", config.calibration_path);
        tc.text("manifest", config.manifest_path);
        if (config.calibration_path.empty() == config.manifest_path.empty())
            tc.problems.push_back("training needs exactly one of calibration, manifest");
        for (string *p : {&config.calibration_path, &config.manifest_path}) {
            if (p->empty())
                continue;
            *p = resolve(base_dir, *p);
            if (!fs::exists(*p))
                tc.problems.push_back("training file '" + *p + "' does not exist");
        }
        for (auto &p : tc.problems)
            c.problems.push_back(p);
    }

    SearchLimits &limits = ev.fitness.limits;
    if (j.contains("limits")) {
        const json &l = j["limits"];
        if (!l.is_object()) {
            c.problems.push_back("limits must be an object");
        } else {
            Checker lc(l);
            lc.known({"clock", "seconds_per_work_unit", "memory_limit_mb", "budget_floor",
                      "budget_factor", "calibration_time_limit"},
                     "limits.");
            string clock = "wall";
            lc.text("clock", clock);
            if (clock == "work")
                limits.clock = ClockMode::Work;
            else if (clock != "wall")
                lc.problems.push_back("limits.clock must be wall or work");
            lc.number("seconds_per_work_unit", limits.seconds_per_work_unit, 1e-12, 1e6);
            double mb = static_cast<double>(limits.memory_limit >> 20);
            lc.number("memory_limit_mb", mb, 1, 1e9);
            limits.memory_limit = static_cast<uint64_t>(mb) << 20;
            lc.number("budget_floor", ev.fitness.budget_floor, 1.000001, 1e9);
            lc.number("budget_factor", ev.fitness.budget_factor, 0, 1e9);
            lc.number("calibration_time_limit", config.calibration_time_limit, 1e-6, 1e9);
            for (auto &p : lc.problems)
                c.problems.push_back(p);
        }
    }

    if (j.contains("llm")) {
        const json &l = j["llm"];
        if (!l.is_object()) {
            c.problems.push_back("llm must be an object");
        } else {
            json pool_json = l;
            pool_json.erase("prompts");
            try {
                config.pool = ModelPool::from_json(pool_json);
            } catch (const invalid_argument &e) {
                c.problems.push_back(e.what());
            }
            if (l.contains("prompts") && l["prompts"].is_string())
                config.prompts_dir = resolve(base_dir, l["prompts"].get<string>());
            else
                c.problems.push_back("llm.prompts must name the prompt template directory");
        }
    }
    if (config.mutator == "llm") {
        if (!j.contains("llm"))
            c.problems.push_back("mutator llm needs an llm section");
        if (config.seed_genome != "blind" && config.seed_genome != "ff" &&
            fs::exists(config.seed_genome)) {
            try {
                if (load_genome_file(config.seed_genome).kind != Genome::Kind::Source)
                    c.problems.push_back("mutator llm needs a source seed genome");
            } catch (const exception &e) {
                c.problems.push_back(e.what());
            }
        }
    }

    if (!c.problems.empty()) {
        string msg = "invalid configuration:";
        for (const auto &p : c.problems)
            msg += "\n  " + p;
        throw ConfigError(msg);
    }
    return config;
}

RunConfig load_run_config(const string &path) {
    ifstream in(path);
    if (!in)
        throw ConfigError("cannot open configuration '" + path + "'");
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded())
        throw ConfigError("configuration '" + path + "' is not valid JSON");
    return parse_run_config(j, fs::path(path).parent_path().string());
}

Genome seed_genome(const RunConfig &config) {
    bool source = config.mutator == "llm";
    if (config.seed_genome == "blind")
        return source ? Genome::from_source("blind") : Genome::blind();
    if (config.seed_genome == "ff")
        return source ? Genome::from_source("ff") : Genome::ff();
    return load_genome_file(config.seed_genome);
}

static void write_json(const string &path, const json &j) {
    ofstream out(path);
    if (!out)
        throw runtime_error("cannot write '" + path + "'");
    out << j.dump(2) << "\n";
}

RunSummary run_evolution(const RunConfig &config, ChatTransport *transport) {
    unique_ptr<ChatTransport> http;
    unique_ptr<Mutator> mutator;
    if (config.mutator == "llm") {
        check_credentials(*config.pool);
        PromptTemplates templates = PromptTemplates::load(config.prompts_dir);
        if (!transport) {
            http = make_unique<HttpChatTransport>();
            transport = http.get();
        }
        mutator = make_unique<LlmMutator>(*config.pool, templates, *transport,
                                          config.evolution.seed + 1);
    } else if (config.mutator == "identity") {
        mutator = make_unique<IdentityMutator>();
    } else {
        mutator = make_unique<ParametricMutator>(config.evolution.seed + 1);
    }

    fs::create_directories(config.output_dir);
    TrainingSet training;
    if (!config.calibration_path.empty()) {
        training = load_calibration(config.calibration_path);
    } else {
        SearchLimits limits = config.evolution.fitness.limits;
        limits.time_limit = config.calibration_time_limit;
        training = calibrate(read_manifest(config.manifest_path), limits);
        save_calibration(training, config.output_dir + "/calibration.csv");
    }

    RunSummary summary;
    summary.run_log_path = config.output_dir + "/run_log.jsonl";
    summary.snapshot_path = config.output_dir + "/archive_snapshot.json";
    summary.best_genome_path = config.output_dir + "/best_genome.json";
    ofstream log(summary.run_log_path);
    if (!log)
        throw runtime_error("cannot write '" + summary.run_log_path + "'");
    EvolutionResult result = evolve_loop(seed_genome(config), *mutator, training,
                                         config.evolution, &log);
    write_json(summary.snapshot_path, {{"iteration", config.evolution.iterations},
                                       {"islands", result.islands.to_json()}});
    save_genome_file(result.best.genome, summary.best_genome_path);
    summary.best = result.best;
    summary.repair_histogram = result.repair_histogram;
    json hist = json::object();
    for (size_t k = 0; k + 1 < result.repair_histogram.size(); ++k)
        hist[k == 0 ? "no_repair" : "repaired_" + to_string(k)] = result.repair_histogram[k];
    hist["failed"] = result.repair_histogram.back();
    write_json(config.output_dir + "/summary.json",
               {{"best", result.best.to_json()},
                {"seed_score", *result.seed.score},
                {"repair_histogram", hist},
                {"training_tasks", training.num_tasks()}});
    return summary;
}
}  // namespace evoplan
