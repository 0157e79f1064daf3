#pragma once

#include "evoplan/llm.h"
#include "evoplan/qd.h"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace evoplan {

// Evolution run configuration (JSON object). Keys:
//   iterations, seed, grid [rows, cols], islands, migration_interval, alpha,
//   repair_budget, inspirations, workers,
//   mutator: "parametric" | "identity" | "llm",
//   seed_genome: "blind" | "ff" | path to a genome JSON file,
//   training: {"calibration": csv path} or {"manifest": manifest path},
//   limits: {clock: "work" | "wall", seconds_per_work_unit, memory_limit_mb,
//            budget_floor, budget_factor, calibration_time_limit},
//   llm: {generation: [...], repair: [...], prompts: dir}  (mutator "llm"),
//   output_dir.
// Relative paths resolve against the config file's directory.
struct RunConfig {
    EvolutionConfig evolution;
    std::string mutator = "parametric";
    std::string seed_genome = "blind";
    std::string calibration_path;
    std::string manifest_path;
    double calibration_time_limit = 1800;
    std::optional<ModelPool> pool;
    std::string prompts_dir;
    std::string output_dir = "evolve_out";
};

// Collects every validation problem; throws ConfigError listing all of them.
RunConfig parse_run_config(const nlohmann::json &j, const std::string &base_dir);
RunConfig load_run_config(const std::string &path);

// Genome for the configured seed; source genomes in LLM mode.
Genome seed_genome(const RunConfig &config);

struct RunSummary {
    Individual best;
    std::vector<int> repair_histogram;
    std::string run_log_path;
    std::string snapshot_path;
    std::string best_genome_path;
};

// Builds the training set, checks credentials in LLM mode, runs the loop and
// writes run_log.jsonl, archive_snapshot.json, best_genome.json and
// summary.json to output_dir. A non-null transport replaces HTTP in LLM
// mode.
RunSummary run_evolution(const RunConfig &config, ChatTransport *transport = nullptr);

}  // namespace evoplan
