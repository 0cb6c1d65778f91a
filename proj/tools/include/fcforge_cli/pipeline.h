#pragma once

#include "fcforge/call_parser.h"
#include "fcforge/jsonl.h"
#include "fcforge/splitter.h"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace fcforge::cli {

namespace fs = std::filesystem;

// Everything a stage may need. Paths in a config file are resolved against the
// directory holding that file.
struct PipelineConfig {
    fs::path corpus;
    fs::path inventory;
    fs::path normalization_map;  // optional
    fs::path prune_plan;         // optional
    fs::path serializer_config;  // optional, defaults otherwise
    fs::path predictions;        // evaluate input; pipeline falls back to reference predictions
    fs::path gold;               // evaluate input; defaults to <output_dir>/test.jsonl
    fs::path output_dir = "out";

    std::uint64_t seed = 0;
    std::uint64_t epoch = 0;
    std::size_t k = 5;
    SplitSpec split;
    parse_mode mode = parse_mode::deployment_aware;
    std::size_t token_budget = 2048;
    bool think = false;  // serialize samples that carry reasoning in the think variant
    unsigned jobs = 1;
};

PipelineConfig pipeline_config_from_json(const json & j, const fs::path & base_dir);
PipelineConfig load_pipeline_config(const fs::path & path);

// Stage parameters that affect outputs (no paths, no job count); hashed into manifests.
ordered_json stage_parameters(const PipelineConfig & config);

struct StageResult {
    std::string stage;
    ordered_json counts;
};

StageResult run_audit(const PipelineConfig & config);
StageResult run_repair(const PipelineConfig & config);
StageResult run_sample(const PipelineConfig & config);
StageResult run_serialize(const PipelineConfig & config);
StageResult run_split(const PipelineConfig & config);
StageResult run_evaluate(const PipelineConfig & config);
StageResult run_report(const PipelineConfig & config);
std::vector<StageResult> run_pipeline(const PipelineConfig & config);

// Entry point shared by the binary and the tests. Returns the process exit code:
// 0 success, 1 input or configuration error, 2 internal error.
int run(const std::vector<std::string> & args, std::ostream & out, std::ostream & err);

} // namespace fcforge::cli
