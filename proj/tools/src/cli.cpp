#include "fcforge_cli/pipeline.h"

#include "fcforge/error.h"
#include "fcforge/fixtures.h"

#include <CLI11.hpp>

#include <cstdlib>
#include <functional>
#include <ostream>

namespace fcforge::cli {

namespace {

struct Flags {
    std::string config;
    std::string corpus, inventory, normalization_map, prune_plan, serializer_config, predictions, gold, output_dir;
    std::uint64_t seed = 0;
    std::uint64_t epoch = 0;
    std::size_t k = 5;
    std::size_t token_budget = 2048;
    std::string mode;
    unsigned jobs = 1;
    bool think = false;
};

struct FixtureFlags {
    std::string dir = "fixture";
    fixtures::CorpusOptions corpus{.rows = 2000,
                                   .seed = 1,
                                   .negative_share = 0.1,
                                   .null_enum_rows = 240,
                                   .variant_enum_rows = 60,
                                   .alias_rows = 40,
                                   .noisy_rows = 40,
                                   .empty_queries = 12,
                                   .reasoning_share = 0.25,
                                   .silent_negatives = 8};
};

// Flag > environment > config file > defaults.
PipelineConfig resolve_config(const CLI::App & app, const Flags & f) {
    PipelineConfig c;
    std::string config_path = f.config;
    if (config_path.empty()) {
        if (const char * env = std::getenv("FCFORGE_CONFIG")) {
            config_path = env;
        }
    }
    if (!config_path.empty()) {
        c = load_pipeline_config(config_path);
    }
    const auto pick = [&](const char * flag, const std::string & value, const char * env, fs::path & slot) {
        if (app.count(flag) > 0) {
            slot = value;
        } else if (const char * e = std::getenv(env); e && *e) {
            slot = e;
        }
    };
    pick("--corpus", f.corpus, "FCFORGE_CORPUS", c.corpus);
    pick("--inventory", f.inventory, "FCFORGE_INVENTORY", c.inventory);
    pick("--normalization-map", f.normalization_map, "FCFORGE_NORMALIZATION_MAP", c.normalization_map);
    pick("--prune-plan", f.prune_plan, "FCFORGE_PRUNE_PLAN", c.prune_plan);
    pick("--serializer-config", f.serializer_config, "FCFORGE_SERIALIZER_CONFIG", c.serializer_config);
    pick("--predictions", f.predictions, "FCFORGE_PREDICTIONS", c.predictions);
    pick("--gold", f.gold, "FCFORGE_GOLD", c.gold);
    pick("--out", f.output_dir, "FCFORGE_OUTPUT_DIR", c.output_dir);
    if (app.count("--seed")) {
        c.seed = f.seed;
    }
    if (app.count("--epoch")) {
        c.epoch = f.epoch;
    }
    if (app.count("--k")) {
        c.k = f.k;
    }
    if (app.count("--budget")) {
        c.token_budget = f.token_budget;
    }
    if (app.count("--jobs")) {
        c.jobs = f.jobs;
    }
    if (app.count("--think")) {
        c.think = f.think;
    }
    if (app.count("--mode")) {
        auto m = parse_mode_from_string(f.mode);
        if (!m) {
            throw_config("unknown mode '" + f.mode + "' (expected strict or deployment-aware)");
        }
        c.mode = *m;
    }
    if (c.jobs == 0) {
        c.jobs = 1;
    }
    return c;
}

void print_result(std::ostream & out, const StageResult & r) {
    out << r.stage << ": " << dump_compact(r.counts) << "\n";
}

void write_fixture(const FixtureFlags & f, std::ostream & out) {
    const fs::path dir = f.dir;
    write_file_atomic(dir / "corpus.jsonl", fixtures::corpus_jsonl(f.corpus));
    write_file_atomic(dir / "inventory.json", dump_pretty(inventory_to_json(fixtures::raw_inventory())));
    write_file_atomic(dir / "normalization_map.json", dump_pretty(to_json(fixtures::normalization_map())));
    write_file_atomic(dir / "prune_plan.json", dump_pretty(to_json(fixtures::prune_plan())));
    ordered_json config{{"corpus", "corpus.jsonl"},
                        {"inventory", "inventory.json"},
                        {"normalization_map", "normalization_map.json"},
                        {"prune_plan", "prune_plan.json"},
                        {"output_dir", "out"},
                        {"seed", 0},
                        {"k", 5},
                        {"split", {{"ratios", {0.8099, 0.0900, 0.1001}}, {"keys", {"dialect", "domain"}}}},
                        {"mode", "deployment-aware"},
                        {"token_budget", 2048},
                        {"think", true}};
    write_file_atomic(dir / "config.json", dump_pretty(config));
    out << "fixture: wrote " << f.corpus.rows << " rows to " << dir.string() << "\n";
}

} // namespace

int run(const std::vector<std::string> & args, std::ostream & out, std::ostream & err) {
    CLI::App app{"fcforge: function-calling dataset curation, serialization and evaluation"};
    app.name(args.empty() ? "fcforge" : fs::path(args.front()).filename().string());
    app.require_subcommand(1);
    app.set_version_flag("--version", "fcforge 0.1.0");

    Flags f;
    app.add_option("--config", f.config, "Pipeline config JSON (env FCFORGE_CONFIG)");
    app.add_option("--seed", f.seed, "Seed for every random choice");
    app.add_option("--jobs", f.jobs, "Worker threads within a stage");
    app.add_option("--corpus", f.corpus, "Corpus JSONL (env FCFORGE_CORPUS)");
    app.add_option("--inventory", f.inventory, "Tool inventory JSON (env FCFORGE_INVENTORY)");
    app.add_option("--normalization-map", f.normalization_map, "Enum normalization map JSON");
    app.add_option("--prune-plan", f.prune_plan, "Prune/merge plan JSON");
    app.add_option("--serializer-config", f.serializer_config, "Serializer config JSON");
    app.add_option("--predictions", f.predictions, "Predictions JSONL {id, output}");
    app.add_option("--gold", f.gold, "Gold JSONL for evaluate (default <out>/test.jsonl)");
    app.add_option("--out", f.output_dir, "Output directory (env FCFORGE_OUTPUT_DIR)");
    app.add_option("--epoch", f.epoch, "Sampler epoch");
    app.add_option("--k", f.k, "Tools per prompt");
    app.add_option("--budget", f.token_budget, "Context budget in tokens");
    app.add_option("--mode", f.mode, "Parse mode: strict | deployment-aware");
    app.add_flag("--think", f.think, "Serialize reasoning traces in the think variant");

    using Runner = std::function<StageResult(const PipelineConfig &)>;
    const std::vector<std::tuple<const char *, const char *, Runner>> stages = {
        {"audit", "Validate corpus against the inventory and report defects", run_audit},
        {"repair", "Normalize enums, prune/merge tools, drop invalid samples", run_repair},
        {"sample", "Draw the offered tool subset for every sample", run_sample},
        {"serialize", "Render samples in the control-token chat format", run_serialize},
        {"split", "Stratified train/val/test split", run_split},
        {"evaluate", "Parse and score predictions against the gold test split", run_evaluate},
        {"report", "Re-render report.md from report.json", run_report},
    };
    std::string chosen;
    for (const auto & [name, help, fn] : stages) {
        auto * sub = app.add_subcommand(name, help);
        sub->fallthrough();
        sub->callback([&chosen, n = name] { chosen = n; });
    }
    app.add_subcommand("pipeline", "Run every stage in order")->fallthrough()->callback([&] { chosen = "pipeline"; });

    FixtureFlags ff;
    auto * fixture = app.add_subcommand("fixture", "Write the synthetic fixture corpus, inventory and config");
    fixture->add_option("--dir", ff.dir, "Destination directory")->capture_default_str();
    fixture->add_option("--rows", ff.corpus.rows, "Corpus rows")->capture_default_str();
    fixture->add_option("--null-enum-rows", ff.corpus.null_enum_rows, "Rows with a null optional enum")
        ->capture_default_str();
    fixture->add_option("--fixture-seed", ff.corpus.seed, "Generator seed")->capture_default_str();
    fixture->callback([&] { chosen = "fixture"; });

    std::vector<const char *> argv;
    for (const auto & a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForVersion & e) {
        out << e.what() << "\n";
        return 0;
    } catch (const CLI::ParseError & e) {
        err << dump_compact(ordered_json{{"error", {{"kind", "usage_error"}, {"message", e.what()}}}}) << "\n";
        return 1;
    }

    try {
        if (chosen == "fixture") {
            write_fixture(ff, out);
            return 0;
        }
        const auto config = resolve_config(app, f);
        if (chosen == "pipeline") {
            for (const auto & r : run_pipeline(config)) {
                print_result(out, r);
            }
            return 0;
        }
        for (const auto & [name, help, fn] : stages) {
            if (chosen == name) {
                print_result(out, fn(config));
            }
        }
        return 0;
    } catch (const error & e) {
        err << dump_compact(ordered_json{
                   {"error", {{"kind", to_string(e.kind())}, {"command", chosen}, {"message", e.what()}}}})
            << "\n";
        return e.kind() == error_kind::internal ? 2 : 1;
    } catch (const std::exception & e) {
        err << dump_compact(
                   ordered_json{{"error", {{"kind", "internal_error"}, {"command", chosen}, {"message", e.what()}}}})
            << "\n";
        return 2;
    }
}

} // namespace fcforge::cli
