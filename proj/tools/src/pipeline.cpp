#include "fcforge_cli/pipeline.h"

#include "fcforge/audit.h"
#include "fcforge/digest.h"
#include "fcforge/error.h"
#include "fcforge/evaluator.h"
#include "fcforge/parallel.h"
#include "fcforge/sampler.h"
#include "fcforge/serializer.h"
#include "fcforge/text.h"

#include <map>
#include <set>
#include <unordered_map>

namespace fcforge::cli {

namespace {

fs::path resolve(const json & j, const char * key, const fs::path & base) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
        return {};
    }
    if (!it->is_string()) {
        throw_config(std::string("config: '") + key + "' must be a path string");
    }
    fs::path p = it->get<std::string>();
    return p.is_absolute() || base.empty() ? p : base / p;
}

json parse_json(const std::string & content, const fs::path & path) {
    try {
        return json::parse(content);
    } catch (const json::parse_error & e) {
        throw_input(path.filename().string() + ": " + e.what());
    }
}

json load_json_file(const fs::path & path) {
    return parse_json(read_file(path), path);
}

SerializerConfig load_serializer(const PipelineConfig & c) {
    if (c.serializer_config.empty()) {
        return {};
    }
    auto cfg = serializer_config_from_json(load_json_file(c.serializer_config));
    cfg.validate();
    return cfg;
}

std::string to_jsonl(const std::vector<ordered_json> & rows) {
    std::string out;
    for (const auto & r : rows) {
        out += dump_compact(r);
        out += '\n';
    }
    return out;
}

// Writes outputs atomically and the stage manifest last, so a manifest only exists
// for a completed stage.
class Stage {
  public:
    Stage(std::string name, const PipelineConfig & config) : name_(std::move(name)), config_(config) {}

    std::string input(const fs::path & path) {
        auto content = read_file(path);
        inputs_[path.filename().string()] = sha256_hex(content);
        return content;
    }

    void output(const std::string & filename, const std::string & content) {
        write_file_atomic(config_.output_dir / filename, content);
        outputs_[filename] = sha256_hex(content);
    }

    StageResult finish(ordered_json counts) {
        ordered_json m;
        m["stage"] = name_;
        m["seed"] = config_.seed;
        m["config_hash"] = sha256_hex(dump_compact(stage_parameters(config_)));
        m["inputs"] = inputs_;
        m["outputs"] = outputs_;
        m["counts"] = counts;
        write_file_atomic(config_.output_dir / (name_ + ".manifest.json"), dump_pretty(m));
        return {name_, std::move(counts)};
    }

  private:
    std::string name_;
    const PipelineConfig & config_;
    std::map<std::string, std::string> inputs_;
    std::map<std::string, std::string> outputs_;
};

std::vector<ToolSchema> read_inventory(Stage & stage, const fs::path & path) {
    if (path.empty()) {
        throw_config("no inventory configured");
    }
    return inventory_from_json(parse_json(stage.input(path), path));
}

Corpus read_corpus(Stage & stage, const fs::path & path) {
    if (path.empty()) {
        throw_config("no corpus configured");
    }
    return corpus_from_jsonl(parse_jsonl(stage.input(path)));
}

// A sampled record: the sample plus the names of the tools offered in its prompt.
struct Offered {
    Sample sample;
    std::vector<std::string> tools;
    json row;
};

std::vector<Offered> read_offered(Stage & stage, const fs::path & path) {
    const auto doc = parse_jsonl(stage.input(path));
    if (!doc.bad_rows.empty()) {
        throw_input(path.filename().string() + ":" + std::to_string(doc.bad_rows.front().line) + ": " +
                    doc.bad_rows.front().reason);
    }
    std::vector<Offered> out;
    out.reserve(doc.rows.size());
    for (const auto & row : doc.rows) {
        Offered o;
        try {
            o.sample = sample_from_json(row.value);
        } catch (const error & e) {
            throw_input(path.filename().string() + ":" + std::to_string(row.line) + ": " + e.what());
        }
        auto it = row.value.find("offered_tools");
        if (it == row.value.end() || !it->is_array()) {
            throw_input(path.filename().string() + ":" + std::to_string(row.line) + ": missing offered_tools");
        }
        for (const auto & name : *it) {
            if (!name.is_string()) {
                throw_input(path.filename().string() + ":" + std::to_string(row.line) + ": offered_tools must hold names");
            }
            o.tools.push_back(name.get<std::string>());
        }
        o.row = row.value;
        out.push_back(std::move(o));
    }
    return out;
}

ordered_json sampled_row(const Sample & s, const std::vector<std::string> & tools) {
    auto j = to_json(s);
    j["offered_tools"] = tools;
    return j;
}

const fs::path & out_dir(const PipelineConfig & c) {
    return c.output_dir;
}

} // namespace

PipelineConfig pipeline_config_from_json(const json & j, const fs::path & base_dir) {
    if (!j.is_object()) {
        throw_config("config must be a JSON object");
    }
    PipelineConfig c;
    try {
        c.corpus = resolve(j, "corpus", base_dir);
        c.inventory = resolve(j, "inventory", base_dir);
        c.normalization_map = resolve(j, "normalization_map", base_dir);
        c.prune_plan = resolve(j, "prune_plan", base_dir);
        c.serializer_config = resolve(j, "serializer_config", base_dir);
        c.predictions = resolve(j, "predictions", base_dir);
        c.gold = resolve(j, "gold", base_dir);
        if (auto p = resolve(j, "output_dir", base_dir); !p.empty()) {
            c.output_dir = p;
        }
        c.seed = j.value("seed", c.seed);
        c.epoch = j.value("epoch", c.epoch);
        c.k = j.value("k", c.k);
        c.token_budget = j.value("token_budget", c.token_budget);
        c.think = j.value("think", c.think);
        c.jobs = j.value("jobs", c.jobs);
        if (auto it = j.find("mode"); it != j.end()) {
            auto m = parse_mode_from_string(it->get<std::string>());
            if (!m) {
                throw_config("config: unknown mode '" + it->get<std::string>() + "'");
            }
            c.mode = *m;
        }
        if (auto it = j.find("split"); it != j.end()) {
            if (auto r = it->find("ratios"); r != it->end()) {
                c.split.ratios = r->get<std::array<double, 3>>();
            }
            if (auto k = it->find("keys"); k != it->end()) {
                c.split.keys.clear();
                for (const auto & name : *k) {
                    c.split.keys.push_back(strata_key_from_string(name.get<std::string>()));
                }
            }
        }
    } catch (const json::exception & e) {
        throw_config(std::string("config: ") + e.what());
    }
    c.split.validate();
    return c;
}

PipelineConfig load_pipeline_config(const fs::path & path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error & e) {
        throw_config(path.string() + ": " + e.what());
    }
    return pipeline_config_from_json(j, path.parent_path());
}

ordered_json stage_parameters(const PipelineConfig & c) {
    ordered_json j;
    j["seed"] = c.seed;
    j["epoch"] = c.epoch;
    j["k"] = c.k;
    j["split"] = {{"ratios", c.split.ratios}, {"keys", ordered_json::array()}};
    for (auto key : c.split.keys) {
        j["split"]["keys"].push_back(to_string(key));
    }
    j["mode"] = to_string(c.mode);
    j["token_budget"] = c.token_budget;
    j["think"] = c.think;
    j["serializer"] = to_json(load_serializer(c));
    return j;
}

StageResult run_audit(const PipelineConfig & c) {
    Stage stage("audit", c);
    const auto corpus = read_corpus(stage, c.corpus);
    const auto inventory = read_inventory(stage, c.inventory);
    AuditOptions options;
    options.token_budget = c.token_budget;
    options.serializer = load_serializer(c);
    options.jobs = c.jobs;
    const auto report = audit(corpus, inventory, options);
    stage.output("audit.json", dump_pretty(to_json(report)));
    stage.output("audit.txt", render_audit_text(report));
    return stage.finish({{"total_samples", report.total_samples},
                         {"rejected_rows", report.rejected_rows.size()},
                         {"samples_restored_by_fix", report.samples_restored_by_fix},
                         {"dead_tools", report.dead_tools.size()},
                         {"oversized_prompts", report.oversized_prompts}});
}

StageResult run_repair(const PipelineConfig & c) {
    Stage stage("repair", c);
    const auto corpus = read_corpus(stage, c.corpus);
    auto inventory = read_inventory(stage, c.inventory);
    std::vector<Sample> samples = corpus.samples;

    std::size_t normalized = 0;
    if (!c.normalization_map.empty()) {
        const auto map = normalization_map_from_json(parse_json(stage.input(c.normalization_map), c.normalization_map));
        map.validate(inventory);
        for (auto & s : samples) {
            auto fixed = normalize_sample(s, map);
            normalized += fixed == s ? 0 : 1;
            s = std::move(fixed);
        }
    }

    std::size_t pruned_dropped = 0, rewritten = 0;
    const std::size_t tools_before = inventory.size();
    if (!c.prune_plan.empty()) {
        const auto plan = prune_plan_from_json(parse_json(stage.input(c.prune_plan), c.prune_plan));
        plan.validate(inventory);
        auto result = apply_prune(samples, inventory, plan);
        samples = std::move(result.samples);
        inventory = std::move(result.inventory);
        pruned_dropped = result.dropped_samples;
        rewritten = result.rewritten_samples;
    }

    // Keep only what validates under the repaired enum rule.
    std::vector<char> keep(samples.size(), 1);
    parallel_for(samples.size(), c.jobs, [&](std::size_t i) {
        const auto & s = samples[i];
        if (s.requires_function && !validate_call(*s.target, inventory, enum_rule::none_is_valid).valid()) {
            keep[i] = 0;
        }
    });
    std::vector<ordered_json> rows;
    std::size_t invalid = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (keep[i]) {
            rows.push_back(to_json(samples[i]));
        } else {
            ++invalid;
        }
    }
    stage.output("repaired.jsonl", to_jsonl(rows));
    stage.output("inventory.repaired.json", dump_pretty(inventory_to_json(inventory)));
    return stage.finish({{"input_rows", corpus.samples.size() + corpus.rejected.size()},
                         {"rejected_rows", corpus.rejected.size()},
                         {"normalized_samples", normalized},
                         {"pruned_samples", pruned_dropped},
                         {"rewritten_samples", rewritten},
                         {"invalid_samples", invalid},
                         {"output_samples", rows.size()},
                         {"tools_before", tools_before},
                         {"tools_after", inventory.size()}});
}

StageResult run_sample(const PipelineConfig & c) {
    Stage stage("sample", c);
    const auto corpus = corpus_from_jsonl(parse_jsonl(stage.input(out_dir(c) / "repaired.jsonl")));
    if (!corpus.rejected.empty()) {
        throw_input("repaired.jsonl:" + std::to_string(corpus.rejected.front().line) + ": " +
                    corpus.rejected.front().reason);
    }
    const auto inventory = read_inventory(stage, out_dir(c) / "inventory.repaired.json");
    const SamplerConfig sc{c.k, c.seed, c.epoch};
    std::vector<ordered_json> rows(corpus.samples.size());
    parallel_for(corpus.samples.size(), c.jobs, [&](std::size_t i) {
        const auto & s = corpus.samples[i];
        std::optional<std::string_view> target;
        if (s.target) {
            target = s.target->tool_name;
        }
        std::vector<std::string> names;
        for (auto idx : sample_tool_indices(inventory, target, s.requires_function, s.id, sc)) {
            names.push_back(inventory[idx].name);
        }
        rows[i] = sampled_row(s, names);
    });
    std::size_t positives = 0;
    for (const auto & s : corpus.samples) {
        positives += s.requires_function;
    }
    stage.output("sampled.jsonl", to_jsonl(rows));
    return stage.finish({{"samples", rows.size()}, {"positives", positives}, {"negatives", rows.size() - positives},
                         {"k", c.k}});
}

StageResult run_serialize(const PipelineConfig & c) {
    Stage stage("serialize", c);
    const auto records = read_offered(stage, out_dir(c) / "sampled.jsonl");
    const auto inventory = read_inventory(stage, out_dir(c) / "inventory.repaired.json");
    const auto config = load_serializer(c);
    const auto counter = default_token_counter(config);
    std::vector<ordered_json> rows(records.size());
    std::vector<char> think(records.size(), 0), over(records.size(), 0);
    parallel_for(records.size(), c.jobs, [&](std::size_t i) {
        const auto & r = records[i];
        std::vector<ToolSchema> tools;
        for (const auto & name : r.tools) {
            const auto * t = find_tool(inventory, name);
            if (!t) {
                throw_input("sample '" + r.sample.id + "' offers unknown tool '" + name + "'");
            }
            tools.push_back(*t);
        }
        const bool use_think = c.think && r.sample.reasoning && !is_blank(*r.sample.reasoning);
        const auto ex = use_think ? serialize_think(r.sample, *r.sample.reasoning, tools, config, counter)
                                  : serialize(r.sample, tools, config, counter);
        think[i] = use_think;
        over[i] = !check_context_fit(ex, c.token_budget).fits;
        rows[i] = to_json(ex);
    });
    std::size_t n_think = 0, n_over = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        n_think += think[i];
        n_over += over[i];
    }
    stage.output("serialized.jsonl", to_jsonl(rows));
    return stage.finish({{"examples", rows.size()}, {"think_examples", n_think}, {"over_budget", n_over},
                         {"token_budget", c.token_budget}});
}

StageResult run_split(const PipelineConfig & c) {
    Stage stage("split", c);
    const auto records = read_offered(stage, out_dir(c) / "sampled.jsonl");
    const auto serialized_doc = parse_jsonl(stage.input(out_dir(c) / "serialized.jsonl"));
    std::unordered_map<std::string, SerializedExample> serialized;
    for (const auto & row : serialized_doc.rows) {
        auto ex = serialized_from_json(row.value);
        auto id = ex.sample_id;
        serialized.emplace(std::move(id), std::move(ex));
    }
    std::vector<Sample> samples;
    samples.reserve(records.size());
    for (const auto & r : records) {
        if (!serialized.count(r.sample.id)) {
            throw_input("serialized.jsonl has no record for sample '" + r.sample.id + "'");
        }
        samples.push_back(r.sample);
    }
    SplitSpec spec = c.split;
    spec.seed = c.seed;
    const auto result = stratified_split(samples, spec);
    static constexpr const char * names[] = {"train", "val", "test"};
    for (std::size_t p = 0; p < 3; ++p) {
        std::vector<ordered_json> rows;
        rows.reserve(result.members[p].size());
        for (auto i : result.members[p]) {
            auto row = sampled_row(records[i].sample, records[i].tools);
            row["serialized"] = to_json(serialized.at(records[i].sample.id));
            rows.push_back(std::move(row));
        }
        stage.output(std::string(names[p]) + ".jsonl", to_jsonl(rows));
    }
    stage.output("split_manifest.json", dump_pretty(split_manifest(samples, spec, result)));
    return stage.finish({{"train", result.train().size()},
                         {"val", result.val().size()},
                         {"test", result.test().size()},
                         {"strata", result.strata.size()},
                         {"warnings", result.warnings.size()}});
}

StageResult run_evaluate(const PipelineConfig & c) {
    Stage stage("evaluate", c);
    const fs::path gold_path = c.gold.empty() ? out_dir(c) / "test.jsonl" : c.gold;
    if (c.predictions.empty()) {
        throw_config("evaluate needs a predictions file");
    }
    const auto gold = read_offered(stage, gold_path);
    const auto doc = parse_jsonl(stage.input(c.predictions));
    if (!doc.bad_rows.empty()) {
        throw_input(c.predictions.filename().string() + ":" + std::to_string(doc.bad_rows.front().line) + ": " +
                    doc.bad_rows.front().reason);
    }
    std::unordered_map<std::string, std::string> outputs;
    for (const auto & row : doc.rows) {
        const auto id = row.value.find("id");
        const auto output = row.value.find("output");
        if (id == row.value.end() || !id->is_string() || output == row.value.end() || !output->is_string()) {
            throw_input(c.predictions.filename().string() + ":" + std::to_string(row.line) +
                        ": prediction rows need string 'id' and 'output'");
        }
        if (!outputs.emplace(id->get<std::string>(), output->get<std::string>()).second) {
            throw_input("duplicate prediction for id '" + id->get<std::string>() + "'");
        }
    }
    for (const auto & g : gold) {
        if (!outputs.count(g.sample.id)) {
            throw_input("predictions missing id '" + g.sample.id + "'");
        }
    }

    const auto tokens = ParserTokens::from(load_serializer(c));
    std::vector<ParsedOutput> parsed(gold.size());
    std::vector<RecordScore> scores(gold.size());
    parallel_for(gold.size(), c.jobs, [&](std::size_t i) {
        parsed[i] = parse_output(outputs.at(gold[i].sample.id), tokens, c.mode);
        const std::set<std::string> offered(gold[i].tools.begin(), gold[i].tools.end());
        scores[i] = score_record(gold[i].sample, parsed[i], offered);
    });
    std::vector<Sample> samples;
    samples.reserve(gold.size());
    for (const auto & g : gold) {
        samples.push_back(g.sample);
    }
    auto report = aggregate(scores, samples);
    report.mode = to_string(c.mode);

    std::vector<ordered_json> parsed_rows, score_rows;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        ordered_json p;
        p["id"] = gold[i].sample.id;
        p.update(to_json(parsed[i]));
        parsed_rows.push_back(std::move(p));
        const auto & s = scores[i];
        score_rows.push_back(ordered_json{{"id", s.sample_id},
                                          {"class", to_string(s.klass)},
                                          {"parsed", to_string(s.parsed)},
                                          {"name_correct", s.name_correct},
                                          {"arg_precision", s.arg_precision},
                                          {"arg_recall", s.arg_recall},
                                          {"arg_f1", s.arg_f1},
                                          {"arg_exact", s.arg_exact},
                                          {"key_f1", s.key_f1},
                                          {"full_match", s.full_match},
                                          {"had_think_block", s.had_think_block}});
    }
    const auto md = render_report(report, report_format::markdown);
    stage.output("report.json", render_report(report, report_format::json));
    stage.output("report.md", md);
    stage.output("parsed.jsonl", to_jsonl(parsed_rows));
    stage.output("scores.jsonl", to_jsonl(score_rows));
    ordered_json counts{{"records", report.n},
                        {"positives", report.n_positive},
                        {"negatives", report.n_negative},
                        {"mode", report.mode}};
    counts["error_counts"] = ordered_json::object();
    for (auto k : all_error_classes) {
        counts["error_counts"][to_string(k)] = report.error_counts.at(k);
    }
    return stage.finish(std::move(counts));
}

StageResult run_report(const PipelineConfig & c) {
    Stage stage("report", c);
    const auto path = out_dir(c) / "report.json";
    const auto report = metrics_report_from_json(parse_json(stage.input(path), path));
    stage.output("report.md", render_report(report, report_format::markdown));
    return stage.finish({{"records", report.n}});
}

std::vector<StageResult> run_pipeline(const PipelineConfig & config) {
    // Fail before any stage runs when a declared input is missing or unreadable.
    for (const auto * p : {&config.corpus, &config.inventory}) {
        if (p->empty()) {
            throw_config("pipeline needs both a corpus and an inventory");
        }
    }
    for (const auto * p : {&config.corpus, &config.inventory, &config.normalization_map, &config.prune_plan,
                           &config.serializer_config, &config.predictions}) {
        if (!p->empty() && !fs::is_regular_file(*p)) {
            throw_input("missing input file " + p->string());
        }
    }
    load_inventory(config.inventory);
    if (!config.normalization_map.empty()) {
        normalization_map_from_json(load_json_file(config.normalization_map));
    }
    if (!config.prune_plan.empty()) {
        prune_plan_from_json(load_json_file(config.prune_plan));
    }
    load_serializer(config);

    std::vector<StageResult> results;
    results.push_back(run_audit(config));
    results.push_back(run_repair(config));
    results.push_back(run_sample(config));
    results.push_back(run_serialize(config));
    results.push_back(run_split(config));

    PipelineConfig eval = config;
    if (eval.predictions.empty()) {
        // No model outputs supplied: score the gold completions themselves, which
        // exercises parse + score end to end and must come out all-correct.
        const auto doc = parse_jsonl(read_file(config.output_dir / "test.jsonl"));
        std::vector<ordered_json> rows;
        for (const auto & row : doc.rows) {
            const auto ex = serialized_from_json(row.value.at("serialized"));
            rows.push_back(ordered_json{{"id", ex.sample_id}, {"output", std::string(ex.completion())}});
        }
        eval.predictions = config.output_dir / "predictions.reference.jsonl";
        write_file_atomic(eval.predictions, to_jsonl(rows));
    }
    results.push_back(run_evaluate(eval));
    results.push_back(run_report(eval));
    return results;
}

} // namespace fcforge::cli
