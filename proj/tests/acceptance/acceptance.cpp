// Acceptance suite. Prints one "PASS|FAIL <n> <name>: <detail>" line per criterion.
// Usage: fcforge_acceptance [--criterion N]

#include "fcforge/audit.h"
#include "fcforge/call_parser.h"
#include "fcforge/digest.h"
#include "fcforge/evaluator.h"
#include "fcforge/fixtures.h"
#include "fcforge/jsonl.h"
#include "fcforge/sampler.h"
#include "fcforge/serializer.h"
#include "fcforge/splitter.h"
#include "fcforge/text.h"
#include "fcforge_cli/pipeline.h"
#include "generators.h"
#include "oracles.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>

using namespace fcforge;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::string fmt(const char * format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

// 1. Enum-fix restoration on 5,000 rows with 1,200 null optional enums.
Outcome enum_fix_restoration() {
    fixtures::CorpusOptions o;
    o.rows = 5000;
    o.null_enum_rows = 1200;
    o.negative_share = 0.1;
    const auto text = fixtures::corpus_jsonl(o);
    const auto inventory = fixtures::core_inventory();

    const auto t0 = clock_type::now();
    const auto corpus = corpus_from_jsonl(parse_jsonl(text));
    const auto report = audit(corpus, inventory, {});
    const double elapsed = seconds_since(t0);

    std::size_t oracle_restored = 0;
    for (const auto & s : corpus.samples) {
        if (s.target && !oracle::call_valid(*s.target, inventory, false) && oracle::call_valid(*s.target, inventory, true)) {
            ++oracle_restored;
        }
    }
    Outcome out;
    out.pass = report.samples_restored_by_fix == 1200 && oracle_restored == 1200 && elapsed < 5.0;
    out.detail = fmt("restored=%zu oracle=%zu time=%.3fs", report.samples_restored_by_fix, oracle_restored, elapsed);
    return out;
}

// 2. Sampler law over 100,000 draws.
Outcome sampler_law() {
    const auto inventory = fixtures::core_inventory();
    const SamplerConfig config{5, 2024, 0};
    const std::size_t draws = 100000;
    auto run = [&](std::vector<std::size_t> & position, std::size_t & missing, std::size_t & duplicates) {
        std::string stream;
        for (std::size_t i = 0; i < draws; ++i) {
            const auto & target = inventory[i % inventory.size()].name;
            const auto idx = sample_tool_indices(inventory, std::string_view(target), true, "d" + std::to_string(i), config);
            std::set<std::size_t> distinct(idx.begin(), idx.end());
            duplicates += distinct.size() != idx.size() || idx.size() != config.k;
            bool found = false;
            for (std::size_t p = 0; p < idx.size(); ++p) {
                stream += std::to_string(idx[p]) + ',';
                if (inventory[idx[p]].name == target) {
                    ++position[p];
                    found = true;
                }
            }
            missing += !found;
            stream += ';';
        }
        return sha256_hex(stream);
    };
    std::vector<std::size_t> position(5), unused(5);
    std::size_t missing = 0, duplicates = 0, m2 = 0, d2 = 0;
    const auto first = run(position, missing, duplicates);
    const auto second = run(unused, m2, d2);
    const double chi2 = oracle::chi_squared_uniform(position);
    Outcome out;
    // df = 4, alpha = 0.001
    out.pass = missing == 0 && duplicates == 0 && chi2 < 18.467 && first == second;
    out.detail = fmt("missing=%zu duplicates=%zu chi2=%.3f reproducible=%s", missing, duplicates, chi2,
                     first == second ? "yes" : "no");
    return out;
}

// 3. Serialize -> strict parse round trip on 10,000 random samples.
Outcome round_trip() {
    const SerializerConfig config;
    const auto tokens = ParserTokens::from(config);
    const auto inventory = fixtures::core_inventory();
    std::mt19937_64 rng(314159);
    std::size_t mismatches = 0, tricky = 0;
    for (std::size_t i = 0; i < 10000; ++i) {
        const auto & tool = inventory[rng() % inventory.size()];
        const auto s = fixtures::random_positive(rng, tool, "rt" + std::to_string(i), config.tokens);
        const auto ex = serialize(s, sample_tools(inventory, s, {5, 7, 0}), config);
        const auto completion = std::string(ex.completion());
        tricky += completion.find('"', completion.find('{') + 1) != std::string::npos ||
                  count_occurrences(completion, "{") > 1;
        const auto parsed = parse_output(completion, tokens, parse_mode::strict);
        if (parsed.kind != parse_kind::parsed_call || !(*parsed.call == *s.target)) {
            ++mismatches;
        }
    }
    Outcome out;
    out.pass = mismatches == 0 && tricky > 0;
    out.detail = fmt("mismatches=%zu samples_with_quotes_or_braces=%zu", mismatches, tricky);
    return out;
}

// 4. Split reproduction on 50,751 rows.
Outcome split_reproduction() {
    const std::size_t n = 50751;
    std::mt19937_64 rng(4);
    static const char * domains[] = {"weather", "travel", "finance", "food", "health", "religion", "utilities",
                                     "entertainment", "shopping", "translation"};
    std::vector<Sample> samples(n);
    for (std::size_t i = 0; i < n; ++i) {
        samples[i].id = "sp" + std::to_string(i);
        samples[i].query = "q";
        samples[i].dialect = all_dialects[rng() % 5];
        samples[i].domain = domains[rng() % 10];
    }
    SplitSpec spec;
    spec.ratios = {41104.0 / 50751.0, 4568.0 / 50751.0, 5079.0 / 50751.0};
    spec.seed = 11;
    const auto a = stratified_split(samples, spec);

    double worst = 0;
    for (const auto & s : a.strata) {
        for (std::size_t j = 0; j < 3; ++j) {
            worst = std::max(worst, std::fabs(static_cast<double>(s.counts[j]) - spec.ratios[j] * static_cast<double>(s.size)));
        }
    }
    auto ids = [](const std::vector<Sample> & v, const std::vector<std::size_t> & idx) {
        std::set<std::string> out;
        for (auto i : idx) {
            out.insert(v[i].id);
        }
        return out;
    };
    auto shuffled = samples;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto b = stratified_split(shuffled, spec);
    bool invariant = true;
    for (std::size_t p = 0; p < 3; ++p) {
        invariant = invariant && ids(samples, a.members[p]) == ids(shuffled, b.members[p]);
    }
    Outcome out;
    out.pass = a.train().size() == 41104 && a.val().size() == 4568 && a.test().size() == 5079 && worst <= 1.0 &&
               invariant;
    out.detail = fmt("train=%zu val=%zu test=%zu max_stratum_error=%.4f shuffle_invariant=%s", a.train().size(),
                     a.val().size(), a.test().size(), worst, invariant ? "yes" : "no");
    return out;
}

// 5. Aggregates equal a brute-force recount on 200 random sets.
Outcome metric_oracle() {
    std::mt19937_64 rng(5);
    double worst = 0;
    std::size_t undefined_mismatch = 0;
    auto check = [&](std::optional<double> got, double want) {
        if (std::isnan(want) || !got) {
            undefined_mismatch += std::isnan(want) != !got;
            return;
        }
        worst = std::max(worst, std::fabs(*got - want));
    };
    for (int set = 0; set < 200; ++set) {
        const auto records = oracle::random_records(rng, 1 + rng() % 50);
        const auto m = oracle::evaluate_records(records);
        const auto o = oracle::recount(records);
        check(m.parse_failure_rate, o.parse_failure_rate);
        check(m.format_validity, o.format_validity);
        check(m.function_name_accuracy, o.function_name_accuracy);
        check(m.full_call_match, o.full_call_match);
        check(m.mean_arg_f1, o.mean_arg_f1);
        check(m.arg_exact_rate, o.arg_exact_rate);
        check(m.hallucination_rate, o.hallucination_rate);
        check(m.abstention_accuracy, o.abstention_accuracy);
        check(m.tool_call_rate, o.tool_call_rate);
        check(m.think_before_call_rate, o.think_before_call_rate);
        check(m.decision_accuracy, o.decision_accuracy);
        for (std::size_t c = 0; c < 6; ++c) {
            check(m.error_distribution.at(all_error_classes[c]), o.error_distribution[c]);
        }
    }
    Outcome out;
    out.pass = worst <= 1e-12 && undefined_mismatch == 0;
    out.detail = fmt("max_abs_diff=%.3g undefined_mismatches=%zu", worst, undefined_mismatch);
    return out;
}

MetricsReport evaluate_outputs(const std::vector<Sample> & samples, const std::vector<std::vector<ToolSchema>> & offered,
                               const std::string & predictions_jsonl, parse_mode mode) {
    const auto tokens = ParserTokens::from(SerializerConfig{});
    std::map<std::string, std::string> outputs;
    for (const auto & row : parse_jsonl(predictions_jsonl).rows) {
        outputs[row.value.at("id").get<std::string>()] = row.value.at("output").get<std::string>();
    }
    std::vector<RecordScore> scores;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        std::set<std::string> names;
        for (const auto & t : offered[i]) {
            names.insert(t.name);
        }
        scores.push_back(score_record(samples[i], parse_output(outputs.at(samples[i].id), tokens, mode), names));
    }
    auto m = aggregate(scores, samples);
    m.mode = to_string(mode);
    return m;
}

// 6. A 1,000-prediction file built to the fine-tuned error shape.
Outcome error_shape() {
    const std::vector<std::pair<error_class, std::size_t>> shape = {
        {error_class::parse_failure, 8},   {error_class::tool_hallucination, 247}, {error_class::wrong_function, 236},
        {error_class::argument_mismatch, 202}, {error_class::correct, 203},   {error_class::missed_call, 104},
    };
    fixtures::CorpusOptions o;
    o.rows = 1000;
    o.negative_share = 0.1;
    o.seed = 6;
    const auto samples = fixtures::corpus_samples(o);
    const auto inventory = fixtures::core_inventory();

    // Negatives take Correct (abstention) and ToolHallucination first; positives take the rest.
    std::map<error_class, std::size_t> left(shape.begin(), shape.end());
    std::vector<std::vector<ToolSchema>> offered;
    std::string predictions;
    std::size_t negatives = 0;
    for (const auto & s : samples) {
        negatives += !s.requires_function;
    }
    std::size_t neg_seen = 0;
    for (const auto & s : samples) {
        offered.push_back(sample_tools(inventory, s, {5, 6, 0}));
        error_class klass = error_class::correct;
        if (!s.requires_function) {
            klass = neg_seen++ < negatives / 2 ? error_class::correct : error_class::tool_hallucination;
        } else {
            for (const auto & [c, _] : shape) {
                // leave enough Correct/ToolHallucination budget for the negatives still to come
                std::size_t reserve = 0;
                if (c == error_class::correct) {
                    reserve = neg_seen < negatives / 2 ? negatives / 2 - neg_seen : 0;
                } else if (c == error_class::tool_hallucination) {
                    reserve = negatives - std::max(neg_seen, negatives / 2);
                }
                if (left[c] > reserve) {
                    klass = c;
                    break;
                }
            }
        }
        --left[klass];
        predictions += dump_compact(ordered_json{
            {"id", s.id}, {"output", fixtures::make_prediction(s, offered.back(), inventory, klass, false)}});
        predictions += '\n';
    }
    const auto m = evaluate_outputs(samples, offered, predictions, parse_mode::deployment_aware);
    const auto md = render_report(m, report_format::markdown);

    bool exact = samples.size() == 1000;
    std::size_t rows = 0;
    for (const auto & [c, count] : shape) {
        exact = exact && m.error_counts.at(c) == count &&
                m.error_distribution.at(c) == static_cast<double>(count) / 1000.0;
        rows += md.find(std::string("| ") + display_name(c) + " | " + std::to_string(count) + " |") != std::string::npos;
    }
    Outcome out;
    out.pass = exact && rows == 6;
    out.detail = fmt("PF=%.3f TH=%.3f WF=%.3f AM=%.3f C=%.3f MC=%.3f markdown_rows=%zu",
                     m.error_distribution.at(error_class::parse_failure),
                     m.error_distribution.at(error_class::tool_hallucination),
                     m.error_distribution.at(error_class::wrong_function),
                     m.error_distribution.at(error_class::argument_mismatch),
                     m.error_distribution.at(error_class::correct), m.error_distribution.at(error_class::missed_call), rows);
    return out;
}

// 7. Think-mode duality on a 240-record reasoning set.
Outcome think_duality() {
    fixtures::CorpusOptions o;
    o.rows = 400;
    o.negative_share = 0.1;
    o.seed = 7;
    const auto pool = fixtures::corpus_samples(o);
    const auto inventory = fixtures::core_inventory();
    std::vector<Sample> samples;
    std::size_t pos = 0, neg = 0;
    for (const auto & s : pool) {
        if (s.requires_function && pos < 238) {
            ++pos;
            samples.push_back(s);
        } else if (!s.requires_function && neg < 2) {
            ++neg;
            samples.push_back(s);
        }
    }
    // The reasoning model's turn always opens with a think block, abstentions included.
    std::vector<std::vector<ToolSchema>> offered;
    std::string predictions;
    for (const auto & s : samples) {
        offered.push_back(sample_tools(inventory, s, {5, 8, 0}));
        predictions += dump_compact(ordered_json{
            {"id", s.id},
            {"output", fixtures::make_prediction(s, offered.back(), inventory, error_class::correct, true)}});
        predictions += '\n';
    }
    const auto aware = evaluate_outputs(samples, offered, predictions, parse_mode::deployment_aware);
    const auto strict = evaluate_outputs(samples, offered, predictions, parse_mode::strict);
    Outcome out;
    out.pass = samples.size() == 240 && aware.think_before_call_rate == 1.0 && aware.hallucination_rate == 0.0 &&
               strict.parse_failure_rate >= 0.99;
    out.detail = fmt("n=%zu aware.think_before_call=%.3f aware.hallucination=%.3f strict.parse_failure=%.4f",
                     samples.size(), aware.think_before_call_rate.value_or(-1.0), aware.hallucination_rate,
                     strict.parse_failure_rate);
    return out;
}

// 8. Context budget: 5 sampled tools cost fewer tokens than the full inventory.
Outcome context_budget() {
    fixtures::CorpusOptions o;
    o.rows = 2000;
    o.negative_share = 0.1;
    const auto samples = fixtures::corpus_samples(o);
    const auto inventory = fixtures::core_inventory();
    const SerializerConfig config;
    std::size_t violations = 0, flagged = 0, over = 0;
    for (const auto & s : samples) {
        const auto small = serialize(s, sample_tools(inventory, s, {5, 1, 0}), config);
        const auto full = serialize(s, inventory, config);
        violations += !(*small.token_count < *full.token_count);
        over += *full.token_count > 2048;
        flagged += !check_context_fit(full, 2048).fits;
    }
    Outcome out;
    out.pass = violations == 0 && over > 0 && flagged == over;
    out.detail = fmt("samples=%zu monotonicity_violations=%zu over_budget_27=%zu flagged=%zu", samples.size(),
                     violations, over, flagged);
    return out;
}

std::map<std::string, std::string> snapshot(const fs::path & dir) {
    std::map<std::string, std::string> files;
    for (const auto & e : fs::recursive_directory_iterator(dir)) {
        if (e.is_regular_file()) {
            files[fs::relative(e.path(), dir).string()] = sha256_hex(read_file(e.path()));
        }
    }
    return files;
}

// 9. Two full fixture pipeline runs give byte-identical artifacts.
Outcome determinism() {
    oracle::TempDir tmp;
    std::ostringstream sink;
    const auto fx = (tmp.path() / "fx").string();
    if (cli::run({"fcforge", "fixture", "--dir", fx}, sink, sink) != 0) {
        return {false, "fixture generation failed: " + sink.str()};
    }
    const auto config = (tmp.path() / "fx" / "config.json").string();
    double slowest = 0;
    for (const char * run : {"run1", "run2"}) {
        const auto t0 = clock_type::now();
        if (cli::run({"fcforge", "pipeline", "--config", config, "--out", (tmp.path() / run).string()}, sink, sink) != 0) {
            return {false, std::string("pipeline failed: ") + sink.str()};
        }
        slowest = std::max(slowest, seconds_since(t0));
    }
    const auto a = snapshot(tmp.path() / "run1");
    const auto b = snapshot(tmp.path() / "run2");
    Outcome out;
    out.pass = !a.empty() && a == b && slowest < 60.0;
    out.detail = fmt("artifacts=%zu identical=%s slowest_run=%.2fs", a.size(), a == b ? "yes" : "no", slowest);
    return out;
}

struct Criterion {
    int number;
    const char * name;
    std::function<Outcome()> run;
};

} // namespace

int main(int argc, char ** argv) {
    const std::vector<Criterion> criteria = {
        {1, "enum_fix_restoration", enum_fix_restoration}, {2, "sampler_law", sampler_law},
        {3, "round_trip_fidelity", round_trip},            {4, "split_reproduction", split_reproduction},
        {5, "metric_oracle_equivalence", metric_oracle},   {6, "error_distribution_shape", error_shape},
        {7, "think_mode_duality", think_duality},          {8, "context_budget_monotonicity", context_budget},
        {9, "end_to_end_determinism", determinism},
    };
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--criterion" && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else {
            std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
            return 2;
        }
    }
    int failures = 0, ran = 0;
    for (const auto & c : criteria) {
        if (only != 0 && c.number != only) {
            continue;
        }
        ++ran;
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception & e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", c.number, c.name, o.detail.c_str());
        std::fflush(stdout);
        failures += !o.pass;
    }
    if (ran == 0) {
        std::fprintf(stderr, "no criterion %d\n", only);
        return 2;
    }
    return failures == 0 ? 0 : 1;
}
