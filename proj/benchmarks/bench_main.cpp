#include "fcforge/audit.h"
#include "fcforge/call_parser.h"
#include "fcforge/evaluator.h"
#include "fcforge/fixtures.h"
#include "fcforge/jsonl.h"
#include "fcforge/sampler.h"
#include "fcforge/serializer.h"
#include "fcforge/splitter.h"

#include <benchmark/benchmark.h>

#include <map>
#include <random>
#include <set>

using namespace fcforge;

namespace {

const std::vector<ToolSchema> & inventory() {
    static const auto inv = fixtures::core_inventory();
    return inv;
}

const std::vector<Sample> & corpus(std::size_t rows) {
    static std::map<std::size_t, std::vector<Sample>> cache;
    auto it = cache.find(rows);
    if (it == cache.end()) {
        fixtures::CorpusOptions o;
        o.rows = rows;
        it = cache.emplace(rows, fixtures::corpus_samples(o)).first;
    }
    return it->second;
}

} // namespace

static void BM_sample_tools(benchmark::State & state) {
    const auto & inv = inventory();
    std::size_t i = 0;
    for (auto _ : state) {
        auto idx = sample_tool_indices(inv, std::string_view(inv[i % inv.size()].name), true, std::to_string(i), {5, 1, 0});
        benchmark::DoNotOptimize(idx);
        ++i;
    }
}
BENCHMARK(BM_sample_tools);

static void BM_serialize(benchmark::State & state) {
    const auto & samples = corpus(1000);
    const SerializerConfig config;
    std::size_t i = 0;
    for (auto _ : state) {
        const auto & s = samples[i++ % samples.size()];
        auto ex = serialize(s, sample_tools(inventory(), s, {5, 1, 0}), config);
        benchmark::DoNotOptimize(ex);
    }
}
BENCHMARK(BM_serialize);

static void BM_parse_output(benchmark::State & state) {
    const SerializerConfig config;
    const auto tokens = ParserTokens::from(config);
    std::mt19937_64 rng(1);
    std::vector<std::string> outputs;
    for (int i = 0; i < 256; ++i) {
        const auto & tool = inventory()[rng() % inventory().size()];
        const auto s = fixtures::random_positive(rng, tool, std::to_string(i), config.tokens);
        outputs.emplace_back(serialize(s, inventory(), config).completion());
    }
    std::size_t i = 0, bytes = 0;
    for (auto _ : state) {
        const auto & out = outputs[i++ % outputs.size()];
        bytes += out.size();
        auto p = parse_output(out, tokens, parse_mode::deployment_aware);
        benchmark::DoNotOptimize(p);
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(bytes));
}
BENCHMARK(BM_parse_output);

static void BM_audit(benchmark::State & state) {
    fixtures::CorpusOptions o;
    o.rows = static_cast<std::size_t>(state.range(0));
    o.null_enum_rows = o.rows / 4;
    const auto parsed = corpus_from_jsonl(parse_jsonl(fixtures::corpus_jsonl(o)));
    for (auto _ : state) {
        auto report = audit(parsed, inventory(), {});
        benchmark::DoNotOptimize(report);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_audit)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

static void BM_stratified_split(benchmark::State & state) {
    const auto & samples = corpus(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto r = stratified_split(samples, SplitSpec{});
        benchmark::DoNotOptimize(r);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_stratified_split)->Arg(5000)->Arg(50000)->Unit(benchmark::kMillisecond);

static void BM_score_and_aggregate(benchmark::State & state) {
    const auto & samples = corpus(5000);
    const SerializerConfig config;
    const auto tokens = ParserTokens::from(config);
    std::vector<ParsedOutput> parsed;
    std::vector<std::set<std::string>> offered;
    for (const auto & s : samples) {
        const auto tools = sample_tools(inventory(), s, {5, 1, 0});
        std::set<std::string> names;
        for (const auto & t : tools) {
            names.insert(t.name);
        }
        offered.push_back(std::move(names));
        parsed.push_back(parse_output(serialize(s, tools, config).completion(), tokens, parse_mode::strict));
    }
    for (auto _ : state) {
        std::vector<RecordScore> scores;
        scores.reserve(samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i) {
            scores.push_back(score_record(samples[i], parsed[i], offered[i]));
        }
        auto m = aggregate(scores, samples);
        benchmark::DoNotOptimize(m);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(samples.size()));
}
BENCHMARK(BM_score_and_aggregate)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
