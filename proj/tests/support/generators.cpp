#include "generators.h"

#include <set>

namespace oracle {

using namespace fcforge;

namespace {

const std::vector<std::string> tool_names = {"get_weather", "get_time", "book_flight", "convert_currency", "find_mosque"};
const std::vector<std::string> keys = {"city", "unit", "date", "amount", "q"};

json random_scalar(std::mt19937_64 & rng) {
    switch (rng() % 6) {
        case 0: return "جدة";
        case 1: return " جدة ";  // equal after trimming
        case 2: return 1;
        case 3: return 1.0;      // equal to 1 by value
        case 4: return nullptr;
        default: return rng() % 2 == 0;
    }
}

} // namespace

Arguments random_arguments(std::mt19937_64 & rng) {
    Arguments args;
    const auto n = rng() % 4;
    for (std::size_t i = 0; i < n; ++i) {
        args[keys[rng() % keys.size()]] = random_scalar(rng);
    }
    return args;
}

std::vector<Record> random_records(std::mt19937_64 & rng, std::size_t n) {
    std::vector<Record> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Record r;
        r.sample.id = "r" + std::to_string(i);
        r.sample.query = "q";
        r.sample.dialect = all_dialects[rng() % 5];
        r.sample.domain = rng() % 2 ? "weather" : "travel";
        r.sample.requires_function = rng() % 4 != 0;
        if (r.sample.requires_function) {
            r.sample.target = ToolCall{tool_names[rng() % tool_names.size()], random_arguments(rng)};
        }
        std::set<std::string> offered;
        if (r.sample.target) {
            offered.insert(r.sample.target->tool_name);
        }
        while (offered.size() < 3) {
            offered.insert(tool_names[rng() % tool_names.size()]);
        }
        r.offered.assign(offered.begin(), offered.end());
        switch (rng() % 6) {
            case 0:
                r.parsed = ParsedOutput::failed(0, failure_reason::malformed_arguments);
                break;
            case 1:
                r.parsed = ParsedOutput::no_call();
                break;
            case 2:
            case 3:
                if (r.sample.target) {
                    // Often the gold call itself, to populate Correct.
                    r.parsed = ParsedOutput::parsed(*r.sample.target);
                    break;
                }
                [[fallthrough]];
            default:
                r.parsed = ParsedOutput::parsed(ToolCall{tool_names[rng() % tool_names.size()], random_arguments(rng)});
                break;
        }
        if (r.parsed.kind != parse_kind::parse_failure && rng() % 3 == 0) {
            r.parsed.had_think_block = true;
            r.parsed.reasoning = "r";
        }
        out.push_back(std::move(r));
    }
    return out;
}

MetricsReport evaluate_records(const std::vector<Record> & records) {
    std::vector<RecordScore> scores;
    std::vector<Sample> samples;
    for (const auto & r : records) {
        scores.push_back(score_record(r.sample, r.parsed, std::set<std::string>(r.offered.begin(), r.offered.end())));
        samples.push_back(r.sample);
    }
    return aggregate(scores, samples);
}

} // namespace oracle
