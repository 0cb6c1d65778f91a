#include "fcforge/error.h"
#include "fcforge/evaluator.h"
#include "generators.h"
#include "oracles.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace fcforge;

namespace {

Sample positive(std::string id, ToolCall target) {
    Sample s;
    s.id = std::move(id);
    s.query = "q";
    s.domain = "weather";
    s.requires_function = true;
    s.target = std::move(target);
    return s;
}

Sample negative(std::string id) {
    Sample s;
    s.id = std::move(id);
    s.query = "q";
    s.domain = "chat";
    return s;
}

const ToolCall gold_call{"get_weather", {{"city", "جدة"}, {"unit", "celsius"}}};

void expect_rate(double got, double want, const char * what) {
    if (std::isnan(want)) {
        ADD_FAILURE() << what << ": oracle has no value but the library returned " << got;
        return;
    }
    EXPECT_NEAR(got, want, 1e-12) << what;
}

void expect_rate(const std::optional<double> & got, double want, const char * what) {
    if (std::isnan(want)) {
        EXPECT_FALSE(got.has_value()) << what;
        return;
    }
    ASSERT_TRUE(got.has_value()) << what;
    EXPECT_NEAR(*got, want, 1e-12) << what;
}

} // namespace

TEST(ScoreArguments, PairF1) {
    // one shared pair out of two predicted and one gold: P = 1/2, R = 1, F1 = 2/3
    auto s = score_arguments({{"city", "جدة"}, {"unit", "fahrenheit"}}, {{"city", "جدة"}});
    EXPECT_DOUBLE_EQ(s.precision, 0.5);
    EXPECT_DOUBLE_EQ(s.recall, 1.0);
    EXPECT_NEAR(s.f1, 2.0 / 3.0, 1e-15);
    EXPECT_FALSE(s.exact);
    EXPECT_NEAR(s.key_f1, 2.0 / 3.0, 1e-15);

    s = score_arguments({}, {});
    EXPECT_EQ(s.f1, 1.0);
    EXPECT_TRUE(s.exact);
    EXPECT_EQ(score_arguments({}, {{"a", 1}}).f1, 0.0);
    EXPECT_EQ(score_arguments({{"a", 1}}, {}).f1, 0.0);

    // normalization: trim, NFC, numeric value
    s = score_arguments({{"a", " e\xCC\x81 "}, {"n", 1}, {"o", json::parse(R"({"y":[1.0],"x":2})")}},
                        {{"a", "\xC3\xA9"}, {"n", 1.0}, {"o", json::parse(R"({"x":2.0,"y":[1]})")}});
    EXPECT_TRUE(s.exact);
    // keys match but values differ: key F1 1, pair F1 0
    s = score_arguments({{"a", 1}}, {{"a", 2}});
    EXPECT_EQ(s.f1, 0.0);
    EXPECT_EQ(s.key_f1, 1.0);
}

TEST(ScoreRecord, PrecedenceTable) {
    const std::set<std::string> offered{"get_weather", "get_time"};
    const auto pos = positive("p", gold_call);
    const auto neg = negative("n");
    const auto fail = ParsedOutput::failed(0, failure_reason::missing_call_end);
    const auto none = ParsedOutput::no_call();
    struct Case {
        const Sample * sample;
        ParsedOutput parsed;
        error_class want;
    };
    const std::vector<Case> cases = {
        {&pos, fail, error_class::parse_failure},
        {&neg, fail, error_class::parse_failure},
        {&neg, ParsedOutput::parsed(gold_call), error_class::tool_hallucination},
        {&neg, ParsedOutput::parsed({"unoffered", {}}), error_class::tool_hallucination},
        {&pos, none, error_class::missed_call},
        {&neg, none, error_class::correct},
        {&pos, ParsedOutput::parsed({"book_flight", gold_call.arguments}), error_class::tool_hallucination},
        {&pos, ParsedOutput::parsed({"get_time", {}}), error_class::wrong_function},
        {&pos, ParsedOutput::parsed({"get_time", gold_call.arguments}), error_class::wrong_function},
        {&pos, ParsedOutput::parsed({"get_weather", {{"city", "جدة"}}}), error_class::argument_mismatch},
        {&pos, ParsedOutput::parsed(gold_call), error_class::correct},
    };
    for (const auto & c : cases) {
        const auto r = score_record(*c.sample, c.parsed, offered);
        EXPECT_EQ(r.klass, c.want) << c.sample->id << " " << to_json(c.parsed).dump();
        const std::vector<std::string> offered_list(offered.begin(), offered.end());
        EXPECT_EQ(r.klass, oracle::classify(*c.sample, c.parsed, offered_list));
    }
    const auto full = score_record(pos, ParsedOutput::parsed(gold_call), offered);
    EXPECT_TRUE(full.full_match);
    EXPECT_TRUE(full.name_correct);
}

TEST(ScoreRecord, ClassificationMatchesOracleOnRandomRecords) {
    std::mt19937_64 rng(17);
    for (const auto & r : oracle::random_records(rng, 5000)) {
        const auto got = score_record(r.sample, r.parsed, std::set<std::string>(r.offered.begin(), r.offered.end()));
        ASSERT_EQ(got.klass, oracle::classify(r.sample, r.parsed, r.offered)) << r.sample.id;
        if (r.sample.requires_function && r.parsed.kind == parse_kind::parsed_call) {
            ASSERT_NEAR(got.arg_f1, oracle::pair_f1(r.parsed.call->arguments, r.sample.target->arguments), 1e-12);
        }
    }
}

TEST(Aggregate, MatchesOracleRecount) {
    std::mt19937_64 rng(23);
    for (int set = 0; set < 100; ++set) {
        const auto records = oracle::random_records(rng, 1 + rng() % 50);
        const auto m = oracle::evaluate_records(records);
        const auto o = oracle::recount(records);
        expect_rate(m.parse_failure_rate, o.parse_failure_rate, "parse_failure_rate");
        expect_rate(m.format_validity, o.format_validity, "format_validity");
        expect_rate(m.function_name_accuracy, o.function_name_accuracy, "function_name_accuracy");
        expect_rate(m.full_call_match, o.full_call_match, "full_call_match");
        expect_rate(m.mean_arg_f1, o.mean_arg_f1, "mean_arg_f1");
        expect_rate(m.arg_exact_rate, o.arg_exact_rate, "arg_exact_rate");
        expect_rate(m.hallucination_rate, o.hallucination_rate, "hallucination_rate");
        expect_rate(m.abstention_accuracy, o.abstention_accuracy, "abstention_accuracy");
        expect_rate(m.tool_call_rate, o.tool_call_rate, "tool_call_rate");
        expect_rate(m.think_before_call_rate, o.think_before_call_rate, "think_before_call_rate");
        expect_rate(m.decision_accuracy, o.decision_accuracy, "decision_accuracy");
        double total = 0;
        for (std::size_t c = 0; c < 6; ++c) {
            expect_rate(m.error_distribution.at(all_error_classes[c]), o.error_distribution[c], "error_distribution");
            total += m.error_distribution.at(all_error_classes[c]);
        }
        EXPECT_NEAR(total, 1.0, 1e-12);
        EXPECT_NEAR(m.hallucination_rate, m.hallucination_on_negatives_rate + m.hallucination_unoffered_rate, 1e-12);
    }
}

TEST(Aggregate, InvariantUnderReordering) {
    std::mt19937_64 rng(31);
    auto records = oracle::random_records(rng, 300);
    const auto a = to_json(oracle::evaluate_records(records));
    std::shuffle(records.begin(), records.end(), rng);
    const auto b = to_json(oracle::evaluate_records(records));
    // Means are summed in a different order; compare to 1e-12 via rendered rates.
    for (auto it = a["metrics"].begin(); it != a["metrics"].end(); ++it) {
        if (it->is_null()) {
            EXPECT_TRUE(b["metrics"][it.key()].is_null());
        } else {
            EXPECT_NEAR(it->get<double>(), b["metrics"][it.key()].get<double>(), 1e-12) << it.key();
        }
    }
    EXPECT_EQ(a["error_counts"], b["error_counts"]);
    EXPECT_EQ(a["by_dialect"], b["by_dialect"]);
}

TEST(Aggregate, AlignmentErrors) {
    const std::vector<Sample> samples{negative("a"), negative("b")};
    std::vector<RecordScore> scores(2);
    scores[0].sample_id = "a";
    scores[1].sample_id = "c";
    EXPECT_THROW(aggregate(scores, samples), error);
    scores.pop_back();
    EXPECT_THROW(aggregate(scores, samples), error);
    const std::vector<Sample> dup{negative("a"), negative("a")};
    std::vector<RecordScore> dup_scores(2);
    dup_scores[0].sample_id = dup_scores[1].sample_id = "a";
    EXPECT_THROW(aggregate(dup_scores, dup), error);
}

TEST(Aggregate, ThinkBlocksCoupleToParseMode) {
    // A think-prefixed correct call is a parse failure in strict mode and Correct when
    // the parser strips the reasoning block.
    const ParserTokens tokens = ParserTokens::from(SerializerConfig{});
    const std::string out = "<think>ok</think><start_function_call>get_weather{\"city\":<escape>جدة<escape>,"
                            "\"unit\":<escape>celsius<escape>}<end_function_call>";
    const auto pos = positive("p", gold_call);
    const std::set<std::string> offered{"get_weather"};
    EXPECT_EQ(score_record(pos, parse_output(out, tokens, parse_mode::strict), offered).klass,
              error_class::parse_failure);
    const auto aware = score_record(pos, parse_output(out, tokens, parse_mode::deployment_aware), offered);
    EXPECT_EQ(aware.klass, error_class::correct);
    EXPECT_TRUE(aware.had_think_block);
}

TEST(Report, JsonRoundTripAndMarkdownConsistency) {
    std::mt19937_64 rng(41);
    const auto m = oracle::evaluate_records(oracle::random_records(rng, 400));
    const auto j = to_json(m);
    const auto back = metrics_report_from_json(json::parse(j.dump()));
    EXPECT_EQ(to_json(back).dump(), j.dump());

    const auto md = render_report(m, report_format::markdown);
    EXPECT_NE(md.find("## Function Name Accuracy by Dialect"), std::string::npos);
    EXPECT_NE(md.find("## Error Distribution"), std::string::npos);
    for (auto c : all_error_classes) {
        char row[128];
        std::snprintf(row, sizeof row, "| %s | %zu | %.4f |", display_name(c), m.error_counts.at(c),
                      m.error_distribution.at(c));
        EXPECT_NE(md.find(row), std::string::npos) << row;
    }
    char fna[96];
    std::snprintf(fna, sizeof fna, "| Function Name Accuracy | %.4f |", *m.function_name_accuracy);
    EXPECT_NE(md.find(fna), std::string::npos) << md;
    // dialect rows keep the fixed order
    const auto msa = md.find("| MSA |");
    const auto gulf = md.find("| Gulf |");
    const auto maghrebi = md.find("| Maghrebi |");
    ASSERT_NE(msa, std::string::npos);
    EXPECT_LT(msa, gulf);
    EXPECT_LT(gulf, maghrebi);

    const auto rendered_json = render_report(m, report_format::json);
    EXPECT_EQ(json::parse(rendered_json), json::parse(j.dump()));
}

TEST(Report, EmptyReportIsAnError) {
    try {
        render_report(MetricsReport{}, report_format::markdown);
        FAIL();
    } catch (const error & e) {
        EXPECT_EQ(e.kind(), error_kind::input);
    }
    EXPECT_THROW(metrics_report_from_json(json::parse(R"({"n":"many"})")), error);
}

TEST(Report, UndefinedRatesRenderAsNa) {
    const std::vector<Sample> samples{negative("a")};
    RecordScore s;
    s.sample_id = "a";
    s.klass = error_class::correct;
    const auto m = aggregate(std::vector<RecordScore>{s}, samples);
    EXPECT_FALSE(m.function_name_accuracy.has_value());
    const auto md = render_report(m, report_format::markdown);
    EXPECT_NE(md.find("| Function Name Accuracy | n/a |"), std::string::npos) << md;
    EXPECT_TRUE(to_json(m)["metrics"]["function_name_accuracy"].is_null());
}

TEST(ErrorClass, Names) {
    for (auto c : all_error_classes) {
        EXPECT_EQ(error_class_from_string(to_string(c)), c);
    }
    EXPECT_STREQ(display_name(error_class::tool_hallucination), "Tool Hallucination");
    EXPECT_FALSE(error_class_from_string("Hallucination").has_value());
}

TEST(Aggregate, ReasoningSubsetShape) {
    // 238 correct think-prefixed calls plus 2 correct abstentions.
    std::vector<oracle::Record> records;
    for (int i = 0; i < 240; ++i) {
        oracle::Record r;
        r.offered = {"get_weather"};
        if (i < 238) {
            r.sample = positive("t" + std::to_string(i), gold_call);
            r.parsed = ParsedOutput::parsed(gold_call);
            r.parsed.had_think_block = true;
        } else {
            r.sample = negative("t" + std::to_string(i));
        }
        records.push_back(r);
    }
    auto m = oracle::evaluate_records(records);
    EXPECT_EQ(*m.function_name_accuracy, 1.0);
    EXPECT_EQ(*m.think_before_call_rate, 1.0);
    EXPECT_EQ(m.hallucination_rate, 0.0);
    EXPECT_EQ(*m.mean_arg_f1, 1.0);
    EXPECT_NEAR(m.tool_call_rate, 238.0 / 240.0, 1e-15);

    // Same shape with the two non-calls as missed positives.
    for (int i = 238; i < 240; ++i) {
        records[static_cast<std::size_t>(i)].sample = positive("t" + std::to_string(i), gold_call);
    }
    m = oracle::evaluate_records(records);
    EXPECT_NEAR(*m.function_name_accuracy, 238.0 / 240.0, 1e-15);
    EXPECT_NEAR(m.decision_accuracy, 238.0 / 240.0, 1e-15);
    EXPECT_EQ(*m.mean_arg_f1, 1.0);
    EXPECT_EQ(m.error_counts.at(error_class::missed_call), 2u);
}
