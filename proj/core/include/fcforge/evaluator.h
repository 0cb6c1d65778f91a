#pragma once

#include "fcforge/call_parser.h"
#include "fcforge/schema.h"

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace fcforge {

enum class error_class { parse_failure, tool_hallucination, wrong_function, argument_mismatch, correct, missed_call };

inline constexpr error_class all_error_classes[] = {
    error_class::parse_failure,     error_class::tool_hallucination, error_class::wrong_function,
    error_class::argument_mismatch, error_class::correct,            error_class::missed_call,
};

const char * to_string(error_class c);        // "ParseFailure", ...
const char * display_name(error_class c);     // "Parse Failure", ...
std::optional<error_class> error_class_from_string(std::string_view name);

struct RecordScore {
    std::string sample_id;
    error_class klass = error_class::correct;
    parse_kind parsed = parse_kind::no_call;
    bool name_correct = false;
    double arg_precision = 0;
    double arg_recall = 0;
    double arg_f1 = 0;
    bool arg_exact = false;
    // Same measure over argument keys only.
    double key_f1 = 0;
    bool full_match = false;
    bool had_think_block = false;
};

// Comparison form of an argument value: strings NFC + trimmed, numbers compared by
// value (1 == 1.0), containers normalized recursively.
std::string normalized_value_key(const json & value);

struct ArgumentScores {
    double precision = 0;
    double recall = 0;
    double f1 = 0;
    bool exact = false;
    double key_f1 = 0;
};

// Precision/recall over exact (key, normalized value) pairs. Two empty argument maps
// score 1; an empty side against a non-empty side scores 0.
ArgumentScores score_arguments(const Arguments & predicted, const Arguments & gold);

// Classification precedence:
//   parse failure > call on a negative > no call on a positive > abstention on a negative
//   > tool not offered > wrong tool > argument mismatch > correct.
RecordScore score_record(const Sample & sample, const ParsedOutput & parsed, const std::set<std::string> & offered_tools);

struct GroupStats {
    std::size_t n = 0;           // all records in the group
    std::size_t n_positive = 0;
    std::optional<double> function_name_accuracy;  // over the group's positives
};

struct MetricsReport {
    std::string mode;  // parse mode label, informational
    std::size_t n = 0;
    std::size_t n_positive = 0;
    std::size_t n_negative = 0;
    std::size_t n_parsed_calls = 0;
    double parse_failure_rate = 0;
    double format_validity = 0;
    std::optional<double> function_name_accuracy;  // positives
    std::optional<double> full_call_match;         // positives
    std::optional<double> mean_arg_f1;             // positives that produced a call
    std::optional<double> mean_key_f1;             // positives that produced a call
    std::optional<double> arg_exact_rate;          // positives that produced a call
    double hallucination_rate = 0;                 // all records classed ToolHallucination
    double hallucination_on_negatives_rate = 0;    // calls emitted on negatives, over all records
    double hallucination_unoffered_rate = 0;       // tool outside the offered subset, over all records
    std::optional<double> abstention_accuracy;     // negatives
    double tool_call_rate = 0;                     // ParsedCall records over all records
    std::optional<double> think_before_call_rate;  // ParsedCall records with a think block
    double decision_accuracy = 0;                  // (called <=> requires_function) over all records
    std::map<error_class, double> error_distribution;
    std::map<error_class, std::size_t> error_counts;
    std::map<std::string, GroupStats> by_dialect;
    std::map<std::string, GroupStats> by_domain;
};

// Scores and samples must align one to one by id. Throws error(input) on mismatch or duplicates.
MetricsReport aggregate(std::span<const RecordScore> scores, std::span<const Sample> samples);

enum class report_format { json, markdown };

ordered_json to_json(const MetricsReport & report);
MetricsReport metrics_report_from_json(const json & j);

// Markdown carries a per-dialect accuracy table, a per-domain table and the error
// taxonomy. Throws error(input) for an empty report.
std::string render_report(const MetricsReport & report, report_format format);

} // namespace fcforge
