#include "fcforge/evaluator.h"

#include "fcforge/error.h"
#include "fcforge/text.h"

#include <charconv>
#include <set>

namespace fcforge {

const char * to_string(error_class c) {
    switch (c) {
        case error_class::parse_failure:      return "ParseFailure";
        case error_class::tool_hallucination: return "ToolHallucination";
        case error_class::wrong_function:     return "WrongFunction";
        case error_class::argument_mismatch:  return "ArgumentMismatch";
        case error_class::correct:            return "Correct";
        case error_class::missed_call:        return "MissedCall";
    }
    return "Correct";
}

const char * display_name(error_class c) {
    switch (c) {
        case error_class::parse_failure:      return "Parse Failure";
        case error_class::tool_hallucination: return "Tool Hallucination";
        case error_class::wrong_function:     return "Wrong Function";
        case error_class::argument_mismatch:  return "Argument Mismatch";
        case error_class::correct:            return "Correct";
        case error_class::missed_call:        return "Missed Call";
    }
    return "Correct";
}

std::optional<error_class> error_class_from_string(std::string_view name) {
    for (auto c : all_error_classes) {
        if (name == to_string(c)) {
            return c;
        }
    }
    return std::nullopt;
}

std::string normalized_value_key(const json & value) {
    switch (value.type()) {
        case json::value_t::null:
            return "null";
        case json::value_t::boolean:
            return value.get<bool>() ? "true" : "false";
        case json::value_t::string:
            return "s:" + normalize_text(value.get_ref<const std::string &>());
        case json::value_t::number_integer:
        case json::value_t::number_unsigned:
        case json::value_t::number_float: {
            const double d = value.get<double>();
            char buf[64];
            auto [p, ec] = std::to_chars(buf, buf + sizeof buf, d);
            return "n:" + std::string(buf, p);
        }
        case json::value_t::array: {
            std::string out = "[";
            for (const auto & v : value) {
                out += normalized_value_key(v);
                out += '\x1f';
            }
            return out + "]";
        }
        case json::value_t::object: {
            std::map<std::string, std::string> members;
            for (auto it = value.begin(); it != value.end(); ++it) {
                members[nfc(it.key())] = normalized_value_key(it.value());
            }
            std::string out = "{";
            for (const auto & [k, v] : members) {
                out += k;
                out += '\x1e';
                out += v;
                out += '\x1f';
            }
            return out + "}";
        }
        default:
            return "?";
    }
}

namespace {

struct PrecisionRecall {
    double precision = 0;
    double recall = 0;
    double f1 = 0;
    bool exact = false;
};

PrecisionRecall compare_sets(const std::set<std::string> & predicted, const std::set<std::string> & gold) {
    PrecisionRecall pr;
    if (predicted.empty() && gold.empty()) {
        return {1, 1, 1, true};
    }
    std::size_t hits = 0;
    for (const auto & p : predicted) {
        hits += gold.count(p);
    }
    pr.precision = predicted.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(predicted.size());
    pr.recall = gold.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(gold.size());
    pr.f1 = pr.precision + pr.recall == 0 ? 0.0 : 2 * pr.precision * pr.recall / (pr.precision + pr.recall);
    pr.exact = predicted == gold;
    return pr;
}

} // namespace

ArgumentScores score_arguments(const Arguments & predicted, const Arguments & gold) {
    std::set<std::string> pred_pairs, gold_pairs, pred_keys, gold_keys;
    for (const auto & [k, v] : predicted) {
        const auto key = nfc(k);
        pred_keys.insert(key);
        pred_pairs.insert(key + '\x1d' + normalized_value_key(v));
    }
    for (const auto & [k, v] : gold) {
        const auto key = nfc(k);
        gold_keys.insert(key);
        gold_pairs.insert(key + '\x1d' + normalized_value_key(v));
    }
    const auto pairs = compare_sets(pred_pairs, gold_pairs);
    const auto keys = compare_sets(pred_keys, gold_keys);
    return {pairs.precision, pairs.recall, pairs.f1, pairs.exact, keys.f1};
}

RecordScore score_record(const Sample & sample, const ParsedOutput & parsed, const std::set<std::string> & offered_tools) {
    RecordScore r;
    r.sample_id = sample.id;
    r.parsed = parsed.kind;
    r.had_think_block = parsed.had_think_block;

    if (parsed.kind == parse_kind::parse_failure) {
        r.klass = error_class::parse_failure;
        return r;
    }
    if (!sample.requires_function) {
        r.klass = parsed.kind == parse_kind::parsed_call ? error_class::tool_hallucination : error_class::correct;
        return r;
    }
    if (parsed.kind == parse_kind::no_call) {
        r.klass = error_class::missed_call;
        return r;
    }

    const ToolCall & predicted = *parsed.call;
    const ToolCall & gold = *sample.target;
    r.name_correct = predicted.tool_name == gold.tool_name;
    const auto args = score_arguments(predicted.arguments, gold.arguments);
    r.arg_precision = args.precision;
    r.arg_recall = args.recall;
    r.arg_f1 = args.f1;
    r.arg_exact = args.exact;
    r.key_f1 = args.key_f1;
    r.full_match = r.name_correct && r.arg_exact;

    if (offered_tools.count(predicted.tool_name) == 0) {
        r.klass = error_class::tool_hallucination;
    } else if (!r.name_correct) {
        r.klass = error_class::wrong_function;
    } else if (!r.arg_exact) {
        r.klass = error_class::argument_mismatch;
    } else {
        r.klass = error_class::correct;
    }
    return r;
}

namespace {

struct Ratio {
    std::size_t hits = 0;
    std::size_t total = 0;

    void add(bool hit) {
        ++total;
        hits += hit ? 1 : 0;
    }
    std::optional<double> value() const {
        if (total == 0) {
            return std::nullopt;
        }
        return static_cast<double>(hits) / static_cast<double>(total);
    }
};

struct Mean {
    double sum = 0;
    std::size_t total = 0;

    void add(double v) {
        sum += v;
        ++total;
    }
    std::optional<double> value() const {
        if (total == 0) {
            return std::nullopt;
        }
        return sum / static_cast<double>(total);
    }
};

double over_all(std::size_t hits, std::size_t n) {
    return n == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(n);
}

} // namespace

MetricsReport aggregate(std::span<const RecordScore> scores, std::span<const Sample> samples) {
    if (scores.size() != samples.size()) {
        throw_input("aggregate: " + std::to_string(scores.size()) + " scores for " + std::to_string(samples.size()) +
                    " samples");
    }
    std::set<std::string_view> ids;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (scores[i].sample_id != samples[i].id) {
            throw_input("aggregate: score id '" + scores[i].sample_id + "' does not match sample id '" +
                        samples[i].id + "' at position " + std::to_string(i));
        }
        if (!ids.insert(samples[i].id).second) {
            throw_input("aggregate: duplicate sample id '" + samples[i].id + "'");
        }
    }

    MetricsReport m;
    m.n = samples.size();
    for (auto c : all_error_classes) {
        m.error_counts[c] = 0;
    }
    std::size_t parse_failures = 0, calls = 0, decisions = 0, halluc_neg = 0, halluc_unoffered = 0;
    Ratio name_acc, full_match, abstention, think;
    Mean arg_f1, key_f1;
    Ratio arg_exact;
    std::map<std::string, Ratio> dialect_acc, domain_acc;

    for (std::size_t i = 0; i < samples.size(); ++i) {
        const Sample & s = samples[i];
        const RecordScore & r = scores[i];
        ++m.error_counts[r.klass];
        const bool called = r.parsed == parse_kind::parsed_call;
        parse_failures += r.parsed == parse_kind::parse_failure;
        calls += called;
        decisions += called == s.requires_function;
        if (called) {
            think.add(r.had_think_block);
        }
        auto & dialect = m.by_dialect[to_string(s.dialect)];
        auto & domain = m.by_domain[s.domain];
        ++dialect.n;
        ++domain.n;
        if (s.requires_function) {
            ++m.n_positive;
            ++dialect.n_positive;
            ++domain.n_positive;
            name_acc.add(r.name_correct);
            full_match.add(r.full_match);
            dialect_acc[to_string(s.dialect)].add(r.name_correct);
            domain_acc[s.domain].add(r.name_correct);
            if (called) {
                arg_f1.add(r.arg_f1);
                key_f1.add(r.key_f1);
                arg_exact.add(r.arg_exact);
            }
            if (r.klass == error_class::tool_hallucination) {
                ++halluc_unoffered;
            }
        } else {
            ++m.n_negative;
            abstention.add(r.klass == error_class::correct);
            if (r.klass == error_class::tool_hallucination) {
                ++halluc_neg;
            }
        }
    }

    m.n_parsed_calls = calls;
    m.parse_failure_rate = over_all(parse_failures, m.n);
    m.format_validity = m.n == 0 ? 0.0 : 1.0 - m.parse_failure_rate;
    m.function_name_accuracy = name_acc.value();
    m.full_call_match = full_match.value();
    m.mean_arg_f1 = arg_f1.value();
    m.mean_key_f1 = key_f1.value();
    m.arg_exact_rate = arg_exact.value();
    m.hallucination_rate = over_all(m.error_counts[error_class::tool_hallucination], m.n);
    m.hallucination_on_negatives_rate = over_all(halluc_neg, m.n);
    m.hallucination_unoffered_rate = over_all(halluc_unoffered, m.n);
    m.abstention_accuracy = abstention.value();
    m.tool_call_rate = over_all(calls, m.n);
    m.think_before_call_rate = think.value();
    m.decision_accuracy = over_all(decisions, m.n);
    for (auto c : all_error_classes) {
        m.error_distribution[c] = over_all(m.error_counts[c], m.n);
    }
    for (auto & [name, g] : m.by_dialect) {
        g.function_name_accuracy = dialect_acc[name].value();
    }
    for (auto & [name, g] : m.by_domain) {
        g.function_name_accuracy = domain_acc[name].value();
    }
    return m;
}

} // namespace fcforge
