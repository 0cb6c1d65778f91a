#include "fcforge/error.h"
#include "fcforge/evaluator.h"

#include <cstdio>
#include <sstream>

namespace fcforge {

namespace {

// Metric keys in report order, with their markdown labels.
struct MetricRow {
    const char * key;
    const char * label;
};

constexpr MetricRow metric_rows[] = {
    {"parse_failure_rate", "Parse Failure Rate"},
    {"format_validity", "Format Validity"},
    {"function_name_accuracy", "Function Name Accuracy"},
    {"full_call_match", "Full Tool-Call Match"},
    {"mean_arg_f1", "Argument F1"},
    {"mean_key_f1", "Argument Key F1"},
    {"arg_exact_rate", "Argument Exact Match"},
    {"hallucination_rate", "Hallucination Rate"},
    {"hallucination_on_negatives_rate", "Hallucination Rate (calls on negatives)"},
    {"hallucination_unoffered_rate", "Hallucination Rate (tool not offered)"},
    {"abstention_accuracy", "Abstention Accuracy"},
    {"tool_call_rate", "Tool Call Rate"},
    {"think_before_call_rate", "Think-Before-Call Rate"},
    {"decision_accuracy", "Decision Accuracy"},
};

const char * const definitions[][2] = {
    {"function_name_accuracy", "share of positives whose parsed call names the gold tool"},
    {"mean_arg_f1", "mean F1 over exact (key, normalized value) pairs, positives that produced a call"},
    {"mean_key_f1", "mean F1 over argument keys only, positives that produced a call"},
    {"arg_exact_rate", "share of positives that produced a call whose argument pairs equal the gold pairs"},
    {"hallucination_rate", "share of all records classed ToolHallucination"},
    {"abstention_accuracy", "share of negatives answered with no call"},
    {"tool_call_rate", "share of all records that parsed to a call"},
    {"think_before_call_rate", "share of parsed calls preceded by a reasoning block"},
    {"decision_accuracy", "share of records where a call was emitted exactly when one was required"},
};

// Dialect table row order.
constexpr const char * dialect_order[] = {"MSA", "Gulf", "Egyptian", "Levantine", "Maghrebi"};

ordered_json opt(const std::optional<double> & v) {
    return v ? ordered_json(*v) : ordered_json(nullptr);
}

std::optional<double> read_opt(const json & j, const char * key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
        return std::nullopt;
    }
    if (!it->is_number()) {
        throw_input(std::string("report: '") + key + "' must be a number or null");
    }
    return it->get<double>();
}

double read_num(const json & j, const char * key) {
    auto v = read_opt(j, key);
    if (!v) {
        throw_input(std::string("report: missing '") + key + "'");
    }
    return *v;
}

ordered_json groups_to_json(const std::map<std::string, GroupStats> & groups) {
    ordered_json j = ordered_json::object();
    for (const auto & [name, g] : groups) {
        j[name] = ordered_json{
            {"n", g.n}, {"n_positive", g.n_positive}, {"function_name_accuracy", opt(g.function_name_accuracy)}};
    }
    return j;
}

std::map<std::string, GroupStats> groups_from_json(const json & j) {
    std::map<std::string, GroupStats> out;
    if (!j.is_object()) {
        throw_input("report: group table must be an object");
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
        GroupStats g;
        g.n = it->at("n").get<std::size_t>();
        g.n_positive = it->at("n_positive").get<std::size_t>();
        g.function_name_accuracy = read_opt(*it, "function_name_accuracy");
        out[it.key()] = g;
    }
    return out;
}

std::string fmt4(const std::optional<double> & v) {
    if (!v) {
        return "n/a";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", *v);
    return buf;
}

std::string fmt_percent(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f%%", v * 100.0);
    return buf;
}

} // namespace

ordered_json to_json(const MetricsReport & m) {
    ordered_json j;
    j["mode"] = m.mode;
    j["n"] = m.n;
    j["n_positive"] = m.n_positive;
    j["n_negative"] = m.n_negative;
    j["n_parsed_calls"] = m.n_parsed_calls;
    ordered_json metrics;
    metrics["parse_failure_rate"] = m.parse_failure_rate;
    metrics["format_validity"] = m.format_validity;
    metrics["function_name_accuracy"] = opt(m.function_name_accuracy);
    metrics["full_call_match"] = opt(m.full_call_match);
    metrics["mean_arg_f1"] = opt(m.mean_arg_f1);
    metrics["mean_key_f1"] = opt(m.mean_key_f1);
    metrics["arg_exact_rate"] = opt(m.arg_exact_rate);
    metrics["hallucination_rate"] = m.hallucination_rate;
    metrics["hallucination_on_negatives_rate"] = m.hallucination_on_negatives_rate;
    metrics["hallucination_unoffered_rate"] = m.hallucination_unoffered_rate;
    metrics["abstention_accuracy"] = opt(m.abstention_accuracy);
    metrics["tool_call_rate"] = m.tool_call_rate;
    metrics["think_before_call_rate"] = opt(m.think_before_call_rate);
    metrics["decision_accuracy"] = m.decision_accuracy;
    j["metrics"] = std::move(metrics);
    ordered_json dist, counts;
    for (auto c : all_error_classes) {
        auto d = m.error_distribution.find(c);
        auto n = m.error_counts.find(c);
        dist[to_string(c)] = d == m.error_distribution.end() ? 0.0 : d->second;
        counts[to_string(c)] = n == m.error_counts.end() ? 0 : n->second;
    }
    j["error_distribution"] = std::move(dist);
    j["error_counts"] = std::move(counts);
    j["by_dialect"] = groups_to_json(m.by_dialect);
    j["by_domain"] = groups_to_json(m.by_domain);
    ordered_json defs;
    for (const auto & d : definitions) {
        defs[d[0]] = d[1];
    }
    j["definitions"] = std::move(defs);
    return j;
}

MetricsReport metrics_report_from_json(const json & j) {
    if (!j.is_object() || !j.contains("metrics")) {
        throw_input("report: not a metrics report");
    }
    MetricsReport m;
    try {
        m.mode = j.value("mode", std::string());
        m.n = j.at("n").get<std::size_t>();
        m.n_positive = j.at("n_positive").get<std::size_t>();
        m.n_negative = j.at("n_negative").get<std::size_t>();
        m.n_parsed_calls = j.value("n_parsed_calls", std::size_t{0});
        const json & x = j.at("metrics");
        m.parse_failure_rate = read_num(x, "parse_failure_rate");
        m.format_validity = read_num(x, "format_validity");
        m.function_name_accuracy = read_opt(x, "function_name_accuracy");
        m.full_call_match = read_opt(x, "full_call_match");
        m.mean_arg_f1 = read_opt(x, "mean_arg_f1");
        m.mean_key_f1 = read_opt(x, "mean_key_f1");
        m.arg_exact_rate = read_opt(x, "arg_exact_rate");
        m.hallucination_rate = read_num(x, "hallucination_rate");
        m.hallucination_on_negatives_rate = read_num(x, "hallucination_on_negatives_rate");
        m.hallucination_unoffered_rate = read_num(x, "hallucination_unoffered_rate");
        m.abstention_accuracy = read_opt(x, "abstention_accuracy");
        m.tool_call_rate = read_num(x, "tool_call_rate");
        m.think_before_call_rate = read_opt(x, "think_before_call_rate");
        m.decision_accuracy = read_num(x, "decision_accuracy");
        for (auto c : all_error_classes) {
            m.error_distribution[c] = j.at("error_distribution").at(to_string(c)).get<double>();
            m.error_counts[c] = j.at("error_counts").at(to_string(c)).get<std::size_t>();
        }
        m.by_dialect = groups_from_json(j.at("by_dialect"));
        m.by_domain = groups_from_json(j.at("by_domain"));
    } catch (const json::exception & e) {
        throw_input(std::string("report: ") + e.what());
    }
    return m;
}

std::string render_report(const MetricsReport & m, report_format format) {
    if (m.n == 0) {
        throw_input("cannot render an empty report (n = 0)");
    }
    if (format == report_format::json) {
        return to_json(m).dump(2, ' ', false, ordered_json::error_handler_t::replace) + "\n";
    }
    const ordered_json j = to_json(m);
    const auto & metrics = j["metrics"];
    std::ostringstream out;
    out << "# Evaluation report\n\n";
    out << "- mode: " << (m.mode.empty() ? "unspecified" : m.mode) << "\n";
    out << "- records: " << m.n << " (" << m.n_positive << " positive, " << m.n_negative << " negative)\n\n";

    out << "## Core metrics\n\n| Metric | Value |\n|---|---:|\n";
    for (const auto & row : metric_rows) {
        const auto & v = metrics[row.key];
        out << "| " << row.label << " | " << fmt4(v.is_null() ? std::nullopt : std::optional<double>(v.get<double>()))
            << " |\n";
    }

    out << "\n## Function Name Accuracy by Dialect\n\n| Dialect | n | Positives | Function Name Accuracy |\n"
           "|---|---:|---:|---:|\n";
    for (const char * d : dialect_order) {
        auto it = m.by_dialect.find(d);
        if (it == m.by_dialect.end()) {
            continue;
        }
        out << "| " << d << " | " << it->second.n << " | " << it->second.n_positive << " | "
            << fmt4(it->second.function_name_accuracy) << " |\n";
    }
    for (const auto & [name, g] : m.by_dialect) {
        bool known = false;
        for (const char * d : dialect_order) {
            known = known || name == d;
        }
        if (!known) {
            out << "| " << name << " | " << g.n << " | " << g.n_positive << " | " << fmt4(g.function_name_accuracy)
                << " |\n";
        }
    }

    out << "\n## Function Name Accuracy by Domain\n\n| Domain | n | Positives | Function Name Accuracy |\n"
           "|---|---:|---:|---:|\n";
    for (const auto & [name, g] : m.by_domain) {
        out << "| " << name << " | " << g.n << " | " << g.n_positive << " | " << fmt4(g.function_name_accuracy)
            << " |\n";
    }

    out << "\n## Error Distribution\n\n| Error Type | Count | Share | Percent |\n|---|---:|---:|---:|\n";
    for (auto c : all_error_classes) {
        const double share = m.error_distribution.count(c) ? m.error_distribution.at(c) : 0.0;
        const std::size_t count = m.error_counts.count(c) ? m.error_counts.at(c) : 0;
        out << "| " << display_name(c) << " | " << count << " | " << fmt4(share) << " | " << fmt_percent(share)
            << " |\n";
    }

    out << "\n## Definitions\n\n";
    for (const auto & d : definitions) {
        out << "- `" << d[0] << "`: " << d[1] << "\n";
    }
    return out.str();
}

} // namespace fcforge
