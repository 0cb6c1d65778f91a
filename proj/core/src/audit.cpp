#include "fcforge/audit.h"

#include "fcforge/error.h"
#include "fcforge/parallel.h"
#include "fcforge/text.h"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <sstream>
#include <tuple>

namespace fcforge {

namespace {

struct SampleAudit {
    bool positive = false;
    bool enum_legacy = false;
    bool enum_fixed = false;
    bool valid_legacy = false;
    bool valid_fixed = false;
    bool unknown_tool = false;
    bool silent_negative = false;
    bool oversized = false;
};

std::string normalized_name(std::string_view name) {
    std::string out;
    for (unsigned char c : name) {
        if (std::isalnum(c)) {
            out.push_back(static_cast<char>(std::tolower(c)));
        }
    }
    return out;
}

using signature = std::vector<std::tuple<std::string, value_type, bool>>;

signature signature_of(const ToolSchema & tool) {
    signature sig;
    for (const auto & p : tool.parameters) {
        sig.emplace_back(p.name, p.type, p.required);
    }
    std::sort(sig.begin(), sig.end());
    return sig;
}

std::size_t find_root(std::vector<std::size_t> & parent, std::size_t i) {
    while (parent[i] != i) {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    return i;
}

} // namespace

std::vector<std::set<std::string>> detect_duplicates(std::span<const ToolSchema> inventory) {
    const std::size_t n = inventory.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    std::vector<signature> sigs;
    std::vector<std::string> names;
    sigs.reserve(n);
    names.reserve(n);
    for (const auto & t : inventory) {
        sigs.push_back(signature_of(t));
        names.push_back(normalized_name(t.name));
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (sigs[i] == sigs[j] || names[i] == names[j]) {
                parent[find_root(parent, i)] = find_root(parent, j);
            }
        }
    }
    std::map<std::size_t, std::set<std::string>> groups;
    for (std::size_t i = 0; i < n; ++i) {
        groups[find_root(parent, i)].insert(inventory[i].name);
    }
    std::vector<std::set<std::string>> out;
    for (auto & [root, members] : groups) {
        if (members.size() >= 2) {
            out.push_back(std::move(members));
        }
    }
    std::sort(out.begin(), out.end(), [](const auto & a, const auto & b) { return *a.begin() < *b.begin(); });
    return out;
}

AuditReport audit(const Corpus & corpus, std::span<const ToolSchema> inventory, const AuditOptions & options) {
    if (inventory.empty()) {
        throw_config("audit: inventory is empty");
    }
    const auto & samples = corpus.samples;
    const TokenCounter counter = options.counter ? options.counter : default_token_counter(options.serializer);
    std::vector<SampleAudit> per_sample(samples.size());

    parallel_for(samples.size(), options.jobs, [&](std::size_t i) {
        const Sample & s = samples[i];
        SampleAudit & a = per_sample[i];
        a.positive = s.requires_function;
        if (!s.requires_function) {
            a.silent_negative = !s.response || is_blank(*s.response);
        } else {
            const auto legacy = validate_call(*s.target, inventory, enum_rule::legacy);
            const auto fixed = validate_call(*s.target, inventory, enum_rule::none_is_valid);
            a.enum_legacy = legacy.has(violation_kind::enum_violation);
            a.enum_fixed = fixed.has(violation_kind::enum_violation);
            a.valid_legacy = legacy.valid();
            a.valid_fixed = fixed.valid();
            a.unknown_tool = legacy.has(violation_kind::unknown_tool);
        }
        std::size_t tokens = 0;
        if (s.token_count) {
            tokens = *s.token_count;
        } else {
            std::string text = render_prompt(s, inventory, options.serializer);
            if (!a.unknown_tool) {
                text += render_completion(s, s.target ? find_tool(inventory, s.target->tool_name) : nullptr,
                                          options.serializer);
            }
            tokens = counter(text);
        }
        a.oversized = tokens > options.token_budget;
    });

    AuditReport r;
    r.token_budget = options.token_budget;
    r.rejected_rows = corpus.rejected;
    r.total_samples = samples.size() + corpus.rejected.size();
    for (const auto & row : corpus.rejected) {
        (row.problem == row_problem::empty_query ? r.empty_queries : r.malformed_rows) += 1;
    }
    std::map<std::string, std::pair<std::size_t, std::size_t>> valid_per_tool;  // (legacy, fixed)
    for (const auto & t : inventory) {
        valid_per_tool[t.name] = {0, 0};
    }
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto & a = per_sample[i];
        if (a.positive) {
            ++r.positives;
        } else {
            ++r.negatives;
        }
        r.enum_violations_legacy += a.enum_legacy;
        r.enum_violations_fixed += a.enum_fixed;
        r.invalid_legacy += a.positive && !a.valid_legacy;
        r.invalid_fixed += a.positive && !a.valid_fixed;
        r.unknown_tool_samples += a.unknown_tool;
        r.oversized_prompts += a.oversized;
        if (a.silent_negative) {
            r.silent_negatives.push_back(samples[i].id);
        }
        if (a.positive && !a.unknown_tool) {
            auto & counts = valid_per_tool[samples[i].target->tool_name];
            counts.first += a.valid_legacy;
            counts.second += a.valid_fixed;
        }
    }
    r.samples_restored_by_fix = r.enum_violations_legacy - r.enum_violations_fixed;
    for (const auto & t : inventory) {
        const auto [legacy, fixed] = valid_per_tool[t.name];
        if (legacy == 0) {
            r.dead_tools.push_back(t.name);
            if (fixed > 0) {
                r.revived_tools.push_back(t.name);
            }
        }
    }
    std::sort(r.silent_negatives.begin(), r.silent_negatives.end());
    r.duplicate_tool_groups = detect_duplicates(inventory);
    return r;
}

ordered_json to_json(const AuditReport & r) {
    ordered_json j;
    j["total_samples"] = r.total_samples;
    j["empty_queries"] = r.empty_queries;
    j["malformed_rows"] = r.malformed_rows;
    j["positives"] = r.positives;
    j["negatives"] = r.negatives;
    j["enum_violations_legacy"] = r.enum_violations_legacy;
    j["enum_violations_fixed"] = r.enum_violations_fixed;
    j["samples_restored_by_fix"] = r.samples_restored_by_fix;
    j["invalid_legacy"] = r.invalid_legacy;
    j["invalid_fixed"] = r.invalid_fixed;
    j["unknown_tool_samples"] = r.unknown_tool_samples;
    j["duplicate_tool_groups"] = ordered_json::array();
    for (const auto & g : r.duplicate_tool_groups) {
        j["duplicate_tool_groups"].push_back(std::vector<std::string>(g.begin(), g.end()));
    }
    j["dead_tools"] = r.dead_tools;
    j["revived_tools"] = r.revived_tools;
    j["silent_negatives"] = r.silent_negatives;
    j["token_budget"] = r.token_budget;
    j["oversized_prompts"] = r.oversized_prompts;
    j["rejected_rows"] = ordered_json::array();
    for (const auto & row : r.rejected_rows) {
        j["rejected_rows"].push_back(ordered_json{
            {"line", row.line},
            {"id", row.id},
            {"problem", row.problem == row_problem::empty_query ? "empty_query" : "malformed"},
            {"reason", row.reason},
        });
    }
    return j;
}

std::string render_audit_text(const AuditReport & r) {
    std::ostringstream out;
    out << "audit report\n"
        << "  samples            " << r.total_samples << " (" << r.positives << " positive, " << r.negatives
        << " negative)\n"
        << "  rejected rows      " << r.rejected_rows.size() << " (" << r.empty_queries << " empty queries, "
        << r.malformed_rows << " malformed)\n"
        << "  enum violations    legacy " << r.enum_violations_legacy << ", none-is-valid " << r.enum_violations_fixed
        << ", restored " << r.samples_restored_by_fix << "\n"
        << "  invalid positives  legacy " << r.invalid_legacy << ", none-is-valid " << r.invalid_fixed << "\n"
        << "  unknown tool calls " << r.unknown_tool_samples << "\n"
        << "  oversized prompts  " << r.oversized_prompts << " over " << r.token_budget << " tokens (full inventory)\n"
        << "  silent negatives   " << r.silent_negatives.size() << "\n";
    auto list = [&](const char * label, const std::vector<std::string> & names) {
        out << "  " << label;
        if (names.empty()) {
            out << " none";
        }
        for (const auto & n : names) {
            out << ' ' << n;
        }
        out << '\n';
    };
    list("dead tools        ", r.dead_tools);
    list("revived by fix    ", r.revived_tools);
    out << "  duplicate groups   " << r.duplicate_tool_groups.size() << '\n';
    for (const auto & g : r.duplicate_tool_groups) {
        out << "    {";
        bool first = true;
        for (const auto & n : g) {
            out << (first ? "" : ", ") << n;
            first = false;
        }
        out << "}\n";
    }
    return out.str();
}

// --- normalization ----------------------------------------------------------

void NormalizationMap::validate(std::span<const ToolSchema> inventory) const {
    for (const auto & [tool_name, params] : entries) {
        const ToolSchema * tool = find_tool(inventory, tool_name);
        if (tool == nullptr) {
            throw_config("normalization map: unknown tool '" + tool_name + "'");
        }
        for (const auto & [param_name, variants] : params) {
            const ParameterSpec * p = tool->find_parameter(param_name);
            if (p == nullptr || !p->has_enum()) {
                throw_config("normalization map: '" + tool_name + "." + param_name + "' is not an enum parameter");
            }
            std::set<std::string> keys;
            for (const auto & [variant, canonical] : variants) {
                if (std::find(p->enum_values->begin(), p->enum_values->end(), canonical) == p->enum_values->end()) {
                    throw_config("normalization map: '" + canonical + "' is not an enum value of '" + tool_name + "." +
                                 param_name + "'");
                }
                if (!keys.insert(normalize_text(variant)).second) {
                    throw_config("normalization map: variant '" + variant + "' repeats for '" + tool_name + "." +
                                 param_name + "'");
                }
            }
            for (const auto & [variant, canonical] : variants) {
                auto it = variants.find(canonical);
                if (it != variants.end() && it->second != canonical) {
                    throw_config("normalization map: canonical '" + canonical + "' is itself mapped to '" +
                                 it->second + "'");
                }
            }
        }
    }
}

NormalizationMap normalization_map_from_json(const json & j) {
    if (!j.is_object()) {
        throw_config("normalization map must be a JSON object");
    }
    NormalizationMap map;
    for (auto tool = j.begin(); tool != j.end(); ++tool) {
        if (!tool->is_object()) {
            throw_config("normalization map: entry for '" + tool.key() + "' must be an object");
        }
        for (auto param = tool->begin(); param != tool->end(); ++param) {
            if (!param->is_object()) {
                throw_config("normalization map: '" + tool.key() + "." + param.key() + "' must be an object");
            }
            auto & variants = map.entries[tool.key()][param.key()];
            for (auto v = param->begin(); v != param->end(); ++v) {
                if (!v->is_string()) {
                    throw_config("normalization map: canonical values must be strings");
                }
                variants[normalize_text(v.key())] = v->get<std::string>();
            }
        }
    }
    return map;
}

ordered_json to_json(const NormalizationMap & map) {
    ordered_json j = ordered_json::object();
    for (const auto & [tool, params] : map.entries) {
        for (const auto & [param, variants] : params) {
            for (const auto & [variant, canonical] : variants) {
                j[tool][param][variant] = canonical;
            }
        }
    }
    return j;
}

Sample normalize_sample(const Sample & sample, const NormalizationMap & map) {
    if (!sample.target) {
        return sample;
    }
    auto tool = map.entries.find(sample.target->tool_name);
    if (tool == map.entries.end()) {
        return sample;
    }
    Sample out = sample;
    for (auto & [name, value] : out.target->arguments) {
        if (!value.is_string()) {
            continue;
        }
        auto param = tool->second.find(name);
        if (param == tool->second.end()) {
            continue;
        }
        auto hit = param->second.find(normalize_text(value.get<std::string>()));
        if (hit != param->second.end()) {
            value = hit->second;
        }
    }
    return out;
}

// --- pruning ----------------------------------------------------------------

void PrunePlan::validate(std::span<const ToolSchema> inventory) const {
    for (const auto & [alias, rule] : merge) {
        if (remove.count(alias) != 0) {
            throw_config("prune plan: '" + alias + "' is both removed and merged");
        }
        if (remove.count(rule.target) != 0) {
            throw_config("prune plan: merge target '" + rule.target + "' is scheduled for removal");
        }
        if (merge.count(rule.target) != 0) {
            throw_config("prune plan: merge target '" + rule.target + "' is itself an alias");
        }
        if (find_tool(inventory, rule.target) == nullptr) {
            throw_config("prune plan: merge target '" + rule.target + "' is not in the inventory");
        }
    }
}

PrunePlan prune_plan_from_json(const json & j) {
    if (!j.is_object()) {
        throw_config("prune plan must be a JSON object");
    }
    PrunePlan plan;
    if (auto it = j.find("remove"); it != j.end()) {
        if (!it->is_array()) {
            throw_config("prune plan: remove must be an array");
        }
        for (const auto & name : *it) {
            if (!name.is_string()) {
                throw_config("prune plan: remove entries must be strings");
            }
            plan.remove.insert(name.get<std::string>());
        }
    }
    if (auto it = j.find("merge"); it != j.end()) {
        if (!it->is_object()) {
            throw_config("prune plan: merge must be an object");
        }
        for (auto m = it->begin(); m != it->end(); ++m) {
            MergeRule rule;
            if (m->is_string()) {
                rule.target = m->get<std::string>();
            } else if (m->is_object() && m->contains("target") && (*m)["target"].is_string()) {
                rule.target = (*m)["target"].get<std::string>();
                if (auto r = m->find("param_renames"); r != m->end() && !r->is_null()) {
                    if (!r->is_object()) {
                        throw_config("prune plan: param_renames must be an object");
                    }
                    for (auto p = r->begin(); p != r->end(); ++p) {
                        if (!p->is_string()) {
                            throw_config("prune plan: param_renames values must be strings");
                        }
                        rule.param_renames[p.key()] = p->get<std::string>();
                    }
                }
            } else {
                throw_config("prune plan: merge entry for '" + m.key() + "' needs a target");
            }
            plan.merge[m.key()] = std::move(rule);
        }
    }
    return plan;
}

ordered_json to_json(const PrunePlan & plan) {
    ordered_json j;
    j["remove"] = std::vector<std::string>(plan.remove.begin(), plan.remove.end());
    j["merge"] = ordered_json::object();
    for (const auto & [alias, rule] : plan.merge) {
        ordered_json m;
        m["target"] = rule.target;
        if (!rule.param_renames.empty()) {
            m["param_renames"] = rule.param_renames;
        }
        j["merge"][alias] = std::move(m);
    }
    return j;
}

PruneResult apply_prune(std::span<const Sample> samples, std::span<const ToolSchema> inventory, const PrunePlan & plan) {
    plan.validate(inventory);
    PruneResult result;
    for (const auto & tool : inventory) {
        if (plan.remove.count(tool.name) != 0) {
            result.removed_tools.push_back(tool.name);
        } else if (plan.merge.count(tool.name) != 0) {
            result.merged_tools.push_back(tool.name);
        } else {
            result.inventory.push_back(tool);
        }
    }
    result.samples.reserve(samples.size());
    for (const auto & s : samples) {
        if (!s.target) {
            result.samples.push_back(s);
            continue;
        }
        const auto & name = s.target->tool_name;
        if (auto m = plan.merge.find(name); m != plan.merge.end()) {
            Sample rewritten = s;
            rewritten.target->tool_name = m->second.target;
            Arguments renamed;
            for (const auto & [key, value] : s.target->arguments) {
                auto r = m->second.param_renames.find(key);
                const std::string & new_key = r == m->second.param_renames.end() ? key : r->second;
                if (!renamed.emplace(new_key, value).second) {
                    throw_config("prune plan: renaming '" + key + "' of '" + name + "' collides with '" + new_key +
                                 "'");
                }
            }
            rewritten.target->arguments = std::move(renamed);
            result.samples.push_back(std::move(rewritten));
            ++result.rewritten_samples;
            continue;
        }
        if (plan.remove.count(name) != 0 || find_tool(result.inventory, name) == nullptr) {
            ++result.dropped_samples;
            continue;
        }
        result.samples.push_back(s);
    }
    return result;
}

} // namespace fcforge
