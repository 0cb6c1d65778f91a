#include "fcforge/splitter.h"

#include "fcforge/digest.h"
#include "fcforge/error.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <set>

namespace fcforge {

const char * to_string(strata_key key) {
    switch (key) {
        case strata_key::dialect: return "dialect";
        case strata_key::domain:  return "domain";
        case strata_key::tool:    return "tool";
    }
    return "dialect";
}

strata_key strata_key_from_string(std::string_view name) {
    for (auto k : {strata_key::dialect, strata_key::domain, strata_key::tool}) {
        if (name == to_string(k)) {
            return k;
        }
    }
    throw_config("unknown strata key '" + std::string(name) + "'");
}

void SplitSpec::validate() const {
    double sum = 0;
    for (double r : ratios) {
        if (!(r > 0.0 && r < 1.0)) {
            throw_config("split ratios must each lie in (0, 1)");
        }
        sum += r;
    }
    if (std::fabs(sum - 1.0) > 1e-9) {
        throw_config("split ratios must sum to 1");
    }
    if (keys.empty()) {
        throw_config("split needs at least one strata key");
    }
    std::set<strata_key> seen(keys.begin(), keys.end());
    if (seen.size() != keys.size()) {
        throw_config("split strata keys repeat");
    }
}

namespace {

constexpr double quota_eps = 1e-9;

struct Quota {
    std::size_t floor = 0;
    double remainder = 0;
};

Quota quota_of(double ratio, std::size_t n) {
    const double q = ratio * static_cast<double>(n);
    auto f = static_cast<std::size_t>(std::floor(q + quota_eps));
    f = std::min(f, n);
    double rem = q - static_cast<double>(f);
    if (rem < quota_eps) {
        rem = 0;
    }
    return {f, rem};
}

// Row s must receive row_need[s] extra units and column j col_need[j], one unit at most
// per eligible cell. Solved as a max flow: greedy by remainder, then augmenting paths.
std::vector<std::array<bool, 3>> controlled_round(const std::vector<std::array<double, 3>> & remainders,
                                                  const std::vector<std::size_t> & row_need,
                                                  const std::array<std::size_t, 3> & col_need) {
    const std::size_t rows = remainders.size();
    std::vector<std::array<bool, 3>> take(rows, {false, false, false});
    std::vector<std::size_t> row_left = row_need;
    std::array<std::size_t, 3> col_left = col_need;

    struct Cell {
        double rem;
        std::size_t row;
        std::size_t col;
    };
    std::vector<Cell> cells;
    for (std::size_t s = 0; s < rows; ++s) {
        for (std::size_t j = 0; j < 3; ++j) {
            if (remainders[s][j] > 0) {
                cells.push_back({remainders[s][j], s, j});
            }
        }
    }
    std::stable_sort(cells.begin(), cells.end(), [](const Cell & a, const Cell & b) { return a.rem > b.rem; });
    for (const auto & c : cells) {
        if (row_left[c.row] > 0 && col_left[c.col] > 0) {
            take[c.row][c.col] = true;
            --row_left[c.row];
            --col_left[c.col];
        }
    }

    // Augment from rows that still need units. Path: row -> (free eligible cell) col, either col has
    // spare capacity, or col -> (taken cell) other row -> ... alternating.
    for (std::size_t start = 0; start < rows; ++start) {
        while (row_left[start] > 0) {
            // BFS over columns; parent links record (row, col) hops.
            std::array<long, 3> col_parent_row{-1, -1, -1};
            std::vector<long> row_parent_col(rows, -1);
            std::vector<bool> row_seen(rows, false);
            std::deque<std::size_t> queue{start};
            row_seen[start] = true;
            long end_col = -1;
            while (!queue.empty() && end_col < 0) {
                const auto s = queue.front();
                queue.pop_front();
                for (std::size_t j = 0; j < 3 && end_col < 0; ++j) {
                    if (remainders[s][j] <= 0 || take[s][j] || col_parent_row[j] >= 0) {
                        continue;
                    }
                    col_parent_row[j] = static_cast<long>(s);
                    if (col_left[j] > 0) {
                        end_col = static_cast<long>(j);
                        break;
                    }
                    for (std::size_t r = 0; r < rows; ++r) {
                        if (!row_seen[r] && take[r][j]) {
                            row_seen[r] = true;
                            row_parent_col[r] = static_cast<long>(j);
                            queue.push_back(r);
                        }
                    }
                }
            }
            if (end_col < 0) {
                throw error(error_kind::internal, "stratified split: no apportionment satisfies the totals");
            }
            --col_left[static_cast<std::size_t>(end_col)];
            --row_left[start];
            auto j = static_cast<std::size_t>(end_col);
            while (true) {
                const auto s = static_cast<std::size_t>(col_parent_row[j]);
                take[s][j] = true;
                if (s == start) {
                    break;
                }
                const auto prev = static_cast<std::size_t>(row_parent_col[s]);
                take[s][prev] = false;
                j = prev;
            }
        }
    }
    return take;
}

} // namespace

std::array<std::size_t, 3> apportion(std::size_t total, const std::array<double, 3> & ratios) {
    std::array<std::size_t, 3> out{};
    std::array<double, 3> rem{};
    std::size_t assigned = 0;
    for (std::size_t j = 0; j < 3; ++j) {
        auto q = quota_of(ratios[j], total);
        out[j] = q.floor;
        rem[j] = q.remainder;
        assigned += q.floor;
    }
    std::array<std::size_t, 3> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
    for (std::size_t i = 0; assigned < total; i = (i + 1) % 3) {
        ++out[order[i]];
        ++assigned;
    }
    while (assigned > total) {
        // Only reachable with ratios summing above 1 beyond the epsilon; trim the smallest remainder.
        auto j = order[2];
        if (out[j] > 0) {
            --out[j];
            --assigned;
        }
        std::rotate(order.rbegin(), order.rbegin() + 1, order.rend());
    }
    return out;
}

std::string stratum_label(const Sample & sample, std::span<const strata_key> keys) {
    std::string label;
    for (std::size_t i = 0; i < keys.size(); ++i) {
        if (i > 0) {
            label += '|';
        }
        switch (keys[i]) {
            case strata_key::dialect: label += to_string(sample.dialect); break;
            case strata_key::domain:  label += sample.domain; break;
            case strata_key::tool:    label += sample.target ? sample.target->tool_name : std::string("<none>"); break;
        }
    }
    return label;
}

SplitResult stratified_split(std::span<const Sample> samples, const SplitSpec & spec) {
    spec.validate();
    if (samples.empty()) {
        throw_input("stratified split: no samples");
    }
    {
        std::set<std::string_view> ids;
        for (const auto & s : samples) {
            if (s.domain.empty() && std::find(spec.keys.begin(), spec.keys.end(), strata_key::domain) != spec.keys.end()) {
                throw_input("stratified split: sample '" + s.id + "' has no domain");
            }
            if (!ids.insert(s.id).second) {
                throw_input("stratified split: duplicate sample id '" + s.id + "'");
            }
        }
    }

    std::map<std::string, std::vector<std::size_t>> strata;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        strata[stratum_label(samples[i], spec.keys)].push_back(i);
    }

    SplitResult result;
    std::vector<std::string> eligible;
    std::size_t eligible_total = 0;
    for (const auto & [label, members] : strata) {
        if (members.size() < 3) {
            result.warnings.push_back("stratum '" + label + "' has " + std::to_string(members.size()) +
                                      " samples; assigned wholly to train");
        } else {
            eligible.push_back(label);
            eligible_total += members.size();
        }
    }

    std::vector<std::array<std::size_t, 3>> cell_counts(eligible.size());
    if (!eligible.empty()) {
        const auto totals = apportion(eligible_total, spec.ratios);
        std::vector<std::array<double, 3>> remainders(eligible.size());
        std::vector<std::size_t> row_need(eligible.size());
        std::array<std::size_t, 3> floor_sum{};
        for (std::size_t s = 0; s < eligible.size(); ++s) {
            const auto n = strata[eligible[s]].size();
            std::size_t row_floor = 0;
            for (std::size_t j = 0; j < 3; ++j) {
                auto q = quota_of(spec.ratios[j], n);
                cell_counts[s][j] = q.floor;
                remainders[s][j] = q.remainder;
                row_floor += q.floor;
                floor_sum[j] += q.floor;
            }
            if (row_floor > n) {
                throw error(error_kind::internal, "stratified split: floors exceed stratum size");
            }
            row_need[s] = n - row_floor;
        }
        std::array<std::size_t, 3> col_need{};
        for (std::size_t j = 0; j < 3; ++j) {
            if (totals[j] < floor_sum[j]) {
                throw error(error_kind::internal, "stratified split: apportioned total below floor sum");
            }
            col_need[j] = totals[j] - floor_sum[j];
        }
        auto take = controlled_round(remainders, row_need, col_need);
        for (std::size_t s = 0; s < eligible.size(); ++s) {
            for (std::size_t j = 0; j < 3; ++j) {
                cell_counts[s][j] += take[s][j] ? 1 : 0;
            }
        }
    }

    std::vector<int> assignment(samples.size(), 0);
    std::size_t eligible_index = 0;
    for (auto & [label, members] : strata) {
        StratumCounts sc;
        sc.key = label;
        sc.size = members.size();
        if (members.size() < 3) {
            sc.counts = {members.size(), 0, 0};
        } else {
            sc.counts = cell_counts[eligible_index++];
            std::vector<std::pair<std::uint64_t, std::size_t>> order;
            order.reserve(members.size());
            for (auto i : members) {
                order.emplace_back(mix64(spec.seed ^ fnv1a64(samples[i].id)), i);
            }
            std::sort(order.begin(), order.end(), [&](const auto & a, const auto & b) {
                if (a.first != b.first) {
                    return a.first < b.first;
                }
                return samples[a.second].id < samples[b.second].id;
            });
            std::size_t k = 0;
            for (int part = 0; part < 3; ++part) {
                for (std::size_t c = 0; c < sc.counts[static_cast<std::size_t>(part)]; ++c) {
                    assignment[order[k++].second] = part;
                }
            }
        }
        result.strata.push_back(std::move(sc));
    }
    for (std::size_t i = 0; i < samples.size(); ++i) {
        result.members[static_cast<std::size_t>(assignment[i])].push_back(i);
    }
    return result;
}

ordered_json split_manifest(std::span<const Sample> samples, const SplitSpec & spec, const SplitResult & result) {
    ordered_json j;
    j["seed"] = spec.seed;
    j["ratios"] = spec.ratios;
    j["strata_keys"] = ordered_json::array();
    for (auto k : spec.keys) {
        j["strata_keys"].push_back(to_string(k));
    }
    static constexpr const char * names[] = {"train", "val", "test"};
    ordered_json totals;
    ordered_json checksums;
    for (std::size_t p = 0; p < 3; ++p) {
        totals[names[p]] = result.members[p].size();
        std::vector<std::string_view> ids;
        for (auto i : result.members[p]) {
            ids.push_back(samples[i].id);
        }
        std::sort(ids.begin(), ids.end());
        std::string joined;
        for (auto id : ids) {
            joined += id;
            joined += '\n';
        }
        checksums[names[p]] = sha256_hex(joined);
    }
    j["totals"] = std::move(totals);
    j["strata"] = ordered_json::array();
    for (const auto & s : result.strata) {
        j["strata"].push_back(ordered_json{
            {"key", s.key}, {"size", s.size}, {"train", s.counts[0]}, {"val", s.counts[1]}, {"test", s.counts[2]}});
    }
    j["member_checksums"] = std::move(checksums);
    j["warnings"] = result.warnings;
    return j;
}

} // namespace fcforge
