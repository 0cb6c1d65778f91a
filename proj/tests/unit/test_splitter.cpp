#include "fcforge/error.h"
#include "fcforge/splitter.h"
#include "oracles.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

using namespace fcforge;

namespace {

std::vector<Sample> make_samples(std::size_t n, std::uint64_t seed, std::size_t domains = 6) {
    std::mt19937_64 rng(seed);
    std::vector<Sample> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Sample s;
        s.id = "x" + std::to_string(i);
        s.query = "q";
        s.dialect = all_dialects[rng() % 5];
        s.domain = "d" + std::to_string(rng() % domains);
        out.push_back(std::move(s));
    }
    return out;
}

std::set<std::string> ids_of(const std::vector<Sample> & samples, const std::vector<std::size_t> & idx) {
    std::set<std::string> ids;
    for (auto i : idx) {
        ids.insert(samples[i].id);
    }
    return ids;
}

void expect_valid_split(const std::vector<Sample> & samples, const SplitSpec & spec, const SplitResult & r) {
    // A partition of the input.
    std::vector<int> seen(samples.size(), 0);
    for (const auto & part : r.members) {
        EXPECT_TRUE(std::is_sorted(part.begin(), part.end()));
        for (auto i : part) {
            ++seen[i];
        }
    }
    for (auto c : seen) {
        ASSERT_EQ(c, 1);
    }
    std::size_t eligible = 0;
    for (const auto & s : r.strata) {
        EXPECT_EQ(s.counts[0] + s.counts[1] + s.counts[2], s.size) << s.key;
        if (s.size < 3) {
            EXPECT_EQ(s.counts[0], s.size);
            continue;
        }
        eligible += s.size;
        for (std::size_t j = 0; j < 3; ++j) {
            const double quota = spec.ratios[j] * static_cast<double>(s.size);
            EXPECT_LE(std::fabs(static_cast<double>(s.counts[j]) - quota), 1.0 + 1e-9) << s.key;
            EXPECT_TRUE(s.counts[j] == static_cast<std::size_t>(std::floor(quota + 1e-9)) ||
                        s.counts[j] == static_cast<std::size_t>(std::ceil(quota - 1e-9)))
                << s.key << " j=" << j << " count=" << s.counts[j] << " quota=" << quota;
        }
    }
    std::size_t small = 0;
    for (const auto & s : r.strata) {
        small += s.size < 3 ? s.size : 0;
    }
    const auto totals = apportion(eligible, spec.ratios);
    EXPECT_EQ(r.members[0].size(), totals[0] + small);
    EXPECT_EQ(r.members[1].size(), totals[1]);
    EXPECT_EQ(r.members[2].size(), totals[2]);
}

} // namespace

TEST(Apportion, MatchesExactRationalLargestRemainder) {
    std::mt19937_64 rng(3);
    for (int iter = 0; iter < 2000; ++iter) {
        const std::uint64_t den = 3 + rng() % 100000;
        const std::uint64_t a = 1 + rng() % (den - 2);
        const std::uint64_t b = 1 + rng() % (den - a - 1);
        const std::uint64_t c = den - a - b;
        const std::size_t total = rng() % 200000;
        const std::array<double, 3> ratios{static_cast<double>(a) / static_cast<double>(den),
                                           static_cast<double>(b) / static_cast<double>(den),
                                           static_cast<double>(c) / static_cast<double>(den)};
        const auto got = apportion(total, ratios);
        const auto want = oracle::apportion_rational(total, {a, b, c}, den);
        ASSERT_EQ(got[0] + got[1] + got[2], total);
        // Exact ties can resolve differently in floating point; the per-slot error bound still holds.
        for (std::size_t j = 0; j < 3; ++j) {
            const double exact = static_cast<double>(total) * ratios[j];
            ASSERT_LT(std::fabs(static_cast<double>(got[j]) - exact), 1.0 + 1e-6);
            ASSERT_LE(got[j] > want[j] ? got[j] - want[j] : want[j] - got[j], 1u);
        }
    }
}

TEST(Apportion, KnownTotals) {
    EXPECT_EQ(apportion(10, {0.8, 0.1, 0.1}), (std::array<std::size_t, 3>{8, 1, 1}));
    EXPECT_EQ(apportion(11, {0.8, 0.1, 0.1}), (std::array<std::size_t, 3>{9, 1, 1}));
    EXPECT_EQ(apportion(0, {0.8, 0.1, 0.1}), (std::array<std::size_t, 3>{0, 0, 0}));
    EXPECT_EQ(apportion(50751, {41104.0 / 50751, 4568.0 / 50751, 5079.0 / 50751}),
              (std::array<std::size_t, 3>{41104, 4568, 5079}));
}

TEST(StratifiedSplit, InvariantsOnRandomCorpora) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto samples = make_samples(200 + seed * 37, seed, 2 + seed % 9);
        SplitSpec spec;
        spec.seed = seed;
        if (seed % 3 == 0) {
            spec.ratios = {0.7, 0.2, 0.1};
        }
        const auto r = stratified_split(samples, spec);
        expect_valid_split(samples, spec, r);
    }
}

TEST(StratifiedSplit, MembershipIgnoresInputOrder) {
    auto samples = make_samples(3000, 8);
    SplitSpec spec;
    spec.seed = 77;
    const auto a = stratified_split(samples, spec);
    std::mt19937_64 rng(1);
    std::shuffle(samples.begin(), samples.end(), rng);
    const auto b = stratified_split(samples, spec);
    // ids only: indices differ after the shuffle
    const auto ref = make_samples(3000, 8);
    for (std::size_t p = 0; p < 3; ++p) {
        EXPECT_EQ(ids_of(ref, a.members[p]), ids_of(samples, b.members[p]));
    }
    spec.seed = 78;
    const auto c = stratified_split(samples, spec);
    EXPECT_NE(ids_of(ref, a.members[2]), ids_of(samples, c.members[2]));
}

TEST(StratifiedSplit, SmallStrataGoToTrainWithWarning) {
    auto samples = make_samples(100, 2, 2);
    Sample lone;
    lone.id = "lone";
    lone.query = "q";
    lone.domain = "rare";
    samples.push_back(lone);
    const auto r = stratified_split(samples, SplitSpec{});
    ASSERT_EQ(r.warnings.size(), 1u);
    EXPECT_NE(r.warnings[0].find("MSA|rare"), std::string::npos);
    EXPECT_EQ(ids_of(samples, r.train()).count("lone"), 1u);
    expect_valid_split(samples, SplitSpec{}, r);
}

TEST(StratifiedSplit, Errors) {
    auto samples = make_samples(10, 1);
    samples[3].id = samples[4].id;
    EXPECT_THROW(stratified_split(samples, SplitSpec{}), error);
    EXPECT_THROW(stratified_split(std::vector<Sample>{}, SplitSpec{}), error);
    SplitSpec bad;
    bad.ratios = {0.8, 0.1, 0.2};
    try {
        bad.validate();
        FAIL();
    } catch (const error & e) {
        EXPECT_EQ(e.kind(), error_kind::config);
    }
    bad.ratios = {1.0, 0.0, 0.0};
    EXPECT_THROW(bad.validate(), error);
    bad = SplitSpec{};
    bad.keys = {strata_key::dialect, strata_key::dialect};
    EXPECT_THROW(bad.validate(), error);
    bad.keys.clear();
    EXPECT_THROW(bad.validate(), error);
    EXPECT_THROW(strata_key_from_string("colour"), error);
}

TEST(StratifiedSplit, ToolKeyAndManifest) {
    auto samples = make_samples(60, 4, 1);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (i % 2) {
            samples[i].requires_function = true;
            samples[i].target = ToolCall{i % 4 == 1 ? "get_time" : "get_weather", {}};
        }
    }
    SplitSpec spec;
    spec.keys = {strata_key::tool};
    const auto r = stratified_split(samples, spec);
    ASSERT_EQ(r.strata.size(), 3u);
    EXPECT_EQ(r.strata[0].key, "<none>");
    const auto m = split_manifest(samples, spec, r);
    EXPECT_EQ(m["totals"]["train"].get<std::size_t>() + m["totals"]["val"].get<std::size_t>() +
                  m["totals"]["test"].get<std::size_t>(),
              samples.size());
    EXPECT_EQ(m["strata"].size(), 3u);
    EXPECT_EQ(m["member_checksums"]["test"].get<std::string>().size(), 64u);
}
