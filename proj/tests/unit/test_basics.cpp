#include "fcforge/digest.h"
#include "fcforge/error.h"
#include "fcforge/jsonl.h"
#include "fcforge/parallel.h"
#include "fcforge/text.h"
#include "oracles.h"

#include <gtest/gtest.h>

#include <atomic>

using namespace fcforge;

TEST(Text, NfcComposesDecomposedSequences) {
    // "e" + combining acute -> U+00E9
    EXPECT_EQ(nfc("e\xCC\x81"), "\xC3\xA9");
    EXPECT_EQ(nfc("plain ascii"), "plain ascii");
    const std::string arabic = "مرحبا";
    EXPECT_EQ(nfc(arabic), arabic);
}

TEST(Text, TrimAndNormalize) {
    EXPECT_EQ(trim("  a b \t\n"), "a b");
    EXPECT_EQ(trim(""), "");
    EXPECT_EQ(normalize_text("  e\xCC\x81 "), "\xC3\xA9");
    EXPECT_TRUE(is_blank(" \t\n"));
    EXPECT_FALSE(is_blank(" x "));
}

TEST(Text, WhitespaceUnitsAndOccurrences) {
    EXPECT_EQ(count_whitespace_units(""), 0u);
    EXPECT_EQ(count_whitespace_units("مرحبا بالعالم"), 2u);
    EXPECT_EQ(count_whitespace_units("  a\tb\n\nc  "), 3u);
    EXPECT_EQ(count_occurrences("<e>x<e><e>", "<e>"), 3u);
    EXPECT_EQ(count_occurrences("aaaa", "aa"), 2u);
    EXPECT_EQ(count_occurrences("abc", ""), 0u);
}

TEST(Text, Identifiers) {
    EXPECT_TRUE(is_identifier("get_weather"));
    EXPECT_TRUE(is_identifier("v1.get-time"));
    EXPECT_FALSE(is_identifier(""));
    EXPECT_FALSE(is_identifier("get weather"));
    EXPECT_FALSE(is_identifier("a<b"));
}

TEST(Digest, KnownVectors) {
    EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
    EXPECT_NE(mix64(1), mix64(2));
}

TEST(Jsonl, SkipsBlankLinesAndCollectsBadRows) {
    const auto doc = parse_jsonl("{\"a\":1}\n\n  \n[1,2]\nnot json\n{\"b\":\"ب\"}\n");
    ASSERT_EQ(doc.rows.size(), 2u);
    EXPECT_EQ(doc.rows[0].line, 1u);
    EXPECT_EQ(doc.rows[1].line, 6u);
    ASSERT_EQ(doc.bad_rows.size(), 2u);
    EXPECT_EQ(doc.bad_rows[0].line, 4u);
    EXPECT_EQ(doc.bad_rows[1].line, 5u);
}

TEST(Jsonl, ArabicIsNotEscaped) {
    ordered_json j{{"q", "مرحبا"}};
    EXPECT_EQ(dump_compact(j), "{\"q\":\"مرحبا\"}");
    EXPECT_EQ(dump_pretty(j), "{\n  \"q\": \"مرحبا\"\n}\n");
}

TEST(Jsonl, AtomicWriteAndMissingFile) {
    oracle::TempDir dir;
    const auto path = dir.path() / "nested" / "out.txt";
    write_file_atomic(path, "hello");
    EXPECT_EQ(read_file(path), "hello");
    EXPECT_FALSE(std::filesystem::exists(path.string() + ".tmp"));
    try {
        read_file(dir.path() / "missing.jsonl");
        FAIL() << "expected an input error";
    } catch (const error & e) {
        EXPECT_EQ(e.kind(), error_kind::input);
    }
}

TEST(Parallel, VisitsEveryIndexOnceAndRethrowsLowestFailure) {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
    for (auto & h : hits) {
        EXPECT_EQ(h.load(), 1);
    }
    try {
        parallel_for(100, 4, [](std::size_t i) {
            if (i == 30 || i == 90) {
                throw std::runtime_error("at " + std::to_string(i));
            }
        });
        FAIL();
    } catch (const std::runtime_error & e) {
        EXPECT_STREQ(e.what(), "at 30");
    }
}

TEST(Error, KindNames) {
    EXPECT_STREQ(to_string(error_kind::input), "input_error");
    EXPECT_STREQ(to_string(error_kind::internal), "internal_error");
}
