#pragma once

#include <nlohmann/json.hpp>

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace fcforge {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

struct jsonl_row {
    std::size_t line = 0;  // 1-based
    json value;
};

struct jsonl_bad_row {
    std::size_t line = 0;
    std::string reason;
};

struct jsonl_document {
    std::vector<jsonl_row> rows;
    std::vector<jsonl_bad_row> bad_rows;
};

// Blank lines are skipped; lines that do not parse as JSON objects are reported in bad_rows.
jsonl_document read_jsonl(const std::filesystem::path & path);
jsonl_document parse_jsonl(const std::string & content);

std::string read_file(const std::filesystem::path & path);

// Writes to `<path>.tmp` and renames over `path` once the write succeeded.
void write_file_atomic(const std::filesystem::path & path, const std::string & content);

// UTF-8, non-ASCII kept verbatim, invalid bytes replaced.
std::string dump_compact(const json & value);
std::string dump_compact(const ordered_json & value);
std::string dump_pretty(const ordered_json & value);

} // namespace fcforge
