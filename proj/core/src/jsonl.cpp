#include "fcforge/jsonl.h"

#include "fcforge/error.h"

#include <fstream>
#include <sstream>
#include <system_error>

namespace fcforge {

std::string read_file(const std::filesystem::path & path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw_input("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

jsonl_document parse_jsonl(const std::string & content) {
    jsonl_document doc;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= content.size()) {
        auto nl = content.find('\n', pos);
        if (nl == std::string::npos) {
            nl = content.size();
        }
        ++line_no;
        std::string_view line(content.data() + pos, nl - pos);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        bool blank = true;
        for (char c : line) {
            if (c != ' ' && c != '\t') {
                blank = false;
                break;
            }
        }
        if (!blank) {
            try {
                json value = json::parse(line);
                if (!value.is_object()) {
                    doc.bad_rows.push_back({line_no, "row is not a JSON object"});
                } else {
                    doc.rows.push_back({line_no, std::move(value)});
                }
            } catch (const json::parse_error & e) {
                doc.bad_rows.push_back({line_no, e.what()});
            }
        }
        if (nl == content.size()) {
            break;
        }
        pos = nl + 1;
    }
    return doc;
}

jsonl_document read_jsonl(const std::filesystem::path & path) {
    return parse_jsonl(read_file(path));
}

void write_file_atomic(const std::filesystem::path & path, const std::string & content) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write " + tmp.string());
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            throw std::runtime_error("write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw std::runtime_error("cannot rename " + tmp.string() + ": " + ec.message());
    }
}

std::string dump_compact(const json & value) {
    return value.dump(-1, ' ', false, json::error_handler_t::replace);
}

std::string dump_compact(const ordered_json & value) {
    return value.dump(-1, ' ', false, ordered_json::error_handler_t::replace);
}

std::string dump_pretty(const ordered_json & value) {
    return value.dump(2, ' ', false, ordered_json::error_handler_t::replace) + "\n";
}

} // namespace fcforge
