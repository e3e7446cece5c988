#pragma once

#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>

#include <json.hpp>

namespace hetqa {

/// Calls fn(record, line_number) for every non-blank line. Lines that are not
/// valid JSON objects raise ParseError; anything fn throws is rethrown as a
/// ParseError for that line.
void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(const nlohmann::json&, std::size_t)>& fn);

/// Writes to a sibling temp file and renames over the target.
class AtomicWriter {
public:
    explicit AtomicWriter(std::filesystem::path target);
    AtomicWriter(const AtomicWriter&) = delete;
    AtomicWriter& operator=(const AtomicWriter&) = delete;
    ~AtomicWriter();

    void write(std::string_view bytes);
    void write_json_line(const nlohmann::json& j);
    void commit();

private:
    std::filesystem::path target_;
    std::filesystem::path temp_;
    std::FILE* file_ = nullptr;
    bool committed_ = false;
};

void write_text_atomic(const std::filesystem::path& path, std::string_view text);

/// Compact JSON with keys in sorted order. Used for every artifact we write.
std::string dump_compact(const nlohmann::json& j);

const nlohmann::json& require(const nlohmann::json& j, const char* key);
std::string require_string(const nlohmann::json& j, const char* key);

}  // namespace hetqa
