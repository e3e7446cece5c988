#include "hetqa/jsonl.hpp"

#include <fstream>
#include <random>

#include "hetqa/error.hpp"

namespace hetqa {

void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(const nlohmann::json&, std::size_t)>& fn) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path.string(), "cannot open input");
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(line_no, path.string() + ": invalid JSON: " + e.what());
        }
        if (!j.is_object()) throw ParseError(line_no, path.string() + ": expected a JSON object");
        try {
            fn(j, line_no);
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception& e) {
            throw ParseError(line_no, path.string() + ": " + e.what());
        }
    }
}

AtomicWriter::AtomicWriter(std::filesystem::path target) : target_(std::move(target)) {
    if (target_.has_parent_path()) std::filesystem::create_directories(target_.parent_path());
    // Unique per writer so concurrent writers to different targets never collide.
    std::random_device rd;
    temp_ = target_;
    temp_ += ".tmp." + std::to_string(rd());
    file_ = std::fopen(temp_.c_str(), "wb");
    if (!file_) throw IoError(temp_.string(), "cannot open output");
}

AtomicWriter::~AtomicWriter() {
    if (file_) std::fclose(file_);
    if (!committed_) {
        std::error_code ec;
        std::filesystem::remove(temp_, ec);
    }
}

void AtomicWriter::write(std::string_view bytes) {
    if (std::fwrite(bytes.data(), 1, bytes.size(), file_) != bytes.size()) {
        throw IoError(temp_.string(), "write failed");
    }
}

void AtomicWriter::write_json_line(const nlohmann::json& j) {
    std::string s = dump_compact(j);
    s.push_back('\n');
    write(s);
}

void AtomicWriter::commit() {
    if (std::fflush(file_) != 0 || std::fclose(file_) != 0) {
        file_ = nullptr;
        throw IoError(temp_.string(), "flush failed");
    }
    file_ = nullptr;
    std::error_code ec;
    std::filesystem::rename(temp_, target_, ec);
    if (ec) throw IoError(target_.string(), "rename failed: " + ec.message());
    committed_ = true;
}

void write_text_atomic(const std::filesystem::path& path, std::string_view text) {
    AtomicWriter w(path);
    w.write(text);
    w.commit();
}

std::string dump_compact(const nlohmann::json& j) {
    return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

const nlohmann::json& require(const nlohmann::json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw ValidationError(std::string("missing field \"") + key + "\"");
    return *it;
}

std::string require_string(const nlohmann::json& j, const char* key) {
    const auto& v = require(j, key);
    if (!v.is_string()) throw ValidationError(std::string("field \"") + key + "\" must be a string");
    return v.get<std::string>();
}

}  // namespace hetqa
