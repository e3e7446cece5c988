#include "hetqa/text.hpp"

namespace hetqa::text {

std::size_t whitespace_width(std::string_view text, std::size_t i) {
    const auto at = [&](std::size_t k) -> unsigned char {
        return i + k < text.size() ? static_cast<unsigned char>(text[i + k]) : 0;
    };
    const unsigned char c0 = at(0);
    switch (c0) {
        case ' ':
        case '\t':
        case '\n':
        case '\v':
        case '\f':
        case '\r':
            return 1;
        case 0xC2:
            return (at(1) == 0x85 || at(1) == 0xA0) ? 2 : 0;
        case 0xE1:
            return (at(1) == 0x9A && at(2) == 0x80) ? 3 : 0;
        case 0xE2: {
            const unsigned char c1 = at(1), c2 = at(2);
            if (c1 == 0x80) {
                if ((c2 >= 0x80 && c2 <= 0x8A) || c2 == 0xA8 || c2 == 0xA9 || c2 == 0xAF) return 3;
                return 0;
            }
            return (c1 == 0x81 && c2 == 0x9F) ? 3 : 0;
        }
        case 0xE3:
            return (at(1) == 0x80 && at(2) == 0x80) ? 3 : 0;
        default:
            return 0;
    }
}

std::vector<std::string_view> split_ws(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    std::size_t start = std::string_view::npos;
    while (i < text.size()) {
        const std::size_t w = whitespace_width(text, i);
        if (w > 0) {
            if (start != std::string_view::npos) {
                out.push_back(text.substr(start, i - start));
                start = std::string_view::npos;
            }
            i += w;
        } else {
            if (start == std::string_view::npos) start = i;
            ++i;
        }
    }
    if (start != std::string_view::npos) out.push_back(text.substr(start));
    return out;
}

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

bool is_ascii_punct(char c) {
    const auto u = static_cast<unsigned char>(c);
    return (u >= 33 && u <= 47) || (u >= 58 && u <= 64) || (u >= 91 && u <= 96) ||
           (u >= 123 && u <= 126);
}

std::string_view trim_punct(std::string_view s) {
    while (!s.empty() && is_ascii_punct(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_ascii_punct(s.back())) s.remove_suffix(1);
    return s;
}

bool is_blank(std::string_view s) {
    for (std::size_t i = 0; i < s.size();) {
        const std::size_t w = whitespace_width(s, i);
        if (w == 0) return false;
        i += w;
    }
    return true;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace hetqa::text
