// Tolerant HTML table scanner. Not a general HTML parser: it tracks only the
// table/caption/tr/td/th structure and treats everything else as text.

#include <cctype>
#include <memory>

#include "hetqa/corpus.hpp"
#include "hetqa/table_flatten.hpp"
#include "hetqa/text.hpp"

namespace hetqa {

namespace {

void append_utf8(std::string& out, unsigned long cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x110000) {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

std::string decode_entities(std::string_view s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '&') {
            out += s[i];
            continue;
        }
        const auto semi = s.find(';', i);
        if (semi == std::string_view::npos || semi - i > 10) {
            out += '&';
            continue;
        }
        const std::string_view name = s.substr(i + 1, semi - i - 1);
        if (!name.empty() && name[0] == '#') {
            unsigned long cp = 0;
            try {
                cp = (name.size() > 1 && (name[1] == 'x' || name[1] == 'X'))
                         ? std::stoul(std::string(name.substr(2)), nullptr, 16)
                         : std::stoul(std::string(name.substr(1)), nullptr, 10);
            } catch (const std::exception&) {
                out += '&';
                continue;
            }
            append_utf8(out, cp);
        } else if (name == "amp") {
            out += '&';
        } else if (name == "lt") {
            out += '<';
        } else if (name == "gt") {
            out += '>';
        } else if (name == "quot") {
            out += '"';
        } else if (name == "apos") {
            out += '\'';
        } else if (name == "nbsp") {
            out += ' ';
        } else if (name == "ndash") {
            out += "\xE2\x80\x93";
        } else if (name == "mdash") {
            out += "\xE2\x80\x94";
        } else {
            out += '&';
            continue;
        }
        i = semi;
    }
    return out;
}

struct Tag {
    std::string name;  // lowercase, without '/'
    bool closing = false;
    std::string attrs;
};

Tag parse_tag(std::string_view inner) {
    Tag t;
    std::size_t i = 0;
    if (i < inner.size() && inner[i] == '/') {
        t.closing = true;
        ++i;
    }
    while (i < inner.size() && (std::isalnum(static_cast<unsigned char>(inner[i])) || inner[i] == '-')) {
        t.name += static_cast<char>(std::tolower(static_cast<unsigned char>(inner[i])));
        ++i;
    }
    t.attrs = std::string(inner.substr(i));
    return t;
}

std::string attribute(const std::string& attrs, std::string_view name) {
    const std::string lowered = text::ascii_lower(attrs);
    std::size_t pos = 0;
    while ((pos = lowered.find(name, pos)) != std::string::npos) {
        const bool boundary = pos == 0 || std::isspace(static_cast<unsigned char>(lowered[pos - 1]));
        std::size_t j = pos + name.size();
        while (j < lowered.size() && std::isspace(static_cast<unsigned char>(lowered[j]))) ++j;
        if (!boundary || j >= lowered.size() || lowered[j] != '=') {
            pos += name.size();
            continue;
        }
        ++j;
        while (j < attrs.size() && std::isspace(static_cast<unsigned char>(attrs[j]))) ++j;
        if (j >= attrs.size()) return {};
        if (attrs[j] == '"' || attrs[j] == '\'') {
            const char q = attrs[j];
            const auto end = attrs.find(q, j + 1);
            return attrs.substr(j + 1, end == std::string::npos ? std::string::npos : end - j - 1);
        }
        auto end = j;
        while (end < attrs.size() && !std::isspace(static_cast<unsigned char>(attrs[end])) &&
               attrs[end] != '>' && attrs[end] != '/') {
            ++end;
        }
        return attrs.substr(j, end - j);
    }
    return {};
}

struct Builder {
    RawTable table;
    bool in_caption = false;
    bool in_cell = false;
    std::string caption_buf;
    std::string cell_buf;

    RawCell* open_cell() {
        if (!in_cell || table.rows.empty() || table.rows.back().empty()) return nullptr;
        return &table.rows.back().back();
    }

    void close_cell() {
        if (auto* c = open_cell()) c->text = normalize_whitespace(decode_entities(cell_buf));
        cell_buf.clear();
        in_cell = false;
    }

    void close_caption() {
        if (in_caption) table.caption = normalize_whitespace(decode_entities(caption_buf));
        caption_buf.clear();
        in_caption = false;
    }
};

}  // namespace

std::vector<RawTable> import_html_tables(std::string_view html, std::string_view page_title,
                                         std::string_view id_prefix) {
    std::vector<RawTable> out;
    std::vector<std::unique_ptr<Builder>> stack;
    std::size_t i = 0;

    const auto add_text = [&](std::string_view t) {
        if (stack.empty()) return;
        Builder& b = *stack.back();
        if (b.in_caption) {
            b.caption_buf.append(t);
        } else if (b.in_cell) {
            b.cell_buf.append(t);
        }
    };

    const auto finish_table = [&] {
        auto b = std::move(stack.back());
        stack.pop_back();
        b->close_cell();
        b->close_caption();
        if (stack.empty()) {
            b->table.id = std::string(id_prefix) + "-" + std::to_string(out.size());
            out.push_back(std::move(b->table));
            return;
        }
        Builder& parent = *stack.back();
        if (RawCell* cell = parent.open_cell()) {
            cell->nested.push_back(std::move(b->table));
        } else {
            parent.table.nested.push_back(std::move(b->table));
        }
    };

    while (i < html.size()) {
        if (html[i] != '<') {
            const auto next = html.find('<', i);
            add_text(html.substr(i, next == std::string_view::npos ? std::string_view::npos : next - i));
            i = next == std::string_view::npos ? html.size() : next;
            continue;
        }
        if (html.substr(i, 4) == "<!--") {
            const auto end = html.find("-->", i + 4);
            i = end == std::string_view::npos ? html.size() : end + 3;
            continue;
        }
        const auto close = html.find('>', i);
        if (close == std::string_view::npos) break;
        Tag tag = parse_tag(html.substr(i + 1, close - i - 1));
        i = close + 1;

        if (!tag.closing && (tag.name == "script" || tag.name == "style")) {
            const auto end = text::ascii_lower(std::string(html.substr(i))).find("</" + tag.name);
            i = end == std::string::npos ? html.size() : i + end;
            continue;
        }
        if (tag.name == "table") {
            if (!tag.closing) {
                auto b = std::make_unique<Builder>();
                b->table.page_title = std::string(page_title);
                b->table.css_class = attribute(tag.attrs, "class");
                stack.push_back(std::move(b));
            } else if (!stack.empty()) {
                finish_table();
            }
            continue;
        }
        if (stack.empty()) continue;
        Builder& b = *stack.back();
        if (tag.name == "caption") {
            if (!tag.closing) {
                b.in_caption = true;
            } else {
                b.close_caption();
            }
        } else if (tag.name == "tr") {
            b.close_cell();
            if (!tag.closing) b.table.rows.emplace_back();
        } else if (tag.name == "td" || tag.name == "th") {
            b.close_cell();
            if (!tag.closing) {
                if (b.table.rows.empty()) b.table.rows.emplace_back();
                b.table.rows.back().push_back(RawCell{"", tag.name == "th", {}});
                b.in_cell = true;
            }
        } else if (tag.name == "br" || tag.name == "p" || tag.name == "li" || tag.name == "div") {
            add_text(" ");
        }
    }
    while (!stack.empty()) finish_table();
    return out;
}

}  // namespace hetqa
