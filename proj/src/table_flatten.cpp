#include "hetqa/table_flatten.hpp"

#include <algorithm>
#include <unordered_set>

#include "hetqa/error.hpp"
#include "hetqa/eval.hpp"
#include "hetqa/jsonl.hpp"
#include "hetqa/rng.hpp"
#include "hetqa/text.hpp"

namespace hetqa {

namespace {

struct Extractor {
    std::vector<Table>& out;
    std::unordered_set<std::string> all_ids;
    std::vector<std::string> ancestors;

    void run(const RawTable& raw, const std::optional<std::string>& parent, std::string id,
             const std::string& parent_title = "") {
        if (id.empty()) throw ValidationError("top-level table without an id");
        if (std::find(ancestors.begin(), ancestors.end(), id) != ancestors.end()) {
            throw ValidationError("cyclic nesting: table \"" + id + "\" is nested inside itself");
        }
        if (!all_ids.insert(id).second) throw ValidationError("duplicate table id \"" + id + "\"");

        Table t;
        t.id = id;
        t.page_title = text::is_blank(raw.page_title) ? parent_title : raw.page_title;
        t.caption = raw.caption;
        t.css_class = raw.css_class;
        t.parent_id = parent;
        for (const auto& raw_row : raw.rows) {
            Row row;
            for (const auto& c : raw_row) row.push_back({c.text, c.is_header_markup});
            t.rows.push_back(std::move(row));
        }
        const std::string title = t.page_title;
        out.push_back(std::move(t));

        ancestors.push_back(id);
        std::size_t ordinal = 0;
        const auto child = [&](const RawTable& c) {
            ++ordinal;
            run(c, id, c.id.empty() ? id + "/" + std::to_string(ordinal) : c.id, title);
        };
        for (const auto& raw_row : raw.rows) {
            for (const auto& cell : raw_row) {
                for (const auto& c : cell.nested) child(c);
            }
        }
        for (const auto& c : raw.nested) child(c);
        ancestors.pop_back();
    }
};

bool contains_keyword(std::string_view haystack, std::string_view keyword) {
    if (keyword.empty()) return false;
    return text::ascii_lower(haystack).find(text::ascii_lower(keyword)) != std::string::npos;
}

std::string row_line(const Table& t, const Row& header, const Row& row, LinearizationMode mode) {
    return mode == LinearizationMode::simple ? linearize_row(row)
                                             : linearize_template_row(t, header, row);
}

// Assembles a chunk from a header line and selected body lines.
TableChunk make_chunk(const Table& t, std::string id, std::size_t header_row,
                      const std::string& header_line, const std::vector<std::size_t>& rows,
                      const std::vector<std::string>& lines, bool oversized) {
    std::string body = header_line;
    for (const auto& l : lines) {
        body += '\n';
        body += l;
    }
    Provenance prov;
    prov.table_id = t.id;
    prov.rows.push_back(header_row);
    prov.rows.insert(prov.rows.end(), rows.begin(), rows.end());
    prov.oversized = oversized;
    TableChunk c;
    c.passage = make_passage(std::move(id), SourceType::table, t.page_title, std::move(body),
                             std::move(prov));
    c.table_id = t.id;
    c.header_row = header_row;
    c.body_rows = rows;
    return c;
}

struct RowPlan {
    std::size_t header_row;
    std::string header_line;
    std::size_t header_tokens;
    std::vector<std::size_t> rows;  // body row indices
    std::vector<std::string> lines;
    std::vector<std::size_t> tokens;
};

RowPlan plan_rows(const Table& t, LinearizationMode mode) {
    RowPlan p;
    p.header_row = find_header(t);
    const Row& header = t.rows[p.header_row];
    p.header_line = linearize_row(header);
    p.header_tokens = count_tokens(p.header_line);
    for (std::size_t r = p.header_row + 1; r < t.rows.size(); ++r) {
        p.rows.push_back(r);
        p.lines.push_back(row_line(t, header, t.rows[r], mode));
        p.tokens.push_back(count_tokens(p.lines.back()));
    }
    return p;
}

// Greedy fill from `order` (indices into plan rows), stopping at the first
// row that does not fit.
void fill(const RowPlan& p, std::span<const std::size_t> order, std::size_t token_limit,
          std::size_t& used, std::vector<std::size_t>& picked) {
    for (std::size_t i : order) {
        if (used + p.tokens[i] > token_limit) return;
        used += p.tokens[i];
        picked.push_back(i);
    }
}

TableChunk chunk_from_plan(const Table& t, const RowPlan& p, std::string id,
                           const std::vector<std::size_t>& picked, std::size_t used,
                           std::size_t token_limit) {
    std::vector<std::size_t> rows;
    std::vector<std::string> lines;
    for (std::size_t i : picked) {
        rows.push_back(p.rows[i]);
        lines.push_back(p.lines[i]);
    }
    return make_chunk(t, std::move(id), p.header_row, p.header_line, rows, lines,
                      used > token_limit);
}

}  // namespace

std::vector<Table> extract_tables(std::span<const RawTable> raw) {
    std::vector<Table> out;
    Extractor ex{out, {}, {}};
    for (const auto& r : raw) ex.run(r, std::nullopt, r.id);
    return out;
}

TableFilterResult filter_tables(std::span<const Table> tables, const TableFilterConfig& config) {
    TableFilterResult res;
    for (const auto& t : tables) {
        if (t.rows.size() < 2) {
            ++res.dropped_single_row;
            continue;
        }
        const bool service =
            std::any_of(config.service_keywords.begin(), config.service_keywords.end(),
                        [&](const std::string& k) {
                            return contains_keyword(t.css_class, k) || contains_keyword(t.caption, k);
                        });
        if (service) {
            ++res.dropped_service;
            continue;
        }
        res.kept.push_back(t);
    }
    return res;
}

bool is_blank_row(const Row& row) {
    return std::all_of(row.begin(), row.end(), [](const Cell& c) { return text::is_blank(c.text); });
}

std::size_t find_header(const Table& t) {
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        if (!is_blank_row(t.rows[r])) return r;
    }
    throw ValidationError("table \"" + t.id + "\" has no non-empty row");
}

std::string linearize_row(const Row& row) {
    std::string out;
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out += ' ';
        out += row[i].text;
    }
    return out;
}

std::string linearize_simple(std::span<const Row> rows) {
    std::string out;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (r) out += '\n';
        out += linearize_row(rows[r]);
    }
    return out;
}

std::string linearize_template_row(const Table& t, const Row& header, const Row& row) {
    std::string out;
    if (!text::is_blank(t.page_title)) out = t.page_title + ".";
    for (std::size_t j = 0; j < row.size(); ++j) {
        if (text::is_blank(row[j].text)) continue;
        std::string name = j < header.size() && !text::is_blank(header[j].text)
                               ? header[j].text
                               : "column " + std::to_string(j + 1);
        if (!out.empty()) out += ' ';
        out += name + " is " + row[j].text + ".";
    }
    return out;
}

std::string linearize_template(const Table& t, const Row& header, std::span<const Row> rows) {
    std::string out;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (r) out += '\n';
        out += linearize_template_row(t, header, rows[r]);
    }
    return out;
}

std::string_view to_string(LinearizationMode m) {
    return m == LinearizationMode::simple ? "simple" : "template";
}

LinearizationMode parse_linearization_mode(std::string_view s) {
    if (s == "simple") return LinearizationMode::simple;
    if (s == "template") return LinearizationMode::template_;
    throw ValidationError("unknown linearization mode \"" + std::string(s) + "\"");
}

std::vector<TableChunk> chunk_table(const Table& t, std::size_t token_limit,
                                    LinearizationMode mode) {
    if (token_limit == 0) throw ValidationError("token_limit must be at least 1");
    const RowPlan p = plan_rows(t, mode);
    std::vector<TableChunk> out;
    const auto id = [&] { return t.id + "#" + std::to_string(out.size()); };
    if (p.rows.empty()) {
        out.push_back(make_chunk(t, id(), p.header_row, p.header_line, {}, {},
                                 p.header_tokens > token_limit));
        return out;
    }
    std::size_t i = 0;
    while (i < p.rows.size()) {
        std::size_t used = p.header_tokens + p.tokens[i];
        std::vector<std::size_t> picked{i};
        ++i;
        while (i < p.rows.size() && used + p.tokens[i] <= token_limit) {
            used += p.tokens[i];
            picked.push_back(i);
            ++i;
        }
        out.push_back(chunk_from_plan(t, p, id(), picked, used, token_limit));
    }
    return out;
}

std::optional<TableChunk> sample_positive_chunk(const Table& t,
                                                std::span<const std::string> answers,
                                                std::size_t token_limit, std::uint64_t seed,
                                                LinearizationMode mode) {
    if (token_limit == 0) throw ValidationError("token_limit must be at least 1");
    const RowPlan p = plan_rows(t, mode);
    const AnswerMatcher matcher(answers);
    std::vector<std::size_t> answer_rows, other_rows;
    for (std::size_t i = 0; i < p.rows.size(); ++i) {
        (matcher.matches(linearize_row(t.rows[p.rows[i]])) ? answer_rows : other_rows).push_back(i);
    }
    if (answer_rows.empty()) return std::nullopt;

    std::vector<std::size_t> picked{answer_rows.front()};
    std::size_t used = p.header_tokens + p.tokens[answer_rows.front()];
    if (used <= token_limit) {
        const std::size_t before = picked.size();
        fill(p, std::span(answer_rows).subspan(1), token_limit, used, picked);
        // Random fill only when every answer row made it in.
        if (picked.size() - before == answer_rows.size() - 1) {
            Rng rng(seed);
            rng.shuffle(std::span(other_rows));
            fill(p, other_rows, token_limit, used, picked);
        }
    }
    return chunk_from_plan(t, p, t.id + "#pos", picked, used, token_limit);
}

TableChunk sample_chunk(const Table& t, std::size_t token_limit, std::uint64_t seed,
                        LinearizationMode mode) {
    if (token_limit == 0) throw ValidationError("token_limit must be at least 1");
    const RowPlan p = plan_rows(t, mode);
    std::vector<std::size_t> order(p.rows.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(seed);
    rng.shuffle(std::span(order));
    std::size_t used = p.header_tokens;
    std::vector<std::size_t> picked;
    fill(p, order, token_limit, used, picked);
    return chunk_from_plan(t, p, t.id + "#neg", picked, used, token_limit);
}

namespace {

RawTable raw_table_from_json_inherit(const nlohmann::json& j, const std::string* parent_title) {
    if (!j.is_object()) throw ValidationError("table must be a JSON object");
    RawTable t;
    if (auto it = j.find("id"); it != j.end()) t.id = it->get<std::string>();
    if (auto it = j.find("page_title"); it != j.end()) {
        t.page_title = it->get<std::string>();
    } else if (parent_title) {
        t.page_title = *parent_title;
    }
    if (auto it = j.find("caption"); it != j.end()) t.caption = it->get<std::string>();
    if (auto it = j.find("css_class"); it != j.end()) t.css_class = it->get<std::string>();
    const auto& rows = require(j, "rows");
    if (!rows.is_array()) throw ValidationError("\"rows\" must be an array");
    for (const auto& jr : rows) {
        if (!jr.is_array()) throw ValidationError("each row must be an array of cells");
        std::vector<RawCell> row;
        for (const auto& jc : jr) {
            RawCell c;
            if (jc.is_string()) {
                c.text = jc.get<std::string>();
            } else {
                c.text = require_string(jc, "text");
                if (auto it = jc.find("is_header_markup"); it != jc.end()) {
                    c.is_header_markup = it->get<bool>();
                }
                if (auto it = jc.find("nested"); it != jc.end()) {
                    for (const auto& n : *it) c.nested.push_back(raw_table_from_json_inherit(n, &t.page_title));
                }
            }
            row.push_back(std::move(c));
        }
        t.rows.push_back(std::move(row));
    }
    if (auto it = j.find("nested"); it != j.end()) {
        if (!it->is_array()) throw ValidationError("\"nested\" must be an array");
        for (const auto& n : *it) t.nested.push_back(raw_table_from_json_inherit(n, &t.page_title));
    }
    return t;
}

nlohmann::json cell_json(const Cell& c) {
    return {{"text", c.text}, {"is_header_markup", c.is_header_markup}};
}

}  // namespace

RawTable raw_table_from_json(const nlohmann::json& j) {
    return raw_table_from_json_inherit(j, nullptr);
}

nlohmann::json to_json(const Table& t) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : t.rows) {
        nlohmann::json row = nlohmann::json::array();
        for (const auto& c : r) row.push_back(cell_json(c));
        rows.push_back(std::move(row));
    }
    return {{"id", t.id},
            {"page_title", t.page_title},
            {"caption", t.caption},
            {"css_class", t.css_class},
            {"rows", std::move(rows)},
            {"parent_id", t.parent_id ? nlohmann::json(*t.parent_id) : nlohmann::json(nullptr)}};
}

nlohmann::json to_json(const RawTable& t) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : t.rows) {
        nlohmann::json row = nlohmann::json::array();
        for (const auto& c : r) {
            nlohmann::json jc = cell_json({c.text, c.is_header_markup});
            if (!c.nested.empty()) {
                jc["nested"] = nlohmann::json::array();
                for (const auto& n : c.nested) jc["nested"].push_back(to_json(n));
            }
            row.push_back(std::move(jc));
        }
        rows.push_back(std::move(row));
    }
    nlohmann::json j = {{"id", t.id},           {"page_title", t.page_title},
                        {"caption", t.caption}, {"css_class", t.css_class},
                        {"rows", std::move(rows)}, {"nested", nlohmann::json::array()}};
    for (const auto& n : t.nested) j["nested"].push_back(to_json(n));
    return j;
}

Table table_from_json(const nlohmann::json& j) {
    RawTable raw = raw_table_from_json(j);
    Table t;
    t.id = raw.id;
    t.page_title = raw.page_title;
    t.caption = raw.caption;
    t.css_class = raw.css_class;
    for (auto& r : raw.rows) {
        Row row;
        for (auto& c : r) row.push_back({std::move(c.text), c.is_header_markup});
        t.rows.push_back(std::move(row));
    }
    if (auto it = j.find("parent_id"); it != j.end() && !it->is_null()) {
        t.parent_id = it->get<std::string>();
    }
    return t;
}

std::vector<RawTable> load_raw_tables(const std::filesystem::path& path) {
    std::vector<RawTable> out;
    for_each_jsonl(path, [&](const nlohmann::json& j, std::size_t) {
        out.push_back(raw_table_from_json(j));
    });
    return out;
}

void write_tables(std::span<const Table> tables, const std::filesystem::path& path) {
    AtomicWriter w(path);
    for (const auto& t : tables) w.write_json_line(to_json(t));
    w.commit();
}

void write_raw_tables(std::span<const RawTable> tables, const std::filesystem::path& path) {
    AtomicWriter w(path);
    for (const auto& t : tables) w.write_json_line(to_json(t));
    w.commit();
}

}  // namespace hetqa
