#pragma once

// Tables to passages: nested-table extraction, service/single-row filtering,
// header detection, simple and template linearization, chunking and answer-
// aware row sampling.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hetqa/corpus.hpp"

namespace hetqa {

struct Cell {
    std::string text;
    bool is_header_markup = false;
    bool operator==(const Cell&) const = default;
};

using Row = std::vector<Cell>;

struct Table {
    std::string id;
    std::string page_title;
    std::string caption;
    std::vector<Row> rows;  // may be ragged
    std::optional<std::string> parent_id;
    std::string css_class;

    bool operator==(const Table&) const = default;
};

struct RawTable;

/// A cell as ingested, possibly holding tables nested inside it.
struct RawCell {
    std::string text;
    bool is_header_markup = false;
    std::vector<RawTable> nested;
};

struct RawTable {
    std::string id;  // may be empty for nested tables; derived from the parent
    std::string page_title;
    std::string caption;
    std::string css_class;
    std::vector<std::vector<RawCell>> rows;
    std::vector<RawTable> nested;  // nested without a cell anchor
};

/// Flattens nesting depth-first (parent before children). Each nested table
/// becomes its own Table with parent_id set; the parent keeps the enclosing
/// cell with only its own text. Children without an id get
/// "<parent id>/<ordinal>". Throws ValidationError when a table id repeats,
/// including a child that reuses an ancestor's id (cyclic nesting).
std::vector<Table> extract_tables(std::span<const RawTable> raw);

struct TableFilterConfig {
    std::vector<std::string> service_keywords{"navbox",  "vcard",   "infobox-navigation",
                                              "metadata", "sidebar", "sistersitebox"};
};

struct TableFilterResult {
    std::vector<Table> kept;
    std::size_t dropped_single_row = 0;
    std::size_t dropped_service = 0;
};

/// Drops tables with fewer than two rows, then tables whose css_class or
/// caption contains a service keyword (case-insensitive).
TableFilterResult filter_tables(std::span<const Table> tables, const TableFilterConfig& config = {});

bool is_blank_row(const Row& row);

/// Index of the first row with a non-blank cell. Throws ValidationError if none.
std::size_t find_header(const Table& t);

/// Cell texts joined by a space; rows joined by "\n".
std::string linearize_row(const Row& row);
std::string linearize_simple(std::span<const Row> rows);

/// One line per body row: "<page_title>. <h0> is <c0>. <h1> is <c1>." Blank
/// cells are skipped; header cells that are blank or missing read
/// "column <j>" (1-based). An empty page title drops the leading sentence.
std::string linearize_template_row(const Table& t, const Row& header, const Row& row);
std::string linearize_template(const Table& t, const Row& header, std::span<const Row> rows);

enum class LinearizationMode { simple, template_ };

std::string_view to_string(LinearizationMode m);
LinearizationMode parse_linearization_mode(std::string_view s);

struct TableChunk {
    Passage passage;
    std::string table_id;
    std::size_t header_row = 0;
    std::vector<std::size_t> body_rows;
};

/// Header line (simple linearization of the header row) followed by body rows
/// packed greedily in order while the token count stays within token_limit.
/// A row that does not fit even alone gets its own chunk, flagged oversized.
/// Body rows are the rows after the header.
std::vector<TableChunk> chunk_table(const Table& t, std::size_t token_limit,
                                    LinearizationMode mode = LinearizationMode::simple);

/// Positive training chunk: header, then answer-bearing rows in table order
/// while they fit, then the remaining rows in seeded random order while they
/// fit. The first answer row is always included (flagged oversized if it does
/// not fit). Returns nullopt when no body row contains an answer.
std::optional<TableChunk> sample_positive_chunk(const Table& t,
                                                std::span<const std::string> answers,
                                                std::size_t token_limit, std::uint64_t seed,
                                                LinearizationMode mode = LinearizationMode::simple);

/// Header plus seeded random rows while they fit (negative sampling).
TableChunk sample_chunk(const Table& t, std::size_t token_limit, std::uint64_t seed,
                        LinearizationMode mode = LinearizationMode::simple);

RawTable raw_table_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Table& t);
nlohmann::json to_json(const RawTable& t);
Table table_from_json(const nlohmann::json& j);

std::vector<RawTable> load_raw_tables(const std::filesystem::path& path);
void write_tables(std::span<const Table> tables, const std::filesystem::path& path);
void write_raw_tables(std::span<const RawTable> tables, const std::filesystem::path& path);

/// Best-effort HTML importer: every <table> (with nested tables kept nested),
/// <caption>, class attribute, <tr>, <th>/<td>. Text is tag-stripped and
/// entity-decoded. Tables get ids "<id_prefix>-<ordinal>".
std::vector<RawTable> import_html_tables(std::string_view html, std::string_view page_title,
                                         std::string_view id_prefix);

}  // namespace hetqa
