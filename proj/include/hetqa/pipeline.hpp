#pragma once

// Configuration and the end-to-end composition of the modules, shared by the
// command-line tool and the Python bindings.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hetqa/corpus.hpp"
#include "hetqa/eval.hpp"
#include "hetqa/fusion.hpp"
#include "hetqa/index.hpp"
#include "hetqa/kb_flatten.hpp"
#include "hetqa/table_flatten.hpp"

namespace hetqa {

struct PipelineConfig {
    std::string kb;
    std::string tables;
    std::string text;
    std::string questions;
    std::string linking;
    std::string output_dir = "out";

    std::size_t token_limit = 100;
    std::size_t k_total = 100;
    std::size_t kb_quota = 10;
    bool tune_quota = false;
    std::string table_mode = "simple";

    std::string embedder = "stub";  // stub | remote
    std::string embed_endpoint;
    std::size_t embed_dim = 256;

    std::string reader = "baseline";  // baseline | remote
    std::string reader_endpoint;
    std::size_t reader_contexts = 100;

    double bm25_k1 = 0.9;
    double bm25_b = 0.4;
    std::uint64_t seed = 13;

    /// Throws ValidationError on inconsistent values.
    void validate() const;
};

/// Sets one key from its textual value. Unknown keys and unparsable values
/// throw ValidationError.
void apply_setting(PipelineConfig& config, std::string_view key, std::string_view value);

/// "key = value" lines; blank lines and lines starting with '#' are ignored.
/// Errors are raised as ParseError with the line number.
PipelineConfig parse_config(std::string_view text);
PipelineConfig load_config(const std::filesystem::path& path);

/// Every key with its resolved value, sorted by key, in the same format
/// parse_config reads.
std::string format_config(const PipelineConfig& config);

std::vector<std::string> config_keys();

std::unique_ptr<Embedder> make_embedder(const PipelineConfig& config);

using Progress = std::function<void(std::string_view)>;

struct TableFlattening {
    std::vector<Passage> passages;
    std::size_t tables_in = 0;
    std::size_t tables_kept = 0;
    std::size_t dropped_single_row = 0;
    std::size_t dropped_service = 0;
};

/// extract -> filter -> chunk.
TableFlattening flatten_tables(std::span<const RawTable> raw, std::size_t token_limit,
                               LinearizationMode mode, const TableFilterConfig& filter = {});
TableFlattening flatten_tables(std::span<const Table> tables, std::size_t token_limit,
                               LinearizationMode mode, const TableFilterConfig& filter = {});

/// Every relation linearized and packed in file order.
std::vector<Passage> flatten_kb(std::span<const HyperRelation> relations, std::size_t token_limit);

struct E2EResult {
    Metrics metrics;
    std::vector<RetrievalResult> retrieval;
    Predictions predictions;
    QuotaPolicy policy;
    std::vector<std::pair<std::size_t, double>> quota_table;  // when tuned
    std::size_t main_passages = 0;
    std::size_t kb_passages = 0;
};

/// Flatten tables, build the dense index over text and tables, retrieve KB
/// candidates per question, merge under the quota, read and evaluate. Writes
/// corpus.jsonl, retrieval.jsonl, predictions.jsonl, metrics.json and
/// config.txt into output_dir.
E2EResult run_e2e(const PipelineConfig& config, const Progress& progress = {});

}  // namespace hetqa
