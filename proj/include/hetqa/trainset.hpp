#pragma once

// Retriever training data: answer-bearing positives, BM25 hard negatives,
// negatives re-mined with a previous-round retriever, and upsampled mixing of
// several datasets.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "hetqa/corpus.hpp"
#include "hetqa/index.hpp"
#include "hetqa/table_flatten.hpp"

namespace hetqa {

struct TrainingSample {
    Question question;
    Passage positive;
    std::vector<Passage> hard_negatives;
    bool flagged = false;  // fewer negatives than requested

    bool operator==(const TrainingSample&) const = default;
};

struct TrainsetOptions {
    std::size_t negatives_per_q = 1;
    std::size_t search_depth = 100;
    /// Used to resample positives that come from a table chunk.
    std::size_t token_limit = 100;
    std::uint64_t seed = 0;
};

struct TrainsetBuild {
    std::vector<TrainingSample> samples;
    std::size_t dropped_no_positive = 0;
    std::size_t flagged = 0;
};

/// Positive: the highest-ranked BM25 hit containing an answer (falling back to
/// the full ranking when none is within search_depth). A positive that is a
/// chunk of one of `tables` is replaced by an answer-aware sample of that
/// table. Negatives: the top BM25 hits containing no answer. Questions without
/// any answer-bearing passage are dropped and counted.
TrainsetBuild build_samples_bm25(std::span<const Question> questions, const Corpus& corpus,
                                 const Bm25Index& bm25, const TrainsetOptions& options = {},
                                 std::span<const Table> tables = {});

/// Ranked doc ids for a question in a given (1-based) round.
using RoundRetriever =
    std::function<std::vector<std::string>(const Question& question, std::size_t round)>;

struct RoundStats {
    std::size_t round = 0;
    bool aborted = false;
    std::string error;
    /// Fraction of the new negatives that were already negatives before the round.
    double overlap = 0.0;
    std::size_t flagged = 0;
};

struct MiningResult {
    std::vector<TrainingSample> samples;
    std::vector<RoundStats> rounds;
};

/// Each round replaces every sample's negatives with the retriever's
/// top-ranked passages that are neither the positive nor answer-bearing. If
/// the retriever throws (or returns an unknown doc id) the whole round is
/// aborted and the previous negatives are kept.
MiningResult mine_iterative_negatives(std::span<const TrainingSample> samples,
                                      const RoundRetriever& retriever, const PassageLookup& passages,
                                      std::size_t round_count = 2, std::size_t negatives_per_q = 1);

struct DatasetStream {
    std::string tag;
    std::vector<TrainingSample> samples;
    std::size_t factor = 1;
};

struct MixedSample {
    std::string tag;
    TrainingSample sample;
};

/// Every stream's samples repeated `factor` times, then one seeded shuffle of
/// the whole list. Throws ValidationError for a factor of 0.
std::vector<MixedSample> mix_datasets(std::span<const DatasetStream> streams, std::uint64_t seed);

nlohmann::json to_json(const TrainingSample& s);
TrainingSample training_sample_from_json(const nlohmann::json& j);
std::vector<TrainingSample> load_training_samples(const std::filesystem::path& path);
void write_training_samples(std::span<const TrainingSample> samples,
                            const std::filesystem::path& path);

}  // namespace hetqa
