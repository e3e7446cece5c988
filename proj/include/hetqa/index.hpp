#pragma once

// Exact dense inner-product retrieval, Okapi BM25, and the embedder boundary.

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hetqa/corpus.hpp"
#include "hetqa/error.hpp"

namespace hetqa {

struct ScoredDoc {
    std::string doc_id;
    double score = 0.0;
    SourceType source = SourceType::text;

    bool operator==(const ScoredDoc&) const = default;
};

/// Result order: higher score first, equal scores by ascending doc_id.
bool ranks_before(const ScoredDoc& a, const ScoredDoc& b);
void sort_ranked(std::vector<ScoredDoc>& docs);

using EmbeddingVector = std::vector<double>;

class Embedder {
public:
    virtual ~Embedder() = default;
    virtual std::size_t dim() const = 0;
    /// One vector of length dim() per input text, in input order.
    virtual std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) = 0;
};

/// Feature-hashing embedder for hermetic runs. Each token is lowercased and
/// stripped of surrounding punctuation, hashed (FNV-1a 64) to a signed bucket,
/// and the bucket counts are L2-normalized. Token order does not matter, so
/// lexical overlap is what drives the dot product.
class HashingEmbedder final : public Embedder {
public:
    explicit HashingEmbedder(std::size_t dim = 256);
    std::size_t dim() const override { return dim_; }
    std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) override;
    EmbeddingVector embed(std::string_view text) const;

private:
    std::size_t dim_;
};

std::vector<EmbeddingVector> embed_stub(std::span<const std::string> texts, std::size_t dim = 256);

struct RemoteOptions {
    std::size_t batch_size = 32;
    int max_attempts = 3;
    std::chrono::milliseconds backoff{200};  // doubled after each failed attempt
    std::chrono::milliseconds timeout{30000};
    std::size_t max_in_flight = 4;
};

/// Client for POST {endpoint}/embed with {"texts": [...]} -> {"vectors": [[...], ...]}.
class RemoteEmbedder final : public Embedder {
public:
    RemoteEmbedder(std::string endpoint, std::size_t dim, RemoteOptions options = {});
    std::size_t dim() const override { return dim_; }
    /// Throws RemoteError after max_attempts failures on any batch, and
    /// ValidationError when the server returns the wrong count or dimension.
    std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) override;

private:
    std::vector<EmbeddingVector> embed_one_batch(std::span<const std::string> texts) const;

    std::string endpoint_;
    std::size_t dim_;
    RemoteOptions options_;
};

std::vector<EmbeddingVector> embed_remote(const std::string& endpoint,
                                          std::span<const std::string> texts, std::size_t dim,
                                          RemoteOptions options = {});

/// Raised by DenseIndex::build when the embedder fails; carries the passage
/// ids of the batch that failed.
class EmbeddingError : public Error {
public:
    EmbeddingError(std::vector<std::string> batch_ids, const std::string& cause);
    const std::vector<std::string>& batch_ids() const noexcept { return batch_ids_; }

private:
    std::vector<std::string> batch_ids_;
};

/// Inner product used for every dense score: products and partial sums in
/// double, accumulated into 8 lanes by index mod 8, lanes summed in order.
double inner_product(std::span<const float> a, std::span<const float> b);

std::vector<float> to_float(std::span<const double> v);

/// Immutable doc-count x dim float32 matrix with doc ids. Copies share storage.
class DenseIndex {
public:
    /// Embeds passages in corpus order. Throws ValidationError on an empty
    /// corpus or a duplicate id, EmbeddingError when the embedder fails.
    static DenseIndex build(std::span<const Passage> passages, Embedder& embedder,
                            std::size_t batch_size = 64);

    /// Takes ownership of a row-major matrix (ids.size() * dim floats).
    static DenseIndex from_matrix(std::vector<std::string> ids, std::vector<SourceType> sources,
                                  std::vector<float> matrix, std::size_t dim);

    /// Memory-maps a file written by save().
    static DenseIndex load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    std::size_t size() const;
    std::size_t dim() const;
    const std::string& doc_id(std::size_t i) const;
    SourceType source(std::size_t i) const;
    std::span<const float> row(std::size_t i) const;
    std::span<const float> matrix() const;

    /// Exhaustive top-min(k, size()) by inner product. Throws ValidationError
    /// on k == 0 or a query of the wrong dimension.
    std::vector<ScoredDoc> search(std::span<const float> query, std::size_t k) const;
    std::vector<ScoredDoc> search(std::span<const double> query, std::size_t k) const;

    struct Storage;

private:
    explicit DenseIndex(std::shared_ptr<const Storage> storage);
    std::shared_ptr<const Storage> storage_;
};

std::vector<ScoredDoc> search_dense(const DenseIndex& index, std::span<const double> query,
                                    std::size_t k);

struct Bm25Params {
    double k1 = 0.9;
    double b = 0.4;
};

struct Posting {
    std::uint32_t doc = 0;
    std::uint32_t tf = 0;
};

/// Index terms of a text: tokens lowercased with surrounding ASCII
/// punctuation stripped; tokens that strip to nothing are not indexed but
/// still count toward document length.
std::vector<std::string> bm25_terms(std::string_view text);

/// Okapi BM25 over an inverted index.
///   idf(t)  = ln(1 + (N - n_t + 0.5) / (n_t + 0.5))
///   tf part = tf * (k1 + 1) / (tf + k1 * (1 - b + b * dl / avgdl))
/// Repeated query terms contribute once per occurrence.
class Bm25Index {
public:
    static Bm25Index build(std::span<const Passage> passages, Bm25Params params = {});
    static Bm25Index load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    /// Top-k among documents matching at least one query term.
    std::vector<ScoredDoc> search(std::string_view query, std::size_t k) const;

    std::size_t doc_count() const { return doc_ids_.size(); }
    double avg_doc_length() const { return avg_len_; }
    std::uint32_t doc_length(std::size_t i) const { return doc_len_[i]; }
    const std::string& doc_id(std::size_t i) const { return doc_ids_[i]; }
    SourceType source(std::size_t i) const { return sources_[i]; }
    const Bm25Params& params() const { return params_; }
    std::size_t vocabulary_size() const { return postings_.size(); }
    /// Postings sorted by doc; empty for unknown terms.
    std::span<const Posting> postings(const std::string& term) const;
    double idf(const std::string& term) const;

private:
    Bm25Params params_;
    std::vector<std::string> doc_ids_;
    std::vector<SourceType> sources_;
    std::vector<std::uint32_t> doc_len_;
    double avg_len_ = 0.0;
    std::unordered_map<std::string, std::vector<Posting>> postings_;
};

}  // namespace hetqa
