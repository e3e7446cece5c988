#include <cmath>
#include <future>

#include "hetqa/index.hpp"
#include "hetqa/text.hpp"
#include "http_client.hpp"

namespace hetqa {

HashingEmbedder::HashingEmbedder(std::size_t dim) : dim_(dim) {
    if (dim_ == 0) throw ValidationError("embedding dim must be positive");
}

EmbeddingVector HashingEmbedder::embed(std::string_view content) const {
    EmbeddingVector v(dim_, 0.0);
    for (auto piece : text::split_ws(content)) {
        const std::string lowered = text::ascii_lower(piece);
        const std::string_view term = text::trim_punct(lowered);
        if (term.empty()) continue;
        const std::uint64_t h = text::fnv1a64(term);
        v[h % dim_] += (h >> 63) ? -1.0 : 1.0;
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    if (norm > 0.0) {
        norm = std::sqrt(norm);
        for (double& x : v) x /= norm;
    }
    return v;
}

std::vector<EmbeddingVector> HashingEmbedder::embed_batch(std::span<const std::string> texts) {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(embed(t));
    return out;
}

std::vector<EmbeddingVector> embed_stub(std::span<const std::string> texts, std::size_t dim) {
    return HashingEmbedder(dim).embed_batch(texts);
}

RemoteEmbedder::RemoteEmbedder(std::string endpoint, std::size_t dim, RemoteOptions options)
    : endpoint_(std::move(endpoint)), dim_(dim), options_(options) {
    if (dim_ == 0) throw ValidationError("embedding dim must be positive");
    if (options_.batch_size == 0) options_.batch_size = 1;
    if (options_.max_in_flight == 0) options_.max_in_flight = 1;
}

std::vector<EmbeddingVector> RemoteEmbedder::embed_one_batch(
    std::span<const std::string> texts) const {
    nlohmann::json body = {{"texts", nlohmann::json::array()}};
    for (const auto& t : texts) body["texts"].push_back(t);
    const auto response = detail::post_json(
        endpoint_, "/embed", body,
        {options_.max_attempts, options_.backoff, options_.timeout});

    auto it = response.find("vectors");
    if (it == response.end() || !it->is_array()) {
        throw ValidationError("embedding response lacks a \"vectors\" array");
    }
    if (it->size() != texts.size()) {
        throw ValidationError("embedding response has " + std::to_string(it->size()) +
                              " vectors for " + std::to_string(texts.size()) + " texts");
    }
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& row : *it) {
        if (!row.is_array() || row.size() != dim_) {
            throw ValidationError("embedding response vector has dim " +
                                  std::to_string(row.is_array() ? row.size() : 0) +
                                  ", expected " + std::to_string(dim_));
        }
        EmbeddingVector v;
        v.reserve(dim_);
        for (const auto& x : row) {
            const double d = x.get<double>();
            if (!std::isfinite(d)) throw ValidationError("embedding response has a non-finite value");
            v.push_back(d);
        }
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<EmbeddingVector> RemoteEmbedder::embed_batch(std::span<const std::string> texts) {
    std::vector<std::span<const std::string>> batches;
    for (std::size_t i = 0; i < texts.size(); i += options_.batch_size) {
        batches.push_back(texts.subspan(i, std::min(options_.batch_size, texts.size() - i)));
    }
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    // Waves of at most max_in_flight concurrent requests, assembled in order.
    for (std::size_t w = 0; w < batches.size(); w += options_.max_in_flight) {
        const std::size_t end = std::min(batches.size(), w + options_.max_in_flight);
        std::vector<std::future<std::vector<EmbeddingVector>>> wave;
        for (std::size_t b = w; b < end; ++b) {
            wave.push_back(std::async(std::launch::async,
                                      [this, batch = batches[b]] { return embed_one_batch(batch); }));
        }
        for (auto& f : wave) {
            for (auto& v : f.get()) out.push_back(std::move(v));
        }
    }
    return out;
}

std::vector<EmbeddingVector> embed_remote(const std::string& endpoint,
                                          std::span<const std::string> texts, std::size_t dim,
                                          RemoteOptions options) {
    return RemoteEmbedder(endpoint, dim, options).embed_batch(texts);
}

}  // namespace hetqa
