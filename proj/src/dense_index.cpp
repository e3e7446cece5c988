#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <unordered_set>

#include <fcntl.h>
#include <sys/mman.h>
#include <sys/stat.h>
#include <unistd.h>

#include "hetqa/index.hpp"
#include "hetqa/jsonl.hpp"

static_assert(std::endian::native == std::endian::little,
              "dense index files are little-endian and read in place");

namespace hetqa {

namespace {

constexpr char kMagic[4] = {'H', 'F', 'D', 'I'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kMatrixAlign = 64;
constexpr std::size_t kScoreBlock = 4096;

struct HeapEntry {
    double score;
    std::uint32_t id_rank;
    std::uint32_t row;
};

// a ranks strictly before b
inline bool better(const HeapEntry& a, const HeapEntry& b) {
    return a.score > b.score || (a.score == b.score && a.id_rank < b.id_rank);
}

}  // namespace

bool ranks_before(const ScoredDoc& a, const ScoredDoc& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.doc_id < b.doc_id;
}

void sort_ranked(std::vector<ScoredDoc>& docs) { std::sort(docs.begin(), docs.end(), ranks_before); }

EmbeddingError::EmbeddingError(std::vector<std::string> batch_ids, const std::string& cause)
    : Error("embedding failed for batch [" +
            (batch_ids.empty() ? std::string() : batch_ids.front() + " .. " + batch_ids.back()) +
            "]: " + cause),
      batch_ids_(std::move(batch_ids)) {}

double inner_product(std::span<const float> a, std::span<const float> b) {
    double lane[8] = {0, 0, 0, 0, 0, 0, 0, 0};
    const std::size_t n = a.size();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        for (std::size_t l = 0; l < 8; ++l) {
            lane[l] += static_cast<double>(a[i + l]) * static_cast<double>(b[i + l]);
        }
    }
    for (; i < n; ++i) lane[i % 8] += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    double s = lane[0];
    for (std::size_t l = 1; l < 8; ++l) s += lane[l];
    return s;
}

std::vector<float> to_float(std::span<const double> v) {
    std::vector<float> out(v.size());
    std::transform(v.begin(), v.end(), out.begin(), [](double d) { return static_cast<float>(d); });
    return out;
}

struct DenseIndex::Storage {
    std::vector<std::string> ids;
    std::vector<SourceType> sources;
    std::vector<std::uint32_t> id_rank;  // position of ids[i] in ascending id order
    std::size_t dim = 0;
    std::vector<float> owned;
    const float* data = nullptr;
    void* mapping = nullptr;
    std::size_t mapping_len = 0;

    Storage() = default;
    Storage(const Storage&) = delete;
    Storage& operator=(const Storage&) = delete;
    ~Storage() {
        if (mapping) ::munmap(mapping, mapping_len);
    }

    void rank_ids() {
        if (ids.size() > std::numeric_limits<std::uint32_t>::max()) {
            throw ValidationError("dense index supports at most 2^32 - 1 documents");
        }
        std::vector<std::uint32_t> order(ids.size());
        std::iota(order.begin(), order.end(), 0u);
        std::sort(order.begin(), order.end(),
                  [&](std::uint32_t x, std::uint32_t y) { return ids[x] < ids[y]; });
        id_rank.assign(ids.size(), 0);
        for (std::size_t r = 0; r < order.size(); ++r) {
            if (r > 0 && ids[order[r]] == ids[order[r - 1]]) {
                throw ValidationError("duplicate doc id \"" + ids[order[r]] + "\"");
            }
            id_rank[order[r]] = static_cast<std::uint32_t>(r);
        }
    }
};

DenseIndex::DenseIndex(std::shared_ptr<const Storage> storage) : storage_(std::move(storage)) {}

DenseIndex DenseIndex::from_matrix(std::vector<std::string> ids, std::vector<SourceType> sources,
                                   std::vector<float> matrix, std::size_t dim) {
    if (dim == 0) throw ValidationError("embedding dim must be positive");
    if (ids.empty()) throw ValidationError("cannot build a dense index over an empty corpus");
    if (sources.size() != ids.size()) throw ValidationError("sources and ids differ in length");
    if (matrix.size() != ids.size() * dim) {
        throw ValidationError("matrix has " + std::to_string(matrix.size()) + " values, expected " +
                              std::to_string(ids.size() * dim));
    }
    for (float x : matrix) {
        if (!std::isfinite(x)) throw ValidationError("embedding matrix has a non-finite value");
    }
    auto s = std::make_shared<Storage>();
    s->ids = std::move(ids);
    s->sources = std::move(sources);
    s->dim = dim;
    s->owned = std::move(matrix);
    s->data = s->owned.data();
    s->rank_ids();
    return DenseIndex(std::move(s));
}

DenseIndex DenseIndex::build(std::span<const Passage> passages, Embedder& embedder,
                             std::size_t batch_size) {
    if (passages.empty()) throw ValidationError("cannot build a dense index over an empty corpus");
    {
        std::unordered_set<std::string_view> seen;
        for (const auto& p : passages) {
            if (!seen.insert(p.id).second) throw ValidationError("duplicate doc id \"" + p.id + "\"");
        }
    }
    const std::size_t dim = embedder.dim();
    if (batch_size == 0) batch_size = 1;
    std::vector<std::string> ids;
    std::vector<SourceType> sources;
    std::vector<float> matrix;
    ids.reserve(passages.size());
    sources.reserve(passages.size());
    matrix.reserve(passages.size() * dim);
    for (std::size_t start = 0; start < passages.size(); start += batch_size) {
        const std::size_t end = std::min(passages.size(), start + batch_size);
        std::vector<std::string> texts;
        std::vector<std::string> batch_ids;
        for (std::size_t i = start; i < end; ++i) {
            // Title prefix mirrors how passages are presented to the encoder.
            texts.push_back(passages[i].title.empty() ? passages[i].text
                                                      : passages[i].title + " " + passages[i].text);
            batch_ids.push_back(passages[i].id);
        }
        std::vector<EmbeddingVector> vecs;
        try {
            vecs = embedder.embed_batch(texts);
        } catch (const std::exception& e) {
            throw EmbeddingError(std::move(batch_ids), e.what());
        }
        if (vecs.size() != texts.size()) {
            throw EmbeddingError(std::move(batch_ids), "embedder returned " +
                                                           std::to_string(vecs.size()) +
                                                           " vectors for " +
                                                           std::to_string(texts.size()) + " texts");
        }
        for (std::size_t i = start; i < end; ++i) {
            const auto& v = vecs[i - start];
            if (v.size() != dim) {
                throw EmbeddingError(std::move(batch_ids), "embedder returned dim " +
                                                               std::to_string(v.size()) +
                                                               ", declared " + std::to_string(dim));
            }
            for (double x : v) matrix.push_back(static_cast<float>(x));
            ids.push_back(passages[i].id);
            sources.push_back(passages[i].source);
        }
    }
    return from_matrix(std::move(ids), std::move(sources), std::move(matrix), dim);
}

std::size_t DenseIndex::size() const { return storage_->ids.size(); }
std::size_t DenseIndex::dim() const { return storage_->dim; }
const std::string& DenseIndex::doc_id(std::size_t i) const { return storage_->ids.at(i); }
SourceType DenseIndex::source(std::size_t i) const { return storage_->sources.at(i); }

std::span<const float> DenseIndex::row(std::size_t i) const {
    return {storage_->data + i * storage_->dim, storage_->dim};
}

std::span<const float> DenseIndex::matrix() const {
    return {storage_->data, storage_->ids.size() * storage_->dim};
}

std::vector<ScoredDoc> DenseIndex::search(std::span<const float> query, std::size_t k) const {
    const Storage& s = *storage_;
    if (k == 0) throw ValidationError("k must be at least 1");
    if (query.size() != s.dim) {
        throw ValidationError("query dim " + std::to_string(query.size()) + " != index dim " +
                              std::to_string(s.dim));
    }
    for (float x : query) {
        if (!std::isfinite(x)) throw ValidationError("query vector has a non-finite value");
    }
    const std::size_t n = s.ids.size();
    k = std::min(k, n);

    std::vector<HeapEntry> heap;  // worst-ranked entry on top
    heap.reserve(k + 1);
    std::vector<double> scores(std::min(kScoreBlock, n));
    for (std::size_t block = 0; block < n; block += kScoreBlock) {
        const std::size_t end = std::min(n, block + kScoreBlock);
        for (std::size_t r = block; r < end; ++r) {
            scores[r - block] = inner_product(query, {s.data + r * s.dim, s.dim});
        }
        for (std::size_t r = block; r < end; ++r) {
            const HeapEntry e{scores[r - block], s.id_rank[r], static_cast<std::uint32_t>(r)};
            if (heap.size() < k) {
                heap.push_back(e);
                std::push_heap(heap.begin(), heap.end(), better);
            } else if (better(e, heap.front())) {
                std::pop_heap(heap.begin(), heap.end(), better);
                heap.back() = e;
                std::push_heap(heap.begin(), heap.end(), better);
            }
        }
    }
    std::sort(heap.begin(), heap.end(), better);
    std::vector<ScoredDoc> out;
    out.reserve(heap.size());
    for (const auto& e : heap) out.push_back({s.ids[e.row], e.score, s.sources[e.row]});
    return out;
}

std::vector<ScoredDoc> DenseIndex::search(std::span<const double> query, std::size_t k) const {
    const auto q = to_float(query);
    return search(std::span<const float>(q), k);
}

std::vector<ScoredDoc> search_dense(const DenseIndex& index, std::span<const double> query,
                                    std::size_t k) {
    return index.search(query, k);
}

void DenseIndex::save(const std::filesystem::path& path) const {
    const Storage& s = *storage_;
    AtomicWriter w(path);
    std::string header(kMagic, 4);
    const auto put = [&](const auto& value) {
        header.append(reinterpret_cast<const char*>(&value), sizeof(value));
    };
    put(kVersion);
    put(static_cast<std::uint32_t>(s.dim));
    put(static_cast<std::uint64_t>(s.ids.size()));
    for (std::size_t i = 0; i < s.ids.size(); ++i) {
        put(static_cast<std::uint32_t>(s.ids[i].size()));
        header += s.ids[i];
        put(static_cast<std::uint8_t>(s.sources[i]));
    }
    header.resize((header.size() + kMatrixAlign - 1) / kMatrixAlign * kMatrixAlign, '\0');
    w.write(header);
    const auto m = matrix();
    w.write({reinterpret_cast<const char*>(m.data()), m.size() * sizeof(float)});
    w.commit();
}

DenseIndex DenseIndex::load(const std::filesystem::path& path) {
    const int fd = ::open(path.c_str(), O_RDONLY);
    if (fd < 0) throw IoError(path.string(), "cannot open dense index");
    struct stat st {};
    if (::fstat(fd, &st) != 0 || st.st_size <= 0) {
        ::close(fd);
        throw ValidationError("dense index file is empty: " + path.string());
    }
    const auto len = static_cast<std::size_t>(st.st_size);
    void* map = ::mmap(nullptr, len, PROT_READ, MAP_SHARED, fd, 0);
    ::close(fd);
    if (map == MAP_FAILED) throw IoError(path.string(), "mmap failed");

    auto s = std::make_shared<Storage>();
    s->mapping = map;
    s->mapping_len = len;
    const char* base = static_cast<const char*>(map);
    std::size_t off = 0;
    const auto take = [&](void* dst, std::size_t n) {
        if (off + n > len) throw ValidationError("truncated dense index file: " + path.string());
        std::memcpy(dst, base + off, n);
        off += n;
    };
    char magic[4];
    take(magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0) {
        throw ValidationError("not a dense index file (bad magic): " + path.string());
    }
    std::uint32_t version = 0, dim = 0;
    std::uint64_t count = 0;
    take(&version, 4);
    take(&dim, 4);
    take(&count, 8);
    if (version != kVersion) {
        throw ValidationError("unsupported dense index version " + std::to_string(version));
    }
    if (dim == 0 || count == 0) throw ValidationError("dense index has zero dim or count");
    s->dim = dim;
    s->ids.reserve(count);
    s->sources.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        std::uint32_t n = 0;
        take(&n, 4);
        if (off + n > len) throw ValidationError("truncated dense index file: " + path.string());
        s->ids.emplace_back(base + off, n);
        off += n;
        std::uint8_t src = 0;
        take(&src, 1);
        if (src >= kSourceTypeCount) throw ValidationError("bad source tag in dense index");
        s->sources.push_back(static_cast<SourceType>(src));
    }
    off = (off + kMatrixAlign - 1) / kMatrixAlign * kMatrixAlign;
    if (off + count * dim * sizeof(float) != len) {
        throw ValidationError("dense index matrix size mismatch: " + path.string());
    }
    s->data = reinterpret_cast<const float*>(base + off);
    s->rank_ids();
    return DenseIndex(std::move(s));
}

}  // namespace hetqa
