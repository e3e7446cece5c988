#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <unordered_set>

#include "hetqa/index.hpp"
#include "hetqa/jsonl.hpp"
#include "hetqa/text.hpp"

namespace hetqa {

namespace {

constexpr char kMagic[4] = {'H', 'F', 'B', 'M'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::string& out, const T& v) {
    out.append(reinterpret_cast<const char*>(&v), sizeof(v));
}

void put_str(std::string& out, const std::string& s) {
    put(out, static_cast<std::uint32_t>(s.size()));
    out += s;
}

class Reader {
public:
    Reader(std::string data, std::string path) : data_(std::move(data)), path_(std::move(path)) {}

    template <typename T>
    T get() {
        T v;
        need(sizeof(v));
        std::memcpy(&v, data_.data() + off_, sizeof(v));
        off_ += sizeof(v);
        return v;
    }

    std::string get_str() {
        const auto n = get<std::uint32_t>();
        need(n);
        std::string s = data_.substr(off_, n);
        off_ += n;
        return s;
    }

    bool done() const { return off_ == data_.size(); }

private:
    void need(std::size_t n) const {
        if (off_ + n > data_.size()) throw ValidationError("truncated BM25 index file: " + path_);
    }
    std::string data_;
    std::string path_;
    std::size_t off_ = 0;
};

}  // namespace

std::vector<std::string> bm25_terms(std::string_view content) {
    std::vector<std::string> out;
    for (auto piece : text::split_ws(content)) {
        const std::string lowered = text::ascii_lower(piece);
        const std::string_view term = text::trim_punct(lowered);
        if (!term.empty()) out.emplace_back(term);
    }
    return out;
}

Bm25Index Bm25Index::build(std::span<const Passage> passages, Bm25Params params) {
    Bm25Index idx;
    idx.params_ = params;
    idx.doc_ids_.reserve(passages.size());
    std::uint64_t total_len = 0;
    std::unordered_map<std::string, std::uint32_t> tf;
    std::unordered_set<std::string_view> seen;
    for (std::size_t d = 0; d < passages.size(); ++d) {
        const Passage& p = passages[d];
        if (!seen.insert(p.id).second) throw ValidationError("duplicate doc id \"" + p.id + "\"");
        idx.doc_ids_.push_back(p.id);
        idx.sources_.push_back(p.source);
        const auto len = static_cast<std::uint32_t>(count_tokens(p.text));
        idx.doc_len_.push_back(len);
        total_len += len;
        tf.clear();
        for (auto& term : bm25_terms(p.text)) ++tf[std::move(term)];
        for (const auto& [term, count] : tf) {
            idx.postings_[term].push_back({static_cast<std::uint32_t>(d), count});
        }
    }
    // Documents are visited in order, so every posting list is already sorted by doc.
    idx.avg_len_ = passages.empty() ? 0.0 : static_cast<double>(total_len) / passages.size();
    return idx;
}

std::span<const Posting> Bm25Index::postings(const std::string& term) const {
    auto it = postings_.find(term);
    if (it == postings_.end()) return {};
    return it->second;
}

double Bm25Index::idf(const std::string& term) const {
    const double n = static_cast<double>(postings(term).size());
    const double big_n = static_cast<double>(doc_count());
    return std::log(1.0 + (big_n - n + 0.5) / (n + 0.5));
}

std::vector<ScoredDoc> Bm25Index::search(std::string_view query, std::size_t k) const {
    if (k == 0) throw ValidationError("k must be at least 1");
    const auto terms = bm25_terms(query);
    if (terms.empty() || doc_ids_.empty()) return {};

    std::vector<double> scores(doc_ids_.size(), 0.0);
    std::vector<char> touched(doc_ids_.size(), 0);
    std::vector<std::uint32_t> hits;
    const double k1 = params_.k1, b = params_.b;
    for (const auto& term : terms) {
        const auto plist = postings(term);
        if (plist.empty()) continue;
        const double w = idf(term);
        for (const Posting& p : plist) {
            const double f = p.tf;
            const double norm = k1 * (1.0 - b + b * doc_len_[p.doc] / avg_len_);
            scores[p.doc] += w * (f * (k1 + 1.0)) / (f + norm);
            if (!touched[p.doc]) {
                touched[p.doc] = 1;
                hits.push_back(p.doc);
            }
        }
    }
    std::vector<ScoredDoc> out;
    out.reserve(hits.size());
    for (auto d : hits) out.push_back({doc_ids_[d], scores[d], sources_[d]});
    const std::size_t take = std::min(k, out.size());
    std::partial_sort(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(take), out.end(),
                      ranks_before);
    out.resize(take);
    return out;
}

void Bm25Index::save(const std::filesystem::path& path) const {
    std::string out(kMagic, 4);
    put(out, kVersion);
    put(out, params_.k1);
    put(out, params_.b);
    put(out, static_cast<std::uint64_t>(doc_ids_.size()));
    for (std::size_t d = 0; d < doc_ids_.size(); ++d) {
        put_str(out, doc_ids_[d]);
        put(out, static_cast<std::uint8_t>(sources_[d]));
        put(out, doc_len_[d]);
    }
    std::vector<const std::string*> terms;
    terms.reserve(postings_.size());
    for (const auto& kv : postings_) terms.push_back(&kv.first);
    std::sort(terms.begin(), terms.end(), [](auto* x, auto* y) { return *x < *y; });
    put(out, static_cast<std::uint64_t>(terms.size()));
    for (const auto* term : terms) {
        put_str(out, *term);
        const auto& plist = postings_.at(*term);
        put(out, static_cast<std::uint32_t>(plist.size()));
        for (const auto& p : plist) {
            put(out, p.doc);
            put(out, p.tf);
        }
    }
    write_text_atomic(path, out);
}

Bm25Index Bm25Index::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path.string(), "cannot open BM25 index");
    Reader r(std::string(std::istreambuf_iterator<char>(in), {}), path.string());
    char magic[4];
    for (char& c : magic) c = r.get<char>();
    if (std::memcmp(magic, kMagic, 4) != 0) {
        throw ValidationError("not a BM25 index file (bad magic): " + path.string());
    }
    if (r.get<std::uint32_t>() != kVersion) throw ValidationError("unsupported BM25 index version");
    Bm25Index idx;
    idx.params_.k1 = r.get<double>();
    idx.params_.b = r.get<double>();
    const auto n = r.get<std::uint64_t>();
    std::uint64_t total = 0;
    for (std::uint64_t d = 0; d < n; ++d) {
        idx.doc_ids_.push_back(r.get_str());
        const auto src = r.get<std::uint8_t>();
        if (src >= kSourceTypeCount) throw ValidationError("bad source tag in BM25 index");
        idx.sources_.push_back(static_cast<SourceType>(src));
        idx.doc_len_.push_back(r.get<std::uint32_t>());
        total += idx.doc_len_.back();
    }
    idx.avg_len_ = n == 0 ? 0.0 : static_cast<double>(total) / static_cast<double>(n);
    const auto terms = r.get<std::uint64_t>();
    for (std::uint64_t t = 0; t < terms; ++t) {
        std::string term = r.get_str();
        const auto count = r.get<std::uint32_t>();
        std::vector<Posting> plist(count);
        for (auto& p : plist) {
            p.doc = r.get<std::uint32_t>();
            p.tf = r.get<std::uint32_t>();
            if (p.doc >= n) throw ValidationError("BM25 posting refers to unknown doc");
        }
        idx.postings_.emplace(std::move(term), std::move(plist));
    }
    if (!r.done()) throw ValidationError("trailing bytes in BM25 index file: " + path.string());
    return idx;
}

}  // namespace hetqa
