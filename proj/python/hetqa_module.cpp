// Python bindings. Structured records cross the boundary as JSON text; the
// hetqa package converts to and from dicts.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "hetqa/corpus.hpp"
#include "hetqa/error.hpp"
#include "hetqa/eval.hpp"
#include "hetqa/fusion.hpp"
#include "hetqa/index.hpp"
#include "hetqa/kb_flatten.hpp"
#include "hetqa/pipeline.hpp"
#include "hetqa/reader_bridge.hpp"
#include "hetqa/table_flatten.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

using DocTuple = std::tuple<std::string, double, std::string>;

std::vector<hetqa::ScoredDoc> to_docs(const std::vector<DocTuple>& in) {
    std::vector<hetqa::ScoredDoc> out;
    for (const auto& [id, score, source] : in) out.push_back({id, score, hetqa::parse_source_type(source)});
    return out;
}

std::vector<DocTuple> from_docs(const std::vector<hetqa::ScoredDoc>& in) {
    std::vector<DocTuple> out;
    for (const auto& d : in) out.emplace_back(d.doc_id, d.score, std::string(hetqa::to_string(d.source)));
    return out;
}

std::vector<hetqa::HyperRelation> relations_from(const std::string& text) {
    std::vector<hetqa::HyperRelation> out;
    const auto arr = json::parse(text);
    for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(hetqa::hyper_relation_from_json(arr[i], "r" + std::to_string(i)));
    return out;
}

std::vector<hetqa::Passage> passages_from(const std::string& text) {
    std::vector<hetqa::Passage> out;
    for (const auto& j : json::parse(text)) out.push_back(hetqa::passage_from_json(j));
    return out;
}

std::string passages_to(std::span<const hetqa::Passage> ps) {
    json arr = json::array();
    for (const auto& p : ps) arr.push_back(hetqa::to_json(p));
    return arr.dump();
}

}  // namespace

PYBIND11_MODULE(_hetqa, m) {
    m.doc() = "Heterogeneous-source open-domain QA core";

    auto base = py::register_exception<hetqa::Error>(m, "Error");
    py::register_exception<hetqa::IoError>(m, "IoError", base.ptr());
    py::register_exception<hetqa::ParseError>(m, "ParseError", base.ptr());
    py::register_exception<hetqa::ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<hetqa::RemoteError>(m, "RemoteError", base.ptr());
    py::register_exception<hetqa::EmbeddingError>(m, "EmbeddingError", base.ptr());
    // nlohmann parse failures surface as ValueError
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const json::exception& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        }
    });

    m.def("normalize_answer", [](const std::string& s) { return hetqa::normalize_answer(s); });
    m.def("has_answer", [](const std::string& text, const std::vector<std::string>& answers) {
        return hetqa::has_answer(text, answers);
    });
    m.def("count_tokens", [](const std::string& s) { return hetqa::count_tokens(s); });

    m.def("linearize_relations_json", [](const std::string& rels) {
        std::vector<std::string> out;
        for (const auto& r : relations_from(rels)) out.push_back(hetqa::linearize_hyper_relation(r));
        return out;
    });
    m.def("two_hop_json", [](const std::string& rels, const std::vector<std::string>& seeds) {
        const hetqa::KBGraph g(relations_from(rels));
        const auto n = hetqa::two_hop_neighborhood(g, seeds);
        std::vector<std::string> ids;
        for (auto i : n.relations) ids.push_back(g.relations()[i].id);
        return std::make_pair(ids, n.unknown_seeds);
    });
    m.def("flatten_kb_json", [](const std::string& rels, std::size_t token_limit) {
        return passages_to(hetqa::flatten_kb(relations_from(rels), token_limit));
    });
    m.def(
        "flatten_tables_json",
        [](const std::string& tables, std::size_t token_limit, const std::string& mode) {
            std::vector<hetqa::RawTable> raw;
            for (const auto& j : json::parse(tables)) raw.push_back(hetqa::raw_table_from_json(j));
            const auto r = hetqa::flatten_tables(raw, token_limit, hetqa::parse_linearization_mode(mode));
            return passages_to(r.passages);
        },
        py::arg("tables"), py::arg("token_limit") = 100, py::arg("mode") = "simple");

    m.def(
        "merge_quota",
        [](const std::vector<DocTuple>& main, const std::vector<DocTuple>& kb, std::size_t k_total,
           std::size_t kb_quota) {
            const auto a = to_docs(main);
            const auto b = to_docs(kb);
            return from_docs(hetqa::merge_quota(a, b, {k_total, kb_quota}));
        },
        py::arg("main"), py::arg("kb"), py::arg("k_total"), py::arg("kb_quota"));

    py::class_<hetqa::HashingEmbedder>(m, "HashingEmbedder")
        .def(py::init<std::size_t>(), py::arg("dim") = 256)
        .def_property_readonly("dim", &hetqa::HashingEmbedder::dim)
        .def("embed", [](const hetqa::HashingEmbedder& e, const std::string& text) { return e.embed(text); });

    py::class_<hetqa::DenseIndex>(m, "DenseIndex")
        .def_static(
            "from_matrix",
            [](std::vector<std::string> ids, py::array_t<float, py::array::c_style | py::array::forcecast> matrix) {
                if (matrix.ndim() != 2) throw hetqa::ValidationError("matrix must be 2-dimensional");
                const auto dim = static_cast<std::size_t>(matrix.shape(1));
                std::vector<float> data(matrix.data(), matrix.data() + matrix.size());
                std::vector<hetqa::SourceType> sources(ids.size(), hetqa::SourceType::text);
                return hetqa::DenseIndex::from_matrix(std::move(ids), std::move(sources), std::move(data), dim);
            },
            py::arg("ids"), py::arg("matrix"))
        .def_static("build_hashing_json",
                    [](const std::string& passages, std::size_t dim) {
                        hetqa::HashingEmbedder emb(dim);
                        return hetqa::DenseIndex::build(passages_from(passages), emb);
                    })
        .def_static("load", [](const std::string& path) { return hetqa::DenseIndex::load(path); })
        .def("save", [](const hetqa::DenseIndex& d, const std::string& path) { d.save(path); })
        .def("__len__", &hetqa::DenseIndex::size)
        .def_property_readonly("dim", &hetqa::DenseIndex::dim)
        .def(
            "search",
            [](const hetqa::DenseIndex& d, const std::vector<double>& q, std::size_t k) {
                std::vector<hetqa::ScoredDoc> r;
                {
                    py::gil_scoped_release release;
                    r = hetqa::search_dense(d, q, k);
                }
                return from_docs(r);
            },
            py::arg("query"), py::arg("k"));

    py::class_<hetqa::Bm25Index>(m, "Bm25Index")
        .def_static(
            "build_json",
            [](const std::string& passages, double k1, double b) {
                return hetqa::Bm25Index::build(passages_from(passages), {k1, b});
            },
            py::arg("passages"), py::arg("k1") = 0.9, py::arg("b") = 0.4)
        .def("search", [](const hetqa::Bm25Index& i, const std::string& q, std::size_t k) {
            return from_docs(i.search(q, k));
        });

    m.def("read_baseline", [](const std::string& question, const std::vector<std::string>& contexts) {
        hetqa::ReaderRequest r;
        r.question = question;
        for (const auto& c : contexts) r.contexts.push_back({"", c});
        return hetqa::read_baseline(r);
    });

    m.def("parse_config", [](const std::string& text) { return hetqa::format_config(hetqa::parse_config(text)); });
    m.def("run_e2e_json", [](const std::string& config_text) {
        const auto cfg = hetqa::parse_config(config_text);
        hetqa::E2EResult r;
        {
            py::gil_scoped_release release;
            r = hetqa::run_e2e(cfg);
        }
        return hetqa::to_json(r.metrics).dump();
    });
}
