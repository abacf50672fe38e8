#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <cstring>

#include "reliefe/embed.hpp"
#include "reliefe/error.hpp"
#include "reliefe/eval.hpp"
#include "reliefe/intrinsic_dim.hpp"
#include "reliefe/ranking.hpp"
#include "reliefe/sparsify.hpp"

namespace py = pybind11;
using namespace reliefe;

namespace {

template <class T>
using Array = py::array_t<T, py::array::c_style | py::array::forcecast>;

SparseMatrix to_csr(std::size_t n_rows, std::size_t n_cols, const Array<std::int64_t>& indptr,
                    const Array<std::int64_t>& indices, const Array<double>& data) {
    std::vector<std::size_t> offsets(indptr.data(), indptr.data() + indptr.size());
    std::vector<Index> cols(indices.data(), indices.data() + indices.size());
    std::vector<double> vals(data.data(), data.data() + data.size());
    return SparseMatrix(n_rows, n_cols, std::move(offsets), std::move(cols), std::move(vals));
}

py::tuple from_csr(const SparseMatrix& m) {
    Array<std::int64_t> indptr(static_cast<py::ssize_t>(m.row_offsets().size()));
    Array<std::int64_t> indices(static_cast<py::ssize_t>(m.nnz()));
    Array<double> data(static_cast<py::ssize_t>(m.nnz()));
    std::copy(m.row_offsets().begin(), m.row_offsets().end(), indptr.mutable_data());
    std::copy(m.col_indices().begin(), m.col_indices().end(), indices.mutable_data());
    std::copy(m.values().begin(), m.values().end(), data.mutable_data());
    return py::make_tuple(indptr, indices, data);
}

Array<double> from_dense(const DenseMatrix& d) {
    Array<double> out({static_cast<py::ssize_t>(d.n_rows), static_cast<py::ssize_t>(d.n_cols)});
    std::memcpy(out.mutable_data(), d.data.data(), d.data.size() * sizeof(double));
    return out;
}

// Targets arrive either as a 1-D class vector or as a CSR tuple of a binary
// label matrix.
Targets to_targets(const py::object& t) {
    if (py::isinstance<py::tuple>(t)) {
        auto tup = t.cast<py::tuple>();
        return to_csr(tup[0].cast<std::size_t>(), tup[1].cast<std::size_t>(), tup[2].cast<Array<std::int64_t>>(),
                      tup[3].cast<Array<std::int64_t>>(), tup[4].cast<Array<double>>());
    }
    const auto a = t.cast<Array<std::int64_t>>();
    ClassVector classes(static_cast<std::size_t>(a.size()));
    for (py::ssize_t i = 0; i < a.size(); ++i) {
        if (a.data()[i] < 0) throw Error(ErrorKind::InvalidValue, "class ids must be non-negative");
        classes[static_cast<std::size_t>(i)] = static_cast<std::size_t>(a.data()[i]);
    }
    return classes;
}

}  // namespace

PYBIND11_MODULE(_reliefe, m) {
    static py::handle error_type = py::exception<Error>(m, "ReliefEError", PyExc_RuntimeError).release();
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object exc = error_type(e.what());
            exc.attr("kind") = std::string(to_string(e.kind()));
            PyErr_SetObject(error_type.ptr(), exc.ptr());
        }
    });

    py::class_<SparseMatrix>(m, "CsrMatrix")
        .def(py::init(&to_csr), py::arg("n_rows"), py::arg("n_cols"), py::arg("indptr"), py::arg("indices"),
             py::arg("data"))
        .def_property_readonly("shape", [](const SparseMatrix& s) { return py::make_tuple(s.n_rows(), s.n_cols()); })
        .def_property_readonly("nnz", &SparseMatrix::nnz)
        .def("arrays", &from_csr);

    py::class_<EmbeddingConfig>(m, "EmbeddingConfig")
        .def(py::init<>())
        .def_readwrite("dim", &EmbeddingConfig::dim)
        .def_readwrite("k_neighbors", &EmbeddingConfig::k_neighbors)
        .def_readwrite("n_epochs", &EmbeddingConfig::n_epochs)
        .def_readwrite("a", &EmbeddingConfig::a)
        .def_readwrite("b", &EmbeddingConfig::b)
        .def_readwrite("eta", &EmbeddingConfig::eta)
        .def_readwrite("learning_rate", &EmbeddingConfig::learning_rate)
        .def_readwrite("negative_samples", &EmbeddingConfig::negative_samples)
        .def_readwrite("sample_cap", &EmbeddingConfig::sample_cap)
        .def_property(
            "metric", [](const EmbeddingConfig& c) { return std::string(to_string(c.metric)); },
            [](EmbeddingConfig& c, const std::string& s) { c.metric = parse_metric(s); })
        .def_readwrite("seed", &EmbeddingConfig::seed)
        .def_readwrite("parallel_layout", &EmbeddingConfig::parallel_layout)
        .def_readwrite("threads", &EmbeddingConfig::threads)
        .def_property(
            "dim_trim", [](const EmbeddingConfig& c) { return c.dim_options.trim_fraction; },
            [](EmbeddingConfig& c, double v) { c.dim_options.trim_fraction = v; })
        .def_property(
            "dim_multiplier", [](const EmbeddingConfig& c) { return c.dim_options.dim_multiplier; },
            [](EmbeddingConfig& c, double v) { c.dim_options.dim_multiplier = v; });

    py::class_<RankingConfig>(m, "RankingConfig")
        .def(py::init<>())
        .def_readwrite("iterations", &RankingConfig::iterations)
        .def_readwrite("k_neighbors", &RankingConfig::k_neighbors)
        .def_readwrite("adaptive_threshold", &RankingConfig::adaptive_threshold)
        .def_readwrite("abs_mean_update", &RankingConfig::abs_mean_update)
        .def_readwrite("use_embedding", &RankingConfig::use_embedding)
        .def_property(
            "metric", [](const RankingConfig& c) { return std::string(to_string(c.metric)); },
            [](RankingConfig& c, const std::string& s) { c.metric = parse_metric(s); })
        .def_property(
            "mlc_distance", [](const RankingConfig& c) { return std::string(to_string(c.mlc_distance)); },
            [](RankingConfig& c, const std::string& s) { c.mlc_distance = parse_mlc_distance(s); })
        .def_property(
            "update_form",
            [](const RankingConfig& c) { return c.update_form == MlcUpdateForm::text ? "text" : "pseudocode"; },
            [](RankingConfig& c, const std::string& s) {
                if (s == "text") c.update_form = MlcUpdateForm::text;
                else if (s == "pseudocode") c.update_form = MlcUpdateForm::pseudocode;
                else throw Error(ErrorKind::InvalidConfig, "unknown update form '" + s + "'");
            })
        .def_readwrite("embedding", &RankingConfig::embedding)
        .def_property(
            "epsilon", [](const RankingConfig& c) { return c.sparsify.epsilon; },
            [](RankingConfig& c, std::optional<double> v) { c.sparsify.epsilon = v; })
        .def_property(
            "density_threshold", [](const RankingConfig& c) { return c.sparsify.density_threshold; },
            [](RankingConfig& c, double v) { c.sparsify.density_threshold = v; })
        .def_readwrite("sparsify_enabled", &RankingConfig::sparsify_enabled)
        .def_readwrite("seed", &RankingConfig::seed)
        .def_readwrite("serial", &RankingConfig::serial)
        .def_readwrite("threads", &RankingConfig::threads)
        .def_readwrite("record_k", &RankingConfig::record_k);

    m.def(
        "rank",
        [](const SparseMatrix& x, const py::object& targets, RankingConfig config) {
            Dataset ds{x, to_targets(targets)};
            ds.validate();
            config.sparsify.seed = config.seed;
            RankResult r;
            {
                py::gil_scoped_release release;
                r = rank(ds, config);
            }
            py::dict info;
            info["sparsified"] = r.sparsified;
            info["epsilon"] = r.epsilon;
            info["embedding_dim"] = r.embedding_dim;
            info["target_embedding_dim"] = r.target_embedding_dim;
            info["skipped_updates"] = r.skipped_updates;
            info["selected_k"] = r.selected_k;
            info["timings"] = py::dict(py::arg("sparsify") = r.timings.sparsify, py::arg("dim") = r.timings.dim,
                                       py::arg("embed") = r.timings.embed, py::arg("rank") = r.timings.rank);
            return py::make_tuple(Array<double>(static_cast<py::ssize_t>(r.weights.size()), r.weights.weights.data()),
                                  info);
        },
        py::arg("x"), py::arg("targets"), py::arg("config"));

    m.def(
        "estimate_dimension",
        [](const SparseMatrix& x, const py::object& targets, std::size_t sample_cap, double trim, double multiplier) {
            const Targets t = to_targets(targets);
            const auto rows = representative_sample(t, std::min(sample_cap, x.n_rows()));
            DimOptions opts;
            opts.trim_fraction = trim;
            opts.dim_multiplier = multiplier;
            const DimEstimate est = estimate_dimension(x, rows, opts);
            return py::dict(py::arg("d") = est.d, py::arg("slope") = est.slope, py::arg("mu") = est.mu,
                            py::arg("empirical_cdf") = est.empirical_cdf, py::arg("fitted") = est.fitted,
                            py::arg("skipped") = est.skipped, py::arg("clamped") = est.clamped);
        },
        py::arg("x"), py::arg("targets"), py::arg("sample_cap") = 2048, py::arg("trim") = 0.1,
        py::arg("multiplier") = 1.0);

    m.def(
        "embed",
        [](const SparseMatrix& x, const py::object& targets, const EmbeddingConfig& config) {
            const Targets t = to_targets(targets);
            Embedding e;
            {
                py::gil_scoped_release release;
                e = manifold_projection(x, t, config);
            }
            return py::make_tuple(from_dense(e.coordinates), e.trained_indices, e.dim_fallback);
        },
        py::arg("x"), py::arg("targets"), py::arg("config"));

    m.def("estimate_epsilon", &estimate_epsilon, py::arg("x"));
    m.def(
        "sparsify",
        [](const SparseMatrix& x, std::optional<double> epsilon, std::uint64_t seed) {
            SparsifyParams p;
            p.epsilon = epsilon ? *epsilon : estimate_epsilon(x);
            p.seed = seed;
            return prms(x, p);
        },
        py::arg("x"), py::arg("epsilon") = py::none(), py::arg("seed") = 0);

    m.def(
        "rf1_curve",
        [](const SparseMatrix& x, const py::object& targets, const std::vector<double>& weights,
           const std::vector<std::size_t>& grid, std::size_t folds, std::uint64_t seed) {
            const Targets t = to_targets(targets);
            const FeatureWeights w{weights};
            PerformanceCurve curve;
            {
                py::gil_scoped_release release;
                curve = rf1_curve(x, t, w, grid, folds, seed);
            }
            std::vector<double> f1, rf1;
            for (const auto& p : curve.points) {
                f1.push_back(p.f1);
                rf1.push_back(p.rf1);
            }
            return py::dict(py::arg("f") = grid, py::arg("f1") = f1, py::arg("rf1") = rf1,
                            py::arg("baseline_f1") = curve.baseline_f1, py::arg("aurf1") = aurf1(curve));
        },
        py::arg("x"), py::arg("targets"), py::arg("weights"), py::arg("grid"), py::arg("folds") = 3,
        py::arg("seed") = 0);

    m.def(
        "ranking_order", [](const std::vector<double>& w) { return FeatureWeights{w}.ranking(); }, py::arg("weights"));
}
