#include "reliefe/embed.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include "reliefe/error.hpp"
#include "reliefe/parallel.hpp"
#include "reliefe/rng.hpp"

namespace reliefe {

void EmbeddingConfig::validate() const {
    if (k_neighbors < 2) throw Error(ErrorKind::InvalidConfig, "k_neighbors must be at least 2");
    if (dim && *dim < 1) throw Error(ErrorKind::InvalidConfig, "embedding dimension must be positive");
    if (!(eta > 0.0)) throw Error(ErrorKind::InvalidConfig, "eta must be positive");
    if (!(a > 0.0) || !(b > 0.0)) throw Error(ErrorKind::InvalidConfig, "a and b must be positive");
    if (!(learning_rate > 0.0)) throw Error(ErrorKind::InvalidConfig, "learning rate must be positive");
    if (n_epochs < 1) throw Error(ErrorKind::InvalidConfig, "n_epochs must be positive");
    if (sample_cap < 1) throw Error(ErrorKind::InvalidConfig, "sample cap must be positive");
    if (!(init_range > 0.0)) throw Error(ErrorKind::InvalidConfig, "init range must be positive");
}

std::size_t KnnGraph::degenerate_count() const noexcept {
    return static_cast<std::size_t>(std::count(degenerate.begin(), degenerate.end(), true));
}

namespace {

double membership_sum(std::span<const double> d, double omega, double beta) {
    double s = 0.0;
    for (double v : d) s += std::exp(-std::max(0.0, v - omega) / beta);
    return s;
}

}  // namespace

Bandwidth solve_bandwidth(std::span<const double> neighbor_distances) {
    Bandwidth bw;
    const std::size_t k = neighbor_distances.size();
    double omega = std::numeric_limits<double>::infinity();
    for (double v : neighbor_distances)
        if (v > 0.0) omega = std::min(omega, v);
    if (k < 2 || std::isinf(omega)) {
        bw.degenerate = true;
        return bw;
    }
    bw.omega = omega;

    const double target = std::log2(static_cast<double>(k));
    // As β → 0 the sum tends to the number of neighbors within ω; the
    // equation is solvable only when that count stays below the target.
    const auto saturated = static_cast<double>(
        std::count_if(neighbor_distances.begin(), neighbor_distances.end(), [&](double v) { return v <= omega; }));
    if (saturated >= target) {
        bw.degenerate = true;
        return bw;
    }

    double lo = 0.0, hi = 1.0;
    while (membership_sum(neighbor_distances, omega, hi) < target) {
        lo = hi;
        hi *= 2.0;
        if (!std::isfinite(hi)) {
            bw.degenerate = true;
            return bw;
        }
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double f = membership_sum(neighbor_distances, omega, mid) - target;
        if (f == 0.0) {
            lo = hi = mid;
            break;
        }
        (f < 0.0 ? lo : hi) = mid;
    }
    const double f_lo = lo > 0.0 ? std::abs(membership_sum(neighbor_distances, omega, lo) - target)
                                 : std::numeric_limits<double>::infinity();
    const double f_hi = std::abs(membership_sum(neighbor_distances, omega, hi) - target);
    bw.beta = f_lo < f_hi ? lo : hi;
    return bw;
}

double membership(double distance, const Bandwidth& bw) noexcept {
    return std::exp(-std::max(0.0, distance - bw.omega) / bw.beta);
}

std::vector<std::size_t> representative_sample(const ClassVector& classes, std::size_t cap) {
    std::map<std::size_t, std::size_t> slot_of;
    std::vector<std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < classes.size(); ++i) {
        auto [it, inserted] = slot_of.try_emplace(classes[i], members.size());
        if (inserted) members.emplace_back();
        members[it->second].push_back(i);
    }
    if (cap < members.size())
        throw Error(ErrorKind::InsufficientCap, "sample cap " + std::to_string(cap) + " is below the " +
                                                    std::to_string(members.size()) + " distinct targets");
    const std::size_t want = std::min(cap, classes.size());
    std::vector<std::size_t> chosen;
    chosen.reserve(want);
    std::vector<std::size_t> cursor(members.size(), 0);
    while (chosen.size() < want) {
        for (std::size_t g = 0; g < members.size() && chosen.size() < want; ++g) {
            if (cursor[g] < members[g].size()) chosen.push_back(members[g][cursor[g]++]);
        }
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

std::vector<std::size_t> representative_sample(const SparseMatrix& labels, std::size_t cap) {
    // Distinct label sets enumerated in order of first appearance.
    std::map<std::vector<Index>, std::size_t> id_of;
    ClassVector ids(labels.n_rows());
    for (std::size_t i = 0; i < labels.n_rows(); ++i) {
        const RowView r = labels.row(i);
        std::vector<Index> key(r.cols.begin(), r.cols.end());
        ids[i] = id_of.try_emplace(std::move(key), id_of.size()).first->second;
    }
    return representative_sample(ids, cap);
}

std::vector<std::size_t> representative_sample(const Targets& targets, std::size_t cap) {
    return std::visit([&](const auto& t) { return representative_sample(t, cap); }, targets);
}

KnnGraph build_knn_graph(const SparseMatrix& x, const EmbeddingConfig& config,
                         std::span<const std::size_t> rows) {
    config.validate();
    const std::size_t n = rows.size();
    const std::size_t k = config.k_neighbors;
    if (n <= k)
        throw Error(ErrorKind::InvalidShape,
                    "graph needs more rows (" + std::to_string(n) + ") than neighbors (" + std::to_string(k) + ")");
    for (std::size_t r : rows)
        if (r >= x.n_rows()) throw Error(ErrorKind::InvalidShape, "row index out of range");

    std::vector<std::size_t> nbr(n * k);
    std::vector<double> wts(n * k);
    KnnGraph g;
    g.omegas.assign(n, 0.0);
    g.betas.assign(n, 1.0);
    g.degenerate.assign(n, false);
    std::vector<char> degenerate(n, 0);

    parallel_for(n, config.threads, [&](std::size_t begin, std::size_t end, std::size_t) {
        std::vector<double> dist(n);
        std::vector<std::size_t> order(n);
        std::vector<double> nd(k);
        for (std::size_t a = begin; a < end; ++a) {
            const RowView ra = x.row(rows[a]);
            const double na = config.metric == DistanceMetric::cosine ? squared_norm(ra) : 0.0;
            for (std::size_t c = 0; c < n; ++c) {
                if (c == a) {
                    dist[c] = std::numeric_limits<double>::infinity();
                } else if (config.metric == DistanceMetric::euclidean) {
                    dist[c] = std::sqrt(squared_euclidean(ra, x.row(rows[c])));
                } else {
                    const RowView rc = x.row(rows[c]);
                    const double nc = squared_norm(rc);
                    if (na == 0.0 || nc == 0.0)
                        throw Error(ErrorKind::DegenerateRow, "cosine distance on a zero-norm row");
                    dist[c] = std::max(0.0, 1.0 - dot(ra, rc) / std::sqrt(na * nc));
                }
            }
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                              [&](std::size_t p, std::size_t q) {
                                  return dist[p] < dist[q] || (dist[p] == dist[q] && p < q);
                              });
            for (std::size_t j = 0; j < k; ++j) nd[j] = dist[order[j]];
            const Bandwidth bw = solve_bandwidth(nd);
            g.omegas[a] = bw.omega;
            g.betas[a] = bw.beta;
            degenerate[a] = bw.degenerate;
            for (std::size_t j = 0; j < k; ++j) {
                nbr[a * k + j] = order[j];
                wts[a * k + j] = membership(nd[j], bw);
            }
        }
    });

    SparseBuilder builder(n);
    builder.reserve(n, n * k);
    std::vector<std::pair<std::size_t, double>> row;
    for (std::size_t a = 0; a < n; ++a) {
        g.degenerate[a] = degenerate[a] != 0;
        row.clear();
        for (std::size_t j = 0; j < k; ++j) row.emplace_back(nbr[a * k + j], wts[a * k + j]);
        std::sort(row.begin(), row.end());
        for (const auto& [c, w] : row) builder.push(static_cast<Index>(c), w);
        builder.finish_row();
    }
    g.adjacency = std::move(builder).build();
    return g;
}

SparseMatrix fuzzy_union(const SparseMatrix& a) {
    if (a.n_rows() != a.n_cols()) throw Error(ErrorKind::InvalidShape, "fuzzy union needs a square matrix");
    for (double v : a.values())
        if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorKind::InvalidWeight, "membership outside [0, 1]");
    const SparseMatrix at = a.transpose();
    SparseBuilder builder(a.n_cols());
    builder.reserve(a.n_rows(), 2 * a.nnz());
    for (std::size_t i = 0; i < a.n_rows(); ++i) {
        const RowView r = a.row(i), t = at.row(i);
        std::size_t p = 0, q = 0;
        while (p < r.nnz() || q < t.nnz()) {
            Index col;
            double u = 0.0, v = 0.0;
            if (q == t.nnz() || (p < r.nnz() && r.cols[p] < t.cols[q])) {
                col = r.cols[p];
                u = r.vals[p++];
            } else if (p == r.nnz() || t.cols[q] < r.cols[p]) {
                col = t.cols[q];
                v = t.vals[q++];
            } else {
                col = r.cols[p];
                u = r.vals[p++];
                v = t.vals[q++];
            }
            builder.push(col, u + v - u * v);
        }
        builder.finish_row();
    }
    return std::move(builder).build();
}

namespace {

struct Edge {
    std::size_t head;
    std::size_t tail;
    double weight;
};

constexpr double kClip = 4.0;

double clip(double v) noexcept { return std::clamp(v, -kClip, kClip); }

// Plain loads and stores for the serial layout, relaxed atomics for Hogwild.
template <bool Atomic>
struct Coords {
    double* base;
    double load(std::size_t p) const noexcept {
        if constexpr (Atomic) {
            return std::atomic_ref<double>(base[p]).load(std::memory_order_relaxed);
        } else {
            return base[p];
        }
    }
    void add(std::size_t p, double delta) const noexcept {
        if constexpr (Atomic) {
            std::atomic_ref<double> ref(base[p]);
            ref.store(ref.load(std::memory_order_relaxed) + delta, std::memory_order_relaxed);
        } else {
            base[p] += delta;
        }
    }
};

template <bool Atomic>
void apply_edges(std::span<const Edge> edges, const SparseMatrix& graph, Coords<Atomic> coords,
                 std::size_t dim, std::size_t n_vertices, double alpha, const EmbeddingConfig& cfg, Rng& rng,
                 std::vector<double>& diff) {
    for (const Edge& e : edges) {
        if (uniform01(rng) >= e.weight) continue;
        const std::size_t hi = e.head * dim, ti = e.tail * dim;
        double d2 = 0.0;
        for (std::size_t c = 0; c < dim; ++c) {
            diff[c] = coords.load(hi + c) - coords.load(ti + c);
            d2 += diff[c] * diff[c];
        }
        if (d2 > 0.0) {
            const double coef =
                -2.0 * cfg.a * cfg.b * std::pow(d2, cfg.b - 1.0) / (1.0 + d2) * e.weight;
            for (std::size_t c = 0; c < dim; ++c) {
                const double g = clip(coef * diff[c]) * alpha;
                coords.add(hi + c, g);
                coords.add(ti + c, -g);
            }
        }
        for (std::size_t s = 0; s < cfg.negative_samples; ++s) {
            const std::size_t other = uniform_index(rng, n_vertices);
            if (other == e.head) continue;
            const double w = graph.at(e.head, other);
            const std::size_t oi = other * dim;
            d2 = 0.0;
            for (std::size_t c = 0; c < dim; ++c) {
                diff[c] = coords.load(hi + c) - coords.load(oi + c);
                d2 += diff[c] * diff[c];
            }
            const double coef = cfg.b * (1.0 - w) / ((cfg.eta + d2) * (1.0 + d2));
            for (std::size_t c = 0; c < dim; ++c) coords.add(hi + c, clip(coef * diff[c]) * alpha);
        }
    }
}

}  // namespace

DenseMatrix layout(const SparseMatrix& graph, std::size_t dim, const EmbeddingConfig& config) {
    config.validate();
    if (graph.n_rows() != graph.n_cols()) throw Error(ErrorKind::InvalidShape, "layout needs a square graph");
    if (dim < 1) throw Error(ErrorKind::InvalidConfig, "layout dimension must be positive");
    const std::size_t n = graph.n_rows();

    DenseMatrix coords(n, dim);
    Rng init = make_rng(config.seed, stream::layout_init);
    for (double& v : coords.data) v = config.init_range * (2.0 * uniform01(init) - 1.0);

    std::vector<Edge> edges;
    edges.reserve(graph.nnz());
    for (std::size_t i = 0; i < n; ++i) {
        const RowView r = graph.row(i);
        for (std::size_t p = 0; p < r.nnz(); ++p)
            if (r.cols[p] != i) edges.push_back({i, r.cols[p], r.vals[p]});
    }

    const std::size_t threads = config.parallel_layout ? std::max<std::size_t>(1, config.threads) : 1;
    for (std::size_t epoch = 0; epoch < config.n_epochs; ++epoch) {
        const double alpha =
            config.learning_rate * (1.0 - static_cast<double>(epoch) / static_cast<double>(config.n_epochs));
        if (threads == 1) {
            Rng rng = make_rng(config.seed, stream::layout_epoch, epoch);
            std::vector<double> diff(dim);
            apply_edges<false>(edges, graph, Coords<false>{coords.data.data()}, dim, n, alpha, config, rng, diff);
        } else {
            parallel_for(edges.size(), threads, [&](std::size_t b, std::size_t e, std::size_t t) {
                Rng rng = make_rng(config.seed, stream::layout_epoch, epoch * threads + t);
                std::vector<double> diff(dim);
                apply_edges<true>(std::span<const Edge>(edges).subspan(b, e - b), graph,
                                  Coords<true>{coords.data.data()}, dim, n, alpha, config, rng, diff);
            });
        }
    }
    for (double v : coords.data)
        if (!std::isfinite(v)) throw Error(ErrorKind::LayoutDiverged, "non-finite coordinate after layout");
    return coords;
}

void embed_out_of_sample(Embedding& embedding, const SparseMatrix& x, std::span<const std::size_t> new_rows,
                         const EmbeddingConfig& config) {
    const auto& trained = embedding.trained_indices;
    if (trained.empty()) throw Error(ErrorKind::InvalidShape, "embedding has no trained rows");
    if (embedding.coordinates.n_rows != x.n_rows())
        throw Error(ErrorKind::InvalidShape, "embedding row count does not match the data");
    std::vector<bool> is_trained(x.n_rows(), false);
    for (std::size_t t : trained) is_trained[t] = true;
    for (std::size_t r : new_rows) {
        if (r >= x.n_rows()) throw Error(ErrorKind::InvalidShape, "row index out of range");
        if (is_trained[r]) throw Error(ErrorKind::InvalidShape, "out-of-sample row is already trained");
    }

    const std::size_t k = std::min(config.k_neighbors, trained.size());
    const std::size_t dim = embedding.dim();
    parallel_for(new_rows.size(), config.threads, [&](std::size_t begin, std::size_t end, std::size_t) {
        std::vector<std::size_t> order(trained.size());
        std::vector<double> nd(k), w(k);
        for (std::size_t q = begin; q < end; ++q) {
            const std::size_t row = new_rows[q];
            std::vector<double> dist = row_distances(x, row, config.metric, trained);
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                              [&](std::size_t p, std::size_t r) {
                                  return dist[p] < dist[r] || (dist[p] == dist[r] && p < r);
                              });
            for (std::size_t j = 0; j < k; ++j) nd[j] = dist[order[j]];

            std::span<double> out = embedding.coordinates.row(row);
            std::fill(out.begin(), out.end(), 0.0);
            std::size_t exact = 0;
            while (exact < k && nd[exact] == 0.0) ++exact;
            double total = 0.0;
            if (exact > 0) {
                std::fill(w.begin(), w.end(), 0.0);
                std::fill(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(exact), 1.0);
                total = static_cast<double>(exact);
            } else {
                const Bandwidth bw = solve_bandwidth(nd);
                for (std::size_t j = 0; j < k; ++j) total += (w[j] = membership(nd[j], bw));
                if (!(total > 0.0)) {
                    std::fill(w.begin(), w.end(), 1.0);
                    total = static_cast<double>(k);
                }
            }
            for (std::size_t j = 0; j < k; ++j) {
                if (w[j] == 0.0) continue;
                const auto src = embedding.coordinates.row(trained[order[j]]);
                for (std::size_t c = 0; c < dim; ++c) out[c] += w[j] * src[c];
            }
            for (double& v : out) v /= total;
        }
    });
}

Embedding manifold_projection(const SparseMatrix& x, const Targets& targets, const EmbeddingConfig& config) {
    config.validate();
    const std::size_t n = x.n_rows();
    if (n_targets(targets) != n) throw Error(ErrorKind::InvalidShape, "target count does not match rows");
    if (n < 3) throw Error(ErrorKind::InvalidShape, "embedding needs at least 3 rows");

    Embedding emb;
    if (n > config.sample_cap) {
        emb.trained_indices = representative_sample(targets, config.sample_cap);
    } else {
        emb.trained_indices.resize(n);
        std::iota(emb.trained_indices.begin(), emb.trained_indices.end(), std::size_t{0});
    }
    const auto& rows = emb.trained_indices;

    std::size_t dim;
    if (config.dim) {
        dim = *config.dim;
    } else {
        DimOptions opts = config.dim_options;
        opts.threads = config.threads;
        const auto start = std::chrono::steady_clock::now();
        try {
            emb.dim_estimate = estimate_dimension(x, rows, opts);
            dim = emb.dim_estimate->d;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::DegenerateGeometry) throw;
            emb.dim_fallback = true;
            dim = std::clamp<std::size_t>(x.n_cols(), 1, kFallbackDim);
        }
        emb.dim_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }

    EmbeddingConfig graph_cfg = config;
    graph_cfg.k_neighbors = std::clamp<std::size_t>(config.k_neighbors, 2, rows.size() - 1);
    DenseMatrix trained;
    {
        const KnnGraph graph = build_knn_graph(x, graph_cfg, rows);
        emb.degenerate_nodes = graph.degenerate_count();
        trained = layout(fuzzy_union(graph.adjacency), dim, graph_cfg);
    }

    if (rows.size() == n) {
        // rows is the identity here.
        emb.coordinates = std::move(trained);
    } else {
        emb.coordinates = DenseMatrix(n, dim);
        for (std::size_t a = 0; a < rows.size(); ++a) {
            const auto src = trained.row(a);
            std::copy(src.begin(), src.end(), emb.coordinates.row(rows[a]).begin());
        }
        trained = DenseMatrix();
    }
    if (rows.size() < n) {
        std::vector<bool> is_trained(n, false);
        for (std::size_t r : rows) is_trained[r] = true;
        std::vector<std::size_t> rest;
        rest.reserve(n - rows.size());
        for (std::size_t i = 0; i < n; ++i)
            if (!is_trained[i]) rest.push_back(i);
        embed_out_of_sample(emb, x, rest, config);
    }
    return emb;
}

}  // namespace reliefe
