#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "reliefe/embed.hpp"
#include "reliefe/error.hpp"
#include "reliefe/eval.hpp"
#include "reliefe/intrinsic_dim.hpp"
#include "reliefe/io.hpp"
#include "reliefe/parallel.hpp"
#include "reliefe/rank_mcc.hpp"
#include "reliefe/ranking.hpp"
#include "reliefe/sparsify.hpp"

namespace reliefe::cli {

using json = nlohmann::ordered_json;

json to_json(const EmbeddingConfig& c) {
    return {
        {"dim", c.dim ? json(*c.dim) : json("auto")},
        {"k_neighbors", c.k_neighbors},
        {"n_epochs", c.n_epochs},
        {"a", c.a},
        {"b", c.b},
        {"eta", c.eta},
        {"learning_rate", c.learning_rate},
        {"negative_samples", c.negative_samples},
        {"sample_cap", c.sample_cap},
        {"metric", to_string(c.metric)},
        {"seed", c.seed},
        {"init_range", c.init_range},
        {"parallel_layout", c.parallel_layout},
        {"threads", c.threads},
        {"dim_trim_fraction", c.dim_options.trim_fraction},
        {"dim_multiplier", c.dim_options.dim_multiplier},
    };
}

json to_json(const RankingConfig& c) {
    return {
        {"iterations", c.iterations ? json(*c.iterations) : json("n_instances")},
        {"k_neighbors", c.k_neighbors},
        {"adaptive_threshold", c.adaptive_threshold},
        {"abs_mean_update", c.abs_mean_update},
        {"use_embedding", c.use_embedding},
        {"metric", to_string(c.metric)},
        {"mlc_distance", to_string(c.mlc_distance)},
        {"update_form", c.update_form == MlcUpdateForm::pseudocode ? "pseudocode" : "text"},
        {"embedding", to_json(c.embedding)},
        {"sparsify",
         {{"enabled", c.sparsify_enabled},
          {"epsilon", c.sparsify.epsilon ? json(*c.sparsify.epsilon) : json("auto")},
          {"density_threshold", c.sparsify.density_threshold},
          {"seed", c.sparsify.seed}}},
        {"seed", c.seed},
        {"serial", c.serial},
        {"threads", c.threads},
    };
}

json ranking_json(const FeatureWeights& weights) {
    json out = json::array();
    const auto order = weights.ranking();
    for (std::size_t r = 0; r < order.size(); ++r)
        out.push_back({{"feature", order[r]}, {"weight", weights.weights[order[r]]}, {"rank", r + 1}});
    return out;
}

FeatureWeights weights_from_json(const json& doc) {
    if (!doc.is_array()) throw Error(ErrorKind::ParseError, "ranking JSON must be an array");
    FeatureWeights w;
    w.weights.assign(doc.size(), 0.0);
    std::vector<bool> seen(doc.size(), false);
    for (const auto& item : doc) {
        const auto j = item.at("feature").get<std::size_t>();
        if (j >= doc.size() || seen[j]) throw Error(ErrorKind::ParseError, "ranking JSON features must be 0..n-1");
        seen[j] = true;
        w.weights[j] = item.at("weight").get<double>();
    }
    return w;
}

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct DataArgs {
    std::string path;
    std::string format = "svmlight";
    std::string labels;
    std::string task = "mcc";
    bool header = false;
    long label_col = -1;
    std::size_t n_features = 0;
    std::size_t n_labels = 0;

    void add(CLI::App* app, bool with_task = true) {
        app->add_option("--data", path, "Feature file")->required()->check(CLI::ExistingFile);
        app->add_option("--format", format, "svmlight or csv")->check(CLI::IsMember({"svmlight", "libsvm", "csv"}));
        app->add_option("--labels", labels, "Multi-label file: comma-separated 0-based label ids per line");
        if (with_task) app->add_option("--task", task, "mcc or mlc")->check(CLI::IsMember({"mcc", "mlc"}));
        app->add_flag("--header", header, "CSV has a header row");
        app->add_option("--label-col", label_col, "CSV label column (negative counts from the end)");
        app->add_option("--n-features", n_features, "Declared feature count (svmlight)");
        app->add_option("--n-labels", n_labels, "Declared label count");
    }

    LoadOptions options() const {
        LoadOptions o;
        o.path = path;
        o.format = parse_format(format);
        o.task = task == "mlc" ? Task::mlc : Task::mcc;
        if (!labels.empty()) o.target_path = labels;
        o.csv = CsvOptions{header, label_col};
        if (n_features) o.n_features = n_features;
        if (n_labels) o.n_labels = n_labels;
        return o;
    }
};

struct EmbedArgs {
    std::string dim = "auto";
    std::size_t k = 15;
    std::size_t epochs = 200;
    double a = 1.0, b = 1.0, eta = 1e-3, learning_rate = 1.0;
    std::size_t negative_samples = 5;
    std::size_t sample_cap = 2048;
    double dim_multiplier = 1.0;
    double dim_trim = 0.1;
    bool hogwild = false;

    void add(CLI::App* app, bool with_k = true) {
        app->add_option("--dim", dim, "Embedding dimension or 'auto'");
        if (with_k) app->add_option("--embed-k", k, "Neighbors in the embedding graph");
        app->add_option("--epochs", epochs, "Layout epochs");
        app->add_option("--a", a, "Attractive kernel parameter a");
        app->add_option("--b", b, "Kernel exponent b");
        app->add_option("--eta", eta, "Repulsion stabilizer");
        app->add_option("--learning-rate", learning_rate, "Initial layout step size");
        app->add_option("--negative-samples", negative_samples, "Negative samples per edge");
        app->add_option("--sample-cap", sample_cap, "Maximum rows the layout trains on");
        app->add_option("--dim-multiplier", dim_multiplier, "Scale applied to the estimated dimension");
        app->add_option("--dim-trim", dim_trim, "Fraction of largest ratios left out of the dimension fit");
        app->add_flag("--hogwild", hogwild, "Parallel lock-free layout (not bit-reproducible)");
    }

    EmbeddingConfig config(std::uint64_t seed, DistanceMetric metric, std::size_t threads) const {
        EmbeddingConfig c;
        if (dim != "auto") {
            try {
                c.dim = std::stoul(dim);
            } catch (const std::exception&) {
                throw Error(ErrorKind::InvalidConfig, "--dim must be a positive integer or 'auto'");
            }
        }
        c.k_neighbors = k;
        c.n_epochs = epochs;
        c.a = a;
        c.b = b;
        c.eta = eta;
        c.learning_rate = learning_rate;
        c.negative_samples = negative_samples;
        c.sample_cap = sample_cap;
        c.metric = metric;
        c.seed = seed;
        c.parallel_layout = hogwild;
        c.threads = threads;
        c.dim_options.dim_multiplier = dim_multiplier;
        c.dim_options.trim_fraction = dim_trim;
        return c;
    }
};

struct RunArgs {
    std::uint64_t seed = 0;
    bool serial = false;
    std::string manifest;
    std::string output;

    void add(CLI::App* app) {
        app->add_option("--seed", seed, "Random seed");
        app->add_flag("--serial", serial, "Single-threaded, bitwise reproducible run");
        app->add_option("--manifest", manifest, "Run manifest path (default: <output>.manifest.json)");
        app->add_option("-o,--output", output, "Output path (default: stdout)");
    }

    std::size_t threads() const { return serial ? 1 : default_thread_count(); }
};

class Manifest {
public:
    Manifest(std::string command, const std::vector<std::string>& argv) : start_(Clock::now()) {
        doc_["schema_version"] = kManifestSchemaVersion;
        doc_["command"] = std::move(command);
        doc_["argv"] = argv;
        doc_["timings"] = json::object();
    }
    json& operator[](const char* key) { return doc_[key]; }
    void timing(const char* stage, double seconds) { doc_["timings"][stage] = seconds; }
    void dataset(const std::string& path, const Dataset& ds) {
        doc_["dataset"] = {{"path", path},
                           {"fingerprint", fingerprint(ds)},
                           {"rows", ds.n_instances()},
                           {"cols", ds.n_features()},
                           {"task", ds.task() == Task::mcc ? "mcc" : "mlc"}};
    }
    void write(const RunArgs& run, const std::string& command) {
        doc_["seed"] = run.seed;
        doc_["timings"]["total"] = since(start_);
        std::string path = run.manifest;
        if (path.empty()) path = run.output.empty() ? "reliefe-" + command + ".manifest.json" : run.output + ".manifest.json";
        std::ofstream f(path);
        if (!f) throw Error(ErrorKind::InvalidConfig, "cannot write manifest " + path);
        f << doc_.dump(2) << '\n';
    }

private:
    Clock::time_point start_;
    json doc_;
};

/// Writes to the --output file or the command's stdout.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw Error(ErrorKind::InvalidConfig, "cannot write " + path);
        }
        out_ = file_ ? file_.get() : &fallback;
    }
    std::ostream& operator*() { return *out_; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* out_;
};

Dataset load_timed(const DataArgs& data, Manifest& manifest) {
    const auto t0 = Clock::now();
    Dataset ds = load_dataset(data.options());
    manifest.timing("load", since(t0));
    manifest.dataset(data.path, ds);
    return ds;
}

}  // namespace

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Embedding-based Relief feature ranking", "reliefe"};
    app.require_subcommand(1);

    // rank
    auto* rank_cmd = app.add_subcommand("rank", "Rank features (multi-class or multi-label)");
    DataArgs rank_data;
    EmbedArgs rank_embed;
    RunArgs rank_run;
    RankingConfig rank_cfg;
    std::size_t rank_iterations = 0;
    std::string rank_metric = "euclidean", rank_tau = "hamming", rank_form = "pseudocode", rank_csv;
    double rank_epsilon = 0.0, rank_threshold = 0.15;
    bool rank_no_sparsify = false, rank_no_embed = false;
    rank_data.add(rank_cmd);
    rank_embed.add(rank_cmd);
    rank_run.add(rank_cmd);
    rank_cmd->add_option("--k", rank_cfg.k_neighbors, "Neighbors per class (fixed mode)");
    rank_cmd->add_option("--iterations", rank_iterations, "Sampled instances s (default: all)");
    rank_cmd->add_flag("--embed", rank_cfg.use_embedding, "Search neighbors in a manifold embedding");
    rank_cmd->add_flag("--no-embed", rank_no_embed, "Search neighbors in the feature space");
    rank_cmd->add_flag("--adaptive", rank_cfg.adaptive_threshold, "Choose k at the largest distance gap");
    rank_cmd->add_flag("--abs-mean", rank_cfg.abs_mean_update, "Compare instances with the neighbor mean");
    rank_cmd->add_option("--metric", rank_metric, "euclidean or cosine")->check(CLI::IsMember({"euclidean", "cosine"}));
    rank_cmd->add_option("--mlc-distance", rank_tau, "f1, accuracy, subset, hamming, cosine, hyperbolic")
        ->check(CLI::IsMember({"f1", "accuracy", "subset", "hamming", "cosine", "hyperbolic"}));
    rank_cmd->add_option("--update-form", rank_form, "pseudocode or text")
        ->check(CLI::IsMember({"pseudocode", "text"}));
    rank_cmd->add_flag("--no-sparsify", rank_no_sparsify, "Never sparsify the input");
    rank_cmd->add_option("--epsilon", rank_epsilon, "Sparsification epsilon (default: estimated)");
    rank_cmd->add_option("--density-threshold", rank_threshold, "Sparsify inputs denser than this");
    rank_cmd->add_option("--csv", rank_csv, "Also write feature,weight,rank CSV here");

    // dim
    auto* dim_cmd = app.add_subcommand("dim", "Estimate the latent dimension");
    DataArgs dim_data;
    RunArgs dim_run;
    std::size_t dim_cap = 2048;
    double dim_trim = 0.1, dim_mult = 1.0;
    std::string dim_points;
    dim_data.add(dim_cmd);
    dim_run.add(dim_cmd);
    dim_cmd->add_option("--sample-cap", dim_cap, "Rows used for the estimate");
    dim_cmd->add_option("--trim", dim_trim, "Fraction of largest ratios left out of the fit");
    dim_cmd->add_option("--multiplier", dim_mult, "Scale applied to the fitted slope");
    dim_cmd->add_option("--points", dim_points, "Write log(mu),-log(1-EMP) CSV here");

    // embed
    auto* embed_cmd = app.add_subcommand("embed", "Write manifold coordinates as CSV");
    DataArgs embed_data;
    EmbedArgs embed_args;
    RunArgs embed_run;
    std::string embed_metric = "euclidean";
    embed_data.add(embed_cmd);
    embed_args.add(embed_cmd);
    embed_run.add(embed_cmd);
    embed_cmd->add_option("--metric", embed_metric, "euclidean or cosine")->check(CLI::IsMember({"euclidean", "cosine"}));
    embed_cmd->add_option("--k", embed_args.k, "Neighbors in the embedding graph");

    // sparsify
    auto* sp_cmd = app.add_subcommand("sparsify", "Probabilistic sparsification of an svmlight file");
    DataArgs sp_data;
    RunArgs sp_run;
    double sp_epsilon = 0.0, sp_threshold = 0.15;
    sp_data.add(sp_cmd, false);
    sp_run.add(sp_cmd);
    sp_cmd->add_option("--epsilon", sp_epsilon, "Approximation level (default: estimated)");
    sp_cmd->add_option("--threshold", sp_threshold, "Sparsify only when denser than this");

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "rF1 curve and AUrF1 of a ranking");
    DataArgs eval_data;
    RunArgs eval_run;
    std::string eval_ranking, eval_grid, eval_out_format = "csv";
    std::size_t eval_folds = 3, eval_points = 0;
    eval_data.add(eval_cmd);
    eval_run.add(eval_cmd);
    eval_cmd->add_option("--ranking", eval_ranking, "Ranking JSON from `rank`")->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--grid", eval_grid, "Comma-separated feature counts");
    eval_cmd->add_option("--grid-points", eval_points, "Uniform grid of this many counts over [1, |F|]");
    eval_cmd->add_option("--folds", eval_folds, "Cross-validation folds");
    eval_cmd->add_option("--out-format", eval_out_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    // ablate-sparsity
    auto* abs_cmd = app.add_subcommand("ablate-sparsity", "Output density over a log grid of epsilon");
    DataArgs abs_data;
    RunArgs abs_run;
    double abs_min = 0.0, abs_max = 0.0;
    std::size_t abs_steps = 20;
    abs_data.add(abs_cmd, false);
    abs_run.add(abs_cmd);
    abs_cmd->add_option("--eps-min", abs_min, "Smallest epsilon (default: estimate / 100)");
    abs_cmd->add_option("--eps-max", abs_max, "Largest epsilon (default: estimate * 100)");
    abs_cmd->add_option("--steps", abs_steps, "Grid size")->check(CLI::PositiveNumber);

    // ablate-adaptive-k
    auto* akk_cmd = app.add_subcommand("ablate-adaptive-k", "Record adaptive neighborhood sizes");
    DataArgs akk_data;
    EmbedArgs akk_embed;
    RunArgs akk_run;
    std::size_t akk_iterations = 100;
    bool akk_use_embed = false;
    akk_data.add(akk_cmd, false);
    akk_embed.add(akk_cmd);
    akk_run.add(akk_cmd);
    akk_cmd->add_option("--iterations", akk_iterations, "Sampled instances");
    akk_cmd->add_flag("--embed", akk_use_embed, "Search neighbors in a manifold embedding");

    std::vector<const char*> cargv;
    for (const auto& a : argv) cargv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(cargv.size()), cargv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (rank_cmd->parsed()) {
            Manifest manifest("rank", argv);
            const Dataset ds = load_timed(rank_data, manifest);
            if (rank_no_embed) rank_cfg.use_embedding = false;
            if (rank_iterations) rank_cfg.iterations = rank_iterations;
            rank_cfg.metric = parse_metric(rank_metric);
            rank_cfg.mlc_distance = parse_mlc_distance(rank_tau);
            rank_cfg.update_form = rank_form == "text" ? MlcUpdateForm::text : MlcUpdateForm::pseudocode;
            rank_cfg.sparsify_enabled = !rank_no_sparsify;
            if (rank_epsilon > 0.0) rank_cfg.sparsify.epsilon = rank_epsilon;
            rank_cfg.sparsify.density_threshold = rank_threshold;
            rank_cfg.sparsify.seed = rank_run.seed;
            rank_cfg.seed = rank_run.seed;
            rank_cfg.serial = rank_run.serial;
            rank_cfg.threads = rank_run.threads();
            rank_cfg.embedding = rank_embed.config(rank_run.seed, rank_cfg.metric, rank_cfg.threads);
            const RankResult res = rank(ds, rank_cfg);

            Sink sink(rank_run.output, out);
            *sink << ranking_json(res.weights).dump(2) << '\n';
            if (!rank_csv.empty()) {
                std::ofstream csv(rank_csv);
                csv << "feature,weight,rank\n";
                const auto order = res.weights.ranking();
                for (std::size_t r = 0; r < order.size(); ++r)
                    csv << order[r] << ',' << json(res.weights.weights[order[r]]).dump() << ',' << r + 1 << '\n';
            }
            manifest["config"] = to_json(rank_cfg);
            manifest.timing("sparsify", res.timings.sparsify);
            manifest.timing("dim", res.timings.dim);
            manifest.timing("embed", res.timings.embed);
            manifest.timing("rank", res.timings.rank);
            manifest["result"] = {{"sparsified", res.sparsified},
                                  {"epsilon", res.epsilon ? json(*res.epsilon) : json(nullptr)},
                                  {"embedding_dim", res.embedding_dim},
                                  {"target_embedding_dim", res.target_embedding_dim},
                                  {"skipped_updates", res.skipped_updates}};
            manifest.write(rank_run, "rank");
            return 0;
        }

        if (dim_cmd->parsed()) {
            Manifest manifest("dim", argv);
            const Dataset ds = load_timed(dim_data, manifest);
            const auto t0 = Clock::now();
            const auto rows = representative_sample(ds.targets, std::min(dim_cap, ds.n_instances()));
            DimOptions opts;
            opts.trim_fraction = dim_trim;
            opts.dim_multiplier = dim_mult;
            opts.threads = dim_run.threads();
            const DimEstimate est = estimate_dimension(ds.features, rows, opts);
            manifest.timing("dim", since(t0));
            Sink sink(dim_run.output, out);
            *sink << "d=" << est.d << " slope=" << json(est.slope).dump() << " samples=" << est.mu.size()
                  << " skipped=" << est.skipped << (est.clamped ? " clamped" : "") << '\n';
            if (est.clamped) err << "warning: estimated dimension rounded below 1; clamped to 1\n";
            if (!dim_points.empty()) {
                std::ofstream pts(dim_points);
                pts << "log_mu,neg_log_tail,fitted\n";
                std::vector<bool> fitted(est.mu.size(), false);
                for (std::size_t p : est.fitted) fitted[p] = true;
                for (std::size_t p = 0; p < est.mu.size(); ++p) {
                    const double tail = 1.0 - est.empirical_cdf[p];
                    pts << json(std::log(est.mu[p])).dump() << ',' << json(-std::log(tail)).dump() << ','
                        << (fitted[p] ? 1 : 0) << '\n';
                }
            }
            manifest["config"] = {{"sample_cap", dim_cap}, {"trim_fraction", dim_trim}, {"dim_multiplier", dim_mult}};
            manifest["result"] = {{"d", est.d}, {"slope", est.slope}, {"samples", est.mu.size()}};
            manifest.write(dim_run, "dim");
            return 0;
        }

        if (embed_cmd->parsed()) {
            Manifest manifest("embed", argv);
            const Dataset ds = load_timed(embed_data, manifest);
            const EmbeddingConfig cfg =
                embed_args.config(embed_run.seed, parse_metric(embed_metric), embed_run.threads());
            const auto t0 = Clock::now();
            const Embedding emb = manifold_projection(ds.features, ds.targets, cfg);
            manifest.timing("dim", emb.dim_seconds);
            manifest.timing("embed", since(t0) - emb.dim_seconds);
            Sink sink(embed_run.output, out);
            write_csv(*sink, SparseMatrix::from_dense(emb.coordinates), {}, true);
            manifest["config"] = to_json(cfg);
            manifest["result"] = {{"dim", emb.dim()},
                                  {"trained_rows", emb.trained_indices.size()},
                                  {"degenerate_nodes", emb.degenerate_nodes},
                                  {"dim_fallback", emb.dim_fallback}};
            manifest.write(embed_run, "embed");
            return 0;
        }

        if (sp_cmd->parsed()) {
            Manifest manifest("sparsify", argv);
            DataArgs data = sp_data;
            data.task = "mcc";
            const Dataset ds = load_timed(data, manifest);
            SparsifyParams params;
            if (sp_epsilon > 0.0) params.epsilon = sp_epsilon;
            params.density_threshold = sp_threshold;
            params.seed = sp_run.seed;
            const auto t0 = Clock::now();
            const bool apply = needs_sparsify(ds.features, params);
            if (apply && !params.epsilon) params.epsilon = estimate_epsilon(ds.features);
            const SparseMatrix result = apply ? prms(ds.features, params) : ds.features;
            manifest.timing("sparsify", since(t0));
            std::vector<double> labels(ds.classes().begin(), ds.classes().end());
            Sink sink(sp_run.output, out);
            write_svmlight(*sink, result, labels);
            err << "density " << density(ds.features) << " -> " << density(result)
                << (apply ? "" : " (below threshold, unchanged)") << '\n';
            manifest["config"] = {{"epsilon", params.epsilon ? json(*params.epsilon) : json("auto")},
                                  {"density_threshold", sp_threshold}};
            manifest["result"] = {{"applied", apply},
                                  {"input_density", density(ds.features)},
                                  {"output_density", density(result)}};
            manifest.write(sp_run, "sparsify");
            return 0;
        }

        if (eval_cmd->parsed()) {
            Manifest manifest("eval", argv);
            const Dataset ds = load_timed(eval_data, manifest);
            std::ifstream rin(eval_ranking);
            const FeatureWeights weights = weights_from_json(json::parse(rin));
            std::vector<std::size_t> grid;
            if (!eval_grid.empty()) {
                std::stringstream ss(eval_grid);
                for (std::string tok; std::getline(ss, tok, ',');) grid.push_back(std::stoul(tok));
            } else {
                const std::size_t f = ds.n_features();
                const std::size_t m = eval_points ? std::min(eval_points, f) : std::min<std::size_t>(f, 11);
                for (std::size_t p = 0; p < m; ++p) {
                    const std::size_t v =
                        m == 1 ? f : 1 + static_cast<std::size_t>(std::llround(double(p) * double(f - 1) / double(m - 1)));
                    if (grid.empty() || v > grid.back()) grid.push_back(v);
                }
            }
            const auto t0 = Clock::now();
            const PerformanceCurve curve = rf1_curve(ds.features, ds.targets, weights, grid, eval_folds, eval_run.seed);
            json area = nullptr;
            if (curve.points.size() >= 3) area = aurf1(curve);
            manifest.timing("eval", since(t0));
            Sink sink(eval_run.output, out);
            if (eval_out_format == "json") {
                json pts = json::array();
                for (const auto& p : curve.points) pts.push_back({{"f", p.f}, {"f1", p.f1}, {"rf1", p.rf1}});
                *sink << json{{"baseline_f1", curve.baseline_f1}, {"points", pts},
                              {"aurf1", area}}
                             .dump(2)
                      << '\n';
            } else {
                *sink << "f,f1,rf1\n";
                for (const auto& p : curve.points)
                    *sink << p.f << ',' << json(p.f1).dump() << ',' << json(p.rf1).dump() << '\n';
                err << "AUrF1 " << (area.is_null() ? std::string("n/a (fewer than 3 grid points)") : area.dump()) << '\n';
            }
            manifest["config"] = {{"grid", grid}, {"folds", eval_folds}, {"ranking", eval_ranking}};
            manifest["result"] = {{"baseline_f1", curve.baseline_f1}, {"aurf1", area}};
            manifest.write(eval_run, "eval");
            return 0;
        }

        if (abs_cmd->parsed()) {
            Manifest manifest("ablate-sparsity", argv);
            DataArgs data = abs_data;
            data.task = "mcc";
            const Dataset ds = load_timed(data, manifest);
            const double est = estimate_epsilon(ds.features);
            const double lo = abs_min > 0.0 ? abs_min : est / 100.0;
            const double hi = abs_max > 0.0 ? abs_max : est * 100.0;
            if (!(hi >= lo)) throw Error(ErrorKind::InvalidConfig, "--eps-max must not be below --eps-min");
            const auto t0 = Clock::now();
            Sink sink(abs_run.output, out);
            *sink << "epsilon,output_density\n";
            for (std::size_t p = 0; p < abs_steps; ++p) {
                const double frac = abs_steps == 1 ? 0.0 : double(p) / double(abs_steps - 1);
                const double eps = lo * std::pow(hi / lo, frac);
                SparsifyParams params{eps, 0.0, abs_run.seed};
                *sink << json(eps).dump() << ',' << json(density(prms(ds.features, params))).dump() << '\n';
            }
            manifest.timing("sparsify", since(t0));
            manifest["config"] = {{"eps_min", lo}, {"eps_max", hi}, {"steps", abs_steps}, {"estimated_epsilon", est}};
            manifest["result"] = {{"input_density", density(ds.features)}};
            manifest.write(abs_run, "ablate-sparsity");
            return 0;
        }

        if (akk_cmd->parsed()) {
            Manifest manifest("ablate-adaptive-k", argv);
            DataArgs data = akk_data;
            data.task = "mcc";
            const Dataset ds = load_timed(data, manifest);
            RankingConfig cfg;
            cfg.iterations = akk_iterations;
            cfg.adaptive_threshold = true;
            cfg.use_embedding = akk_use_embed;
            cfg.record_k = true;
            cfg.seed = akk_run.seed;
            cfg.sparsify.seed = akk_run.seed;
            cfg.serial = akk_run.serial;
            cfg.threads = akk_run.threads();
            cfg.embedding = akk_embed.config(akk_run.seed, cfg.metric, cfg.threads);
            const RankResult res = rank_mcc(ds, cfg);
            const std::size_t n_classes = res.selected_k.size() / akk_iterations;
            Sink sink(akk_run.output, out);
            *sink << "iteration,instance,class,k\n";
            for (std::size_t it = 0; it < akk_iterations; ++it) {
                const std::size_t inst = sampled_instance(cfg.seed, it, ds.n_instances());
                for (std::size_t c = 0; c < n_classes; ++c)
                    *sink << it << ',' << inst << ',' << c << ',' << res.selected_k[it * n_classes + c] << '\n';
            }
            manifest["config"] = to_json(cfg);
            manifest.timing("sparsify", res.timings.sparsify);
            manifest.timing("dim", res.timings.dim);
            manifest.timing("embed", res.timings.embed);
            manifest.timing("rank", res.timings.rank);
            manifest.write(akk_run, "ablate-adaptive-k");
            return 0;
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

}  // namespace reliefe::cli
