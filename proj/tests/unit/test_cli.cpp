#include <doctest.h>

#include <filesystem>
#include <map>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "reliefe/io.hpp"
#include "support/synthetic.hpp"

using namespace reliefe;
using namespace reliefe::testing;
namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct Workspace {
    fs::path dir;
    std::string mcc, mlc, labels;

    Workspace() : dir(fs::temp_directory_path() / "reliefe_unit_cli") {
        fs::remove_all(dir);
        fs::create_directories(dir);
        const Dataset a = mcc_informative(80, 2, 6, 2.0, 110);
        std::ofstream f(dir / "mcc.svm");
        write_svmlight(f, a.features, std::vector<double>(a.classes().begin(), a.classes().end()));
        const Dataset b = mlc_threshold(80, 6, 2, 111);
        std::ofstream g(dir / "mlc.csv");
        write_csv(g, b.features);
        std::ofstream h(dir / "mlc.labels");
        write_label_lists(h, b.labels());
        mcc = (dir / "mcc.svm").string();
        mlc = (dir / "mlc.csv").string();
        labels = (dir / "mlc.labels").string();
    }
    ~Workspace() { fs::remove_all(dir); }
    std::string path(const std::string& name) const { return (dir / name).string(); }
};

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "reliefe");
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::string& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("rank writes a ranking and a manifest") {
    Workspace ws;
    const Run r = run({"rank", "--data", ws.mcc, "--embed", "--adaptive", "--abs-mean", "--epochs", "20", "--seed", "2",
                       "--serial", "-o", ws.path("rank.json"), "--csv", ws.path("rank.csv")});
    REQUIRE(r.code == 0);
    const json ranking = json::parse(slurp(ws.path("rank.json")));
    REQUIRE(ranking.size() == 8);
    CHECK(ranking[0].begin().key() == "feature");
    CHECK(ranking[0]["rank"] == 1);
    CHECK(ranking[0]["weight"].get<double>() >= ranking[7]["weight"].get<double>());
    CHECK(slurp(ws.path("rank.csv")).rfind("feature,weight,rank\n", 0) == 0);

    const json manifest = json::parse(slurp(ws.path("rank.json.manifest.json")));
    CHECK(manifest["schema_version"] == cli::kManifestSchemaVersion);
    CHECK(manifest["command"] == "rank");
    CHECK(manifest["seed"] == 2);
    CHECK(manifest["dataset"]["rows"] == 80);
    CHECK(manifest["dataset"]["task"] == "mcc");
    CHECK(manifest["config"]["use_embedding"] == true);
    for (const char* stage : {"load", "sparsify", "dim", "embed", "rank", "total"})
        CHECK(manifest["timings"].contains(stage));

    const FeatureWeights w = cli::weights_from_json(ranking);
    CHECK(cli::ranking_json(w) == ranking);
}

TEST_CASE("classic mode and multi-label ranking") {
    Workspace ws;
    CHECK(run({"rank", "--data", ws.mcc, "--no-embed", "--k", "15", "--serial", "-o", ws.path("a.json")}).code == 0);
    const Run m = run({"rank", "--data", ws.mlc, "--format", "csv", "--task", "mlc", "--labels", ws.labels,
                       "--mlc-distance", "f1", "--serial", "-o", ws.path("m.json")});
    CHECK(m.code == 0);
    CHECK(json::parse(slurp(ws.path("m.json"))).size() == 6);
}

TEST_CASE("usage errors exit with 1") {
    const Run missing = run({"rank"});
    CHECK(missing.code == 1);
    CHECK(missing.err.find("--data") != std::string::npos);
    CHECK(run({"rank", "--data", "/nonexistent/file.svm"}).code == 1);
    CHECK(run({}).code == 1);
    CHECK(run({"frobnicate"}).code == 1);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("pipeline errors exit with 1 and a diagnostic") {
    Workspace ws;
    const Run r = run({"rank", "--data", ws.mcc, "--dim", "abc", "--embed", "-o", ws.path("x.json")});
    CHECK(r.code == 1);
    CHECK(r.err.find("InvalidConfig") != std::string::npos);
}

TEST_CASE("dim, embed and sparsify") {
    Workspace ws;
    const Run d = run({"dim", "--data", ws.mcc, "--points", ws.path("pts.csv"), "-o", ws.path("dim.txt")});
    REQUIRE(d.code == 0);
    CHECK(slurp(ws.path("dim.txt")).rfind("d=", 0) == 0);
    CHECK(slurp(ws.path("pts.csv")).rfind("log_mu,neg_log_tail,fitted\n", 0) == 0);

    REQUIRE(run({"embed", "--data", ws.mcc, "--dim", "2", "--epochs", "20", "-o", ws.path("e.csv")}).code == 0);
    std::ifstream e(ws.path("e.csv"));
    const LabeledMatrix coords = read_csv(e, CsvOptions{true, std::nullopt});
    CHECK(coords.features.n_rows() == 80);
    CHECK(coords.features.n_cols() == 2);

    REQUIRE(run({"sparsify", "--data", ws.mcc, "--threshold", "0", "-o", ws.path("s.svm")}).code == 0);
    std::ifstream s(ws.path("s.svm"));
    const LabeledMatrix sp = read_svmlight(s, 8);
    CHECK(sp.features.n_rows() == 80);
    const json man = json::parse(slurp(ws.path("s.svm.manifest.json")));
    CHECK(man["result"]["applied"] == true);
    CHECK(man["result"]["output_density"].get<double>() <= man["result"]["input_density"].get<double>());
}

TEST_CASE("eval produces a curve and AUrF1") {
    Workspace ws;
    REQUIRE(run({"rank", "--data", ws.mcc, "-o", ws.path("r.json")}).code == 0);
    const Run c = run({"eval", "--data", ws.mcc, "--ranking", ws.path("r.json"), "--grid", "1,2,4,8", "-o",
                       ws.path("curve.csv")});
    REQUIRE(c.code == 0);
    CHECK(c.err.find("AUrF1") != std::string::npos);
    const std::string curve = slurp(ws.path("curve.csv"));
    CHECK(curve.rfind("f,f1,rf1\n", 0) == 0);
    CHECK(curve.find("\n8,") != std::string::npos);

    REQUIRE(run({"eval", "--data", ws.mcc, "--ranking", ws.path("r.json"), "--grid-points", "5", "--out-format", "json",
                 "-o", ws.path("curve.json")})
                .code == 0);
    const json j = json::parse(slurp(ws.path("curve.json")));
    CHECK(j["points"].size() == 5);
    CHECK(j["points"].back()["rf1"] == 1.0);
    CHECK(j["aurf1"].is_number());
}

TEST_CASE("ablations") {
    Workspace ws;
    REQUIRE(run({"ablate-sparsity", "--data", ws.mcc, "--steps", "4", "-o", ws.path("eps.csv")}).code == 0);
    std::istringstream eps(slurp(ws.path("eps.csv")));
    std::string line;
    std::getline(eps, line);
    CHECK(line == "epsilon,output_density");
    std::vector<double> dens;
    while (std::getline(eps, line)) dens.push_back(std::stod(line.substr(line.find(',') + 1)));
    REQUIRE(dens.size() == 4);
    CHECK(dens.front() == 1.0);
    CHECK(dens.back() <= dens.front());

    REQUIRE(run({"ablate-sparsity", "--data", ws.mcc, "--steps", "1", "-o", ws.path("one.csv")}).code == 0);
    const std::string one = slurp(ws.path("one.csv"));
    CHECK(std::count(one.begin(), one.end(), '\n') == 2);

    REQUIRE(run({"ablate-adaptive-k", "--data", ws.mcc, "--iterations", "10", "-o", ws.path("k.csv")}).code == 0);
    const std::string k = slurp(ws.path("k.csv"));
    CHECK(std::count(k.begin(), k.end(), '\n') == 1 + 10 * 2);
}

TEST_CASE("k = 1 is the most frequent choice on uniformly spread data") {
    Workspace ws;
    std::map<std::string, std::size_t> counts;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const SparseMatrix x = hypercube(60, 8, seed);
        std::vector<double> y(60);
        for (std::size_t i = 0; i < 60; ++i) y[i] = static_cast<double>(i % 2);
        {
            std::ofstream f(ws.path("cube.svm"));
            write_svmlight(f, x, y);
        }
        REQUIRE(run({"ablate-adaptive-k", "--data", ws.path("cube.svm"), "--iterations", "40", "--seed", std::to_string(seed), "-o",
                     ws.path("k.csv")})
                    .code == 0);
        std::istringstream in(slurp(ws.path("k.csv")));
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) counts[line.substr(line.rfind(',') + 1)]++;
    }
    std::string mode;
    std::size_t best = 0;
    for (const auto& [k, c] : counts)
        if (c > best) {
            best = c;
            mode = k;
        }
    CHECK(mode == "1");
}
