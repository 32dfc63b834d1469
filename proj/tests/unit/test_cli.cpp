#include <doctest.h>

#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "curvad/cloud_io.hpp"
#include "curvad/synth.hpp"
#include "oracles.hpp"

using namespace curvad;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "curvad");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = curvad::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

}  // namespace

TEST_CASE("cli curvature") {
    const auto dir = oracle::scratch_dir("cli_curvature");
    save_cloud(oracle::grid_plane(20, 0.1), dir / "plane.xyz", CloudFormat::XyzAscii);
    auto r = invoke({"curvature", "--input", (dir / "plane.xyz").string(), "--k", "16", "--mode", "variation",
                  "--out-dir", (dir / "o1").string()});
    REQUIRE(r.code == 0);
    const auto rows = read_csv(dir / "o1" / "curvature.csv");
    CHECK(rows[0] == std::vector<std::string>{"index", "value"});
    CHECK(rows.size() == 401);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::stod(rows[i][1]) < 1e-9);
    CHECK(fs::exists(dir / "o1" / "run.cfg"));
    CHECK(slurp(dir / "o1" / "run.cfg").find("k=16") != std::string::npos);

    r = invoke({"curvature", "--input", (dir / "plane.xyz").string(), "--ks", "8,16,32", "--out-dir",
             (dir / "o2").string()});
    REQUIRE(r.code == 0);
    CHECK(read_csv(dir / "o2" / "curvature.csv")[0] == std::vector<std::string>{"index", "k8", "k16", "k32"});

    r = invoke({"curvature", "--input", (dir / "nope.xyz").string(), "--out-dir", (dir / "o3").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("nope.xyz") != std::string::npos);
}

TEST_CASE("cli usage errors") {
    CHECK(invoke({}).code == 2);
    CHECK(invoke({"frobnicate"}).code == 2);
    CHECK(invoke({"curvature", "--no-such-flag", "1"}).code == 2);
    CHECK(invoke({"curvature", "--help"}).code == 0);
    const auto dir = oracle::scratch_dir("cli_usage");
    save_cloud(make_shape(ShapeKind::Sphere, 64, 0.0, 1), dir / "s.xyz", CloudFormat::XyzAscii);
    auto r = invoke({"detect", "--input", (dir / "s.xyz").string(), "--method", "classifier", "--out-dir",
                  (dir / "o").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("model") != std::string::npos);
    r = invoke({"curvature", "--input", (dir / "s.xyz").string(), "--k", "1000", "--out-dir", (dir / "o").string()});
    CHECK(r.code == 2);
}

TEST_CASE("cli config file and precedence") {
    const auto dir = oracle::scratch_dir("cli_config");
    save_cloud(make_shape(ShapeKind::Sphere, 200, 0.0, 1), dir / "s.xyz", CloudFormat::XyzAscii);
    std::ofstream(dir / "run.cfg") << "# test\ninput=" << (dir / "s.xyz").string() << "\nk=8\nout-dir="
                                   << (dir / "o").string() << "\n";
    auto r = invoke({"curvature", "--config", (dir / "run.cfg").string(), "--k", "12"});
    REQUIRE(r.code == 0);
    CHECK(slurp(dir / "o" / "run.cfg").find("k=12") != std::string::npos);
    std::ofstream(dir / "bad.cfg") << "bogus=1\nk=3\n";
    r = invoke({"curvature", "--config", (dir / "bad.cfg").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("bogus") != std::string::npos);
}

TEST_CASE("cli synth then detect") {
    const auto dir = oracle::scratch_dir("cli_synth");
    auto r = invoke({"synth", "--shape", "sphere", "--n", "2048", "--seed", "7", "--out-dir", (dir / "s").string()});
    REQUIRE(r.code == 0);
    CHECK(fs::exists(dir / "s" / "cloud.xyz"));
    CHECK(fs::exists(dir / "s" / "labels.txt"));
    CHECK(slurp(dir / "s" / "provenance.txt").find("selected=") != std::string::npos);
    CHECK(slurp(dir / "s" / "run.cfg").find("seed=7") != std::string::npos);

    const auto cloud = load_cloud(dir / "s" / "cloud.xyz", CloudFormat::XyzAscii);
    const auto labels = load_labels(dir / "s" / "labels.txt", cloud.size());
    for (int rep = 0; rep < 2; ++rep) {
        r = invoke({"detect", "--input", (dir / "s" / "cloud.xyz").string(), "--labels",
                 (dir / "s" / "labels.txt").string(), "--out-dir", (dir / ("d" + std::to_string(rep))).string()});
        REQUIRE(r.code == 0);
        CHECK(r.out.find("object_score=") != std::string::npos);
    }
    CHECK(slurp(dir / "d0" / "scores.csv") == slurp(dir / "d1" / "scores.csv"));
    CHECK(slurp(dir / "d0" / "object_score.csv") == slurp(dir / "d1" / "object_score.csv"));
    CHECK(read_csv(dir / "d0" / "object_score.csv")[0] == std::vector<std::string>{"cloud_id", "score"});

    // rim points (anomalous points with a normal neighbor) sit in the top 5%
    const auto rows = read_csv(dir / "d0" / "scores.csv");
    std::vector<double> scores;
    for (std::size_t i = 1; i < rows.size(); ++i) scores.push_back(std::stod(rows[i][1]));
    auto sorted = scores;
    std::sort(sorted.rbegin(), sorted.rend());
    const double cut = sorted[scores.size() / 20];
    const NeighborIndex idx(cloud);
    std::size_t rim = 0, rim_top = 0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (!labels[i]) continue;
        bool edge = false;
        for (auto j : idx.knn(i, 8, true)) edge |= labels[j] == 0;
        if (!edge) continue;
        ++rim;
        rim_top += scores[i] >= cut;
    }
    REQUIRE(rim > 0);
    CHECK(static_cast<double>(rim_top) >= 0.5 * static_cast<double>(rim));
}

TEST_CASE("cli detect constant scores") {
    const auto dir = oracle::scratch_dir("cli_const");
    save_cloud(oracle::grid_plane(10, 1.0), dir / "p.csv", CloudFormat::Csv);
    auto r = invoke({"detect", "--input", (dir / "p.csv").string(), "--r", "0.2", "--out-dir", (dir / "o").string()});
    REQUIRE(r.code == 0);
    const auto rows = read_csv(dir / "o" / "scores.csv");
    const double first = std::stod(rows[1][1]);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::stod(rows[i][1]) == first);
    CHECK(std::stod(read_csv(dir / "o" / "object_score.csv")[1][1]) == first);
}

TEST_CASE("cli eval") {
    const auto dir = oracle::scratch_dir("cli_eval");
    const auto ev = dir / "perfect";
    fs::create_directories(ev);
    std::ofstream(ev / "objects.csv") << "cloud_id,category,object_label\na,cup,1\nb,cup,0\n";
    std::ofstream(ev / "a.scores.csv") << "index,score\n0,0.9\n1,0.1\n";
    std::ofstream(ev / "a.labels.txt") << "1\n0\n";
    std::ofstream(ev / "b.scores.csv") << "index,score\n0,0.05\n1,0.02\n";
    std::ofstream(ev / "b.labels.txt") << "0\n0\n";
    auto r = invoke({"eval", "--dir", ev.string(), "--out-dir", (dir / "o").string()});
    REQUIRE(r.code == 0);
    const auto rows = read_csv(dir / "o" / "metrics.csv");
    CHECK(slurp(dir / "o" / "metrics.csv").find("cup,2,1,1") != std::string::npos);
    CHECK(fs::exists(dir / "o" / "metrics.txt"));

    std::ofstream(ev / "stray.scores.csv") << "index,score\n0,1\n";
    r = invoke({"eval", "--dir", ev.string(), "--out-dir", (dir / "o2").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("stray.scores.csv") != std::string::npos);
    fs::remove(ev / "stray.scores.csv");

    std::ofstream(ev / "objects.csv") << "cloud_id,category,object_label\na,cup,1\nb,cup,1\n";
    r = invoke({"eval", "--dir", ev.string(), "--out-dir", (dir / "o3").string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("undefined") != std::string::npos);
}

TEST_CASE("cli eval benchmark end to end") {
    const auto dir = oracle::scratch_dir("cli_bench");
    auto r = invoke({"eval", "--benchmark", "25", "--out-dir", dir.string()});
    REQUIRE(r.code == 0);
    CHECK(fs::exists(dir / "benchmark" / "objects.csv"));
    CHECK(r.out.find("sphere") != std::string::npos);
    const auto first = slurp(dir / "metrics.csv");
    r = invoke({"eval", "--benchmark", "25", "--out-dir", dir.string()});
    CHECK(slurp(dir / "metrics.csv") == first);
}

TEST_CASE("cli recon and classifier detect") {
    const auto dir = oracle::scratch_dir("cli_recon");
    auto r = invoke({"recon", "--variant", "D", "--epochs", "10", "--n", "256", "--clouds", "2", "--hidden", "8",
                  "--finetune-epochs", "5", "--num-patches", "16", "--out-dir", dir.string()});
    REQUIRE(r.code == 0);
    CHECK(fs::exists(dir / "model.bin"));
    const auto curve = read_csv(dir / "loss_curve.csv");
    CHECK(curve[0] == std::vector<std::string>{"phase", "epoch", "loss"});
    CHECK(curve.size() == 1 + 10 + 5);
    save_cloud(make_shape(ShapeKind::Sphere, 300, 0.0, 4), dir / "q.ply", CloudFormat::Ply);
    r = invoke({"detect", "--input", (dir / "q.ply").string(), "--method", "classifier", "--model",
             (dir / "model.bin").string(), "--out-dir", (dir / "det").string()});
    CHECK(r.code == 0);
    CHECK(read_csv(dir / "det" / "scores.csv").size() == 301);
}

TEST_CASE("cli ablate") {
    const auto dir = oracle::scratch_dir("cli_ablate");
    auto r = invoke({"ablate", "--variants", "A,D", "--seeds", "1", "--epochs", "3", "--n", "256", "--hidden", "8",
                  "--train-clouds", "1", "--eval-clouds", "2", "--finetune-epochs", "3", "--num-patches", "16",
                  "--mask-sweep", "0.2,1.0", "--ks", "8,16", "--out-dir", dir.string()});
    REQUIRE(r.code == 0);
    CHECK(fs::exists(dir / "ablation.csv"));
    CHECK(fs::exists(dir / "mask_sweep.csv"));
    CHECK(slurp(dir / "ablation.txt").find("D") != std::string::npos);
}
