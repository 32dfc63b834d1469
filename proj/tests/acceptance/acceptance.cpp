// One PASS/FAIL line per acceptance criterion. Exit status is non-zero when
// any criterion fails, except those named with --expect-fail (they still run
// and still print FAIL). Bare numbers select a subset.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "curvad/benchmark.hpp"
#include "curvad/cloud_io.hpp"
#include "curvad/curvature.hpp"
#include "curvad/metrics.hpp"
#include "curvad/neighbors.hpp"
#include "curvad/recon_toy.hpp"
#include "curvad/scoring.hpp"
#include "curvad/synth.hpp"
#include "gradcheck.hpp"
#include "oracles.hpp"

using namespace curvad;
namespace fs = std::filesystem;

namespace {

enum class Status { Pass, Fail, Skip };

struct Outcome {
    Status status;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Outcome c1_eigensolver() {
    const auto t0 = Clock::now();
    Rng rng(1);
    double worst_val = 0.0, worst_res = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const Mat3 m = oracle::random_psd(rng);
        const auto e = eig3_sym(m);
        const auto want = oracle::bisection_eigenvalues(m);
        for (int i = 0; i < 3; ++i) {
            worst_val = std::max(worst_val, std::abs(e.values[i] - want[i]) / std::abs(want[2]));
        }
        worst_res = std::max(worst_res, oracle::reconstruction_residual(m, e));
    }
    const double secs = seconds_since(t0);
    const bool ok = worst_val <= 1e-9 && worst_res <= 1e-8 && secs < 1.0;
    return {ok ? Status::Pass : Status::Fail,
            fmt("max rel eigenvalue err %.2e, max residual %.2e, %.3f s", worst_val, worst_res, secs)};
}

Outcome c2_auroc() {
    const auto t0 = Clock::now();
    Rng rng(2);
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 2 + rng.uniform_index(63);
        std::vector<double> s(n);
        std::vector<std::uint8_t> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = std::round(rng.uniform(0, 8)) / 8;  // coarse grid, many ties
            y[i] = rng.uniform() < 0.5;
        }
        y[0] = 1;
        y[n - 1] = 0;
        worst = std::max(worst, std::abs(auroc(s, y) - oracle::pairwise_auroc(s, y)));
    }
    const double secs = seconds_since(t0);
    return {worst <= 1e-12 && secs < 1.0 ? Status::Pass : Status::Fail,
            fmt("max |rank - pairwise| %.2e, %.3f s", worst, secs)};
}

Outcome c3_scoring() {
    const double pa = 0.4;
    const double phi_half = logit_score(0.5, 0.5, kDefaultLogitEps);
    const double phi_e = logit_score(std::exp(-1.0) * pa, pa, 0.0);
    const std::vector<double> s{1, 4, 2, 3};
    const double top = object_score(s, 0.5);
    const double all = object_score(s, 1.0);
    // with eps = 1e-8 the exact value is log(1 + 2e-8), i.e. zero up to the eps guard
    const bool ok = std::abs(phi_half) <= 2e-8 && std::abs(phi_half - std::log1p(2e-8)) <= 1e-9 &&
                    std::abs(phi_e - 1.0) <= 1e-9 && std::abs(top - 3.5) <= 1e-9 &&
                    std::abs(all - 2.5) <= 1e-9;
    return {ok ? Status::Pass : Status::Fail,
            fmt("phi(0.5,0.5)=%.3g, phi(e^-1 p, p)=%.12f, top-k(r=0.5)=%.12f, r=1 mean=%.12f", phi_half, phi_e,
                top, all)};
}

Outcome c4_invariance() {
    const auto t0 = Clock::now();
    double worst = 0.0;
    const ShapeKind kinds[] = {ShapeKind::Sphere, ShapeKind::Torus, ShapeKind::Cylinder, ShapeKind::Plane};
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto cloud = make_shape(kinds[seed % 4], 1000, 0.01, seed);
        Rng rng(seed + 100);
        const auto rot = eig3_sym(oracle::random_psd(rng)).vectors;
        const Vec3 shift{rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10)};
        const double scale = std::pow(10.0, rng.uniform(-3, 3));
        std::vector<Vec3> moved, scaled;
        for (const auto& p : cloud.points()) {
            moved.push_back(Vec3{dot(rot[0], p), dot(rot[1], p), dot(rot[2], p)} + shift);
            scaled.push_back(scale * p);
        }
        for (auto mode : {CurvatureMode::Variation, CurvatureMode::Literal}) {
            const auto base = curvature_field(cloud, 16, mode, kDefaultCurvatureEps).values;
            const auto a = curvature_field(PointCloud(moved), 16, mode, kDefaultCurvatureEps).values;
            const auto b = curvature_field(PointCloud(scaled), 16, mode, kDefaultCurvatureEps).values;
            for (std::size_t i = 0; i < base.size(); ++i) {
                worst = std::max({worst, std::abs(a[i] - base[i]), std::abs(b[i] - base[i])});
            }
        }
    }
    return {worst <= 1e-6 ? Status::Pass : Status::Fail,
            fmt("max |change| %.2e over 20 clouds, both modes, %.2f s", worst, seconds_since(t0))};
}

Outcome c5_detector_floor() {
    const auto t0 = Clock::now();
    const auto clouds = make_synthetic_benchmark(ShapeKind::Sphere, 50, 50, 2048, 0.0, PseudoAnomalyConfig{}, 5);
    const auto evals = score_with_curvature(clouds, 16, CurvatureMode::Variation, kDefaultCurvatureEps, 0.01);
    const auto m = evaluate_dataset(evals);
    const double secs = seconds_since(t0);
    const bool ok = m.p_auroc >= 0.80 && m.o_auroc >= 0.85 && secs < 30.0;
    return {ok ? Status::Pass : Status::Fail,
            fmt("P-AUROC %.4f (>= 0.80), O-AUROC %.4f (>= 0.85), %.2f s", m.p_auroc, m.o_auroc, secs)};
}

// Dataset layout: objects.csv (cloud_id,category,object_label) plus
// <id>.<xyz|ply|csv> and <id>.labels.txt for every row.
Outcome c6_dataset_sweep() {
    const char* dir_env = std::getenv("CURVAD_DATASET_DIR");
    const char* name_env = std::getenv("CURVAD_DATASET_NAME");
    if (!dir_env || !name_env) {
        return {Status::Skip, "needs Real3D-AD / Anomaly-ShapeNet; set CURVAD_DATASET_DIR and "
                              "CURVAD_DATASET_NAME=real3d|shapenet"};
    }
    const std::string name = name_env;
    double target_o = 0.0, target_p = 0.0;
    if (name == "real3d") target_o = 0.723, target_p = 0.729;
    else if (name == "shapenet") target_o = 0.559, target_p = 0.693;
    else return {Status::Fail, "unknown CURVAD_DATASET_NAME " + name};

    const fs::path dir = dir_env;
    std::ifstream manifest(dir / "objects.csv");
    if (!manifest) return {Status::Fail, "missing " + (dir / "objects.csv").string()};
    struct Item { std::string id, category; std::uint8_t label; PointCloud cloud; LabelSet labels; };
    std::vector<Item> items;
    std::string line;
    std::getline(manifest, line);
    while (std::getline(manifest, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string id, cat, lab;
        std::getline(ss, id, ',');
        std::getline(ss, cat, ',');
        std::getline(ss, lab);
        fs::path cloud_path;
        for (const char* ext : {".ply", ".xyz", ".csv"}) {
            if (fs::exists(dir / (id + ext))) cloud_path = dir / (id + ext);
        }
        if (cloud_path.empty()) return {Status::Fail, "no cloud file for " + id};
        auto cloud = normalize_cloud(load_cloud(cloud_path, format_from_extension(cloud_path))).first;
        auto labels = load_labels(dir / (id + ".labels.txt"), cloud.size());
        items.push_back({id, cat, static_cast<std::uint8_t>(lab == "1"), std::move(cloud), std::move(labels)});
    }
    std::string report;
    bool hit = false;
    for (auto mode : {CurvatureMode::Variation, CurvatureMode::Literal}) {
        for (std::size_t k : {8u, 16u, 32u, 64u}) {
            std::vector<CloudEvaluation> evals;
            for (const auto& it : items) {
                auto field = curvature_field(it.cloud, k, mode, kDefaultCurvatureEps);
                evals.push_back({it.id, it.category, make_score_set(curvature_score(field), kDefaultAggregationRate),
                                 it.labels, it.label});
            }
            const auto m = evaluate_dataset(evals);
            const bool in = std::abs(m.mean_o_auroc - target_o) <= 0.03 && std::abs(m.mean_p_auroc - target_p) <= 0.03;
            hit = hit || in;
            report += fmt(" [%s k=%zu O=%.3f P=%.3f%s]", std::string(to_string(mode)).c_str(), k, m.mean_o_auroc,
                          m.mean_p_auroc, in ? " *" : "");
        }
    }
    return {hit ? Status::Pass : Status::Fail, name + fmt(" targets O %.3f P %.3f:", target_o, target_p) + report};
}

Outcome c7_gradients() {
    const auto t0 = Clock::now();
    double worst = 0.0;
    std::size_t checked = 0;
    std::string where;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto r = oracle::check_instance(1000 + seed);
        checked += r.checked;
        if (r.worst_rel > worst) worst = r.worst_rel, where = r.worst_where;
    }
    const double secs = seconds_since(t0);
    return {worst < 1e-4 && secs < 10.0 ? Status::Pass : Status::Fail,
            fmt("%zu parameter derivatives, max rel err %.2e (%s), %.2f s", checked, worst, where.c_str(), secs)};
}

toy::BenchmarkSettings ablation_bench() {
    return toy::BenchmarkSettings{};
}

const std::vector<std::uint64_t> kSeeds{1, 2, 3, 4, 5};

Outcome c8_ablation() {
    const auto t0 = Clock::now();
    using toy::AblationVariant;
    const AblationVariant vs[] = {AblationVariant::A, AblationVariant::B, AblationVariant::C, AblationVariant::D};
    const auto report = toy::run_ablation(vs, kSeeds, ablation_bench());
    std::map<std::string, std::map<std::uint64_t, toy::AblationRow>> by;
    for (const auto& r : report.rows) by[r.label][r.seed] = r;
    int dc = 0, cb = 0, ba = 0, chain = 0, rec = 0;
    for (auto s : kSeeds) {
        const double a = by["A"][s].p_auroc, b = by["B"][s].p_auroc, c = by["C"][s].p_auroc, d = by["D"][s].p_auroc;
        dc += d >= c;
        cb += c > b;
        ba += b > a;
        chain += d >= c && c > b && b > a;
        rec += by["A"][s].recon_loss < by["D"][s].recon_loss;
    }
    const int need = static_cast<int>(kSeeds.size()) / 2 + 1;
    const double secs = seconds_since(t0);
    const bool ok = chain >= need && rec >= need && secs < 600.0;
    std::string means;
    for (const auto& m : report.means()) {
        means += fmt(" %s:P=%.3f,O=%.3f,rec=%.4f", m.label.c_str(), m.p_auroc, m.o_auroc, m.recon_loss);
    }
    std::fputs(report.to_table().c_str(), stdout);
    return {ok ? Status::Pass : Status::Fail,
            fmt("full chain D>=C>B>A in %d/5 seeds (D>=C %d, C>B %d, B>A %d); rec A<D in %d/5;", chain, dc, cb,
                ba, rec) + means + fmt("; %.0f s", secs)};
}

Outcome c9_mask_sweep() {
    const auto t0 = Clock::now();
    const std::vector<double> ratios{0.2, 0.4, 0.6, 0.8, 1.0};
    const auto report = toy::run_mask_sweep(ratios, kSeeds, ablation_bench());
    std::map<double, std::map<std::uint64_t, double>> o, p;
    for (const auto& r : report.rows) o[r.mask_ratio][r.seed] = r.o_auroc, p[r.mask_ratio][r.seed] = r.p_auroc;
    int wins = 0, ties = 0, p_wins = 0;
    for (auto s : kSeeds) {
        wins += o.at(1.0).at(s) >= o.at(0.2).at(s);
        ties += o.at(1.0).at(s) == o.at(0.2).at(s);
        p_wins += p.at(1.0).at(s) >= p.at(0.2).at(s);
    }
    const double secs = seconds_since(t0);
    std::string means;
    for (const auto& m : report.means()) means += fmt(" %s:O=%.3f,P=%.3f", m.label.c_str(), m.o_auroc, m.p_auroc);
    std::fputs(report.to_table().c_str(), stdout);
    const bool ok = wins >= 3 && secs < 600.0;
    return {ok ? Status::Pass : Status::Fail,
            fmt("O-AUROC(m=1.0) >= O-AUROC(m=0.2) in %d/5 seeds (%d exact ties); P-AUROC in %d/5;", wins, ties, p_wins) + means + fmt("; %.0f s", secs)};
}

Outcome c10_performance() {
    const auto cloud = oracle::random_cloud(100000, 10);
    const auto t0 = Clock::now();
    const NeighborIndex index(cloud);
    const auto one = curvature_field(cloud, index, 16, CurvatureMode::Variation, kDefaultCurvatureEps, 1);
    const double secs = seconds_since(t0);
    const auto eight = curvature_field(cloud, index, 16, CurvatureMode::Variation, kDefaultCurvatureEps, 8);
    const bool same = one.values == eight.values;
    return {secs <= 5.0 && same ? Status::Pass : Status::Fail,
            fmt("100k points, k=16, 1 worker: %.2f s (<= 5 s); 1 vs 8 workers bit-identical: %s", secs,
                same ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"eigensolver vs bisection oracle", c1_eigensolver},
        {"AUROC rank method vs pairwise oracle", c2_auroc},
        {"log-ratio and top-k scoring", c3_scoring},
        {"curvature rigid and scale invariance", c4_invariance},
        {"curvature detector floor on dented spheres", c5_detector_floor},
        {"dataset-gated curvature baseline sweep", c6_dataset_sweep},
        {"toy network gradient check", c7_gradients},
        {"ablation ordering A-D", c8_ablation},
        {"mask-ratio sweep", c9_mask_sweep},
        {"curvature performance and worker determinism", c10_performance},
    };
    std::set<int> only, expected;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--expect-fail" && i + 1 < argc) {
            std::stringstream ss(argv[++i]);
            std::string id;
            while (std::getline(ss, id, ',')) expected.insert(std::atoi(id.c_str()));
        } else {
            only.insert(std::atoi(a.c_str()));
        }
    }
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!only.empty() && !only.count(id)) continue;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {Status::Fail, std::string("exception: ") + e.what()};
        }
        const char* tag = o.status == Status::Pass ? "PASS" : o.status == Status::Skip ? "SKIP" : "FAIL";
        const bool known = expected.count(id) > 0;
        failed += o.status == Status::Fail && !known;
        std::printf("[%s] %2d %s: %s%s\n", tag, id, criteria[i].first, o.detail.c_str(),
                    o.status == Status::Fail && known ? " (known failure, see README)" : "");
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
