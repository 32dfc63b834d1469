#include "curvad/benchmark.hpp"

#include "curvad/random.hpp"
#include "curvad/scoring.hpp"

namespace curvad {

std::vector<BenchmarkCloud> make_synthetic_benchmark(ShapeKind shape, std::size_t anomalous,
                                                     std::size_t clean, std::size_t points,
                                                     double noise_sigma,
                                                     const PseudoAnomalyConfig& synth,
                                                     std::uint64_t seed) {
    Rng rng(seed);
    const std::string category(to_string(shape));
    std::vector<BenchmarkCloud> out;
    out.reserve(anomalous + clean);
    for (std::size_t i = 0; i < anomalous; ++i) {
        const PointCloud base = make_shape(shape, points, noise_sigma, rng.fork());
        PseudoAnomalyConfig cfg = synth;
        cfg.seed = rng.fork();
        LabeledCloud lc = generate_pseudo_anomaly(base, cfg);
        out.push_back({category + "_anomalous_" + std::to_string(i), category, std::move(lc.cloud),
                       std::move(lc.labels), 1});
    }
    for (std::size_t i = 0; i < clean; ++i) {
        PointCloud c = make_shape(shape, points, noise_sigma, rng.fork());
        LabelSet labels(c.size(), 0);
        out.push_back({category + "_clean_" + std::to_string(i), category, std::move(c),
                       std::move(labels), 0});
    }
    return out;
}

std::vector<CloudEvaluation> score_with_curvature(std::span<const BenchmarkCloud> clouds,
                                                  std::size_t k, CurvatureMode mode, double eps,
                                                  double rate) {
    std::vector<CloudEvaluation> out;
    out.reserve(clouds.size());
    for (const auto& c : clouds) {
        const auto field = curvature_field(c.cloud, k, mode, eps);
        out.push_back({c.id, c.category, make_score_set(curvature_score(field), rate), c.labels,
                       c.object_label});
    }
    return out;
}

}  // namespace curvad
