#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "curvad/curvature.hpp"
#include "curvad/metrics.hpp"
#include "curvad/synth.hpp"

namespace curvad {

struct BenchmarkCloud {
    std::string id;
    std::string category;
    PointCloud cloud;
    LabelSet labels;
    std::uint8_t object_label = 0;
};

/// `anomalous` pseudo-anomalous clouds followed by `clean` untouched ones,
/// all sampled from `shape` with independent seeds derived from `seed`.
std::vector<BenchmarkCloud> make_synthetic_benchmark(ShapeKind shape, std::size_t anomalous,
                                                     std::size_t clean, std::size_t points,
                                                     double noise_sigma,
                                                     const PseudoAnomalyConfig& synth,
                                                     std::uint64_t seed);

/// Scores every cloud with the curvature detector.
std::vector<CloudEvaluation> score_with_curvature(std::span<const BenchmarkCloud> clouds,
                                                  std::size_t k, CurvatureMode mode, double eps,
                                                  double rate);

}  // namespace curvad
