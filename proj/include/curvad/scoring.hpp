#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "curvad/curvature.hpp"

namespace curvad {

inline constexpr double kDefaultAggregationRate = 0.01;
inline constexpr double kDefaultLogitEps = 1e-8;

/// Per-point (p_normal, p_anomalous); each pair on the probability simplex.
struct ClassProbabilities {
    std::vector<std::pair<double, double>> values;

    /// Throws ValidationError if any pair is negative or does not sum to 1 (1e-9).
    void validate() const;
};

struct AnomalyScoreSet {
    std::vector<double> point_scores;
    double object_score = 0.0;
    double rate = kDefaultAggregationRate;
};

/// The curvature detector: every point's curvature is its anomaly score.
std::vector<double> curvature_score(const CurvatureField& field);

/// -log(max(p_normal, eps) / (p_anomalous + eps)); larger is more anomalous.
std::vector<double> logit_score(const ClassProbabilities& probs, double eps = kDefaultLogitEps);
double logit_score(double p_normal, double p_anomalous, double eps = kDefaultLogitEps);

/// Mean of the ceil(r * N) largest scores. Throws ArgumentError for r outside
/// (0, 1] and EmptyInputError for no scores.
double object_score(std::span<const double> point_scores, double rate = kDefaultAggregationRate);

AnomalyScoreSet make_score_set(std::vector<double> point_scores,
                               double rate = kDefaultAggregationRate);

}  // namespace curvad
