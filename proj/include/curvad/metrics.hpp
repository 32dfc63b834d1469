#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "curvad/point_cloud.hpp"
#include "curvad/scoring.hpp"

namespace curvad {

/// P(score_pos > score_neg) + 0.5 * P(score_pos == score_neg), by mid-ranks.
/// Throws AlignmentError on length mismatch, UndefinedMetricError when either
/// class is missing.
double auroc(std::span<const double> scores, std::span<const std::uint8_t> labels);

struct CloudEvaluation {
    std::string cloud_id;
    std::string category;
    AnomalyScoreSet scores;
    LabelSet point_labels;
    std::uint8_t object_label = 0;
};

struct CategoryMetrics {
    std::string category;
    std::size_t clouds = 0;
    double o_auroc = 0.0;
    double p_auroc = 0.0;
};

struct DatasetMetrics {
    double o_auroc = 0.0;   // over all clouds
    double p_auroc = 0.0;   // over all pooled points
    std::vector<CategoryMetrics> categories;   // sorted by name
    double mean_o_auroc = 0.0;   // mean over categories
    double mean_p_auroc = 0.0;

    std::string to_csv() const;
    /// Aligned plain-text table: one row per category plus a Mean row.
    std::string to_table() const;
};

/// O-AUROC over (object_score, object_label); P-AUROC over every cloud's
/// points pooled in input order. Per-category values follow the same rules.
DatasetMetrics evaluate_dataset(std::span<const CloudEvaluation> clouds);

}  // namespace curvad
