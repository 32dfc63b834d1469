#include "curvad/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "curvad/error.hpp"

namespace curvad {

void ClassProbabilities::validate() const {
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto [pn, pa] = values[i];
        if (!(pn >= 0.0 && pa >= 0.0) || std::abs(pn + pa - 1.0) > 1e-9) {
            throw ValidationError("class probabilities at point " + std::to_string(i) +
                                  " are not on the simplex");
        }
    }
}

std::vector<double> curvature_score(const CurvatureField& field) { return field.values; }

double logit_score(double p_normal, double p_anomalous, double eps) {
    return -std::log(std::max(p_normal, eps) / (p_anomalous + eps));
}

std::vector<double> logit_score(const ClassProbabilities& probs, double eps) {
    if (!(eps > 0.0)) throw ArgumentError("logit eps must be positive");
    probs.validate();
    std::vector<double> out;
    out.reserve(probs.values.size());
    for (const auto& [pn, pa] : probs.values) out.push_back(logit_score(pn, pa, eps));
    return out;
}

double object_score(std::span<const double> point_scores, double rate) {
    if (!(rate > 0.0 && rate <= 1.0)) {
        throw ArgumentError("aggregation rate must lie in (0, 1]");
    }
    if (point_scores.empty()) throw EmptyInputError("object score of an empty score list");
    const std::size_t n = point_scores.size();
    const auto k = std::min<std::size_t>(
        n, static_cast<std::size_t>(std::ceil(rate * static_cast<double>(n))));
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    // Descending by score, lower index first among equals.
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                      [&](std::size_t a, std::size_t b) {
                          return point_scores[a] > point_scores[b] ||
                                 (point_scores[a] == point_scores[b] && a < b);
                      });
    // Summing in descending-score order keeps the result permutation invariant.
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) sum += point_scores[idx[i]];
    return sum / static_cast<double>(k);
}

AnomalyScoreSet make_score_set(std::vector<double> point_scores, double rate) {
    for (std::size_t i = 0; i < point_scores.size(); ++i) {
        if (!std::isfinite(point_scores[i])) {
            throw ValidationError("non-finite score at point " + std::to_string(i));
        }
    }
    AnomalyScoreSet s;
    s.object_score = object_score(point_scores, rate);
    s.point_scores = std::move(point_scores);
    s.rate = rate;
    return s;
}

}  // namespace curvad
