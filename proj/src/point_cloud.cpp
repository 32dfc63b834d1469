#include "curvad/point_cloud.hpp"

#include <algorithm>
#include <string>

#include "curvad/error.hpp"

namespace curvad {

PointCloud::PointCloud(std::vector<Vec3> points) : points_(std::move(points)) {
    if (points_.empty()) throw EmptyInputError("point cloud has no points");
    for (std::size_t i = 0; i < points_.size(); ++i) {
        for (double c : points_[i]) {
            if (!std::isfinite(c)) {
                throw ValidationError("non-finite coordinate at point " + std::to_string(i));
            }
        }
    }
}

LabelSet::LabelSet(std::vector<std::uint8_t> labels) : labels_(std::move(labels)) {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i] > 1) {
            throw ValidationError("label at index " + std::to_string(i) + " is " +
                                  std::to_string(labels_[i]) + ", expected 0 or 1");
        }
    }
}

LabelSet::LabelSet(std::size_t n, std::uint8_t value)
    : LabelSet(std::vector<std::uint8_t>(n, value)) {}

std::size_t LabelSet::count_anomalous() const noexcept {
    return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), std::uint8_t{1}));
}

void require_aligned(const PointCloud& cloud, const LabelSet& labels) {
    if (cloud.size() != labels.size()) {
        throw AlignmentError("cloud has " + std::to_string(cloud.size()) + " points but " +
                             std::to_string(labels.size()) + " labels");
    }
}

}  // namespace curvad
