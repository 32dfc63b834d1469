#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace curvad {

using Vec3 = std::array<double, 3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double squared_distance(const Vec3& a, const Vec3& b) {
    const double dx = a[0] - b[0];
    const double dy = a[1] - b[1];
    const double dz = a[2] - b[2];
    return dx * dx + dy * dy + dz * dz;
}

/// N x 3 coordinates, N >= 1, every coordinate finite. Immutable once built.
class PointCloud {
public:
    /// Throws EmptyInputError for no points, ValidationError for non-finite values.
    explicit PointCloud(std::vector<Vec3> points);

    std::size_t size() const noexcept { return points_.size(); }
    const Vec3& operator[](std::size_t i) const { return points_[i]; }
    std::span<const Vec3> points() const noexcept { return points_; }

    bool operator==(const PointCloud&) const = default;

private:
    std::vector<Vec3> points_;
};

/// Per-point binary labels, 0 = normal and 1 = anomalous.
class LabelSet {
public:
    LabelSet() = default;
    /// Throws ValidationError if any value is not 0 or 1.
    explicit LabelSet(std::vector<std::uint8_t> labels);
    LabelSet(std::size_t n, std::uint8_t value);

    std::size_t size() const noexcept { return labels_.size(); }
    std::uint8_t operator[](std::size_t i) const { return labels_[i]; }
    std::span<const std::uint8_t> values() const noexcept { return labels_; }
    std::size_t count_anomalous() const noexcept;

    bool operator==(const LabelSet&) const = default;

private:
    std::vector<std::uint8_t> labels_;
};

/// Throws AlignmentError when the label count does not match the cloud.
void require_aligned(const PointCloud& cloud, const LabelSet& labels);

}  // namespace curvad
