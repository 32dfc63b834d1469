#pragma once

#include <filesystem>
#include <string_view>
#include <utility>

#include "curvad/point_cloud.hpp"

namespace curvad {

enum class CloudFormat { XyzAscii, Ply, Csv };

/// Accepts "xyz", "xyz-ascii", "ply", "csv". Throws ArgumentError otherwise.
CloudFormat parse_cloud_format(std::string_view name);
/// Guesses from the file extension; unknown extensions map to xyz.
CloudFormat format_from_extension(const std::filesystem::path& path);
std::string_view to_string(CloudFormat format) noexcept;

// Loading reads one record per line (or per PLY vertex) in file order.
// Parse errors name the 1-based line; for binary PLY bodies the vertex index.
PointCloud load_cloud(const std::filesystem::path& path, CloudFormat format);

// ASCII formats use the shortest representation that parses back to the
// same double, so ascii round trips are exact as well. PLY is written as
// binary_little_endian with float64 x, y, z.
void save_cloud(const PointCloud& cloud, const std::filesystem::path& path, CloudFormat format);

/// One integer per line. Blank trailing lines are ignored.
LabelSet load_labels(const std::filesystem::path& path, std::size_t expected_n);
void save_labels(const LabelSet& labels, const std::filesystem::path& path);

struct NormalizationTransform {
    Vec3 centroid{0.0, 0.0, 0.0};
    double scale = 1.0;

    Vec3 apply(const Vec3& p) const;
    Vec3 invert(const Vec3& q) const;
};

/// Centers on the centroid and scales so the farthest point has norm 1.
/// When all points coincide the scale is 1 and everything maps to the origin.
std::pair<PointCloud, NormalizationTransform> normalize_cloud(const PointCloud& cloud);

}  // namespace curvad
