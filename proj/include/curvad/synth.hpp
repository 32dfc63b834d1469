#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "curvad/point_cloud.hpp"

namespace curvad {

enum class ShapeKind { Sphere, Plane, Torus, Cylinder };

ShapeKind parse_shape_kind(std::string_view name);
std::string_view to_string(ShapeKind kind) noexcept;

// Shape parameters of make_shape.
inline constexpr double kTorusMajorRadius = 1.0;
inline constexpr double kTorusMinorRadius = 0.3;
inline constexpr double kCylinderRadius = 1.0;
inline constexpr double kCylinderHalfHeight = 1.0;
inline constexpr double kPlaneHalfExtent = 1.0;

/// Quasi-uniform surface samples (low-discrepancy lattices with a seeded
/// offset and, for the sphere, a seeded rotation) plus isotropic Gaussian
/// jitter. Throws ArgumentError for n < 16 or negative noise.
///
///   sphere    unit radius at the origin
///   plane     z = 0, x and y in [-1, 1]
///   torus     major radius 1, tube radius 0.3, around the z axis
///   cylinder  radius 1, z in [-1, 1], no caps
PointCloud make_shape(ShapeKind kind, std::size_t n, double noise_sigma, std::uint64_t seed);

struct PseudoAnomalyConfig {
    std::size_t num_patches = 64;
    std::size_t max_selected = 3;
    double displacement_lo = 0.01;   // fractions of the bounding-box diagonal
    double displacement_hi = 0.05;
    std::size_t normal_k = 16;
    std::uint64_t seed = 0;

    /// Throws ArgumentError on an invalid configuration or N < num_patches.
    void validate(std::size_t n) const;
};

struct PatchDisplacement {
    std::size_t patch = 0;
    std::size_t point_count = 0;
    double magnitude = 0.0;   // model units
    int sign = 1;
    Vec3 direction{};         // unit mean normal of the patch
    Vec3 displacement{};      // sign * magnitude * direction
};

struct Provenance {
    std::uint64_t seed = 0;
    std::size_t num_patches = 0;
    double diagonal = 0.0;
    std::vector<PatchDisplacement> patches;

    /// key=value lines.
    std::string to_text() const;
};

struct LabeledCloud {
    PointCloud cloud;
    LabelSet labels;
    Provenance provenance;
};

/// Bounding-box diagonal length.
double bounding_diagonal(const PointCloud& cloud);

/// Partition into num_patches patches (FPS centers, nearest-center
/// assignment, lower center wins ties). Returns the patch id of every point.
std::vector<std::uint32_t> partition_patches(const PointCloud& cloud, std::size_t num_patches,
                                             std::uint64_t seed);

/// Picks 1..max_selected patches and shifts each one rigidly along +/- its
/// mean normal by a magnitude in [lo, hi] * diagonal. Displaced points are
/// labeled 1; every other row is copied unchanged.
LabeledCloud generate_pseudo_anomaly(const PointCloud& cloud, const PseudoAnomalyConfig& cfg);

}  // namespace curvad
