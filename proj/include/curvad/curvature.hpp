#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "curvad/neighbors.hpp"
#include "curvad/point_cloud.hpp"

namespace curvad {

/// Symmetric 3x3, row-major.
using Mat3 = std::array<double, 9>;

struct EigenTriple {
    std::array<double, 3> values{};   // ascending
    std::array<Vec3, 3> vectors{};    // vectors[i] pairs with values[i]
};

enum class CurvatureMode {
    Literal,    // (l1 + l2 + l3) / l1
    Variation,  // l1 / (l1 + l2 + l3), the surface variation
};

CurvatureMode parse_curvature_mode(std::string_view name);
std::string_view to_string(CurvatureMode mode) noexcept;

inline constexpr std::size_t kDefaultCurvatureK = 16;
inline constexpr double kDefaultCurvatureEps = 1e-12;

struct CurvatureField {
    std::vector<double> values;
    std::size_t k = 0;
    CurvatureMode mode = CurvatureMode::Variation;
};

/// N x S, row-major, one column per neighborhood size in ks (ascending).
struct MultiScaleCurvature {
    std::vector<std::size_t> ks;
    std::size_t n = 0;
    CurvatureMode mode = CurvatureMode::Variation;
    std::vector<double> values;

    std::size_t scales() const noexcept { return ks.size(); }
    double at(std::size_t point, std::size_t scale) const { return values[point * ks.size() + scale]; }
    CurvatureField column(std::size_t scale) const;
};

/// Covariance of the k nearest neighbors of `point` (self included), with
/// the unbiased 1/(k-1) normalizer. Throws ArgumentError for k < 2.
Mat3 local_covariance(const PointCloud& cloud, const NeighborIndex& index,
                      std::size_t point, std::size_t k);

/// Same over an explicit neighborhood.
Mat3 covariance_of(std::span<const Vec3> points, std::span<const std::uint32_t> neighbors);

/// Analytic symmetric 3x3 eigensolver. Eigenvalues ascending; each vector's
/// largest-magnitude component is non-negative.
EigenTriple eig3_sym(const Mat3& m);

/// Clamps negative roundoff to zero before evaluating the chosen ratio.
double point_curvature(const std::array<double, 3>& eigenvalues, CurvatureMode mode,
                       double eps = kDefaultCurvatureEps);

CurvatureField curvature_field(const PointCloud& cloud, std::size_t k = kDefaultCurvatureK,
                               CurvatureMode mode = CurvatureMode::Variation,
                               double eps = kDefaultCurvatureEps);
CurvatureField curvature_field(const PointCloud& cloud, const NeighborIndex& index,
                               std::size_t k, CurvatureMode mode, double eps,
                               std::size_t workers);

/// One kNN pass at the largest scale; smaller scales reuse its prefixes,
/// which are exactly their own kNN answers under the index tie-break.
MultiScaleCurvature multi_scale_curvature(const PointCloud& cloud,
                                          std::span<const std::size_t> ks,
                                          CurvatureMode mode = CurvatureMode::Variation,
                                          double eps = kDefaultCurvatureEps);
MultiScaleCurvature multi_scale_curvature(const PointCloud& cloud, const NeighborIndex& index,
                                          std::span<const std::size_t> ks, CurvatureMode mode,
                                          double eps, std::size_t workers);

/// Unit eigenvector of the smallest eigenvalue per point. Signs follow the
/// eigensolver convention; there is no global orientation.
std::vector<Vec3> normals(const PointCloud& cloud, std::size_t k = kDefaultCurvatureK);
std::vector<Vec3> normals(const PointCloud& cloud, const NeighborIndex& index, std::size_t k);

}  // namespace curvad
