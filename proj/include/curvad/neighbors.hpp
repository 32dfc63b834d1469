#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "curvad/point_cloud.hpp"

namespace curvad {

/// Exact k-nearest-neighbor index (kd-tree). Keeps its own copy of the
/// coordinates, so it stays valid independently of the source cloud.
///
/// Results are ordered by (squared distance, point index); the index is the
/// tie-break, which makes every answer identical to a brute-force sorted scan.
class NeighborIndex {
public:
    explicit NeighborIndex(const PointCloud& cloud, std::size_t leaf_size = 12);

    std::size_t size() const noexcept { return count_; }
    const Vec3& point(std::size_t i) const { return original_[i]; }

    /// k nearest neighbors of point `query`. With include_self the query comes
    /// first, followed by its k-1 nearest other points. Throws ArgumentError
    /// unless 1 <= k <= N (N-1 without self).
    std::vector<std::uint32_t> knn(std::size_t query, std::size_t k, bool include_self) const;

    /// k nearest points to an arbitrary location (no self handling).
    std::vector<std::uint32_t> knn_at(const Vec3& location, std::size_t k) const;

    /// knn for every point; row i occupies [i*k, (i+1)*k). Parallel over points.
    std::vector<std::uint32_t> knn_all(std::size_t k, bool include_self,
                                       std::size_t workers) const;
    std::vector<std::uint32_t> knn_all(std::size_t k, bool include_self) const;

private:
    struct Node {
        std::uint32_t begin = 0;
        std::uint32_t end = 0;
        std::uint32_t left = 0;   // 0 means leaf; root is never a child
        std::uint32_t right = 0;
        double split = 0.0;
        std::uint8_t axis = 0;
    };

    std::uint32_t build(std::uint32_t begin, std::uint32_t end);
    void search(const Vec3& q, std::size_t k, std::int64_t skip,
                std::vector<std::pair<double, std::uint32_t>>& best) const;
    void check_k(std::size_t k, bool include_self) const;

    std::size_t count_ = 0;
    std::size_t leaf_size_ = 12;
    std::vector<Vec3> original_;
    std::vector<Vec3> ordered_;           // coordinates in tree order
    std::vector<std::uint32_t> order_;    // tree slot -> point index
    std::vector<Node> nodes_;
};

inline NeighborIndex build_index(const PointCloud& cloud) { return NeighborIndex(cloud); }

/// Greedy max-min subset. The first pick is a seeded uniform draw; every
/// later pick maximizes distance to the chosen set (lower index wins ties).
std::vector<std::uint32_t> farthest_point_sample(const PointCloud& cloud, std::size_t m,
                                                 std::uint64_t seed);

/// Same, with an explicit first index instead of a seeded draw.
std::vector<std::uint32_t> farthest_point_sample_from(const PointCloud& cloud, std::size_t m,
                                                      std::uint32_t first);

}  // namespace curvad
