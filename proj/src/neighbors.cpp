#include "curvad/neighbors.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "curvad/error.hpp"
#include "curvad/parallel.hpp"
#include "curvad/random.hpp"

namespace curvad {
namespace {

using Candidate = std::pair<double, std::uint32_t>;

// Keeps `best` sorted ascending by (distance, index), capped at k entries.
inline void offer(std::vector<Candidate>& best, std::size_t k, Candidate c) {
    if (best.size() == k) {
        if (!(c < best.back())) return;
        best.pop_back();
    }
    best.insert(std::upper_bound(best.begin(), best.end(), c), c);
}

}  // namespace

NeighborIndex::NeighborIndex(const PointCloud& cloud, std::size_t leaf_size)
    : count_(cloud.size()),
      leaf_size_(std::max<std::size_t>(1, leaf_size)),
      original_(cloud.points().begin(), cloud.points().end()) {
    if (count_ > std::numeric_limits<std::uint32_t>::max()) {
        throw ArgumentError("point cloud too large for the neighbor index");
    }
    order_.resize(count_);
    std::iota(order_.begin(), order_.end(), 0u);
    nodes_.reserve(2 * (count_ / leaf_size_ + 1));
    build(0, static_cast<std::uint32_t>(count_));
    ordered_.resize(count_);
    for (std::size_t i = 0; i < count_; ++i) ordered_[i] = original_[order_[i]];
}

std::uint32_t NeighborIndex::build(std::uint32_t begin, std::uint32_t end) {
    const auto id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back({begin, end, 0, 0, 0.0, 0});
    if (end - begin <= leaf_size_) return id;

    Vec3 lo = original_[order_[begin]];
    Vec3 hi = lo;
    for (std::uint32_t i = begin; i < end; ++i) {
        const Vec3& p = original_[order_[i]];
        for (int c = 0; c < 3; ++c) {
            lo[c] = std::min(lo[c], p[c]);
            hi[c] = std::max(hi[c], p[c]);
        }
    }
    int axis = 0;
    for (int c = 1; c < 3; ++c) {
        if (hi[c] - lo[c] > hi[axis] - lo[axis]) axis = c;
    }
    if (hi[axis] == lo[axis]) return id;   // all points coincide

    const std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                         const double ca = original_[a][axis];
                         const double cb = original_[b][axis];
                         return ca < cb || (ca == cb && a < b);
                     });
    const double split = original_[order_[mid]][axis];
    const std::uint32_t left = build(begin, mid);
    const std::uint32_t right = build(mid, end);
    Node& node = nodes_[id];
    node.left = left;
    node.right = right;
    node.split = split;
    node.axis = static_cast<std::uint8_t>(axis);
    return id;
}

void NeighborIndex::search(const Vec3& q, std::size_t k, std::int64_t skip,
                           std::vector<Candidate>& best) const {
    // Explicit stack; left holds coordinates <= split, right >= split.
    std::uint32_t stack[128];
    double stack_gap[128];
    int top = 0;
    stack[top] = 0;
    stack_gap[top++] = 0.0;
    while (top > 0) {
        --top;
        const std::uint32_t id = stack[top];
        const double gap = stack_gap[top];
        if (best.size() == k && gap > best.back().first) continue;
        const Node& node = nodes_[id];
        if (node.left == 0) {
            for (std::uint32_t s = node.begin; s < node.end; ++s) {
                const std::uint32_t idx = order_[s];
                if (static_cast<std::int64_t>(idx) == skip) continue;
                offer(best, k, {squared_distance(q, ordered_[s]), idx});
            }
            continue;
        }
        const double diff = q[node.axis] - node.split;
        const double far_gap = diff * diff;
        const std::uint32_t near = diff <= 0.0 ? node.left : node.right;
        const std::uint32_t far = diff <= 0.0 ? node.right : node.left;
        // Far side first on the stack so the near side pops first.
        stack[top] = far;
        stack_gap[top++] = far_gap;
        stack[top] = near;
        stack_gap[top++] = 0.0;
    }
}

void NeighborIndex::check_k(std::size_t k, bool include_self) const {
    const std::size_t max_k = include_self ? count_ : count_ - 1;
    if (k < 1 || k > max_k) {
        throw ArgumentError("k = " + std::to_string(k) + " out of range [1, " +
                            std::to_string(max_k) + "]");
    }
}

std::vector<std::uint32_t> NeighborIndex::knn(std::size_t query, std::size_t k,
                                              bool include_self) const {
    if (query >= count_) {
        throw ArgumentError("query index " + std::to_string(query) + " out of range");
    }
    check_k(k, include_self);
    std::vector<Candidate> best;
    const std::size_t others = include_self ? k - 1 : k;
    best.reserve(others + 1);
    if (others > 0) search(original_[query], others, static_cast<std::int64_t>(query), best);
    std::vector<std::uint32_t> out;
    out.reserve(k);
    if (include_self) out.push_back(static_cast<std::uint32_t>(query));
    for (const auto& c : best) out.push_back(c.second);
    return out;
}

std::vector<std::uint32_t> NeighborIndex::knn_at(const Vec3& location, std::size_t k) const {
    check_k(k, true);
    std::vector<Candidate> best;
    best.reserve(k + 1);
    search(location, k, -1, best);
    std::vector<std::uint32_t> out;
    out.reserve(k);
    for (const auto& c : best) out.push_back(c.second);
    return out;
}

std::vector<std::uint32_t> NeighborIndex::knn_all(std::size_t k, bool include_self,
                                                  std::size_t workers) const {
    check_k(k, include_self);
    std::vector<std::uint32_t> out(count_ * k);
    const std::size_t others = include_self ? k - 1 : k;
    parallel_for(count_, workers, [&](std::size_t begin, std::size_t end) {
        std::vector<Candidate> best;
        best.reserve(others + 1);
        for (std::size_t i = begin; i < end; ++i) {
            best.clear();
            if (others > 0) search(original_[i], others, static_cast<std::int64_t>(i), best);
            std::uint32_t* row = out.data() + i * k;
            if (include_self) *row++ = static_cast<std::uint32_t>(i);
            for (const auto& c : best) *row++ = c.second;
        }
    });
    return out;
}

std::vector<std::uint32_t> NeighborIndex::knn_all(std::size_t k, bool include_self) const {
    return knn_all(k, include_self, default_worker_count());
}

std::vector<std::uint32_t> farthest_point_sample_from(const PointCloud& cloud, std::size_t m,
                                                      std::uint32_t first) {
    const std::size_t n = cloud.size();
    if (m < 1 || m > n) {
        throw ArgumentError("sample size " + std::to_string(m) + " out of range [1, " +
                            std::to_string(n) + "]");
    }
    if (first >= n) throw ArgumentError("first sample index out of range");
    std::vector<std::uint32_t> picked;
    picked.reserve(m);
    picked.push_back(first);
    // Chosen points are parked at -inf so duplicates cannot re-pick them.
    std::vector<double> min_d2(n, std::numeric_limits<double>::infinity());
    min_d2[first] = -std::numeric_limits<double>::infinity();
    std::uint32_t last = first;
    while (picked.size() < m) {
        const Vec3& c = cloud[last];
        std::uint32_t arg = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = squared_distance(cloud[i], c);
            if (d < min_d2[i]) min_d2[i] = d;
            if (min_d2[i] > best) {
                best = min_d2[i];
                arg = static_cast<std::uint32_t>(i);
            }
        }
        picked.push_back(arg);
        min_d2[arg] = -std::numeric_limits<double>::infinity();
        last = arg;
    }
    return picked;
}

std::vector<std::uint32_t> farthest_point_sample(const PointCloud& cloud, std::size_t m,
                                                 std::uint64_t seed) {
    if (m < 1 || m > cloud.size()) {
        throw ArgumentError("sample size " + std::to_string(m) + " out of range [1, " +
                            std::to_string(cloud.size()) + "]");
    }
    Rng rng(seed);
    return farthest_point_sample_from(cloud, m, static_cast<std::uint32_t>(rng.uniform_index(cloud.size())));
}

}  // namespace curvad
