#include "curvad/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "curvad/error.hpp"
#include "curvad/parallel.hpp"

namespace curvad {
namespace {

Vec3 mul(const Mat3& m, const Vec3& v) {
    return {m[0] * v[0] + m[1] * v[1] + m[2] * v[2], m[3] * v[0] + m[4] * v[1] + m[5] * v[2],
            m[6] * v[0] + m[7] * v[1] + m[8] * v[2]};
}

Vec3 unit(const Vec3& v) { return (1.0 / norm(v)) * v; }

// Unit vector spanning the null space of (a - lambda I); lambda must be a
// well-separated eigenvalue of a. The longest row cross product is the most
// accurate of the three.
Vec3 null_vector(const Mat3& a, double lambda) {
    const Vec3 r0{a[0] - lambda, a[1], a[2]};
    const Vec3 r1{a[3], a[4] - lambda, a[5]};
    const Vec3 r2{a[6], a[7], a[8] - lambda};
    const Vec3 c01 = cross(r0, r1);
    const Vec3 c02 = cross(r0, r2);
    const Vec3 c12 = cross(r1, r2);
    const double d01 = dot(c01, c01);
    const double d02 = dot(c02, c02);
    const double d12 = dot(c12, c12);
    if (d01 >= d02 && d01 >= d12 && d01 > 0.0) return (1.0 / std::sqrt(d01)) * c01;
    if (d02 >= d12 && d02 > 0.0) return (1.0 / std::sqrt(d02)) * c02;
    if (d12 > 0.0) return (1.0 / std::sqrt(d12)) * c12;
    return {1.0, 0.0, 0.0};
}

// Orthonormal u, w completing the unit vector v to a right-handed basis.
void complete_basis(const Vec3& v, Vec3& u, Vec3& w) {
    if (std::abs(v[0]) > std::abs(v[1])) {
        u = unit(Vec3{-v[2], 0.0, v[0]});
    } else {
        u = unit(Vec3{0.0, v[2], -v[1]});
    }
    w = cross(v, u);
}

void canonical_sign(Vec3& v) {
    int arg = 0;
    for (int c = 1; c < 3; ++c) {
        if (std::abs(v[c]) > std::abs(v[arg])) arg = c;
    }
    if (v[arg] < 0.0) v = -1.0 * v;
}

}  // namespace

CurvatureMode parse_curvature_mode(std::string_view name) {
    if (name == "literal") return CurvatureMode::Literal;
    if (name == "variation") return CurvatureMode::Variation;
    throw ArgumentError("unknown curvature mode '" + std::string(name) + "' (literal, variation)");
}

std::string_view to_string(CurvatureMode mode) noexcept {
    return mode == CurvatureMode::Literal ? "literal" : "variation";
}

CurvatureField MultiScaleCurvature::column(std::size_t scale) const {
    CurvatureField f;
    f.k = ks.at(scale);
    f.mode = mode;
    f.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) f.values[i] = at(i, scale);
    return f;
}

Mat3 covariance_of(std::span<const Vec3> points, std::span<const std::uint32_t> neighbors) {
    const std::size_t k = neighbors.size();
    if (k < 2) throw ArgumentError("covariance needs k >= 2, got " + std::to_string(k));
    Vec3 c{0.0, 0.0, 0.0};
    for (std::uint32_t j : neighbors) c = c + points[j];
    c = (1.0 / static_cast<double>(k)) * c;
    double xx = 0, xy = 0, xz = 0, yy = 0, yz = 0, zz = 0;
    for (std::uint32_t j : neighbors) {
        const Vec3 d = points[j] - c;
        xx += d[0] * d[0];
        xy += d[0] * d[1];
        xz += d[0] * d[2];
        yy += d[1] * d[1];
        yz += d[1] * d[2];
        zz += d[2] * d[2];
    }
    const double s = 1.0 / static_cast<double>(k - 1);
    xx *= s, xy *= s, xz *= s, yy *= s, yz *= s, zz *= s;
    return {xx, xy, xz, xy, yy, yz, xz, yz, zz};
}

Mat3 local_covariance(const PointCloud& cloud, const NeighborIndex& index, std::size_t point,
                      std::size_t k) {
    if (k < 2) throw ArgumentError("covariance needs k >= 2, got " + std::to_string(k));
    const auto nb = index.knn(point, k, true);
    return covariance_of(cloud.points(), nb);
}

EigenTriple eig3_sym(const Mat3& m) {
    EigenTriple out;
    out.vectors = {Vec3{1.0, 0.0, 0.0}, Vec3{0.0, 1.0, 0.0}, Vec3{0.0, 0.0, 1.0}};

    // Upper triangle defines the matrix.
    const Mat3 sym{m[0], m[1], m[2], m[1], m[4], m[5], m[2], m[5], m[8]};
    double max_abs = 0.0;
    for (double v : sym) max_abs = std::max(max_abs, std::abs(v));
    if (max_abs == 0.0) return out;

    Mat3 a;
    for (int i = 0; i < 9; ++i) a[i] = sym[i] / max_abs;
    const double q = (a[0] + a[4] + a[8]) / 3.0;
    const double b00 = a[0] - q, b11 = a[4] - q, b22 = a[8] - q;
    const double b01 = a[1], b02 = a[2], b12 = a[5];
    const double p2 = (b00 * b00 + b11 * b11 + b22 * b22 +
                       2.0 * (b01 * b01 + b02 * b02 + b12 * b12)) / 6.0;
    if (p2 == 0.0) {
        out.values = {sym[0], sym[0], sym[0]};
        return out;
    }

    // Roots of det(B/p - beta I) = 0 are 2 cos(angle + 2 pi j / 3).
    const double p = std::sqrt(p2);
    const double c00 = b00 / p, c11 = b11 / p, c22 = b22 / p;
    const double c01 = b01 / p, c02 = b02 / p, c12 = b12 / p;
    const double det = c00 * (c11 * c22 - c12 * c12) - c01 * (c01 * c22 - c12 * c02) +
                       c02 * (c01 * c12 - c11 * c02);
    const double half_det = std::clamp(det / 2.0, -1.0, 1.0);
    const double angle = std::acos(half_det) / 3.0;
    // The extreme root farther from the middle one is the well-separated one.
    const double beta = half_det >= 0.0 ? 2.0 * std::cos(angle)
                                        : 2.0 * std::cos(angle + 2.0 * std::numbers::pi / 3.0);
    const Vec3 v0 = null_vector(a, q + p * beta);

    Vec3 u, w;
    complete_basis(v0, u, w);
    const Vec3 au = mul(a, u);
    const Vec3 aw = mul(a, w);
    const double a_uu = dot(u, au);
    const double a_uw = dot(u, aw);
    const double a_ww = dot(w, aw);
    Vec3 v1 = u;
    Vec3 v2 = w;
    if (a_uw != 0.0) {
        const double theta = (a_ww - a_uu) / (2.0 * a_uw);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double cs = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * cs;
        v1 = cs * u - sn * w;
        v2 = sn * u + cs * w;
    }

    std::array<Vec3, 3> vecs{v0, v1, v2};
    std::array<double, 3> vals{};
    for (int i = 0; i < 3; ++i) vals[i] = dot(vecs[i], mul(sym, vecs[i]));
    std::array<int, 3> idx{0, 1, 2};
    std::sort(idx.begin(), idx.end(), [&](int l, int r) { return vals[l] < vals[r]; });
    for (int i = 0; i < 3; ++i) {
        out.values[i] = vals[idx[i]];
        out.vectors[i] = vecs[idx[i]];
        canonical_sign(out.vectors[i]);
    }
    return out;
}

double point_curvature(const std::array<double, 3>& eigenvalues, CurvatureMode mode, double eps) {
    const double l1 = std::max(0.0, eigenvalues[0]);
    const double l2 = std::max(0.0, eigenvalues[1]);
    const double l3 = std::max(0.0, eigenvalues[2]);
    const double sum = l1 + l2 + l3;
    if (mode == CurvatureMode::Literal) return sum / std::max(l1, eps);
    return l1 / std::max(sum, eps);
}

CurvatureField curvature_field(const PointCloud& cloud, const NeighborIndex& index, std::size_t k,
                               CurvatureMode mode, double eps, std::size_t workers) {
    const std::size_t ks[1] = {k};
    return multi_scale_curvature(cloud, index, ks, mode, eps, workers).column(0);
}

CurvatureField curvature_field(const PointCloud& cloud, std::size_t k, CurvatureMode mode,
                               double eps) {
    if (k < 2 || k > cloud.size()) {
        throw ArgumentError("curvature needs 2 <= k <= N, got k = " + std::to_string(k));
    }
    const NeighborIndex index(cloud);
    return curvature_field(cloud, index, k, mode, eps, default_worker_count());
}

MultiScaleCurvature multi_scale_curvature(const PointCloud& cloud, const NeighborIndex& index,
                                          std::span<const std::size_t> ks, CurvatureMode mode,
                                          double eps, std::size_t workers) {
    if (ks.empty()) throw ArgumentError("multi-scale curvature needs at least one k");
    for (std::size_t s = 0; s < ks.size(); ++s) {
        if (ks[s] < 2 || ks[s] > cloud.size()) {
            throw ArgumentError("curvature needs 2 <= k <= N, got k = " + std::to_string(ks[s]));
        }
        if (s > 0 && ks[s] <= ks[s - 1]) throw ArgumentError("scale list must be strictly ascending");
    }
    if (index.size() != cloud.size()) throw ArgumentError("index does not match the cloud");

    MultiScaleCurvature out;
    out.ks.assign(ks.begin(), ks.end());
    out.n = cloud.size();
    out.mode = mode;
    out.values.resize(out.n * ks.size());
    const std::size_t kmax = ks.back();
    const std::size_t scales = ks.size();
    const auto pts = cloud.points();
    parallel_for(out.n, workers, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const auto nb = index.knn(i, kmax, true);
            for (std::size_t s = 0; s < scales; ++s) {
                const Mat3 c = covariance_of(pts, std::span(nb.data(), ks[s]));
                out.values[i * scales + s] = point_curvature(eig3_sym(c).values, mode, eps);
            }
        }
    });
    return out;
}

MultiScaleCurvature multi_scale_curvature(const PointCloud& cloud, std::span<const std::size_t> ks,
                                          CurvatureMode mode, double eps) {
    const NeighborIndex index(cloud);
    return multi_scale_curvature(cloud, index, ks, mode, eps, default_worker_count());
}

std::vector<Vec3> normals(const PointCloud& cloud, const NeighborIndex& index, std::size_t k) {
    if (k < 3 || k > cloud.size()) {
        throw ArgumentError("normals need 3 <= k <= N, got k = " + std::to_string(k));
    }
    std::vector<Vec3> out(cloud.size());
    const auto pts = cloud.points();
    parallel_for(cloud.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const auto nb = index.knn(i, k, true);
            out[i] = eig3_sym(covariance_of(pts, nb)).vectors[0];
        }
    });
    return out;
}

std::vector<Vec3> normals(const PointCloud& cloud, std::size_t k) {
    const NeighborIndex index(cloud);
    return normals(cloud, index, k);
}

}  // namespace curvad
