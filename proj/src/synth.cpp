#include "curvad/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "curvad/curvature.hpp"
#include "curvad/error.hpp"
#include "curvad/neighbors.hpp"
#include "curvad/random.hpp"
#include "text_util.hpp"

namespace curvad {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Plastic number; (1/g, 1/g^2) drives the R2 low-discrepancy sequence.
constexpr double kPlastic = 1.32471795724474602596;

double frac(double x) { return x - std::floor(x); }

struct Lattice2 {
    double off0, off1;
    double at0(std::size_t i) const { return frac(off0 + static_cast<double>(i) / kPlastic); }
    double at1(std::size_t i) const {
        return frac(off1 + static_cast<double>(i) / (kPlastic * kPlastic));
    }
};

// Uniform random rotation from a unit quaternion.
std::array<Vec3, 3> random_rotation(Rng& rng) {
    const double u1 = rng.uniform(), u2 = rng.uniform(), u3 = rng.uniform();
    const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
    const double w = a * std::sin(kTwoPi * u2), x = a * std::cos(kTwoPi * u2);
    const double y = b * std::sin(kTwoPi * u3), z = b * std::cos(kTwoPi * u3);
    return {Vec3{1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)},
            Vec3{2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)},
            Vec3{2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)}};
}

// Inverse CDF of the torus tube angle, density proportional to R + r cos v.
double torus_tube_angle(double t) {
    const double R = kTorusMajorRadius, r = kTorusMinorRadius;
    const double target = t * kTwoPi * R;
    double lo = 0.0, hi = kTwoPi, v = kTwoPi * t;
    for (int it = 0; it < 60; ++it) {
        const double f = R * v + r * std::sin(v) - target;
        if (f > 0.0) hi = v; else lo = v;
        const double df = R + r * std::cos(v);
        double next = v - f / df;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - v) < 1e-15) {
            v = next;
            break;
        }
        v = next;
    }
    return v;
}

}  // namespace

ShapeKind parse_shape_kind(std::string_view name) {
    if (name == "sphere") return ShapeKind::Sphere;
    if (name == "plane") return ShapeKind::Plane;
    if (name == "torus") return ShapeKind::Torus;
    if (name == "cylinder") return ShapeKind::Cylinder;
    throw ArgumentError("unknown shape '" + std::string(name) + "' (sphere, plane, torus, cylinder)");
}

std::string_view to_string(ShapeKind kind) noexcept {
    switch (kind) {
        case ShapeKind::Sphere: return "sphere";
        case ShapeKind::Plane: return "plane";
        case ShapeKind::Torus: return "torus";
        case ShapeKind::Cylinder: return "cylinder";
    }
    return "sphere";
}

PointCloud make_shape(ShapeKind kind, std::size_t n, double noise_sigma, std::uint64_t seed) {
    if (n < 16) throw ArgumentError("make_shape needs n >= 16, got " + std::to_string(n));
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
        throw ArgumentError("noise sigma must be a finite non-negative number");
    }
    Rng rng(seed);
    const Lattice2 lattice{rng.uniform(), rng.uniform()};
    std::vector<Vec3> pts(n);
    const double dn = static_cast<double>(n);
    switch (kind) {
        case ShapeKind::Sphere: {
            // Fibonacci sphere under a seeded rotation.
            const auto rot = random_rotation(rng);
            const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
            const double phase = kTwoPi * lattice.off0;
            for (std::size_t i = 0; i < n; ++i) {
                const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / dn;
                const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
                const double phi = golden * static_cast<double>(i) + phase;
                const Vec3 p{r * std::cos(phi), r * std::sin(phi), z};
                pts[i] = {dot(rot[0], p), dot(rot[1], p), dot(rot[2], p)};
            }
            break;
        }
        case ShapeKind::Plane:
            for (std::size_t i = 0; i < n; ++i) {
                pts[i] = {kPlaneHalfExtent * (2.0 * lattice.at0(i) - 1.0),
                          kPlaneHalfExtent * (2.0 * lattice.at1(i) - 1.0), 0.0};
            }
            break;
        case ShapeKind::Torus:
            for (std::size_t i = 0; i < n; ++i) {
                const double u = kTwoPi * lattice.at0(i);
                const double v = torus_tube_angle(lattice.at1(i));
                const double ring = kTorusMajorRadius + kTorusMinorRadius * std::cos(v);
                pts[i] = {ring * std::cos(u), ring * std::sin(u), kTorusMinorRadius * std::sin(v)};
            }
            break;
        case ShapeKind::Cylinder:
            for (std::size_t i = 0; i < n; ++i) {
                const double t = kTwoPi * lattice.at0(i);
                pts[i] = {kCylinderRadius * std::cos(t), kCylinderRadius * std::sin(t),
                          kCylinderHalfHeight * (2.0 * lattice.at1(i) - 1.0)};
            }
            break;
    }
    if (noise_sigma > 0.0) {
        for (Vec3& p : pts) {
            for (double& c : p) c += noise_sigma * rng.normal();
        }
    }
    return PointCloud(std::move(pts));
}

void PseudoAnomalyConfig::validate(std::size_t n) const {
    if (num_patches < 1 || max_selected < 1 || max_selected > num_patches) {
        throw ArgumentError("need 1 <= max_selected <= num_patches");
    }
    if (num_patches > n) {
        throw ArgumentError("num_patches (" + std::to_string(num_patches) +
                            ") exceeds the point count (" + std::to_string(n) + ")");
    }
    if (!(displacement_lo > 0.0 && displacement_lo <= displacement_hi && displacement_hi < 1.0)) {
        throw ArgumentError("displacement range must satisfy 0 < lo <= hi < 1");
    }
    if (normal_k < 3 || normal_k > n) throw ArgumentError("normal_k must be in [3, N]");
}

std::string Provenance::to_text() const {
    using detail::format_double;
    std::string out;
    out += "seed=" + std::to_string(seed) + "\n";
    out += "num_patches=" + std::to_string(num_patches) + "\n";
    out += "diagonal=" + format_double(diagonal) + "\n";
    out += "selected=";
    for (std::size_t i = 0; i < patches.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(patches[i].patch);
    }
    out += "\n";
    for (const auto& p : patches) {
        const std::string key = "patch." + std::to_string(p.patch) + ".";
        out += key + "points=" + std::to_string(p.point_count) + "\n";
        out += key + "magnitude=" + format_double(p.magnitude) + "\n";
        out += key + "sign=" + std::to_string(p.sign) + "\n";
        out += key + "direction=" + format_double(p.direction[0]) + "," +
               format_double(p.direction[1]) + "," + format_double(p.direction[2]) + "\n";
        out += key + "displacement=" + format_double(p.displacement[0]) + "," +
               format_double(p.displacement[1]) + "," + format_double(p.displacement[2]) + "\n";
    }
    return out;
}

double bounding_diagonal(const PointCloud& cloud) {
    Vec3 lo = cloud[0], hi = cloud[0];
    for (const Vec3& p : cloud.points()) {
        for (int c = 0; c < 3; ++c) {
            lo[c] = std::min(lo[c], p[c]);
            hi[c] = std::max(hi[c], p[c]);
        }
    }
    return norm(hi - lo);
}

std::vector<std::uint32_t> partition_patches(const PointCloud& cloud, std::size_t num_patches,
                                             std::uint64_t seed) {
    const auto centers = farthest_point_sample(cloud, num_patches, seed);
    std::vector<Vec3> center_pts;
    center_pts.reserve(centers.size());
    for (auto c : centers) center_pts.push_back(cloud[c]);
    const NeighborIndex center_index{PointCloud(std::move(center_pts))};
    std::vector<std::uint32_t> patch(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) patch[i] = center_index.knn_at(cloud[i], 1)[0];
    return patch;
}

LabeledCloud generate_pseudo_anomaly(const PointCloud& cloud, const PseudoAnomalyConfig& cfg) {
    cfg.validate(cloud.size());
    Rng rng(cfg.seed);
    const auto patch_of = partition_patches(cloud, cfg.num_patches, rng.fork());
    const auto nrm = normals(cloud, cfg.normal_k);
    const double diag = bounding_diagonal(cloud);

    std::vector<std::vector<std::uint32_t>> members(cfg.num_patches);
    for (std::size_t i = 0; i < patch_of.size(); ++i) members[patch_of[i]].push_back(static_cast<std::uint32_t>(i));

    const std::size_t want = 1 + rng.uniform_index(cfg.max_selected);
    std::vector<std::size_t> order(cfg.num_patches);
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order);

    std::vector<Vec3> pts(cloud.points().begin(), cloud.points().end());
    std::vector<std::uint8_t> labels(cloud.size(), 0);
    Provenance prov{cfg.seed, cfg.num_patches, diag, {}};
    std::size_t failures = 0;
    for (std::size_t candidate : order) {
        if (prov.patches.size() == want) break;
        const auto& mem = members[candidate];
        Vec3 sum{0.0, 0.0, 0.0};
        if (!mem.empty()) {
            // Point normals carry no global orientation; align them to the first member.
            const Vec3& ref = nrm[mem.front()];
            for (auto i : mem) sum = dot(nrm[i], ref) >= 0.0 ? sum + nrm[i] : sum - nrm[i];
        }
        const double len = norm(sum);
        if (mem.empty() || !(len > 1e-12 * static_cast<double>(mem.size()))) {
            if (++failures > 16) {
                throw ValidationError("pseudo-anomaly generation: 16 patches had degenerate normals");
            }
            continue;
        }
        PatchDisplacement d;
        d.patch = candidate;
        d.point_count = mem.size();
        d.direction = (1.0 / len) * sum;
        d.magnitude = diag * rng.uniform(cfg.displacement_lo, cfg.displacement_hi);
        d.sign = (rng.next_u64() >> 63) ? 1 : -1;
        d.displacement = (static_cast<double>(d.sign) * d.magnitude) * d.direction;
        for (auto i : mem) {
            pts[i] = pts[i] + d.displacement;
            labels[i] = 1;
        }
        prov.patches.push_back(d);
    }
    if (prov.patches.empty()) {
        throw ValidationError("pseudo-anomaly generation found no usable patch");
    }
    return {PointCloud(std::move(pts)), LabelSet(std::move(labels)), std::move(prov)};
}

}  // namespace curvad
