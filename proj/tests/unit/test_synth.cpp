#include <doctest.h>

#include <set>

#include "curvad/error.hpp"
#include "curvad/synth.hpp"
#include "oracles.hpp"

using namespace curvad;

TEST_CASE("make_shape surfaces") {
    const auto sphere = make_shape(ShapeKind::Sphere, 1024, 0.0, 3);
    for (const auto& p : sphere.points()) CHECK(std::abs(norm(p) - 1.0) < 1e-9);
    const auto plane = make_shape(ShapeKind::Plane, 1024, 0.0, 3);
    for (const auto& p : plane.points()) {
        CHECK(p[2] == 0.0);
        CHECK(std::abs(p[0]) <= kPlaneHalfExtent);
    }
    const auto torus = make_shape(ShapeKind::Torus, 4096, 0.0, 3);
    for (const auto& p : torus.points()) {
        const double ring = std::hypot(p[0], p[1]) - kTorusMajorRadius;
        CHECK(std::abs(std::hypot(ring, p[2]) - kTorusMinorRadius) < 1e-9);
    }
    const auto cyl = make_shape(ShapeKind::Cylinder, 1024, 0.0, 3);
    for (const auto& p : cyl.points()) {
        CHECK(std::abs(std::hypot(p[0], p[1]) - kCylinderRadius) < 1e-9);
        CHECK(std::abs(p[2]) <= kCylinderHalfHeight);
    }
}

TEST_CASE("make_shape determinism, noise and errors") {
    CHECK(make_shape(ShapeKind::Torus, 500, 0.01, 9) == make_shape(ShapeKind::Torus, 500, 0.01, 9));
    CHECK_FALSE(make_shape(ShapeKind::Sphere, 500, 0.0, 1) == make_shape(ShapeKind::Sphere, 500, 0.0, 2));
    const auto noisy = make_shape(ShapeKind::Plane, 20000, 0.05, 4);
    double s2 = 0.0;
    for (const auto& p : noisy.points()) s2 += p[2] * p[2];
    CHECK(std::sqrt(s2 / 20000) == doctest::Approx(0.05).epsilon(0.03));
    CHECK_THROWS_AS(make_shape(ShapeKind::Sphere, 15, 0.0, 0), ArgumentError);
    CHECK_THROWS_AS(make_shape(ShapeKind::Sphere, 100, -1.0, 0), ArgumentError);
    CHECK_THROWS_AS(parse_shape_kind("cube"), ArgumentError);
    CHECK(parse_shape_kind("torus") == ShapeKind::Torus);
}

TEST_CASE("sphere points are quasi-uniform") {
    // every octant gets close to an eighth of the points
    const auto sphere = make_shape(ShapeKind::Sphere, 4096, 0.0, 8);
    std::array<int, 8> oct{};
    for (const auto& p : sphere.points()) oct[(p[0] > 0) + 2 * (p[1] > 0) + 4 * (p[2] > 0)]++;
    for (int c : oct) CHECK(std::abs(c - 512) < 40);
}

TEST_CASE("partition_patches") {
    const auto cloud = make_shape(ShapeKind::Sphere, 2048, 0.0, 1);
    const auto ids = partition_patches(cloud, 64, 5);
    std::vector<int> count(64, 0);
    for (auto id : ids) {
        REQUIRE(id < 64);
        count[id]++;
    }
    for (int c : count) CHECK(c > 0);
    CHECK(ids == partition_patches(cloud, 64, 5));
}

TEST_CASE("pseudo anomaly contract") {
    const auto cloud = make_shape(ShapeKind::Sphere, 2048, 0.0, 1);
    const double diag = bounding_diagonal(cloud);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        PseudoAnomalyConfig cfg;
        cfg.seed = seed;
        const auto lc = generate_pseudo_anomaly(cloud, cfg);
        REQUIRE(lc.cloud.size() == cloud.size());
        REQUIRE(lc.labels.size() == cloud.size());
        const auto& prov = lc.provenance;
        CHECK(prov.patches.size() >= 1);
        CHECK(prov.patches.size() <= cfg.max_selected);
        std::size_t expected = 0;
        for (const auto& p : prov.patches) {
            expected += p.point_count;
            CHECK(p.magnitude >= cfg.displacement_lo * diag);
            CHECK(p.magnitude <= cfg.displacement_hi * diag);
            CHECK(std::abs(norm(p.direction) - 1.0) < 1e-12);
        }
        CHECK(lc.labels.count_anomalous() == expected);
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            if (lc.labels[i] == 0) {
                CHECK(lc.cloud[i] == cloud[i]);
            } else {
                const double d = norm(lc.cloud[i] - cloud[i]);
                CHECK(d >= cfg.displacement_lo * diag * (1 - 1e-12));
                CHECK(d <= cfg.displacement_hi * diag * (1 + 1e-12));
            }
        }
    }
}

TEST_CASE("forced magnitude") {
    const auto cloud = make_shape(ShapeKind::Torus, 2048, 0.0, 2);
    const double diag = bounding_diagonal(cloud);
    PseudoAnomalyConfig cfg;
    cfg.max_selected = 1;
    cfg.displacement_lo = cfg.displacement_hi = 0.03;
    cfg.seed = 44;
    const auto lc = generate_pseudo_anomaly(cloud, cfg);
    REQUIRE(lc.provenance.patches.size() == 1);
    const Vec3 shift = lc.provenance.patches[0].displacement;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (!lc.labels[i]) continue;
        const Vec3 d = lc.cloud[i] - cloud[i];
        CHECK(std::abs(norm(d) - 0.03 * diag) < 1e-9);
        // one rigid shift per patch
        CHECK(norm(d - shift) < 1e-12);
    }
}

TEST_CASE("pseudo anomaly determinism and seed sensitivity") {
    const auto cloud = make_shape(ShapeKind::Sphere, 1024, 0.0, 1);
    PseudoAnomalyConfig cfg;
    cfg.seed = 3;
    const auto a = generate_pseudo_anomaly(cloud, cfg);
    const auto b = generate_pseudo_anomaly(cloud, cfg);
    CHECK(a.cloud == b.cloud);
    CHECK(a.labels == b.labels);
    CHECK(a.provenance.to_text() == b.provenance.to_text());
    int differ = 0;
    for (std::uint64_t t = 0; t < 100; ++t) {
        PseudoAnomalyConfig c1 = cfg, c2 = cfg;
        c1.seed = 2 * t + 100;
        c2.seed = 2 * t + 101;
        std::set<std::size_t> s1, s2;
        for (const auto& p : generate_pseudo_anomaly(cloud, c1).provenance.patches) s1.insert(p.patch);
        for (const auto& p : generate_pseudo_anomaly(cloud, c2).provenance.patches) s2.insert(p.patch);
        differ += s1 != s2;
    }
    CHECK(differ > 90);
}

TEST_CASE("config validation") {
    PseudoAnomalyConfig cfg;
    CHECK_THROWS_AS(generate_pseudo_anomaly(make_shape(ShapeKind::Sphere, 50, 0.0, 1), cfg), ArgumentError);
    cfg.num_patches = 10;
    cfg.displacement_lo = 0.0;
    CHECK_THROWS_AS(cfg.validate(100), ArgumentError);
    cfg.displacement_lo = 0.06;
    CHECK_THROWS_AS(cfg.validate(100), ArgumentError);
    cfg.displacement_lo = 0.01;
    cfg.max_selected = 11;
    CHECK_THROWS_AS(cfg.validate(100), ArgumentError);
    cfg.max_selected = 3;
    CHECK_NOTHROW(cfg.validate(100));
    CHECK_THROWS_AS(cfg.validate(9), ArgumentError);
}

TEST_CASE("provenance text") {
    const auto cloud = make_shape(ShapeKind::Sphere, 512, 0.0, 1);
    PseudoAnomalyConfig cfg;
    cfg.seed = 9;
    const auto text = generate_pseudo_anomaly(cloud, cfg).provenance.to_text();
    CHECK(text.find("seed=9\n") != std::string::npos);
    CHECK(text.find("selected=") != std::string::npos);
    CHECK(text.find(".displacement=") != std::string::npos);
}
