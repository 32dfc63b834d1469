#include <doctest.h>

#include "curvad/error.hpp"
#include "curvad/metrics.hpp"
#include "oracles.hpp"

using namespace curvad;

namespace {
using Labels = std::vector<std::uint8_t>;

CloudEvaluation eval_of(std::string id, std::string cat, std::vector<double> s, Labels l, std::uint8_t obj) {
    return {std::move(id), std::move(cat), make_score_set(std::move(s), 0.5), LabelSet(std::move(l)), obj};
}
}  // namespace

TEST_CASE("auroc examples") {
    CHECK(auroc(std::vector<double>{0.9, 0.1}, Labels{1, 0}) == 1.0);
    CHECK(auroc(std::vector<double>{0.1, 0.9}, Labels{1, 0}) == 0.0);
    CHECK(auroc(std::vector<double>(6, 0.3), Labels{1, 0, 1, 0, 0, 1}) == 0.5);
    CHECK_THROWS_AS(auroc(std::vector<double>{1, 2}, Labels{1, 1}), UndefinedMetricError);
    CHECK_THROWS_AS(auroc(std::vector<double>{1, 2}, Labels{0, 0}), UndefinedMetricError);
    CHECK_THROWS_AS(auroc(std::vector<double>{1, 2}, Labels{0}), AlignmentError);
}

TEST_CASE("auroc against the pairwise oracle") {
    Rng rng(99);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 2 + rng.uniform_index(63);
        std::vector<double> s(n);
        Labels y(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = t % 3 == 0 ? std::floor(rng.uniform(0, 4)) : rng.normal();
            y[i] = rng.uniform() < 0.4;
        }
        y[0] = 1;
        y[1] = 0;
        if (n > 3) s[2] = s[3];
        const double got = auroc(s, y);
        CHECK(std::abs(got - oracle::pairwise_auroc(s, y)) <= 1e-12);
        // monotone transform
        std::vector<double> tr(n), neg(n);
        for (std::size_t i = 0; i < n; ++i) tr[i] = std::exp(0.5 * s[i]) + 3.0, neg[i] = -s[i];
        CHECK(auroc(tr, y) == got);
        CHECK(std::abs(auroc(neg, y) + got - 1.0) <= 1e-12);
    }
}

TEST_CASE("evaluate_dataset") {
    std::vector<CloudEvaluation> ev{
        eval_of("a", "cup", {0.1, 0.9, 0.8}, {0, 1, 1}, 1),
        eval_of("b", "cup", {0.1, 0.2, 0.1}, {0, 0, 0}, 0),
    };
    auto m = evaluate_dataset(ev);
    CHECK(m.o_auroc == 1.0);
    CHECK(m.p_auroc == 1.0);
    REQUIRE(m.categories.size() == 1);
    CHECK(m.mean_o_auroc == 1.0);

    ev.push_back(eval_of("c", "bowl", {0.5, 0.4}, {1, 0}, 1));
    ev.push_back(eval_of("d", "bowl", {0.6, 0.6}, {0, 0}, 0));
    m = evaluate_dataset(ev);
    std::vector<double> pooled;
    Labels pl;
    std::vector<double> objs;
    Labels ol;
    for (const auto& e : ev) {
        pooled.insert(pooled.end(), e.scores.point_scores.begin(), e.scores.point_scores.end());
        pl.insert(pl.end(), e.point_labels.values().begin(), e.point_labels.values().end());
        objs.push_back(e.scores.object_score);
        ol.push_back(e.object_label);
    }
    CHECK(m.p_auroc == auroc(pooled, pl));
    CHECK(m.o_auroc == auroc(objs, ol));
    REQUIRE(m.categories.size() == 2);
    CHECK(m.categories[0].category == "bowl");
    CHECK(m.categories[0].o_auroc == 0.0);
    CHECK(m.mean_o_auroc == 0.5);
    CHECK(m.to_csv().find("bowl,") != std::string::npos);
    CHECK(m.to_table().find("Mean") != std::string::npos);

    std::vector<CloudEvaluation> one_class{eval_of("a", "cup", {0.1, 0.9}, {0, 1}, 1)};
    CHECK_THROWS_AS(evaluate_dataset(one_class), UndefinedMetricError);
}
