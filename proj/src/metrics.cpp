#include "curvad/metrics.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <string>

#include "curvad/error.hpp"
#include "text_util.hpp"

namespace curvad {

double auroc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
    if (scores.size() != labels.size()) {
        throw AlignmentError("auroc: " + std::to_string(scores.size()) + " scores but " +
                             std::to_string(labels.size()) + " labels");
    }
    const std::size_t n = scores.size();
    std::size_t pos = 0;
    for (auto l : labels) {
        if (l > 1) throw ValidationError("auroc: labels must be 0 or 1");
        pos += l;
    }
    const std::size_t neg = n - pos;
    if (pos == 0 || neg == 0) {
        throw UndefinedMetricError("AUROC needs both normal and anomalous samples");
    }
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return scores[a] < scores[b] || (scores[a] == scores[b] && a < b);
    });
    // Sum of doubled mid-ranks of the positives; integers up to ~2^53.
    double twice_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i + 1;
        while (j < n && scores[idx[j]] == scores[idx[i]]) ++j;
        const double twice_mid = static_cast<double>(i + 1 + j);   // 2 * mean of ranks i+1..j
        std::size_t group_pos = 0;
        for (std::size_t t = i; t < j; ++t) group_pos += labels[idx[t]];
        twice_rank_sum += twice_mid * static_cast<double>(group_pos);
        i = j;
    }
    const double p = static_cast<double>(pos);
    const double u = (twice_rank_sum - p * (p + 1.0)) / 2.0;
    return u / (p * static_cast<double>(neg));
}

namespace {

struct Pooled {
    std::vector<double> object_scores;
    std::vector<std::uint8_t> object_labels;
    std::vector<double> point_scores;
    std::vector<std::uint8_t> point_labels;

    void add(const CloudEvaluation& c) {
        if (c.scores.point_scores.size() != c.point_labels.size()) {
            throw AlignmentError("cloud '" + c.cloud_id + "' has " +
                                 std::to_string(c.scores.point_scores.size()) + " scores but " +
                                 std::to_string(c.point_labels.size()) + " labels");
        }
        object_scores.push_back(c.scores.object_score);
        object_labels.push_back(c.object_label);
        point_scores.insert(point_scores.end(), c.scores.point_scores.begin(),
                            c.scores.point_scores.end());
        point_labels.insert(point_labels.end(), c.point_labels.values().begin(),
                            c.point_labels.values().end());
    }
};

}  // namespace

DatasetMetrics evaluate_dataset(std::span<const CloudEvaluation> clouds) {
    Pooled all;
    std::map<std::string, Pooled> by_category;
    for (const auto& c : clouds) {
        if (c.object_label > 1) throw ValidationError("object label must be 0 or 1");
        all.add(c);
        by_category[c.category].add(c);
    }
    DatasetMetrics m;
    m.o_auroc = auroc(all.object_scores, all.object_labels);
    m.p_auroc = auroc(all.point_scores, all.point_labels);
    for (const auto& [name, pooled] : by_category) {
        CategoryMetrics cm;
        cm.category = name;
        cm.clouds = pooled.object_scores.size();
        try {
            cm.o_auroc = auroc(pooled.object_scores, pooled.object_labels);
            cm.p_auroc = auroc(pooled.point_scores, pooled.point_labels);
        } catch (const UndefinedMetricError& e) {
            throw UndefinedMetricError("category '" + name + "': " + e.what());
        }
        m.mean_o_auroc += cm.o_auroc;
        m.mean_p_auroc += cm.p_auroc;
        m.categories.push_back(cm);
    }
    m.mean_o_auroc /= static_cast<double>(m.categories.size());
    m.mean_p_auroc /= static_cast<double>(m.categories.size());
    return m;
}

std::string DatasetMetrics::to_csv() const {
    using detail::format_double;
    std::string out = "category,clouds,o_auroc,p_auroc\n";
    std::size_t total = 0;
    for (const auto& c : categories) {
        out += c.category + "," + std::to_string(c.clouds) + "," + format_double(c.o_auroc) + "," +
               format_double(c.p_auroc) + "\n";
        total += c.clouds;
    }
    out += "mean," + std::to_string(total) + "," + format_double(mean_o_auroc) + "," +
           format_double(mean_p_auroc) + "\n";
    out += "pooled," + std::to_string(total) + "," + format_double(o_auroc) + "," +
           format_double(p_auroc) + "\n";
    return out;
}

std::string DatasetMetrics::to_table() const {
    using namespace detail;
    std::size_t width = 8;
    for (const auto& c : categories) width = std::max(width, c.category.size());
    const auto row = [&](const std::string& name, const std::string& o, const std::string& p) {
        return pad_right(name, width) + "  " + pad_left(o, 7) + "  " + pad_left(p, 7) + "\n";
    };
    std::string out = row("Category", "O-AUROC", "P-AUROC");
    out += std::string(width + 18, '-') + "\n";
    for (const auto& c : categories) {
        out += row(c.category, format_fixed(c.o_auroc, 3), format_fixed(c.p_auroc, 3));
    }
    out += std::string(width + 18, '-') + "\n";
    out += row("Mean", format_fixed(mean_o_auroc, 3), format_fixed(mean_p_auroc, 3));
    out += row("Pooled", format_fixed(o_auroc, 3), format_fixed(p_auroc, 3));
    return out;
}

}  // namespace curvad
