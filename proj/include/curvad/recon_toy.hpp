#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "curvad/curvature.hpp"
#include "curvad/point_cloud.hpp"
#include "curvad/scoring.hpp"
#include "curvad/synth.hpp"

// Desk-scale curvature-prompted masked reconstruction. A per-point MLP
// reconstructs normalized coordinates from (possibly masked) coordinates plus
// multi-scale curvature prompts; a small classification head is then trained
// on pseudo-anomalies and feeds the log-ratio point score.
namespace curvad::toy {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::RowVectorXd;

struct TrainConfig {
    double mask_ratio = 1.0;
    bool use_prompts = true;
    // false hides the coordinate channel in fine-tuning as well (variant C)
    bool use_coords = true;
    std::vector<std::size_t> ks{8, 16, 32};
    double learning_rate = 1e-2;
    std::size_t epochs = 200;
    double lr_decay_factor = 0.5;
    std::size_t lr_decay_interval = 50;
    std::size_t batch_size = 1;
    std::size_t hidden = 64;
    std::uint64_t seed = 0;

    void validate() const;
    std::size_t feature_count() const noexcept { return 3 + 2 * ks.size(); }
};

enum class AblationVariant { A, B, C, D };

AblationVariant parse_variant(std::string_view name);
std::string_view to_string(AblationVariant v) noexcept;
/// A: coords, no mask, no prompts. B: coords, 60% mask, no prompts.
/// C: prompts only, coordinate channel hidden. D: full mask + prompts.
TrainConfig apply_variant(TrainConfig base, AblationVariant v);

/// Columns: [0,3) coordinates, [3,3+S) prompts, [3+S,3+2S) prompts averaged
/// over each point's neighborhood at the largest scale.
struct FeatureMatrix {
    Matrix values;
    std::size_t scales = 0;
    std::vector<std::uint8_t> masked;   // 1 where the coordinate row is zeroed

    std::size_t rows() const noexcept { return static_cast<std::size_t>(values.rows()); }
    std::size_t cols() const noexcept { return static_cast<std::size_t>(values.cols()); }
};

/// Features of the normalized cloud. ceil(m * N) rows chosen by cfg.seed get
/// zeroed coordinates; prompt columns are zero when use_prompts is false.
FeatureMatrix featurize(const PointCloud& cloud, const TrainConfig& cfg);
/// Unmasked features plus the normalized coordinates (the reconstruction target).
FeatureMatrix featurize_unmasked(const PointCloud& cloud, const TrainConfig& cfg, Matrix* target);
/// Zeroes ceil(ratio * N) coordinate rows drawn from `seed`.
void apply_mask(FeatureMatrix& feats, double ratio, std::uint64_t seed);

struct Dense {
    Matrix weight;   // in x out
    RowVector bias;  // out
};

struct ToyModelParams {
    std::size_t features = 0;
    std::size_t hidden = 0;
    // Fixed per-column standardization of the feature input (not trained).
    RowVector input_shift;
    RowVector input_scale;
    Dense recon1, recon2, recon3;   // F -> H -> H -> 3
    Dense class1, class2;           // F+3 -> H -> 2

    static ToyModelParams zeros(std::size_t features, std::size_t hidden);
    /// Xavier-uniform weights, zero biases, identity standardization.
    static ToyModelParams initialize(std::size_t features, std::size_t hidden, std::uint64_t seed);

    std::vector<Dense*> layers();
    std::vector<const Dense*> layers() const;
    std::size_t parameter_count() const;
    bool all_finite() const;
};

struct ForwardResult {
    Matrix standardized;   // N x F
    Matrix hidden1, hidden2;
    Matrix pred;           // N x 3 reconstructed coordinates
    Matrix class_hidden;
    Matrix logits;         // N x 2
    Matrix probs;          // softmax(logits)
};

/// tanh hidden layers, linear outputs. The classification head consumes the
/// standardized features concatenated with the reconstruction, i.e. the
/// three learned features. Throws ArgumentError on shape mismatch.
ForwardResult forward(const ToyModelParams& params, const Matrix& feats, bool with_classifier = true);

/// mean |d| + mean d^2 over all N x 3 residual entries.
double recon_loss(const Matrix& pred, const Matrix& gt);
/// Mean per-point cross-entropy of softmax(logits) against 0/1 labels.
double classification_loss(const Matrix& logits, std::span<const std::uint8_t> labels);

struct Gradients {
    double loss = 0.0;
    ToyModelParams grad;   // same shapes as the parameters; untouched layers are zero
};

/// Exact gradient of weight * recon_loss w.r.t. the reconstruction layers.
/// The l1 subgradient at a zero residual is 0.
Gradients backward_reconstruction(const ToyModelParams& params, const Matrix& feats,
                                  const Matrix& gt, double weight = 1.0);
/// Exact gradient of weight * classification_loss w.r.t. the classification
/// head, and through the reconstruction layers when `through_backbone`.
Gradients backward_classifier(const ToyModelParams& params, const Matrix& feats,
                              std::span<const std::uint8_t> labels, bool through_backbone,
                              double weight = 1.0);

struct TrainResult {
    ToyModelParams params;
    std::vector<double> loss_curve;   // mean loss per epoch
};

/// Adam (0.9, 0.999, 1e-8) on the reconstruction objective; lr halves (by
/// cfg factor) every cfg interval epochs. Throws TrainingError on a
/// non-finite loss, naming the epoch.
TrainResult train_reconstruction(std::span<const PointCloud> clouds, const TrainConfig& cfg);

/// Trains the classification head on unmasked features with the backbone frozen.
TrainResult finetune_classifier(const ToyModelParams& pretrained,
                                std::span<const LabeledCloud> labeled, const TrainConfig& cfg,
                                std::size_t epochs);

ClassProbabilities predict_probabilities(const ToyModelParams& params, const PointCloud& cloud,
                                         const TrainConfig& cfg);
AnomalyScoreSet score_cloud(const ToyModelParams& params, const PointCloud& cloud,
                            const TrainConfig& cfg, double rate = kDefaultAggregationRate,
                            double eps = kDefaultLogitEps);
/// Reconstruction loss of one cloud under cfg's masking (mask drawn from `seed`).
double evaluate_reconstruction(const ToyModelParams& params, const PointCloud& cloud,
                               const TrainConfig& cfg, std::uint64_t seed);

// Little-endian float64 array after a key=value header terminated by
// "end_header". The header carries the shape manifest and a config echo.
void save_model(const ToyModelParams& params, const TrainConfig& cfg,
                const std::filesystem::path& path,
                const std::map<std::string, std::string>& extra = {});
struct LoadedModel {
    ToyModelParams params;
    TrainConfig cfg;
    std::map<std::string, std::string> header;
};
LoadedModel load_model(const std::filesystem::path& path);

// --- ablation ------------------------------------------------------------

struct BenchmarkSettings {
    ShapeKind shape = ShapeKind::Sphere;
    std::size_t points = 1024;
    double noise_sigma = 0.0;
    std::size_t train_clouds = 4;
    std::size_t pseudo_per_cloud = 4;
    std::size_t eval_clouds = 10;   // this many anomalous and as many clean
    std::size_t finetune_epochs = 60;
    double rate = kDefaultAggregationRate;
    PseudoAnomalyConfig synth{};
    TrainConfig train{};
};

struct AblationRow {
    std::string label;
    std::uint64_t seed = 0;
    double mask_ratio = 0.0;
    bool use_prompts = false;
    bool use_coords = true;
    double o_auroc = 0.0;
    double p_auroc = 0.0;
    double recon_loss = 0.0;
};

struct AblationReport {
    std::vector<AblationRow> rows;

    /// Rows averaged per label, in first-appearance order.
    std::vector<AblationRow> means() const;
    std::string to_csv() const;
    std::string to_table() const;
};

/// One pretrain -> finetune -> held-out evaluation run.
AblationRow run_configuration(const std::string& label, const TrainConfig& cfg,
                              const BenchmarkSettings& bench, std::uint64_t seed);

AblationReport run_ablation(std::span<const AblationVariant> variants,
                            std::span<const std::uint64_t> seeds, const BenchmarkSettings& bench);

/// Prompts on, coordinates masked at each ratio.
AblationReport run_mask_sweep(std::span<const double> ratios, std::span<const std::uint64_t> seeds,
                              const BenchmarkSettings& bench);

}  // namespace curvad::toy
