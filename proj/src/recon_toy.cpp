#include "curvad/recon_toy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numeric>
#include <sstream>
#include <string>

#include "curvad/cloud_io.hpp"
#include "curvad/error.hpp"
#include "curvad/metrics.hpp"
#include "curvad/neighbors.hpp"
#include "curvad/parallel.hpp"
#include "curvad/random.hpp"
#include "text_util.hpp"

namespace curvad::toy {
namespace {

void require_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols, const char* what) {
    if (m.rows() != rows || m.cols() != cols) {
        throw ArgumentError(std::string(what) + ": expected " + std::to_string(rows) + "x" +
                            std::to_string(cols) + ", got " + std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()));
    }
}

Dense dense_zeros(std::size_t in, std::size_t out) {
    return {Matrix::Zero(static_cast<Eigen::Index>(in), static_cast<Eigen::Index>(out)),
            RowVector::Zero(static_cast<Eigen::Index>(out))};
}

Dense dense_xavier(std::size_t in, std::size_t out, Rng& rng) {
    Dense d = dense_zeros(in, out);
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    for (Eigen::Index r = 0; r < d.weight.rows(); ++r) {
        for (Eigen::Index c = 0; c < d.weight.cols(); ++c) d.weight(r, c) = rng.uniform(-limit, limit);
    }
    return d;
}

Matrix affine(const Matrix& x, const Dense& d) {
    Matrix out = x * d.weight;
    out.rowwise() += d.bias;
    return out;
}

Matrix standardize(const ToyModelParams& p, const Matrix& feats) {
    Matrix s = feats;
    s.rowwise() -= p.input_shift;
    s.array().rowwise() *= p.input_scale.array();
    return s;
}

Matrix concat_cols(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows(), a.cols() + b.cols());
    out << a, b;
    return out;
}

Matrix softmax_rows(const Matrix& logits) {
    Matrix out(logits.rows(), logits.cols());
    for (Eigen::Index r = 0; r < logits.rows(); ++r) {
        const double mx = logits.row(r).maxCoeff();
        const auto e = (logits.row(r).array() - mx).exp();
        out.row(r) = e / e.sum();
    }
    return out;
}

struct HeadPass {
    Matrix hidden;
    Matrix logits;
};

HeadPass head_forward(const ToyModelParams& p, const Matrix& z) {
    HeadPass h;
    h.hidden = affine(z, p.class1).array().tanh().matrix();
    h.logits = affine(h.hidden, p.class2);
    return h;
}

// Gradient of weight * cross-entropy for the head given its input z.
// Returns d loss / d z.
Matrix head_backward(const ToyModelParams& p, const Matrix& z, const HeadPass& pass,
                     std::span<const std::uint8_t> labels, double weight, ToyModelParams& grad) {
    const auto n = pass.logits.rows();
    Matrix d_logits = softmax_rows(pass.logits);
    for (Eigen::Index i = 0; i < n; ++i) d_logits(i, labels[static_cast<std::size_t>(i)]) -= 1.0;
    d_logits *= weight / static_cast<double>(n);
    grad.class2.weight = pass.hidden.transpose() * d_logits;
    grad.class2.bias = d_logits.colwise().sum();
    const Matrix d_hidden =
        ((d_logits * p.class2.weight.transpose()).array() * (1.0 - pass.hidden.array().square())).matrix();
    grad.class1.weight = z.transpose() * d_hidden;
    grad.class1.bias = d_hidden.colwise().sum();
    return d_hidden * p.class1.weight.transpose();
}

void backbone_backward(const ToyModelParams& p, const ForwardResult& fr, const Matrix& d_pred,
                       ToyModelParams& grad) {
    grad.recon3.weight = fr.hidden2.transpose() * d_pred;
    grad.recon3.bias = d_pred.colwise().sum();
    const Matrix d_h2 = ((d_pred * p.recon3.weight.transpose()).array() *
                         (1.0 - fr.hidden2.array().square())).matrix();
    grad.recon2.weight = fr.hidden1.transpose() * d_h2;
    grad.recon2.bias = d_h2.colwise().sum();
    const Matrix d_h1 = ((d_h2 * p.recon2.weight.transpose()).array() *
                         (1.0 - fr.hidden1.array().square())).matrix();
    grad.recon1.weight = fr.standardized.transpose() * d_h1;
    grad.recon1.bias = d_h1.colwise().sum();
}

class Adam {
public:
    Adam(const ToyModelParams& shape, std::vector<std::size_t> trainable)
        : trainable_(std::move(trainable)) {
        for (const Dense* d : shape.layers()) {
            m_.push_back({Matrix::Zero(d->weight.rows(), d->weight.cols()),
                          RowVector::Zero(d->bias.size())});
            v_.push_back(m_.back());
        }
    }

    void step(ToyModelParams& params, const ToyModelParams& grad, double lr) {
        ++t_;
        const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
        const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
        auto layers = params.layers();
        const auto grads = grad.layers();
        for (std::size_t l : trainable_) {
            update(layers[l]->weight.array(), grads[l]->weight.array(), m_[l].weight.array(),
                   v_[l].weight.array(), lr, c1, c2);
            update(layers[l]->bias.array(), grads[l]->bias.array(), m_[l].bias.array(),
                   v_[l].bias.array(), lr, c1, c2);
        }
    }

private:
    static constexpr double kBeta1 = 0.9;
    static constexpr double kBeta2 = 0.999;
    static constexpr double kEps = 1e-8;

    template <class P, class G, class M, class V>
    static void update(P&& p, const G& g, M&& m, V&& v, double lr, double c1, double c2) {
        m = kBeta1 * m + (1.0 - kBeta1) * g;
        v = kBeta2 * v + (1.0 - kBeta2) * g.square();
        p -= lr * (m / c1) / ((v / c2).sqrt() + kEps);
    }

    std::vector<std::size_t> trainable_;
    std::vector<Dense> m_, v_;
    long t_ = 0;
};

constexpr std::size_t kRecon1 = 0, kRecon2 = 1, kRecon3 = 2, kClass1 = 3, kClass2 = 4;

double decayed_lr(const TrainConfig& cfg, std::size_t epoch) {
    return cfg.learning_rate *
           std::pow(cfg.lr_decay_factor, static_cast<double>(epoch / cfg.lr_decay_interval));
}

void accumulate(ToyModelParams& into, const ToyModelParams& g, double w) {
    auto dst = into.layers();
    const auto src = g.layers();
    for (std::size_t l = 0; l < dst.size(); ++l) {
        dst[l]->weight += w * src[l]->weight;
        dst[l]->bias += w * src[l]->bias;
    }
}

void set_standardization(ToyModelParams& p, std::span<const FeatureMatrix> feats) {
    const auto f = static_cast<Eigen::Index>(p.features);
    RowVector sum = RowVector::Zero(f);
    RowVector sq = RowVector::Zero(f);
    double rows = 0.0;
    for (const auto& fm : feats) {
        sum += fm.values.colwise().sum();
        rows += static_cast<double>(fm.values.rows());
    }
    const RowVector mean = sum / rows;
    for (const auto& fm : feats) sq += (fm.values.rowwise() - mean).array().square().matrix().colwise().sum();
    p.input_shift = mean;
    for (Eigen::Index c = 0; c < f; ++c) {
        const double sd = std::sqrt(sq(c) / rows);
        p.input_scale(c) = sd > 1e-12 ? 1.0 / sd : 1.0;
        if (!(sd > 1e-12)) p.input_shift(c) = 0.0;
    }
}

std::string join_ks(const std::vector<std::size_t>& ks) {
    std::string s;
    for (std::size_t i = 0; i < ks.size(); ++i) s += (i ? "," : "") + std::to_string(ks[i]);
    return s;
}

}  // namespace

// --- config ----------------------------------------------------------------

void TrainConfig::validate() const {
    if (!(mask_ratio >= 0.0 && mask_ratio <= 1.0)) throw ArgumentError("mask ratio must lie in [0, 1]");
    if (epochs < 1) throw ArgumentError("epochs must be >= 1");
    if (ks.empty()) throw ArgumentError("scale list must not be empty");
    for (std::size_t s = 0; s < ks.size(); ++s) {
        if (ks[s] < 2 || (s > 0 && ks[s] <= ks[s - 1])) {
            throw ArgumentError("scale list must be strictly ascending with k >= 2");
        }
    }
    if (!(learning_rate > 0.0)) throw ArgumentError("learning rate must be positive");
    if (!(lr_decay_factor > 0.0 && lr_decay_factor <= 1.0)) {
        throw ArgumentError("lr decay factor must lie in (0, 1]");
    }
    if (lr_decay_interval < 1) throw ArgumentError("lr decay interval must be >= 1");
    if (batch_size < 1) throw ArgumentError("batch size must be >= 1");
    if (hidden < 1) throw ArgumentError("hidden width must be >= 1");
}

AblationVariant parse_variant(std::string_view name) {
    if (name == "A" || name == "a") return AblationVariant::A;
    if (name == "B" || name == "b") return AblationVariant::B;
    if (name == "C" || name == "c") return AblationVariant::C;
    if (name == "D" || name == "d") return AblationVariant::D;
    throw ArgumentError("unknown ablation variant '" + std::string(name) + "' (A, B, C, D)");
}

std::string_view to_string(AblationVariant v) noexcept {
    switch (v) {
        case AblationVariant::A: return "A";
        case AblationVariant::B: return "B";
        case AblationVariant::C: return "C";
        case AblationVariant::D: return "D";
    }
    return "D";
}

TrainConfig apply_variant(TrainConfig base, AblationVariant v) {
    switch (v) {
        case AblationVariant::A:
            base.mask_ratio = 0.0, base.use_prompts = false, base.use_coords = true;
            break;
        case AblationVariant::B:
            base.mask_ratio = 0.6, base.use_prompts = false, base.use_coords = true;
            break;
        case AblationVariant::C:
            base.mask_ratio = 1.0, base.use_prompts = true, base.use_coords = false;
            break;
        case AblationVariant::D:
            base.mask_ratio = 1.0, base.use_prompts = true, base.use_coords = true;
            break;
    }
    return base;
}

// --- features --------------------------------------------------------------

FeatureMatrix featurize_unmasked(const PointCloud& cloud, const TrainConfig& cfg, Matrix* target) {
    cfg.validate();
    const std::size_t n = cloud.size();
    const std::size_t s_count = cfg.ks.size();
    if (cfg.ks.back() > n) {
        throw ArgumentError("largest scale k = " + std::to_string(cfg.ks.back()) +
                            " exceeds the point count " + std::to_string(n));
    }
    const auto normalized = normalize_cloud(cloud).first;
    FeatureMatrix fm;
    fm.scales = s_count;
    fm.values = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cfg.feature_count()));
    fm.masked.assign(n, 0);
    if (target) *target = Matrix(static_cast<Eigen::Index>(n), 3);
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        for (int c = 0; c < 3; ++c) {
            if (cfg.use_coords) fm.values(r, c) = normalized[i][c];
            if (target) (*target)(r, c) = normalized[i][c];
        }
    }
    if (cfg.use_prompts) {
        const NeighborIndex index(normalized);
        const auto prompts = multi_scale_curvature(normalized, index, cfg.ks, CurvatureMode::Variation,
                                                   kDefaultCurvatureEps, default_worker_count());
        const std::size_t kmax = cfg.ks.back();
        const auto nb = index.knn_all(kmax, true);
        for (std::size_t i = 0; i < n; ++i) {
            const auto r = static_cast<Eigen::Index>(i);
            for (std::size_t s = 0; s < s_count; ++s) {
                fm.values(r, static_cast<Eigen::Index>(3 + s)) = prompts.at(i, s);
                double sum = 0.0;
                for (std::size_t j = 0; j < kmax; ++j) sum += prompts.at(nb[i * kmax + j], s);
                fm.values(r, static_cast<Eigen::Index>(3 + s_count + s)) = sum / static_cast<double>(kmax);
            }
        }
    }
    return fm;
}

void apply_mask(FeatureMatrix& feats, double ratio, std::uint64_t seed) {
    if (!(ratio >= 0.0 && ratio <= 1.0)) throw ArgumentError("mask ratio must lie in [0, 1]");
    const std::size_t n = feats.rows();
    // The small slack keeps e.g. 0.6 * 100 at 60 despite binary rounding.
    const auto count = std::min<std::size_t>(
        n, static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(n) - 1e-9)));
    std::vector<std::size_t> rows(n);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    if (count < n) {
        Rng rng(seed);
        rng.shuffle(rows);
    }
    feats.masked.assign(n, 0);
    for (std::size_t i = 0; i < count; ++i) {
        const auto r = static_cast<Eigen::Index>(rows[i]);
        feats.values.block(r, 0, 1, 3).setZero();
        feats.masked[rows[i]] = 1;
    }
}

FeatureMatrix featurize(const PointCloud& cloud, const TrainConfig& cfg) {
    FeatureMatrix fm = featurize_unmasked(cloud, cfg, nullptr);
    apply_mask(fm, cfg.mask_ratio, cfg.seed);
    return fm;
}

// --- parameters ------------------------------------------------------------

ToyModelParams ToyModelParams::zeros(std::size_t features, std::size_t hidden) {
    ToyModelParams p;
    p.features = features;
    p.hidden = hidden;
    p.input_shift = RowVector::Zero(static_cast<Eigen::Index>(features));
    p.input_scale = RowVector::Ones(static_cast<Eigen::Index>(features));
    p.recon1 = dense_zeros(features, hidden);
    p.recon2 = dense_zeros(hidden, hidden);
    p.recon3 = dense_zeros(hidden, 3);
    p.class1 = dense_zeros(features + 3, hidden);
    p.class2 = dense_zeros(hidden, 2);
    return p;
}

ToyModelParams ToyModelParams::initialize(std::size_t features, std::size_t hidden, std::uint64_t seed) {
    ToyModelParams p = zeros(features, hidden);
    Rng rng(seed);
    p.recon1 = dense_xavier(features, hidden, rng);
    p.recon2 = dense_xavier(hidden, hidden, rng);
    p.recon3 = dense_xavier(hidden, 3, rng);
    p.class1 = dense_xavier(features + 3, hidden, rng);
    p.class2 = dense_xavier(hidden, 2, rng);
    return p;
}

std::vector<Dense*> ToyModelParams::layers() { return {&recon1, &recon2, &recon3, &class1, &class2}; }

std::vector<const Dense*> ToyModelParams::layers() const {
    return {&recon1, &recon2, &recon3, &class1, &class2};
}

std::size_t ToyModelParams::parameter_count() const {
    std::size_t n = 0;
    for (const Dense* d : layers()) n += static_cast<std::size_t>(d->weight.size() + d->bias.size());
    return n;
}

bool ToyModelParams::all_finite() const {
    for (const Dense* d : layers()) {
        if (!d->weight.allFinite() || !d->bias.allFinite()) return false;
    }
    return input_shift.allFinite() && input_scale.allFinite();
}

// --- forward / losses / backward -------------------------------------------

ForwardResult forward(const ToyModelParams& params, const Matrix& feats, bool with_classifier) {
    if (feats.cols() != static_cast<Eigen::Index>(params.features)) {
        throw ArgumentError("feature matrix has " + std::to_string(feats.cols()) +
                            " columns, model expects " + std::to_string(params.features));
    }
    ForwardResult fr;
    fr.standardized = standardize(params, feats);
    fr.hidden1 = affine(fr.standardized, params.recon1).array().tanh().matrix();
    fr.hidden2 = affine(fr.hidden1, params.recon2).array().tanh().matrix();
    fr.pred = affine(fr.hidden2, params.recon3);
    if (with_classifier) {
        auto head = head_forward(params, concat_cols(fr.standardized, fr.pred));
        fr.class_hidden = std::move(head.hidden);
        fr.logits = std::move(head.logits);
        fr.probs = softmax_rows(fr.logits);
    }
    return fr;
}

double recon_loss(const Matrix& pred, const Matrix& gt) {
    require_shape(pred, gt.rows(), gt.cols(), "recon_loss prediction");
    if (gt.size() == 0) throw ArgumentError("recon_loss of an empty matrix");
    const auto d = (pred - gt).array();
    const double n = static_cast<double>(gt.size());
    return d.abs().sum() / n + d.square().sum() / n;
}

double classification_loss(const Matrix& logits, std::span<const std::uint8_t> labels) {
    if (logits.cols() != 2 || static_cast<std::size_t>(logits.rows()) != labels.size()) {
        throw ArgumentError("classification_loss: logits and labels disagree in shape");
    }
    double total = 0.0;
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        const double mx = logits.row(i).maxCoeff();
        const double lse = mx + std::log((logits.row(i).array() - mx).exp().sum());
        total += lse - logits(i, labels[static_cast<std::size_t>(i)]);
    }
    return total / static_cast<double>(logits.rows());
}

Gradients backward_reconstruction(const ToyModelParams& params, const Matrix& feats, const Matrix& gt,
                                  double weight) {
    require_shape(gt, feats.rows(), 3, "reconstruction target");
    const ForwardResult fr = forward(params, feats, false);
    Gradients g{weight * recon_loss(fr.pred, gt), ToyModelParams::zeros(params.features, params.hidden)};
    const Matrix diff = fr.pred - gt;
    const double n = static_cast<double>(diff.size());
    // d/dx |x| is taken as 0 at x == 0.
    const Matrix d_pred = (weight / n) * (diff.array().sign() + 2.0 * diff.array()).matrix();
    backbone_backward(params, fr, d_pred, g.grad);
    return g;
}

Gradients backward_classifier(const ToyModelParams& params, const Matrix& feats,
                              std::span<const std::uint8_t> labels, bool through_backbone,
                              double weight) {
    if (static_cast<std::size_t>(feats.rows()) != labels.size()) {
        throw ArgumentError("classifier labels do not match the feature rows");
    }
    const ForwardResult fr = forward(params, feats, false);
    const Matrix z = concat_cols(fr.standardized, fr.pred);
    const HeadPass pass = head_forward(params, z);
    Gradients g{weight * classification_loss(pass.logits, labels),
                ToyModelParams::zeros(params.features, params.hidden)};
    const Matrix d_z = head_backward(params, z, pass, labels, weight, g.grad);
    if (through_backbone) {
        const Matrix d_pred = d_z.rightCols(3);
        backbone_backward(params, fr, d_pred, g.grad);
    }
    return g;
}

// --- training --------------------------------------------------------------

TrainResult train_reconstruction(std::span<const PointCloud> clouds, const TrainConfig& cfg) {
    cfg.validate();
    if (clouds.empty()) throw ArgumentError("train_reconstruction needs at least one cloud");
    std::vector<FeatureMatrix> feats;
    std::vector<Matrix> targets;
    for (const auto& c : clouds) {
        Matrix t;
        feats.push_back(featurize_unmasked(c, cfg, &t));
        targets.push_back(std::move(t));
    }

    Rng rng(cfg.seed);
    TrainResult out{ToyModelParams::initialize(cfg.feature_count(), cfg.hidden, rng.fork()), {}};
    set_standardization(out.params, feats);
    Adam adam(out.params, {kRecon1, kRecon2, kRecon3});

    std::vector<std::size_t> order(clouds.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const double lr = decayed_lr(cfg, epoch);
        rng.shuffle(order);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
            const double w = 1.0 / static_cast<double>(stop - start);
            ToyModelParams grad = ToyModelParams::zeros(out.params.features, out.params.hidden);
            for (std::size_t b = start; b < stop; ++b) {
                FeatureMatrix masked = feats[order[b]];
                apply_mask(masked, cfg.mask_ratio, rng.next_u64());
                const Gradients g = backward_reconstruction(out.params, masked.values, targets[order[b]], w);
                accumulate(grad, g.grad, 1.0);
                epoch_loss += g.loss / w;
            }
            adam.step(out.params, grad, lr);
        }
        epoch_loss /= static_cast<double>(order.size());
        if (!std::isfinite(epoch_loss) || !out.params.all_finite()) {
            throw TrainingError("reconstruction training diverged at epoch " + std::to_string(epoch + 1));
        }
        out.loss_curve.push_back(epoch_loss);
    }
    return out;
}

TrainResult finetune_classifier(const ToyModelParams& pretrained, std::span<const LabeledCloud> labeled,
                                const TrainConfig& cfg, std::size_t epochs) {
    cfg.validate();
    if (labeled.empty()) throw ArgumentError("finetune_classifier needs labeled clouds");
    if (epochs < 1) throw ArgumentError("epochs must be >= 1");
    if (pretrained.features != cfg.feature_count()) {
        throw ArgumentError("model feature count does not match the configuration");
    }
    // The backbone is frozen, so each cloud's head input is computed once.
    std::vector<Matrix> inputs;
    for (const auto& lc : labeled) {
        require_aligned(lc.cloud, lc.labels);
        const FeatureMatrix fm = featurize_unmasked(lc.cloud, cfg, nullptr);
        const ForwardResult fr = forward(pretrained, fm.values, false);
        inputs.push_back(concat_cols(fr.standardized, fr.pred));
    }
    TrainResult out{pretrained, {}};
    Rng rng(cfg.seed ^ 0xC1A55ULL);
    Adam adam(out.params, {kClass1, kClass2});
    std::vector<std::size_t> order(labeled.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        const double lr = decayed_lr(cfg, epoch);
        rng.shuffle(order);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
            const double w = 1.0 / static_cast<double>(stop - start);
            ToyModelParams grad = ToyModelParams::zeros(out.params.features, out.params.hidden);
            for (std::size_t b = start; b < stop; ++b) {
                const std::size_t c = order[b];
                const HeadPass pass = head_forward(out.params, inputs[c]);
                const auto labels = labeled[c].labels.values();
                ToyModelParams g = ToyModelParams::zeros(out.params.features, out.params.hidden);
                head_backward(out.params, inputs[c], pass, labels, w, g);
                accumulate(grad, g, 1.0);
                epoch_loss += classification_loss(pass.logits, labels);
            }
            adam.step(out.params, grad, lr);
        }
        epoch_loss /= static_cast<double>(order.size());
        if (!std::isfinite(epoch_loss) || !out.params.all_finite()) {
            throw TrainingError("classifier fine-tuning diverged at epoch " + std::to_string(epoch + 1));
        }
        out.loss_curve.push_back(epoch_loss);
    }
    return out;
}

ClassProbabilities predict_probabilities(const ToyModelParams& params, const PointCloud& cloud,
                                         const TrainConfig& cfg) {
    const FeatureMatrix fm = featurize_unmasked(cloud, cfg, nullptr);
    const ForwardResult fr = forward(params, fm.values, true);
    ClassProbabilities probs;
    probs.values.reserve(cloud.size());
    for (Eigen::Index i = 0; i < fr.probs.rows(); ++i) probs.values.emplace_back(fr.probs(i, 0), fr.probs(i, 1));
    return probs;
}

AnomalyScoreSet score_cloud(const ToyModelParams& params, const PointCloud& cloud, const TrainConfig& cfg,
                            double rate, double eps) {
    return make_score_set(logit_score(predict_probabilities(params, cloud, cfg), eps), rate);
}

double evaluate_reconstruction(const ToyModelParams& params, const PointCloud& cloud,
                               const TrainConfig& cfg, std::uint64_t seed) {
    Matrix target;
    FeatureMatrix fm = featurize_unmasked(cloud, cfg, &target);
    apply_mask(fm, cfg.mask_ratio, seed);
    return recon_loss(forward(params, fm.values, false).pred, target);
}

// --- serialization ---------------------------------------------------------

void save_model(const ToyModelParams& params, const TrainConfig& cfg, const std::filesystem::path& path,
                const std::map<std::string, std::string>& extra) {
    using detail::format_double;
    std::vector<std::pair<std::string, const double*>> tensors;
    std::vector<std::pair<Eigen::Index, Eigen::Index>> shapes;
    tensors.emplace_back("input_shift", params.input_shift.data());
    shapes.emplace_back(1, params.input_shift.size());
    tensors.emplace_back("input_scale", params.input_scale.data());
    shapes.emplace_back(1, params.input_scale.size());
    const char* names[] = {"recon1", "recon2", "recon3", "class1", "class2"};
    const auto layers = params.layers();
    for (std::size_t l = 0; l < layers.size(); ++l) {
        tensors.emplace_back(std::string(names[l]) + ".weight", layers[l]->weight.data());
        shapes.emplace_back(layers[l]->weight.rows(), layers[l]->weight.cols());
        tensors.emplace_back(std::string(names[l]) + ".bias", layers[l]->bias.data());
        shapes.emplace_back(1, layers[l]->bias.size());
    }
    std::string manifest;
    std::size_t count = 0;
    for (std::size_t t = 0; t < tensors.size(); ++t) {
        manifest += (t ? "," : "") + tensors[t].first + ":" + std::to_string(shapes[t].first) + "x" +
                    std::to_string(shapes[t].second);
        count += static_cast<std::size_t>(shapes[t].first * shapes[t].second);
    }
    std::string out = "curvad-model 1\n";
    out += "features=" + std::to_string(params.features) + "\n";
    out += "hidden=" + std::to_string(params.hidden) + "\n";
    out += "ks=" + join_ks(cfg.ks) + "\n";
    out += "mask_ratio=" + format_double(cfg.mask_ratio) + "\n";
    out += "use_prompts=" + std::string(cfg.use_prompts ? "1" : "0") + "\n";
    out += "use_coords=" + std::string(cfg.use_coords ? "1" : "0") + "\n";
    out += "learning_rate=" + format_double(cfg.learning_rate) + "\n";
    out += "epochs=" + std::to_string(cfg.epochs) + "\n";
    out += "lr_decay_factor=" + format_double(cfg.lr_decay_factor) + "\n";
    out += "lr_decay_interval=" + std::to_string(cfg.lr_decay_interval) + "\n";
    out += "batch_size=" + std::to_string(cfg.batch_size) + "\n";
    out += "seed=" + std::to_string(cfg.seed) + "\n";
    for (const auto& [k, v] : extra) out += k + "=" + v + "\n";
    out += "tensors=" + manifest + "\n";
    out += "doubles=" + std::to_string(count) + "\n";
    out += "end_header\n";
    const std::size_t header = out.size();
    out.resize(header + count * sizeof(double));
    char* dst = out.data() + header;
    for (std::size_t t = 0; t < tensors.size(); ++t) {
        const auto n = static_cast<std::size_t>(shapes[t].first * shapes[t].second);
        for (std::size_t i = 0; i < n; ++i) {
            double v = tensors[t].second[i];
            if constexpr (std::endian::native == std::endian::big) {
                auto* b = reinterpret_cast<unsigned char*>(&v);
                std::reverse(b, b + sizeof(double));
            }
            std::memcpy(dst, &v, sizeof(double));
            dst += sizeof(double);
        }
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw IoError("write failed for '" + path.string() + "'");
}

LoadedModel load_model(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path.string() + "'");
    const std::string data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    const std::string marker = "end_header\n";
    const auto end = data.find(marker);
    if (data.rfind("curvad-model 1\n", 0) != 0 || end == std::string::npos) {
        throw ParseError("'" + path.string() + "' is not a curvad model file");
    }
    LoadedModel m;
    std::istringstream header(data.substr(0, end));
    std::string line;
    std::getline(header, line);
    while (std::getline(header, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("bad model header line: '" + line + "'");
        m.header[line.substr(0, eq)] = line.substr(eq + 1);
    }
    const auto get = [&](const std::string& key) -> const std::string& {
        const auto it = m.header.find(key);
        if (it == m.header.end()) throw ParseError("model header lacks '" + key + "'");
        return it->second;
    };
    try {
        m.cfg.ks.clear();
        std::stringstream ks(get("ks"));
        std::string item;
        while (std::getline(ks, item, ',')) m.cfg.ks.push_back(std::stoul(item));
        m.cfg.mask_ratio = std::stod(get("mask_ratio"));
        m.cfg.use_prompts = get("use_prompts") == "1";
        m.cfg.use_coords = get("use_coords") == "1";
        m.cfg.learning_rate = std::stod(get("learning_rate"));
        m.cfg.epochs = std::stoul(get("epochs"));
        m.cfg.lr_decay_factor = std::stod(get("lr_decay_factor"));
        m.cfg.lr_decay_interval = std::stoul(get("lr_decay_interval"));
        m.cfg.batch_size = std::stoul(get("batch_size"));
        m.cfg.seed = std::stoull(get("seed"));
        m.cfg.hidden = std::stoul(get("hidden"));
    } catch (const std::logic_error&) {
        throw ParseError("model header has a malformed value");
    }
    const std::size_t features = std::stoul(get("features"));
    if (features != m.cfg.feature_count()) throw ParseError("model header: features do not match ks");
    m.params = ToyModelParams::zeros(features, m.cfg.hidden);

    std::vector<double*> targets;
    std::vector<std::size_t> sizes;
    targets.push_back(m.params.input_shift.data());
    sizes.push_back(static_cast<std::size_t>(m.params.input_shift.size()));
    targets.push_back(m.params.input_scale.data());
    sizes.push_back(static_cast<std::size_t>(m.params.input_scale.size()));
    for (Dense* d : m.params.layers()) {
        targets.push_back(d->weight.data());
        sizes.push_back(static_cast<std::size_t>(d->weight.size()));
        targets.push_back(d->bias.data());
        sizes.push_back(static_cast<std::size_t>(d->bias.size()));
    }
    const std::size_t count = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
    if (std::stoul(get("doubles")) != count ||
        data.size() - (end + marker.size()) != count * sizeof(double)) {
        throw ParseError("model payload size does not match its header");
    }
    const char* src = data.data() + end + marker.size();
    for (std::size_t t = 0; t < targets.size(); ++t) {
        for (std::size_t i = 0; i < sizes[t]; ++i) {
            double v;
            std::memcpy(&v, src, sizeof(double));
            if constexpr (std::endian::native == std::endian::big) {
                auto* b = reinterpret_cast<unsigned char*>(&v);
                std::reverse(b, b + sizeof(double));
            }
            targets[t][i] = v;
            src += sizeof(double);
        }
    }
    if (!m.params.all_finite()) throw ValidationError("model contains non-finite parameters");
    return m;
}

// --- ablation --------------------------------------------------------------

AblationRow run_configuration(const std::string& label, const TrainConfig& cfg_in,
                              const BenchmarkSettings& bench, std::uint64_t seed) {
    // Data streams depend on the seed only, so every configuration sees the same clouds.
    Rng data_rng(seed);
    std::vector<PointCloud> train;
    for (std::size_t i = 0; i < bench.train_clouds; ++i) {
        train.push_back(make_shape(bench.shape, bench.points, bench.noise_sigma, data_rng.fork()));
    }
    std::vector<LabeledCloud> pseudo;
    for (const auto& c : train) {
        for (std::size_t j = 0; j < bench.pseudo_per_cloud; ++j) {
            PseudoAnomalyConfig sc = bench.synth;
            sc.seed = data_rng.fork();
            pseudo.push_back(generate_pseudo_anomaly(c, sc));
        }
    }
    std::vector<CloudEvaluation> evals;
    std::vector<PointCloud> eval_points;
    for (std::size_t i = 0; i < bench.eval_clouds; ++i) {
        const PointCloud base = make_shape(bench.shape, bench.points, bench.noise_sigma, data_rng.fork());
        PseudoAnomalyConfig sc = bench.synth;
        sc.seed = data_rng.fork();
        auto lc = generate_pseudo_anomaly(base, sc);
        evals.push_back({"anomalous_" + std::to_string(i), std::string(to_string(bench.shape)), {},
                         std::move(lc.labels), 1});
        eval_points.push_back(std::move(lc.cloud));
    }
    for (std::size_t i = 0; i < bench.eval_clouds; ++i) {
        PointCloud c = make_shape(bench.shape, bench.points, bench.noise_sigma, data_rng.fork());
        evals.push_back({"clean_" + std::to_string(i), std::string(to_string(bench.shape)), {},
                         LabelSet(c.size(), 0), 0});
        eval_points.push_back(std::move(c));
    }

    TrainConfig cfg = cfg_in;
    cfg.seed = seed ^ 0x5EEDULL;
    const TrainResult pre = train_reconstruction(train, cfg);
    const TrainResult fine = finetune_classifier(pre.params, pseudo, cfg, bench.finetune_epochs);

    double rec = 0.0;
    for (std::size_t i = 0; i < evals.size(); ++i) {
        evals[i].scores = score_cloud(fine.params, eval_points[i], cfg, bench.rate);
        if (evals[i].object_label == 0) rec += evaluate_reconstruction(pre.params, eval_points[i], cfg, seed + i);
    }
    const DatasetMetrics m = evaluate_dataset(evals);
    AblationRow row;
    row.label = label;
    row.seed = seed;
    row.mask_ratio = cfg.mask_ratio;
    row.use_prompts = cfg.use_prompts;
    row.use_coords = cfg.use_coords;
    row.o_auroc = m.o_auroc;
    row.p_auroc = m.p_auroc;
    row.recon_loss = rec / static_cast<double>(bench.eval_clouds);
    return row;
}

AblationReport run_ablation(std::span<const AblationVariant> variants, std::span<const std::uint64_t> seeds,
                            const BenchmarkSettings& bench) {
    AblationReport report;
    for (std::uint64_t seed : seeds) {
        for (AblationVariant v : variants) {
            report.rows.push_back(
                run_configuration(std::string(to_string(v)), apply_variant(bench.train, v), bench, seed));
        }
    }
    return report;
}

AblationReport run_mask_sweep(std::span<const double> ratios, std::span<const std::uint64_t> seeds,
                              const BenchmarkSettings& bench) {
    AblationReport report;
    for (std::uint64_t seed : seeds) {
        for (double m : ratios) {
            TrainConfig cfg = apply_variant(bench.train, AblationVariant::D);
            cfg.mask_ratio = m;
            report.rows.push_back(run_configuration("m=" + detail::format_fixed(m, 1), cfg, bench, seed));
        }
    }
    return report;
}

std::vector<AblationRow> AblationReport::means() const {
    std::vector<AblationRow> out;
    std::vector<std::size_t> counts;
    for (const auto& r : rows) {
        auto it = std::find_if(out.begin(), out.end(), [&](const AblationRow& o) { return o.label == r.label; });
        if (it == out.end()) {
            out.push_back(r);
            counts.push_back(1);
            continue;
        }
        const auto i = static_cast<std::size_t>(it - out.begin());
        it->o_auroc += r.o_auroc;
        it->p_auroc += r.p_auroc;
        it->recon_loss += r.recon_loss;
        ++counts[i];
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double c = static_cast<double>(counts[i]);
        out[i].o_auroc /= c;
        out[i].p_auroc /= c;
        out[i].recon_loss /= c;
        out[i].seed = 0;
    }
    return out;
}

std::string AblationReport::to_csv() const {
    using detail::format_double;
    std::string out = "label,seed,mask_ratio,use_prompts,use_coords,o_auroc,p_auroc,recon_loss\n";
    for (const auto& r : rows) {
        out += r.label + "," + std::to_string(r.seed) + "," + format_double(r.mask_ratio) + "," +
               (r.use_prompts ? "1" : "0") + "," + (r.use_coords ? "1" : "0") + "," + format_double(r.o_auroc) +
               "," + format_double(r.p_auroc) + "," + format_double(r.recon_loss) + "\n";
    }
    return out;
}

std::string AblationReport::to_table() const {
    using namespace detail;
    const auto row = [](const std::string& a, const std::string& b, const std::string& c, const std::string& d,
                        const std::string& e, const std::string& f) {
        return pad_right(a, 8) + pad_left(b, 8) + pad_left(c, 10) + pad_left(d, 10) + pad_left(e, 10) +
               pad_left(f, 11) + "\n";
    };
    std::string out = row("", "Masked", "Prompts", "O-AUROC", "P-AUROC", "Rec. Loss");
    out += std::string(57, '-') + "\n";
    for (const auto& r : means()) {
        out += row(r.label, format_fixed(r.mask_ratio, 1), r.use_prompts ? "yes" : "no",
                   format_fixed(r.o_auroc, 3), format_fixed(r.p_auroc, 3), format_fixed(r.recon_loss, 4));
    }
    return out;
}

}  // namespace curvad::toy
