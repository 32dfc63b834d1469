#pragma once
// Central finite differences over every parameter of the toy network.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "curvad/random.hpp"
#include "curvad/recon_toy.hpp"

namespace oracle {

struct GradCheckResult {
    double worst_rel = 0.0;
    std::size_t checked = 0;
    std::string worst_where;
};

struct GradInstance {
    curvad::toy::ToyModelParams params;
    curvad::toy::Matrix feats;
    curvad::toy::Matrix target;
    std::vector<std::uint8_t> labels;
};

inline GradInstance random_instance(std::uint64_t seed) {
    using curvad::toy::Matrix;
    curvad::Rng rng(seed);
    const std::size_t f = 3 + 2 * (1 + rng.uniform_index(3));
    const std::size_t h = 2 + rng.uniform_index(5);
    const std::size_t n = 3 + rng.uniform_index(6);
    GradInstance in{curvad::toy::ToyModelParams::initialize(f, h, rng.next_u64()), Matrix(n, f), Matrix(n, 3), {}};
    for (auto* layer : in.params.layers()) {
        for (Eigen::Index i = 0; i < layer->bias.size(); ++i) layer->bias(i) = rng.uniform(-0.5, 0.5);
    }
    for (std::size_t c = 0; c < f; ++c) {
        in.params.input_shift(c) = rng.uniform(-0.3, 0.3);
        in.params.input_scale(c) = rng.uniform(0.5, 2.0);
    }
    for (Eigen::Index i = 0; i < in.feats.size(); ++i) in.feats.data()[i] = rng.normal();
    for (Eigen::Index i = 0; i < in.target.size(); ++i) in.target.data()[i] = rng.normal();
    for (std::size_t i = 0; i < n; ++i) in.labels.push_back(rng.uniform() < 0.5);
    return in;
}

// loss(params) for the objective whose gradient is under test.
template <class LossFn>
void compare(const curvad::toy::ToyModelParams& params, const curvad::toy::ToyModelParams& analytic,
             LossFn loss, const std::vector<std::size_t>& layer_ids, GradCheckResult& out,
             double step = 1e-5) {
    auto probe = params;
    const auto a_layers = analytic.layers();
    const char* names[] = {"recon1", "recon2", "recon3", "class1", "class2"};
    for (std::size_t id : layer_ids) {
        auto* layer = probe.layers()[id];
        auto visit = [&](double* data, const double* grad, Eigen::Index count, const char* what) {
            for (Eigen::Index i = 0; i < count; ++i) {
                const double keep = data[i];
                data[i] = keep + step;
                const double up = loss(probe);
                data[i] = keep - step;
                const double down = loss(probe);
                data[i] = keep;
                const double fd = (up - down) / (2 * step);
                const double an = grad[i];
                const double rel = std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-6});
                ++out.checked;
                if (rel > out.worst_rel) {
                    out.worst_rel = rel;
                    out.worst_where = std::string(names[id]) + "." + what + "[" + std::to_string(i) + "]";
                }
            }
        };
        visit(layer->weight.data(), a_layers[id]->weight.data(), layer->weight.size(), "weight");
        visit(layer->bias.data(), a_layers[id]->bias.data(), layer->bias.size(), "bias");
    }
}

// Checks the reconstruction gradient and the classifier gradient (through
// the backbone) of one random instance.
inline GradCheckResult check_instance(std::uint64_t seed) {
    using namespace curvad::toy;
    const GradInstance in = random_instance(seed);
    GradCheckResult res;
    const Gradients gr = backward_reconstruction(in.params, in.feats, in.target);
    compare(in.params, gr.grad,
            [&](const ToyModelParams& p) { return recon_loss(forward(p, in.feats, false).pred, in.target); },
            {0, 1, 2}, res);
    const Gradients gc = backward_classifier(in.params, in.feats, in.labels, true);
    compare(in.params, gc.grad,
            [&](const ToyModelParams& p) { return classification_loss(forward(p, in.feats, true).logits, in.labels); },
            {0, 1, 2, 3, 4}, res);
    return res;
}

}  // namespace oracle
