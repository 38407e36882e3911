#pragma once

#include <string>
#include <vector>

#include "icefloe/kernels.hpp"
#include "icefloe/linalg.hpp"
#include "icefloe/rng.hpp"

namespace icefloe::nn {

enum class Activation { Mish, Relu, Silu };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

// x * tanh(softplus(x)), softplus evaluated in its stable branch.
double mish(double x);
// Closed-form derivative, switched to an equivalent stable expression for
// large arguments.
double mish_derivative(double x);

double activate(Activation a, double x);
double activate_derivative(Activation a, double x);

// Dense multilayer perceptron: affine layers with the chosen activation on
// every hidden layer and a linear output layer.
struct Mlp {
    std::vector<int> widths;  // input, hidden..., output
    Activation activation = Activation::Mish;
    std::vector<Mat> weights;  // weights[l]: widths[l] x widths[l+1]
    std::vector<Vec> biases;

    int input_width() const { return widths.front(); }
    int output_width() const { return widths.back(); }
    int n_layers() const { return int(weights.size()); }
};

// Glorot-uniform initial weights, zero biases.
Mlp make_mlp(const std::vector<int>& widths, Activation activation, Rng& rng);

struct MlpGrads {
    std::vector<Mat> weights;
    std::vector<Vec> biases;
};
MlpGrads zero_grads(const Mlp& mlp);

Vec mlp_forward(const Mlp& mlp, const Vec& input);

// Reverse-mode gradients of the forward map for a single sample;
// input_grad may be null.
MlpGrads mlp_gradient(const Mlp& mlp, const Vec& input, const Vec& upstream,
                      Vec* input_grad = nullptr);

// Batched paths used by training and the ensemble forecast. Rows are
// independent samples; the arithmetic per row matches the single-sample
// path exactly.
struct ForwardCache {
    std::vector<Mat> layer_inputs;  // per layer, the activations fed in
    std::vector<Mat> act_derivs;    // activation derivative per hidden layer
};

Mat mlp_forward_batch(const Mlp& mlp, const Mat& inputs, ForwardCache* cache,
                      kernels::Exec mode);

// Same computation writing into a caller-owned output buffer; repeated
// calls with the same shapes then run allocation-free.
void mlp_forward_into(const Mlp& mlp, const Mat& inputs, Mat& out, ForwardCache* cache,
                      kernels::Exec mode);

// Accumulates parameter gradients into grads (summed over rows);
// input_grads may be null.
void mlp_backward_batch(const Mlp& mlp, const ForwardCache& cache, const Mat& upstream,
                        MlpGrads& grads, Mat* input_grads, kernels::Exec mode);

// Adam with bias correction and a per-epoch exponential learning-rate
// decay: lr = base_lr * gamma^epoch.
struct AdamState {
    std::vector<Mat> m_w, v_w;
    std::vector<Vec> m_b, v_b;
    long step = 0;
    int epoch = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double base_lr = 1e-4;
    double gamma = 0.99;

    double learning_rate() const;
    void decay_epoch() { ++epoch; }
};

AdamState make_adam(const Mlp& mlp, double base_lr, double gamma);
void adam_step(Mlp& mlp, const MlpGrads& grads, AdamState& state);

}  // namespace icefloe::nn
