#include "icefloe/mlp.hpp"

#include <cmath>

#include "icefloe/errors.hpp"

namespace icefloe::nn {

std::string to_string(Activation a) {
    switch (a) {
        case Activation::Mish: return "mish";
        case Activation::Relu: return "relu";
        case Activation::Silu: return "silu";
    }
    return "mish";
}

Activation activation_from_string(const std::string& s) {
    if (s == "mish") return Activation::Mish;
    if (s == "relu") return Activation::Relu;
    if (s == "silu") return Activation::Silu;
    throw InvalidConfig("unknown activation: " + s);
}

namespace {
double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }
double sigmoid(double x) {
    return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}
}  // namespace

double mish(double x) { return x * std::tanh(softplus(x)); }

double mish_derivative(double x) {
    if (x <= 20.0) {
        const double ex = std::exp(x);
        const double omega =
            4.0 * (x + 1.0) + 4.0 * ex * ex + ex * ex * ex + ex * (4.0 * x + 6.0);
        const double delta = (ex + 1.0) * (ex + 1.0) + 1.0;
        return ex * omega / (delta * delta);
    }
    // equivalent form that avoids exp overflow
    const double t = std::tanh(softplus(x));
    return t + x * (1.0 - t * t) * sigmoid(x);
}

double activate(Activation a, double x) {
    switch (a) {
        case Activation::Mish: return mish(x);
        case Activation::Relu: return x > 0.0 ? x : 0.0;
        case Activation::Silu: return x * sigmoid(x);
    }
    return 0.0;
}

double activate_derivative(Activation a, double x) {
    switch (a) {
        case Activation::Mish: return mish_derivative(x);
        case Activation::Relu: return x > 0.0 ? 1.0 : 0.0;
        case Activation::Silu: {
            const double s = sigmoid(x);
            return s + x * s * (1.0 - s);
        }
    }
    return 0.0;
}

Mlp make_mlp(const std::vector<int>& widths, Activation activation, Rng& rng) {
    if (widths.size() < 2) throw InvalidConfig("make_mlp: need at least input and output widths");
    Mlp mlp;
    mlp.widths = widths;
    mlp.activation = activation;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        const int fan_in = widths[l], fan_out = widths[l + 1];
        const double bound = std::sqrt(6.0 / double(fan_in + fan_out));
        Mat w(fan_in, fan_out);
        for (double& v : w.a) v = rng.uniform(-bound, bound);
        mlp.weights.push_back(std::move(w));
        mlp.biases.emplace_back(std::size_t(fan_out), 0.0);
    }
    return mlp;
}

MlpGrads zero_grads(const Mlp& mlp) {
    MlpGrads g;
    for (int l = 0; l < mlp.n_layers(); ++l) {
        g.weights.emplace_back(mlp.weights[std::size_t(l)].rows,
                               mlp.weights[std::size_t(l)].cols);
        g.biases.emplace_back(mlp.biases[std::size_t(l)].size(), 0.0);
    }
    return g;
}

namespace {

// single-exp evaluation of the hidden activations; tanh(softplus(x)) is
// rewritten as (s^2-1)/(s^2+1) with s = 1 + e^x
inline void activate_fused(Activation a, double x, double& act, double& der) {
    switch (a) {
        case Activation::Mish: {
            if (x > 20.0) {
                act = x;
                der = 1.0;
                return;
            }
            const double ex = std::exp(x);
            const double s = 1.0 + ex;
            const double s2 = s * s;
            const double t = (s2 - 1.0) / (s2 + 1.0);
            act = x * t;
            der = t + x * (1.0 - t * t) * (ex / s);
            return;
        }
        case Activation::Relu:
            act = x > 0.0 ? x : 0.0;
            der = x > 0.0 ? 1.0 : 0.0;
            return;
        case Activation::Silu: {
            const double s = sigmoid(x);
            act = x * s;
            der = s + x * s * (1.0 - s);
            return;
        }
    }
}

void activate_rows(Activation a, Mat& z, Mat* derivs, kernels::Exec mode) {
    const int total = z.rows;
#pragma omp parallel for schedule(static) if (mode == kernels::Exec::Parallel)
    for (int r = 0; r < total; ++r) {
        double* row = z.row(r);
        double* drow = derivs ? derivs->row(r) : nullptr;
        for (int c = 0; c < z.cols; ++c) {
            double act, der;
            activate_fused(a, row[c], act, der);
            row[c] = act;
            if (drow) drow[c] = der;
        }
    }
}

}  // namespace

namespace {
void reshape(Mat& m, int rows, int cols) {
    m.rows = rows;
    m.cols = cols;
    m.a.resize(std::size_t(rows) * cols);
}
}  // namespace

void mlp_forward_into(const Mlp& mlp, const Mat& inputs, Mat& out, ForwardCache* cache,
                      kernels::Exec mode) {
    if (inputs.cols != mlp.input_width())
        throw DimensionMismatch("mlp_forward: input width mismatch");
    const int n_layers = mlp.n_layers();
    if (cache) {
        // buffers are kept between calls; same-shape reruns do not allocate
        cache->layer_inputs.resize(std::size_t(n_layers));
        cache->act_derivs.resize(std::size_t(n_layers - 1));
        Mat& in0 = cache->layer_inputs[0];
        reshape(in0, inputs.rows, inputs.cols);
        in0.a.assign(inputs.a.begin(), inputs.a.end());
        for (int l = 0; l < n_layers; ++l) {
            const Mat& in = cache->layer_inputs[std::size_t(l)];
            Mat& z = l + 1 < n_layers ? cache->layer_inputs[std::size_t(l + 1)] : out;
            kernels::affine(in, mlp.weights[std::size_t(l)], mlp.biases[std::size_t(l)], z,
                            mode);
            if (l + 1 < n_layers) {
                Mat& derivs = cache->act_derivs[std::size_t(l)];
                reshape(derivs, z.rows, z.cols);
                activate_rows(mlp.activation, z, &derivs, mode);
            }
        }
        return;
    }
    Mat current = inputs, z;
    for (int l = 0; l < n_layers; ++l) {
        kernels::affine(current, mlp.weights[std::size_t(l)], mlp.biases[std::size_t(l)], z,
                        mode);
        if (l + 1 < n_layers) activate_rows(mlp.activation, z, nullptr, mode);
        std::swap(current, z);
    }
    out = std::move(current);
}

Mat mlp_forward_batch(const Mlp& mlp, const Mat& inputs, ForwardCache* cache,
                      kernels::Exec mode) {
    Mat out;
    mlp_forward_into(mlp, inputs, out, cache, mode);
    return out;
}

void mlp_backward_batch(const Mlp& mlp, const ForwardCache& cache, const Mat& upstream,
                        MlpGrads& grads, Mat* input_grads, kernels::Exec mode) {
    const int n_layers = mlp.n_layers();
    if (int(cache.layer_inputs.size()) != n_layers)
        throw DimensionMismatch("mlp_backward: cache does not match network");
    // scratch kept across calls; every element is overwritten before use
    thread_local Mat delta_buf, prev_buf;
    Mat& delta = delta_buf;
    reshape(delta, upstream.rows, upstream.cols);
    delta.a.assign(upstream.a.begin(), upstream.a.end());
    for (int l = n_layers - 1; l >= 0; --l) {
        kernels::add_gram(cache.layer_inputs[std::size_t(l)], delta,
                          grads.weights[std::size_t(l)], mode);
        kernels::add_colsum(delta, grads.biases[std::size_t(l)], mode);
        if (l == 0 && !input_grads) break;
        Mat& prev = prev_buf;
        kernels::back_rows(delta, mlp.weights[std::size_t(l)], prev, mode);
        if (l > 0) {
            const Mat& derivs = cache.act_derivs[std::size_t(l - 1)];
            const int total = prev.rows;
#pragma omp parallel for schedule(static) if (mode == kernels::Exec::Parallel)
            for (int r = 0; r < total; ++r) {
                double* prow = prev.row(r);
                const double* drow = derivs.row(r);
                for (int c = 0; c < prev.cols; ++c) prow[c] *= drow[c];
            }
        }
        if (l == 0) {
            *input_grads = prev;
            break;
        }
        std::swap(delta_buf, prev_buf);
    }
}

Vec mlp_forward(const Mlp& mlp, const Vec& input) {
    Mat in(1, int(input.size()));
    in.a = input;
    const Mat out = mlp_forward_batch(mlp, in, nullptr, kernels::Exec::Serial);
    return out.a;
}

MlpGrads mlp_gradient(const Mlp& mlp, const Vec& input, const Vec& upstream, Vec* input_grad) {
    if (int(upstream.size()) != mlp.output_width())
        throw DimensionMismatch("mlp_gradient: upstream width mismatch");
    Mat in(1, int(input.size()));
    in.a = input;
    ForwardCache cache;
    mlp_forward_batch(mlp, in, &cache, kernels::Exec::Serial);
    Mat up(1, int(upstream.size()));
    up.a = upstream;
    MlpGrads grads = zero_grads(mlp);
    Mat in_grad;
    mlp_backward_batch(mlp, cache, up, grads, input_grad ? &in_grad : nullptr,
                       kernels::Exec::Serial);
    if (input_grad) *input_grad = in_grad.a;
    return grads;
}

double AdamState::learning_rate() const { return base_lr * std::pow(gamma, epoch); }

AdamState make_adam(const Mlp& mlp, double base_lr, double gamma) {
    AdamState s;
    s.base_lr = base_lr;
    s.gamma = gamma;
    for (int l = 0; l < mlp.n_layers(); ++l) {
        s.m_w.emplace_back(mlp.weights[std::size_t(l)].rows, mlp.weights[std::size_t(l)].cols);
        s.v_w.emplace_back(mlp.weights[std::size_t(l)].rows, mlp.weights[std::size_t(l)].cols);
        s.m_b.emplace_back(mlp.biases[std::size_t(l)].size(), 0.0);
        s.v_b.emplace_back(mlp.biases[std::size_t(l)].size(), 0.0);
    }
    return s;
}

namespace {
void adam_update(double* p, const double* g, double* m, double* v, std::size_t n, double lr,
                 double beta1, double beta2, double eps, double bc1, double bc2) {
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}
}  // namespace

void adam_step(Mlp& mlp, const MlpGrads& grads, AdamState& state) {
    ++state.step;
    const double lr = state.learning_rate();
    const double bc1 = 1.0 - std::pow(state.beta1, double(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, double(state.step));
    for (int l = 0; l < mlp.n_layers(); ++l) {
        auto li = std::size_t(l);
        adam_update(mlp.weights[li].a.data(), grads.weights[li].a.data(),
                    state.m_w[li].a.data(), state.v_w[li].a.data(), mlp.weights[li].a.size(),
                    lr, state.beta1, state.beta2, state.eps, bc1, bc2);
        adam_update(mlp.biases[li].data(), grads.biases[li].data(), state.m_b[li].data(),
                    state.v_b[li].data(), mlp.biases[li].size(), lr, state.beta1, state.beta2,
                    state.eps, bc1, bc2);
    }
}

}  // namespace icefloe::nn
