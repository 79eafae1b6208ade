// Minimal dense feed-forward network with manual gradients, sized for the
// coordination-game agents: input -> 25 -> 15 -> two parallel linear heads of
// width 4 (action values and message values), ReLU on the hidden layers.
//
// All parameters live in one flat vector so gradient buffers and optimizer
// moments share a single layout. Double precision throughout.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "netcomm/rng.hpp"

namespace netcomm {

inline constexpr int kHidden1 = 25;
inline constexpr int kHidden2 = 15;
inline constexpr int kHeadWidth = 4;

enum class Head { Action, Message };

class Mlp {
public:
    Mlp() = default;

    explicit Mlp(int input_dim) : input_dim_(input_dim) {
        if (input_dim < 1) {
            throw std::invalid_argument("Mlp input_dim must be >= 1, got " +
                                        std::to_string(input_dim));
        }
        params_.assign(static_cast<std::size_t>(param_count(input_dim)), 0.0);
    }

    static int param_count(int input_dim) {
        return kHidden1 * input_dim + kHidden1 + kHidden2 * kHidden1 + kHidden2 +
               2 * (kHeadWidth * kHidden2 + kHeadWidth);
    }

    int input_dim() const { return input_dim_; }
    std::size_t size() const { return params_.size(); }
    std::vector<double>& params() { return params_; }
    const std::vector<double>& params() const { return params_; }

    // Flat-layout offsets: [w1 | b1 | w2 | b2 | wa | ba | wm | bm].
    int o_w1() const { return 0; }
    int o_b1() const { return kHidden1 * input_dim_; }
    int o_w2() const { return o_b1() + kHidden1; }
    int o_b2() const { return o_w2() + kHidden2 * kHidden1; }
    int o_wa() const { return o_b2() + kHidden2; }
    int o_ba() const { return o_wa() + kHeadWidth * kHidden2; }
    int o_wm() const { return o_ba() + kHeadWidth; }
    int o_bm() const { return o_wm() + kHeadWidth * kHidden2; }

    int head_weight_offset(Head h) const { return h == Head::Action ? o_wa() : o_wm(); }
    int head_bias_offset(Head h) const { return h == Head::Action ? o_ba() : o_bm(); }

private:
    int input_dim_ = 0;
    std::vector<double> params_;
};

// He-style fan-in uniform init: weights ~ U(-sqrt(6/fan_in), sqrt(6/fan_in)),
// biases zero. Deterministic given the rng stream.
inline Mlp init_mlp(int input_dim, RngStream& rng) {
    Mlp net(input_dim);
    auto* p = net.params().data();
    auto fill = [&](int offset, int count, int fan_in) {
        const double limit = std::sqrt(6.0 / fan_in);
        for (int i = 0; i < count; ++i) p[offset + i] = rng.uniform_symmetric(limit);
    };
    fill(net.o_w1(), kHidden1 * input_dim, input_dim);
    fill(net.o_w2(), kHidden2 * kHidden1, kHidden1);
    fill(net.o_wa(), kHeadWidth * kHidden2, kHidden2);
    fill(net.o_wm(), kHeadWidth * kHidden2, kHidden2);
    return net;
}

inline Mlp zero_mlp(int input_dim) { return Mlp(input_dim); }

struct HeadValues {
    std::array<double, kHeadWidth> action_q{};
    std::array<double, kHeadWidth> message_q{};
};

// Hidden activations kept around so several per-unit backward passes can
// reuse one forward pass.
struct ForwardCache {
    std::array<double, kHidden1> h1{};
    std::array<double, kHidden2> h2{};
    HeadValues out;
};

inline void forward_cached(const Mlp& net, const double* x, ForwardCache& cache) {
    const double* p = net.params().data();
    const int in = net.input_dim();
    const double* w1 = p + net.o_w1();
    const double* b1 = p + net.o_b1();
    for (int k = 0; k < kHidden1; ++k) {
        double acc = b1[k];
        const double* row = w1 + k * in;
        for (int i = 0; i < in; ++i) acc += row[i] * x[i];
        cache.h1[static_cast<std::size_t>(k)] = acc > 0.0 ? acc : 0.0;
    }
    const double* w2 = p + net.o_w2();
    const double* b2 = p + net.o_b2();
    for (int k = 0; k < kHidden2; ++k) {
        double acc = b2[k];
        const double* row = w2 + k * kHidden1;
        for (int i = 0; i < kHidden1; ++i) acc += row[i] * cache.h1[static_cast<std::size_t>(i)];
        cache.h2[static_cast<std::size_t>(k)] = acc > 0.0 ? acc : 0.0;
    }
    const double* wa = p + net.o_wa();
    const double* ba = p + net.o_ba();
    const double* wm = p + net.o_wm();
    const double* bm = p + net.o_bm();
    for (int u = 0; u < kHeadWidth; ++u) {
        double qa = ba[u];
        double qm = bm[u];
        const double* rowa = wa + u * kHidden2;
        const double* rowm = wm + u * kHidden2;
        for (int k = 0; k < kHidden2; ++k) {
            qa += rowa[k] * cache.h2[static_cast<std::size_t>(k)];
            qm += rowm[k] * cache.h2[static_cast<std::size_t>(k)];
        }
        cache.out.action_q[static_cast<std::size_t>(u)] = qa;
        cache.out.message_q[static_cast<std::size_t>(u)] = qm;
    }
}

// Pure forward pass; both heads are always returned (callers mask the
// message head for listeners).
inline HeadValues forward(const Mlp& net, const std::vector<double>& input) {
    if (static_cast<int>(input.size()) != net.input_dim()) {
        throw std::invalid_argument("forward: input length " +
                                    std::to_string(input.size()) + " != input_dim " +
                                    std::to_string(net.input_dim()));
    }
    ForwardCache cache;
    forward_cached(net, input.data(), cache);
    return cache.out;
}

// Accumulates loss_grad * d(output[head][unit]) / d(params) into grads,
// reusing the hidden activations from a previous forward_cached call.
// Parameters feeding only the other head receive no contribution.
inline void backward_unit(const Mlp& net, const double* x, const ForwardCache& cache,
                          Head head, int unit, double loss_grad,
                          std::vector<double>& grads) {
    const double* p = net.params().data();
    double* g = grads.data();
    const int in = net.input_dim();

    const int ow = net.head_weight_offset(head);
    const int ob = net.head_bias_offset(head);
    g[ob + unit] += loss_grad;
    const double* w_head = p + ow + unit * kHidden2;
    double* g_head = g + ow + unit * kHidden2;

    std::array<double, kHidden2> dh2;
    for (int k = 0; k < kHidden2; ++k) {
        const double h2k = cache.h2[static_cast<std::size_t>(k)];
        g_head[k] += loss_grad * h2k;
        dh2[static_cast<std::size_t>(k)] = (h2k > 0.0) ? loss_grad * w_head[k] : 0.0;
    }

    const double* w2 = p + net.o_w2();
    double* g_w2 = g + net.o_w2();
    double* g_b2 = g + net.o_b2();
    std::array<double, kHidden1> dh1{};
    for (int k = 0; k < kHidden2; ++k) {
        const double d = dh2[static_cast<std::size_t>(k)];
        if (d == 0.0) continue;
        g_b2[k] += d;
        const double* row = w2 + k * kHidden1;
        double* grow = g_w2 + k * kHidden1;
        for (int j = 0; j < kHidden1; ++j) {
            grow[j] += d * cache.h1[static_cast<std::size_t>(j)];
            dh1[static_cast<std::size_t>(j)] += d * row[j];
        }
    }

    double* g_w1 = g + net.o_w1();
    double* g_b1 = g + net.o_b1();
    for (int j = 0; j < kHidden1; ++j) {
        if (cache.h1[static_cast<std::size_t>(j)] <= 0.0) continue;
        const double d = dh1[static_cast<std::size_t>(j)];
        if (d == 0.0) continue;
        g_b1[j] += d;
        double* grow = g_w1 + j * in;
        for (int i = 0; i < in; ++i) grow[i] += d * x[i];
    }
}

// Standalone gradient of a single selected output unit. Q-learning only ever
// updates the chosen unit's value, so this is the whole training primitive.
inline std::vector<double> backward(const Mlp& net, const std::vector<double>& input,
                                    Head head, int unit, double loss_grad) {
    if (static_cast<int>(input.size()) != net.input_dim()) {
        throw std::invalid_argument("backward: input length mismatch");
    }
    if (unit < 0 || unit >= kHeadWidth) {
        throw std::invalid_argument("backward: unit index out of range");
    }
    ForwardCache cache;
    forward_cached(net, input.data(), cache);
    std::vector<double> grads(net.size(), 0.0);
    backward_unit(net, input.data(), cache, head, unit, loss_grad, grads);
    return grads;
}

enum class OptimizerKind { Sgd, Adam };

struct OptimizerState {
    OptimizerKind algorithm = OptimizerKind::Adam;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    long step_count = 0;
    std::vector<double> m; // first moment, allocated lazily to match params
    std::vector<double> v; // second moment

    void validate() const {
        if (!(learning_rate > 0.0)) {
            throw std::invalid_argument("learning_rate must be > 0");
        }
    }
};

// One optimizer step with a full gradient vector. Fails fast on non-finite
// gradients; shapes must match.
inline void step(Mlp& net, OptimizerState& opt, const std::vector<double>& grads) {
    opt.validate();
    if (grads.size() != net.size()) {
        throw std::invalid_argument("step: gradient size " + std::to_string(grads.size()) +
                                    " != parameter count " + std::to_string(net.size()));
    }
    for (std::size_t i = 0; i < grads.size(); ++i) {
        if (!std::isfinite(grads[i])) {
            throw std::runtime_error("step: non-finite gradient at index " +
                                     std::to_string(i) + " (value " +
                                     std::to_string(grads[i]) + ")");
        }
    }
    auto& p = net.params();
    if (opt.algorithm == OptimizerKind::Sgd) {
        for (std::size_t i = 0; i < p.size(); ++i) p[i] -= opt.learning_rate * grads[i];
        ++opt.step_count;
        return;
    }
    if (opt.m.size() != p.size()) opt.m.assign(p.size(), 0.0);
    if (opt.v.size() != p.size()) opt.v.assign(p.size(), 0.0);
    ++opt.step_count;
    const double bc1 = 1.0 - std::pow(opt.beta1, static_cast<double>(opt.step_count));
    const double bc2 = 1.0 - std::pow(opt.beta2, static_cast<double>(opt.step_count));
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double gi = grads[i];
        opt.m[i] = opt.beta1 * opt.m[i] + (1.0 - opt.beta1) * gi;
        opt.v[i] = opt.beta2 * opt.v[i] + (1.0 - opt.beta2) * gi * gi;
        const double m_hat = opt.m[i] / bc1;
        const double v_hat = opt.v[i] / bc2;
        p[i] -= opt.learning_rate * m_hat / (std::sqrt(v_hat) + opt.epsilon);
    }
}

// Debug/replay dump: header line with layer sizes, then one parameter per line.
inline void write_parameters(const Mlp& net, std::ostream& out) {
    out << "layers " << net.input_dim() << " " << kHidden1 << " " << kHidden2 << " "
        << kHeadWidth << " " << kHeadWidth << "\n";
    char buf[32];
    for (double v : net.params()) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << buf << "\n";
    }
}

} // namespace netcomm
