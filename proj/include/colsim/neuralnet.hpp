#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "colsim/errors.hpp"

namespace colsim {

struct LayerShape {
    int inputs = 0;
    int outputs = 0;

    [[nodiscard]] std::size_t weight_count() const { return static_cast<std::size_t>(inputs) * outputs; }
    [[nodiscard]] std::size_t param_count() const { return weight_count() + static_cast<std::size_t>(outputs); }
};

/// Fully connected action-value network: inputs -> 64 -> 32 -> actions,
/// ReLU on the hidden layers and a linear head.
///
/// All parameters live in one flat vector, layer-major; within a layer the
/// row-major weight matrix (outputs x inputs) comes first, then the bias.
/// Gradients share the same layout, so they are stored as a ValueNet too.
class ValueNet {
public:
    static constexpr int kLayers = 3;
    static constexpr int kHidden1 = 64;
    static constexpr int kHidden2 = 32;

    ValueNet() = default;

    ValueNet(int inputs, int actions)
        : shapes_{LayerShape{inputs, kHidden1}, LayerShape{kHidden1, kHidden2}, LayerShape{kHidden2, actions}}
    {
        expects(inputs > 0 && actions > 0, "network dimensions must be positive");
        std::size_t offset = 0;
        for (int l = 0; l < kLayers; ++l) {
            offsets_[static_cast<std::size_t>(l)] = offset;
            offset += shapes_[static_cast<std::size_t>(l)].param_count();
        }
        params_.assign(offset, 0.0);
    }

    /// Zero-valued network with the same shape; used for gradients.
    [[nodiscard]] ValueNet zeros_like() const
    {
        ValueNet z = *this;
        std::fill(z.params_.begin(), z.params_.end(), 0.0);
        return z;
    }

    [[nodiscard]] int inputs() const { return shapes_[0].inputs; }
    [[nodiscard]] int actions() const { return shapes_[kLayers - 1].outputs; }
    [[nodiscard]] const LayerShape& shape(int layer) const { return shapes_[static_cast<std::size_t>(layer)]; }
    [[nodiscard]] std::size_t size() const { return params_.size(); }

    [[nodiscard]] std::span<double> params() { return params_; }
    [[nodiscard]] std::span<const double> params() const { return params_; }

    /// Weight matrix of `layer`, row-major (outputs x inputs).
    [[nodiscard]] std::span<double> weights(int layer)
    {
        return std::span<double>(params_).subspan(offsets_[static_cast<std::size_t>(layer)], shape(layer).weight_count());
    }
    [[nodiscard]] std::span<const double> weights(int layer) const
    {
        return std::span<const double>(params_).subspan(offsets_[static_cast<std::size_t>(layer)],
                                                        shape(layer).weight_count());
    }
    [[nodiscard]] std::span<double> bias(int layer)
    {
        return std::span<double>(params_).subspan(offsets_[static_cast<std::size_t>(layer)] + shape(layer).weight_count(),
                                                  static_cast<std::size_t>(shape(layer).outputs));
    }
    [[nodiscard]] std::span<const double> bias(int layer) const
    {
        return std::span<const double>(params_).subspan(
            offsets_[static_cast<std::size_t>(layer)] + shape(layer).weight_count(),
            static_cast<std::size_t>(shape(layer).outputs));
    }

    [[nodiscard]] bool all_finite() const
    {
        for (double v : params_) {
            if (!std::isfinite(v)) return false;
        }
        return true;
    }

    friend bool operator==(const ValueNet& a, const ValueNet& b)
    {
        return a.params_ == b.params_ && a.inputs() == b.inputs() && a.actions() == b.actions();
    }

private:
    std::array<LayerShape, kLayers> shapes_{};
    std::array<std::size_t, kLayers> offsets_{};
    std::vector<double> params_;
};

namespace detail {

// out = W * in + b
inline void affine(std::span<const double> w, std::span<const double> b, std::span<const double> in,
                   std::span<double> out)
{
    const std::size_t n_in = in.size();
    for (std::size_t o = 0; o < out.size(); ++o) {
        const double* row = w.data() + o * n_in;
        double acc = b[o];
        for (std::size_t i = 0; i < n_in; ++i) acc += row[i] * in[i];
        out[o] = acc;
    }
}

inline void relu_inplace(std::span<double> v)
{
    for (double& x : v) x = x > 0.0 ? x : 0.0;
}

} // namespace detail

/// Hidden activations kept for backpropagation.
struct ForwardTrace {
    std::array<double, ValueNet::kHidden1> h1{};
    std::array<double, ValueNet::kHidden2> h2{};
    std::vector<double> q;
};

inline void forward(const ValueNet& net, std::span<const double> state, ForwardTrace& trace)
{
    expects(static_cast<int>(state.size()) == net.inputs(), "state size does not match the network input");
    trace.q.resize(static_cast<std::size_t>(net.actions()));
    detail::affine(net.weights(0), net.bias(0), state, trace.h1);
    detail::relu_inplace(trace.h1);
    detail::affine(net.weights(1), net.bias(1), trace.h1, trace.h2);
    detail::relu_inplace(trace.h2);
    detail::affine(net.weights(2), net.bias(2), trace.h2, trace.q);
}

inline std::vector<double> forward(const ValueNet& net, std::span<const double> state)
{
    ForwardTrace trace;
    forward(net, state, trace);
    return std::move(trace.q);
}

/// Adds scale * d/dtheta Q(state, action) into `grad`, given the trace of a
/// forward pass on `state`. ReLU derivative at 0 is taken as 0.
inline void accumulate_q_gradient(const ValueNet& net, std::span<const double> state, const ForwardTrace& trace,
                                  int action, double scale, ValueNet& grad)
{
    const int n_in = net.inputs();
    constexpr int h1n = ValueNet::kHidden1;
    constexpr int h2n = ValueNet::kHidden2;

    // head: dQ_a/dW3[a][j] = h2[j], dQ_a/db3[a] = 1
    auto gw3 = grad.weights(2);
    auto gb3 = grad.bias(2);
    const auto w3 = net.weights(2);
    for (int j = 0; j < h2n; ++j) gw3[static_cast<std::size_t>(action * h2n + j)] += scale * trace.h2[static_cast<std::size_t>(j)];
    gb3[static_cast<std::size_t>(action)] += scale;

    std::array<double, h2n> d2{};
    for (int j = 0; j < h2n; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        d2[ju] = trace.h2[ju] > 0.0 ? scale * w3[static_cast<std::size_t>(action * h2n + j)] : 0.0;
    }

    auto gw2 = grad.weights(1);
    auto gb2 = grad.bias(1);
    const auto w2 = net.weights(1);
    std::array<double, h1n> d1{};
    for (int j = 0; j < h2n; ++j) {
        const double dj = d2[static_cast<std::size_t>(j)];
        if (dj == 0.0) continue;
        gb2[static_cast<std::size_t>(j)] += dj;
        const std::size_t row = static_cast<std::size_t>(j) * h1n;
        for (int i = 0; i < h1n; ++i) {
            const auto iu = static_cast<std::size_t>(i);
            gw2[row + iu] += dj * trace.h1[iu];
            d1[iu] += dj * w2[row + iu];
        }
    }

    auto gw1 = grad.weights(0);
    auto gb1 = grad.bias(0);
    for (int i = 0; i < h1n; ++i) {
        const auto iu = static_cast<std::size_t>(i);
        if (!(trace.h1[iu] > 0.0) || d1[iu] == 0.0) continue;
        gb1[iu] += d1[iu];
        const std::size_t row = iu * static_cast<std::size_t>(n_in);
        for (int k = 0; k < n_in; ++k) gw1[row + static_cast<std::size_t>(k)] += d1[iu] * state[static_cast<std::size_t>(k)];
    }
}

/// Gradient of (Q(state, action) - target)^2 with respect to every parameter.
inline ValueNet grad_td_loss(const ValueNet& net, std::span<const double> state, int action, double target)
{
    expects(action >= 0 && action < net.actions(), "action index out of range");
    expects(std::isfinite(target), "TD target must be finite");
    ForwardTrace trace;
    forward(net, state, trace);
    ValueNet grad = net.zeros_like();
    const double residual = trace.q[static_cast<std::size_t>(action)] - target;
    if (residual != 0.0) accumulate_q_gradient(net, state, trace, action, 2.0 * residual, grad);
    return grad;
}

struct AdamState {
    double learning_rate = 1e-5; // zeta
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::int64_t step = 0;
    std::vector<double> m;
    std::vector<double> v;

    AdamState() = default;
    AdamState(std::size_t params, double lr) : learning_rate(lr), m(params, 0.0), v(params, 0.0) {}
};

/// One bias-corrected Adam update of `net` along `grad`.
inline void adam_step(ValueNet& net, AdamState& adam, const ValueNet& grad)
{
    expects(grad.size() == net.size(), "gradient shape does not match the network");
    if (adam.m.size() != net.size()) {
        adam.m.assign(net.size(), 0.0);
        adam.v.assign(net.size(), 0.0);
    }
    ++adam.step;
    const double c1 = 1.0 - std::pow(adam.beta1, static_cast<double>(adam.step));
    const double c2 = 1.0 - std::pow(adam.beta2, static_cast<double>(adam.step));
    auto p = net.params();
    const auto g = grad.params();
    for (std::size_t i = 0; i < p.size(); ++i) {
        adam.m[i] = adam.beta1 * adam.m[i] + (1.0 - adam.beta1) * g[i];
        adam.v[i] = adam.beta2 * adam.v[i] + (1.0 - adam.beta2) * g[i] * g[i];
        const double m_hat = adam.m[i] / c1;
        const double v_hat = adam.v[i] / c2;
        p[i] -= adam.learning_rate * m_hat / (std::sqrt(v_hat) + adam.epsilon);
    }
}

/// Glorot-uniform weights, zero biases.
template <std::uniform_random_bit_generator Rng>
ValueNet init_net(int inputs, int actions, Rng& rng)
{
    ValueNet net(inputs, actions);
    for (int l = 0; l < ValueNet::kLayers; ++l) {
        const auto& s = net.shape(l);
        const double bound = std::sqrt(6.0 / (s.inputs + s.outputs));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (double& w : net.weights(l)) w = dist(rng);
    }
    return net;
}

/// Deep copy; the two networks share nothing afterwards.
inline ValueNet copy_net(const ValueNet& src) { return src; }

/// Text dump: header line "colsim-valuenet <inputs> <actions> <count>", then
/// one parameter per line in flat layout order, printed with 17 significant
/// digits so a load restores the exact bits.
inline void save_net(const ValueNet& net, std::ostream& os)
{
    os << "colsim-valuenet " << net.inputs() << ' ' << net.actions() << ' ' << net.size() << '\n';
    const auto old = os.precision(std::numeric_limits<double>::max_digits10);
    for (double v : net.params()) os << v << '\n';
    os.precision(old);
}

inline ValueNet load_net(std::istream& is)
{
    std::string tag;
    int inputs = 0;
    int actions = 0;
    std::size_t count = 0;
    if (!(is >> tag >> inputs >> actions >> count) || tag != "colsim-valuenet") {
        throw DataError("not a value-network dump");
    }
    ValueNet net(inputs, actions);
    if (count != net.size()) throw DataError("parameter count does not match the header shape");
    for (double& v : net.params()) {
        if (!(is >> v)) throw DataError("truncated value-network dump");
    }
    return net;
}

} // namespace colsim
