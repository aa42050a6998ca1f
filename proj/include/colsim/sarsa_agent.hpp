#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "colsim/errors.hpp"
#include "colsim/neuralnet.hpp"
#include "colsim/slicing_env.hpp"

namespace colsim {

/// SARSA tuple (s, a, s', r, a').
struct Transition {
    StateVector s;
    int a = 0;
    StateVector s_next;
    double reward = 0.0;
    int a_next = 0;
};

/// Bounded FIFO of transitions; the oldest entry is evicted first.
class ReplayMemory {
public:
    explicit ReplayMemory(std::size_t capacity = 5000) : capacity_(capacity)
    {
        expects(capacity > 0, "replay capacity must be positive");
    }

    void record(Transition t)
    {
        entries_.push_back(std::move(t));
        if (entries_.size() > capacity_) entries_.pop_front();
    }

    [[nodiscard]] std::size_t size() const { return entries_.size(); }
    [[nodiscard]] std::size_t capacity() const { return capacity_; }
    [[nodiscard]] bool empty() const { return entries_.empty(); }
    [[nodiscard]] const Transition& operator[](std::size_t i) const { return entries_[i]; }
    void clear() { entries_.clear(); }

private:
    std::size_t capacity_;
    std::deque<Transition> entries_;
};

/// Copies min(budget, |memory|) entries chosen uniformly without replacement.
template <std::uniform_random_bit_generator Rng>
std::vector<Transition> draw_for_upload(const ReplayMemory& memory, int budget, Rng& rng)
{
    expects(budget >= 0, "upload budget must be non-negative");
    const std::size_t n = memory.size();
    const std::size_t k = std::min(n, static_cast<std::size_t>(budget));
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    // partial Fisher-Yates
    for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    std::vector<Transition> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) out.push_back(memory[idx[i]]);
    return out;
}

// ---------------------------------------------------------------------------
// Policies over a q-vector with invalid moves masked out.

/// Softmax over valid actions, exp(q/temperature) with max subtraction.
/// Masked actions get probability exactly 0.
inline std::vector<double> action_probabilities(std::span<const double> q, const Allocation& alloc, double temperature)
{
    expects(temperature > 0.0, "temperature must be positive");
    double qmax = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < q.size(); ++a) {
        if (action_valid(alloc, static_cast<int>(a))) qmax = std::max(qmax, q[a]);
    }
    std::vector<double> p(q.size(), 0.0);
    double z = 0.0;
    for (std::size_t a = 0; a < q.size(); ++a) {
        if (!action_valid(alloc, static_cast<int>(a))) continue;
        p[a] = std::exp((q[a] - qmax) / temperature);
        z += p[a];
    }
    for (double& v : p) v /= z;
    return p;
}

template <std::uniform_random_bit_generator Rng>
int sample_action(std::span<const double> q, const Allocation& alloc, double temperature, Rng& rng)
{
    const auto p = action_probabilities(q, alloc, temperature);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const double u = uni(rng);
    double acc = 0.0;
    int last_valid = 0;
    for (std::size_t a = 0; a < p.size(); ++a) {
        if (p[a] == 0.0) continue;
        last_valid = static_cast<int>(a);
        acc += p[a];
        if (u < acc) return last_valid;
    }
    return last_valid; // rounding left u >= acc
}

template <std::uniform_random_bit_generator Rng>
int select_action(const ValueNet& net, std::span<const double> state, const Allocation& alloc, double temperature,
                  Rng& rng)
{
    const auto q = forward(net, state);
    return sample_action(q, alloc, temperature, rng);
}

/// Argmax over valid actions; lowest index wins ties.
inline int greedy_action(std::span<const double> q, const Allocation& alloc)
{
    int best = 0;
    for (std::size_t a = 1; a < q.size(); ++a) {
        if (action_valid(alloc, static_cast<int>(a)) && q[a] > q[static_cast<std::size_t>(best)]) best = static_cast<int>(a);
    }
    return best;
}

inline int greedy_action(const ValueNet& net, std::span<const double> state, const Allocation& alloc)
{
    const auto q = forward(net, state);
    return greedy_action(q, alloc);
}

// ---------------------------------------------------------------------------

struct AgentParams {
    double gamma = 0.95;
    double learning_rate = 1e-5;
    double temperature = 0.1;
    int batch_size = 32;
    double initial_q = 14.0; // starting output bias, about 0.7 / (1 - gamma)
};

/// Inference network (acts at the base station) and training network
/// (updated in the cloud), plus the optimizer state of the latter.
struct AgentPair {
    ValueNet inference_net;
    ValueNet training_net;
    AdamState adam;
    AgentParams params;

    template <std::uniform_random_bit_generator Rng>
    static AgentPair create(int inputs, int actions, const AgentParams& params, Rng& rng)
    {
        expects(params.temperature > 0.0, "temperature must be positive");
        expects(params.gamma >= 0.0 && params.gamma < 1.0, "discount must lie in [0, 1)");
        expects(params.batch_size > 0, "batch size must be positive");
        AgentPair pair;
        pair.training_net = init_net(inputs, actions, rng);
        for (double& b : pair.training_net.bias(ValueNet::kLayers - 1)) b = params.initial_q;
        pair.inference_net = copy_net(pair.training_net);
        pair.adam = AdamState(pair.training_net.size(), params.learning_rate);
        pair.params = params;
        return pair;
    }
};

/// SARSA updates of the training network, one Adam step per minibatch of
/// `batch_size` (the last one may be partial), in the order received.
/// Targets r + gamma * Q(s', a') are computed before each step and held
/// fixed during it. Returns the number of Adam steps taken.
inline int sarsa_train(AgentPair& pair, std::span<const Transition> batch)
{
    const auto b = static_cast<std::size_t>(pair.params.batch_size);
    ValueNet& net = pair.training_net;
    ValueNet grad = net.zeros_like();
    std::vector<double> targets;
    ForwardTrace trace;
    int steps = 0;
    for (std::size_t start = 0; start < batch.size(); start += b) {
        const auto chunk = batch.subspan(start, std::min(b, batch.size() - start));
        targets.clear();
        for (const auto& t : chunk) {
            double target = t.reward;
            if (pair.params.gamma != 0.0) {
                forward(net, t.s_next, trace);
                target += pair.params.gamma * trace.q[static_cast<std::size_t>(t.a_next)];
            }
            targets.push_back(target);
        }
        std::fill(grad.params().begin(), grad.params().end(), 0.0);
        const double inv = 1.0 / static_cast<double>(chunk.size());
        for (std::size_t i = 0; i < chunk.size(); ++i) {
            forward(net, chunk[i].s, trace);
            const double residual = trace.q[static_cast<std::size_t>(chunk[i].a)] - targets[i];
            if (residual != 0.0) accumulate_q_gradient(net, chunk[i].s, trace, chunk[i].a, 2.0 * residual * inv, grad);
        }
        adam_step(net, pair.adam, grad);
        ++steps;
    }
    return steps;
}

/// Installs a copy of the training network as the inference network.
inline void sync(AgentPair& pair) { pair.inference_net = copy_net(pair.training_net); }

} // namespace colsim
