#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "colsim/errors.hpp"
#include "colsim/sarsa_agent.hpp"
#include "colsim/slicing_env.hpp"

namespace colsim {

enum class Mode { Constant, Adaptive, Ideal };

/// How an episode is split between serving users and shipping training data.
struct StrategyMode {
    Mode mode = Mode::Ideal;
    int t_rho = 0; // update decision periods per episode; ignored for Ideal

    /// "ideal", "constant:<t>" or "adaptive:<t>".
    [[nodiscard]] std::string name() const
    {
        switch (mode) {
        case Mode::Ideal: return "ideal";
        case Mode::Constant: return "constant:" + std::to_string(t_rho);
        case Mode::Adaptive: return "adaptive:" + std::to_string(t_rho);
        }
        return {};
    }

    static StrategyMode parse(std::string_view text)
    {
        if (text == "ideal") return StrategyMode{Mode::Ideal, 0};
        const auto colon = text.find(':');
        if (colon == std::string_view::npos) throw ConfigError("bad strategy '" + std::string(text) + "'");
        const auto kind = text.substr(0, colon);
        const std::string value(text.substr(colon + 1));
        StrategyMode m;
        if (kind == "constant") {
            m.mode = Mode::Constant;
        } else if (kind == "adaptive") {
            m.mode = Mode::Adaptive;
        } else {
            throw ConfigError("bad strategy '" + std::string(text) + "'");
        }
        std::size_t used = 0;
        try {
            m.t_rho = std::stoi(value, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != value.size() || value.empty() || m.t_rho < 0) {
            throw ConfigError("bad update length in strategy '" + std::string(text) + "'");
        }
        return m;
    }

    friend bool operator==(const StrategyMode&, const StrategyMode&) = default;
};

struct ScheduleParams {
    std::int64_t transition_bits = 704; // L_tr
    std::int64_t model_bits = 92256;    // L_NN
    int sync_every = 10;                // learning steps between model downloads
    int k_avg = 4000;                   // detector window, episodes
    int ideal_upload = 710;             // replay draw size for Ideal; 0 trains on fresh tuples only
};

// ---------------------------------------------------------------------------

/// Two adjacent windows of `window` episodes; fires (and stays fired) once
/// the newer window's mean reward is no larger than the older one's.
struct ConvergenceDetector {
    int window = 4000;
    std::vector<double> history;
    bool fired = false;
    int fired_at = -1; // number of episodes observed when it fired

    explicit ConvergenceDetector(int w = 4000) : window(w) { expects(w > 0, "detector window must be positive"); }
};

inline void update_detector(ConvergenceDetector& d, double episode_mean_reward)
{
    d.history.push_back(episode_mean_reward);
    if (d.fired) return;
    const auto w = static_cast<std::size_t>(d.window);
    const std::size_t n = d.history.size();
    if (n < 2 * w) return;
    // Summed directly, oldest first, so equal windows give bitwise-equal means.
    double now = 0.0;
    double prev = 0.0;
    for (std::size_t i = n - 2 * w; i < n - w; ++i) prev += d.history[i];
    for (std::size_t i = n - w; i < n; ++i) now += d.history[i];
    if (now / static_cast<double>(w) <= prev / static_cast<double>(w)) {
        d.fired = true;
        d.fired_at = static_cast<int>(n);
    }
}

// ---------------------------------------------------------------------------

struct EpisodePlan {
    int total_decisions = 100;
    int exploit_decisions = 100;
    int update_decisions = 0;
    bool sync_episode = false;
};

/// `prior_update_phases` counts earlier episodes that had an update phase
/// (for Ideal: earlier episodes). Every `sync_every`-th learning step syncs.
inline EpisodePlan plan_episode(const StrategyMode& mode, int episode_index, const ConvergenceDetector& detector,
                                int prior_update_phases, int total_decisions, int sync_every)
{
    expects(episode_index >= 0, "episode index must be non-negative");
    EpisodePlan plan;
    plan.total_decisions = total_decisions;
    switch (mode.mode) {
    case Mode::Constant: plan.update_decisions = mode.t_rho; break;
    case Mode::Adaptive: plan.update_decisions = detector.fired ? 0 : mode.t_rho; break;
    case Mode::Ideal: plan.update_decisions = 0; break;
    }
    if (plan.update_decisions > total_decisions) throw ConfigError("update phase longer than the episode");
    plan.exploit_decisions = total_decisions - plan.update_decisions;
    if (mode.mode == Mode::Ideal) {
        plan.sync_episode = prior_update_phases % sync_every == sync_every - 1;
    } else {
        plan.sync_episode = plan.update_decisions > 0 && prior_update_phases % sync_every == sync_every - 1;
    }
    return plan;
}

struct ChannelBudget {
    std::int64_t bits_available = 0;
    int transitions = 0;
    bool includes_model = false;
};

/// Link bits of the update phase and how many SARSA tuples fit after the
/// model download (if this episode syncs) is charged.
inline ChannelBudget channel_budget(const EpisodePlan& plan, const LinkConfig& link, const ScheduleParams& sched)
{
    expects(plan.update_decisions >= 0, "negative update phase");
    ChannelBudget b;
    b.bits_available = std::llround(static_cast<double>(plan.update_decisions) * link.decision_slots * link.bits_per_slot());
    b.includes_model = plan.sync_episode && plan.update_decisions > 0;
    const std::int64_t payload = b.bits_available - (b.includes_model ? sched.model_bits : 0);
    b.transitions = payload > 0 ? static_cast<int>(payload / sched.transition_bits) : 0;
    return b;
}

// ---------------------------------------------------------------------------

struct EpisodeResult {
    double mean_reward = 0.0;
    int transitions_sent = 0;
    int transitions_recorded = 0;
    int trained_on = 0;
    bool synced = false;
};

/// Streams used by a run: `env` drives traffic and application draws,
/// `agent` drives initialization, exploration and upload sampling.
struct RunStreams {
    std::mt19937_64 env;
    std::mt19937_64 agent;

    explicit RunStreams(std::uint64_t seed)
    {
        std::seed_seq env_seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x656e76u};
        std::seed_seq agent_seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x61676eu};
        env.seed(env_seq);
        agent.seed(agent_seq);
    }
};

/// One episode: exploitation decisions act with the inference network and
/// record SARSA tuples; update decisions leave the link to training traffic.
/// Afterwards the cloud trains on uploaded (or, for Ideal, all fresh)
/// transitions and syncs when the plan says so. `env` must be freshly reset.
inline EpisodeResult run_episode(SlicingEnv& env, AgentPair& agent, ReplayMemory& memory, const EpisodePlan& plan,
                                 const ChannelBudget& budget, Mode mode, RunStreams& rng, int ideal_upload = 0)
{
    EpisodeResult result;
    const double temperature = agent.params.temperature;
    double reward_sum = 0.0;
    std::vector<Transition> fresh;
    if (mode == Mode::Ideal) fresh.reserve(static_cast<std::size_t>(plan.exploit_decisions));

    if (plan.exploit_decisions > 0) {
        StateVector s = env.state();
        int a = select_action(agent.inference_net, s, env.allocation(), temperature, rng.agent);
        for (int k = 0; k < plan.exploit_decisions; ++k) {
            IntervalResult step = env.step_decision_interval(a, rng.env);
            reward_sum += step.mean_phi;
            const int a_next = select_action(agent.inference_net, step.state, env.allocation(), temperature, rng.agent);
            Transition t{std::move(s), a, step.state, step.mean_phi, a_next};
            if (mode == Mode::Ideal) fresh.push_back(t);
            memory.record(std::move(t));
            ++result.transitions_recorded;
            s = std::move(step.state);
            a = a_next;
        }
    }
    for (int k = 0; k < plan.update_decisions; ++k) reward_sum += env.step_update_interval(rng.env).mean_phi;
    result.mean_reward = reward_sum / plan.total_decisions;

    if (mode == Mode::Ideal) {
        if (ideal_upload > 0) fresh = draw_for_upload(memory, ideal_upload, rng.agent);
        sarsa_train(agent, fresh);
        result.trained_on = static_cast<int>(fresh.size());
        if (plan.sync_episode) {
            sync(agent);
            result.synced = true;
        }
    } else if (plan.update_decisions > 0) {
        const auto upload = draw_for_upload(memory, budget.transitions, rng.agent);
        result.transitions_sent = static_cast<int>(upload.size());
        result.trained_on = result.transitions_sent;
        sarsa_train(agent, upload);
        if (plan.sync_episode) {
            sync(agent);
            result.synced = true;
        }
    }
    return result;
}

// ---------------------------------------------------------------------------

struct EpisodeSummary {
    int episode = 0;
    int t_rho_effective = 0;
    EpisodeResult result;
    bool detector_fired = false;
};

/// A full coherence period for one strategy: owns the environment, the
/// agent pair, its replay memory and the convergence detector.
class CoherenceRun {
public:
    CoherenceRun(EnvConfig env_config, AgentParams agent_params, ScheduleParams sched, StrategyMode mode,
                 std::size_t memory_capacity, std::uint64_t seed)
        : env_(std::move(env_config)),
          agent_params_(agent_params),
          sched_(sched),
          mode_(mode),
          memory_(memory_capacity),
          detector_(sched.k_avg),
          rng_(seed)
    {
        reinitialize();
    }

    /// Fresh networks, optimizer, memory and detector, as at the start of a
    /// coherence period.
    void reinitialize()
    {
        agent_ = AgentPair::create(env_.state_size(), env_.action_count(), agent_params_, rng_.agent);
        memory_.clear();
        detector_ = ConvergenceDetector(sched_.k_avg);
        learning_steps_ = 0;
        episode_ = 0;
    }

    EpisodeSummary step_episode()
    {
        env_.account_flush();
        env_.reset(rng_.env);
        const EpisodePlan plan = plan_episode(mode_, episode_, detector_, learning_steps_,
                                              env_.config().link.decisions_per_episode(), sched_.sync_every);
        const ChannelBudget budget = channel_budget(plan, env_.config().link, sched_);
        EpisodeSummary out;
        out.episode = episode_;
        out.t_rho_effective = plan.update_decisions;
        out.result = run_episode(env_, agent_, memory_, plan, budget, mode_.mode, rng_, sched_.ideal_upload);
        if (mode_.mode == Mode::Ideal || plan.update_decisions > 0) ++learning_steps_;
        update_detector(detector_, out.result.mean_reward);
        out.detector_fired = detector_.fired;
        ++episode_;
        return out;
    }

    [[nodiscard]] SlicingEnv& env() { return env_; }
    [[nodiscard]] const AgentPair& agent() const { return agent_; }
    [[nodiscard]] const ReplayMemory& memory() const { return memory_; }
    [[nodiscard]] const ConvergenceDetector& detector() const { return detector_; }
    [[nodiscard]] int learning_steps() const { return learning_steps_; }

private:
    SlicingEnv env_;
    AgentParams agent_params_;
    ScheduleParams sched_;
    StrategyMode mode_;
    ReplayMemory memory_;
    ConvergenceDetector detector_;
    RunStreams rng_;
    AgentPair agent_;
    int learning_steps_ = 0;
    int episode_ = 0;
};

} // namespace colsim
