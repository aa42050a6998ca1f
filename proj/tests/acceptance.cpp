// Acceptance gate: one PASS/FAIL line per criterion.
//
//   colsim_acceptance                    criteria 1-7 and 9
//   colsim_acceptance --criterion 6      a single criterion
//   colsim_acceptance --full             also the optional full-scale check (hours)
//   colsim_acceptance --digest           print the criterion 1-5 digests only

#include <cstdio>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "colsim/harness.hpp"
#include "colsim/validation.hpp"

using namespace colsim;
using validation::CheckResult;

namespace {

std::string fmt(double v, const char* spec = "%.4f")
{
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string exact(double v) { return fmt(v, "%.17g"); }

double window_mean(const std::vector<double>& curve, int from, int to)
{
    double sum = 0.0;
    for (int k = from; k < to; ++k) sum += curve[static_cast<std::size_t>(k)];
    return sum / (to - from);
}

// ---------------------------------------------------------------------------
// Criterion 5.

enum class FixedPolicy { UniformRandom, EvenSplit };

/// Episode rewards of a policy that never learns, on the same traffic
/// stream a learning run with this seed would see.
std::vector<double> fixed_policy_rollout(const ExperimentConfig& c, std::uint64_t seed, FixedPolicy policy)
{
    SlicingEnv env(c.env);
    RunStreams rng(seed);
    std::vector<double> rewards;
    std::vector<int> valid;
    for (int k = 0; k < c.episodes; ++k) {
        env.reset(rng.env);
        double sum = 0.0;
        const int decisions = c.env.link.decisions_per_episode();
        for (int d = 0; d < decisions; ++d) {
            int a = 0;
            if (policy == FixedPolicy::UniformRandom) {
                valid.clear();
                for (int i = 0; i < env.action_count(); ++i) {
                    if (action_valid(env.allocation(), i)) valid.push_back(i);
                }
                std::uniform_int_distribution<std::size_t> pick(0, valid.size() - 1);
                a = valid[pick(rng.agent)];
            }
            sum += env.step_decision_interval(a, rng.env).mean_phi;
        }
        rewards.push_back(sum / decisions);
    }
    return rewards;
}

CheckResult learning_sanity()
{
    CheckResult r;
    r.name = "learning sanity (ideal, frozen NCVI+CVI)";
    ExperimentConfig c;
    c.env.fixed_apps = {AppKind::NCVI, AppKind::CVI};
    c.agent.learning_rate = 1e-3;
    c.episodes = 1000;
    const StrategyMode ideal{Mode::Ideal, 0};
    const int seeds = 3;
    const int tail_from = c.episodes - 200;
    double learned = 0.0, random = 0.0, even = 0.0;
    for (int s = 0; s < seeds; ++s) {
        std::vector<double> curve;
        simulate_run(c, ideal, s, [&](const EpisodeRecord& rec) { curve.push_back(rec.mean_phi); });
        const std::uint64_t seed = run_seed(c.base_seed, ideal, s, c.common_random_numbers);
        const double l = window_mean(curve, tail_from, c.episodes);
        const double u = window_mean(fixed_policy_rollout(c, seed, FixedPolicy::UniformRandom), tail_from, c.episodes);
        const double e = window_mean(fixed_policy_rollout(c, seed, FixedPolicy::EvenSplit), tail_from, c.episodes);
        r.digest += "seed" + std::to_string(s) + ":" + exact(l) + "," + exact(u) + "," + exact(e) + ";";
        learned += l / seeds;
        random += u / seeds;
        even += e / seeds;
    }
    r.passed = learned >= random + 0.10 && learned >= even + 0.02;
    r.detail = "final-200 mean " + fmt(learned) + " vs random " + fmt(random) + " (need +0.10) and even split " +
               fmt(even) + " (need +0.02)";
    return r;
}

// ---------------------------------------------------------------------------
// Criteria 6 and 7.

ExperimentConfig trend_config(int episodes)
{
    ExperimentConfig c;
    c.episodes = episodes;
    c.common_random_numbers = true;
    return c;
}

CheckResult cost_of_learning_trend()
{
    CheckResult r;
    r.name = "cost-of-learning trend (10 seeds, K=4000)";
    const ExperimentConfig c = trend_config(4000);
    const int seeds = 10;
    const auto ideal = mean_curve(c, StrategyMode{Mode::Ideal, 0}, seeds);
    const auto t1 = mean_curve(c, StrategyMode{Mode::Constant, 1}, seeds);
    const auto t3 = mean_curve(c, StrategyMode{Mode::Constant, 3}, seeds);
    const double late_i = window_mean(ideal, 3500, 4000);
    const double late_1 = window_mean(t1, 3500, 4000);
    const double late_3 = window_mean(t3, 3500, 4000);
    const double early_1 = window_mean(t1, 200, 800);
    const double early_3 = window_mean(t3, 200, 800);
    const bool i_ok = late_i > late_3 && late_i > late_1;
    const bool ii_ok = late_3 >= late_1 + 0.01;
    const bool iii_ok = early_3 >= early_1;
    r.passed = i_ok && ii_ok && iii_ok;
    r.detail = "episodes 3500-4000: ideal " + fmt(late_i) + ", T3 " + fmt(late_3) + ", T1 " + fmt(late_1) +
               " (i " + (i_ok ? "ok" : "no") + ", ii gap " + fmt(late_3 - late_1) + (ii_ok ? " ok" : " < 0.01") +
               "); episodes 200-800: T3 " + fmt(early_3) + " vs T1 " + fmt(early_1) + (iii_ok ? " ok" : " no");
    return r;
}

CheckResult adaptive_benefit()
{
    CheckResult r;
    r.name = "adaptive strategy benefit (5 seeds, K=10000, K_avg=1500)";
    ExperimentConfig c = trend_config(10000);
    c.sched.k_avg = 1500;
    const int seeds = 5;
    const auto adaptive = mean_curve(c, StrategyMode{Mode::Adaptive, 4}, seeds);
    const auto constant = mean_curve(c, StrategyMode{Mode::Constant, 4}, seeds);
    const double a = window_mean(adaptive, 9000, 10000);
    const double k = window_mean(constant, 9000, 10000);
    r.passed = a >= k + 0.005;
    r.detail = "final 1000 episodes: adaptive " + fmt(a) + " vs constant " + fmt(k) + " (gap " + fmt(a - k) +
               ", need 0.005)";
    return r;
}

// ---------------------------------------------------------------------------
// Criterion 8 (optional).

CheckResult full_scale(int runs)
{
    CheckResult r;
    r.name = "full-scale plateaus (" + std::to_string(runs) + " runs, K=10000)";
    ExperimentConfig c = trend_config(10000);
    const std::vector<std::pair<StrategyMode, double>> anchors{
        {{Mode::Ideal, 0}, 0.864}, {{Mode::Constant, 1}, 0.835}, {{Mode::Constant, 2}, 0.8425}, {{Mode::Constant, 3}, 0.8425}};
    bool ok = true;
    for (const auto& [mode, anchor] : anchors) {
        const auto curve = mean_curve(c, mode, runs);
        const double v = window_mean(curve, 9607, 10000); // two sampling strides ending at the last point
        ok = ok && std::abs(v - anchor) <= 0.03;
        r.detail += mode.name() + " " + fmt(v) + " (anchor " + fmt(anchor, "%.4g") + ") ";
    }
    double best = -1.0;
    int best_t = 0;
    for (int t = 1; t <= 5; ++t) {
        const double v = window_mean(mean_curve(c, StrategyMode{Mode::Adaptive, t}, runs), 0, 10000);
        if (v > best) {
            best = v;
            best_t = t;
        }
    }
    ok = ok && best_t == 4;
    r.detail += "adaptive argmax T=" + std::to_string(best_t);
    r.passed = ok;
    return r;
}

// ---------------------------------------------------------------------------

CheckResult run_fast(int criterion)
{
    switch (criterion) {
    case 1: return validation::environment_oracles();
    case 2: return validation::conservation_property();
    case 3: return validation::gradient_check();
    case 4: return validation::channel_budget_arithmetic();
    case 5: return learning_sanity();
    default: break;
    }
    throw std::logic_error("not a digestible criterion");
}

std::string digest_1_to_5()
{
    std::string out;
    for (int c = 1; c <= 5; ++c) out += "criterion " + std::to_string(c) + ": " + run_fast(c).digest + "\n";
    return out;
}

std::string self_path()
{
    std::error_code ec;
    const auto p = std::filesystem::read_symlink("/proc/self/exe", ec);
    return ec ? std::string("colsim_acceptance") : p.string();
}

CheckResult determinism()
{
    CheckResult r;
    r.name = "determinism of criteria 1-5";
    const std::string here = digest_1_to_5();
    std::string there;
    FILE* pipe = popen((self_path() + " --digest").c_str(), "r");
    if (pipe != nullptr) {
        char buf[4096];
        while (std::fgets(buf, sizeof buf, pipe) != nullptr) there += buf;
        pclose(pipe);
    }
    r.passed = !here.empty() && here == there;
    r.detail = r.passed ? std::to_string(here.size()) + " digest bytes identical across two processes"
                        : "digests differ between executions";
    return r;
}

CheckResult run_criterion(int c, int full_runs)
{
    switch (c) {
    case 6: return cost_of_learning_trend();
    case 7: return adaptive_benefit();
    case 8: return full_scale(full_runs);
    case 9: return determinism();
    default: return run_fast(c);
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"colsim acceptance criteria"};
    std::vector<int> only;
    bool full = false;
    bool digest = false;
    int full_runs = 100;
    app.add_option("--criterion", only, "run only these criteria (1-9)")->check(CLI::Range(1, 9));
    app.add_flag("--full", full, "include the optional full-scale check");
    app.add_option("--full-runs", full_runs, "runs per strategy for the full-scale check")->check(CLI::PositiveNumber);
    app.add_flag("--digest", digest, "print criterion 1-5 digests and exit");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    if (digest) {
        std::cout << digest_1_to_5();
        return 0;
    }

    std::set<int> selected(only.begin(), only.end());
    if (selected.empty()) {
        selected = {1, 2, 3, 4, 5, 6, 7, 9};
        if (full) selected.insert(8);
    }
    bool all_passed = true;
    for (int c : selected) {
        if (c == 8 && !full && only.empty()) continue;
        const CheckResult r = run_criterion(c, full_runs);
        std::cout << (r.passed ? "PASS" : "FAIL") << " criterion " << c << " (" << r.name << "): " << r.detail
                  << std::endl;
        all_passed = all_passed && r.passed;
    }
    if (!full && only.empty()) std::cout << "SKIP criterion 8 (optional full-scale check; pass --full)" << std::endl;
    return all_passed ? 0 : 1;
}
