#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "colsim/errors.hpp"
#include "colsim/scheduler.hpp"

namespace colsim {

struct AppTableEntry {
    double bitrate_kbps = 0.0;
    double delay_budget_ms = 0.0;
    double p_stay = 0.9;
};

/// Everything a sweep needs. Loaded from flat `key = value` text.
struct ExperimentConfig {
    EnvConfig env;
    std::array<AppTableEntry, kNumAppKinds> apps{{{25.0, 100.0, 0.9}, {384.0, 300.0, 0.9}, {25.0, 75.0, 0.9}, {384.0, 100.0, 0.9}}};
    AgentParams agent;
    ScheduleParams sched;
    int episodes = 10000; // K
    std::size_t memory_capacity = 5000;
    std::vector<StrategyMode> strategies{StrategyMode{Mode::Ideal, 0}};
    int num_runs = 1;
    std::uint64_t base_seed = 1;
    std::string output_dir = "out";
    int sample_stride = 196;
    int smoothing_window = 196;
    bool common_random_numbers = false;
    int threads = 1;

    /// Rebuilds per-application profiles from the table (depends on the slot length).
    void rebuild_profiles()
    {
        for (int i = 0; i < kNumAppKinds; ++i) {
            const auto& a = apps[static_cast<std::size_t>(i)];
            env.profiles[static_cast<std::size_t>(i)] =
                make_profile(static_cast<AppKind>(i), a.bitrate_kbps, a.delay_budget_ms, a.p_stay, env.link.slot_seconds);
        }
    }

    void validate() const
    {
        env.validate();
        if (episodes <= 0) throw ConfigError("episodes must be positive");
        if (memory_capacity == 0) throw ConfigError("memory_capacity must be positive");
        if (strategies.empty()) throw ConfigError("strategies must not be empty");
        if (num_runs < 1) throw ConfigError("num_runs must be at least 1");
        if (sample_stride <= 0) throw ConfigError("sample_stride must be positive");
        if (smoothing_window <= 0) throw ConfigError("smoothing_window must be positive");
        if (threads < 1) throw ConfigError("threads must be at least 1");
        if (!(agent.temperature > 0.0)) throw ConfigError("temperature must be positive");
        if (!(agent.gamma >= 0.0 && agent.gamma < 1.0)) throw ConfigError("gamma must lie in [0, 1)");
        if (!(agent.learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
        if (agent.batch_size <= 0) throw ConfigError("batch_size must be positive");
        if (sched.transition_bits <= 0 || sched.model_bits < 0) throw ConfigError("transition/model bits invalid");
        if (sched.sync_every <= 0) throw ConfigError("sync_every must be positive");
        if (sched.k_avg <= 0) throw ConfigError("k_avg must be positive");
        if (sched.ideal_upload < 0) throw ConfigError("ideal_upload must be non-negative");
        for (const auto& s : strategies) {
            if (s.mode != Mode::Ideal && s.t_rho > env.link.decisions_per_episode()) {
                throw ConfigError("strategy " + s.name() + " has an update phase longer than the episode");
            }
        }
    }
};

namespace detail {

inline std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value)
{
    std::istringstream is(value);
    T out{};
    is >> out;
    if (is.fail() || !is.eof()) throw ConfigError("invalid value '" + value + "' for key '" + key + "'");
    return out;
}

inline bool parse_bool(const std::string& key, const std::string& value)
{
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError("invalid value '" + value + "' for key '" + key + "'");
}

} // namespace detail

/// Applies one `key = value` setting. Unknown keys raise ConfigError naming the key.
inline void apply_setting(ExperimentConfig& c, const std::string& key, const std::string& value)
{
    using detail::parse_bool;
    using detail::parse_number;
    auto& link = c.env.link;
    if (key == "slot_seconds") link.slot_seconds = parse_number<double>(key, value);
    else if (key == "capacity_bps") link.capacity_bps = parse_number<double>(key, value);
    else if (key == "num_blocks") link.num_blocks = parse_number<int>(key, value);
    else if (key == "packet_bits") link.packet_bits = parse_number<int>(key, value);
    else if (key == "buffer_packets") link.buffer_packets = parse_number<int>(key, value);
    else if (key == "decision_slots") link.decision_slots = parse_number<int>(key, value);
    else if (key == "episode_slots") link.episode_slots = parse_number<int>(key, value);
    else if (key == "episodes") c.episodes = parse_number<int>(key, value);
    else if (key == "num_users") c.env.num_users = parse_number<int>(key, value);
    else if (key == "fixed_apps") {
        c.env.fixed_apps.clear();
        if (!value.empty()) {
            for (const auto& name : detail::split(value, ',')) c.env.fixed_apps.push_back(parse_app_kind(name));
        }
    }
    else if (key == "gamma") c.agent.gamma = parse_number<double>(key, value);
    else if (key == "learning_rate") c.agent.learning_rate = parse_number<double>(key, value);
    else if (key == "temperature") c.agent.temperature = parse_number<double>(key, value);
    else if (key == "batch_size") c.agent.batch_size = parse_number<int>(key, value);
    else if (key == "initial_q") c.agent.initial_q = parse_number<double>(key, value);
    else if (key == "memory_capacity") c.memory_capacity = parse_number<std::size_t>(key, value);
    else if (key == "transition_bits") c.sched.transition_bits = parse_number<std::int64_t>(key, value);
    else if (key == "model_bits") c.sched.model_bits = parse_number<std::int64_t>(key, value);
    else if (key == "sync_every") c.sched.sync_every = parse_number<int>(key, value);
    else if (key == "k_avg") c.sched.k_avg = parse_number<int>(key, value);
    else if (key == "ideal_upload") c.sched.ideal_upload = parse_number<int>(key, value);
    else if (key == "strategies") {
        c.strategies.clear();
        for (const auto& s : detail::split(value, ',')) {
            if (!s.empty()) c.strategies.push_back(StrategyMode::parse(s));
        }
    }
    else if (key == "num_runs") c.num_runs = parse_number<int>(key, value);
    else if (key == "base_seed") c.base_seed = parse_number<std::uint64_t>(key, value);
    else if (key == "output_dir") c.output_dir = value;
    else if (key == "sample_stride") c.sample_stride = parse_number<int>(key, value);
    else if (key == "smoothing_window") c.smoothing_window = parse_number<int>(key, value);
    else if (key == "common_random_numbers") c.common_random_numbers = parse_bool(key, value);
    else if (key == "threads") c.threads = parse_number<int>(key, value);
    else if (key.starts_with("app.")) {
        // app.<NAME>.<field>
        const auto parts = detail::split(key, '.');
        if (parts.size() != 3) throw ConfigError("unknown config key '" + key + "'");
        auto& entry = c.apps[static_cast<std::size_t>(parse_app_kind(parts[1]))];
        if (parts[2] == "bitrate_kbps") entry.bitrate_kbps = parse_number<double>(key, value);
        else if (parts[2] == "delay_budget_ms") entry.delay_budget_ms = parse_number<double>(key, value);
        else if (parts[2] == "p_stay") entry.p_stay = parse_number<double>(key, value);
        else throw ConfigError("unknown config key '" + key + "'");
    }
    else throw ConfigError("unknown config key '" + key + "'");
}

/// Parses flat `key = value` lines; `#` starts a comment.
inline ExperimentConfig parse_config(std::istream& in)
{
    ExperimentConfig c;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string t = detail::trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        apply_setting(c, detail::trim(std::string_view(t).substr(0, eq)), detail::trim(std::string_view(t).substr(eq + 1)));
    }
    c.rebuild_profiles();
    c.validate();
    return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    return parse_config(in);
}

// ---------------------------------------------------------------------------
// Seeding.

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// base_seed xor hash(strategy, run). With common random numbers the
/// strategy is left out, so every strategy sees the same traffic per run.
inline std::uint64_t run_seed(std::uint64_t base_seed, const StrategyMode& strategy, int run_id, bool common_random_numbers)
{
    const std::uint64_t tag = common_random_numbers ? 0 : fnv1a(strategy.name());
    return base_seed ^ splitmix64(tag ^ splitmix64(static_cast<std::uint64_t>(run_id)));
}

// ---------------------------------------------------------------------------
// Records.

struct EpisodeRecord {
    int run_id = 0;
    int episode = 0;
    std::string strategy;
    int t_rho_effective = 0;
    double mean_phi = 0.0;
    int transitions_sent = 0;
    bool synced = false;
    bool detector_fired = false;
};

inline constexpr std::string_view kRecordsHeader =
    "run_id,episode,strategy,t_rho_effective,mean_phi,transitions_sent,synced,detector_fired";

inline void write_record(std::ostream& os, const EpisodeRecord& r)
{
    char phi[32];
    std::snprintf(phi, sizeof phi, "%.17g", r.mean_phi);
    os << r.run_id << ',' << r.episode << ',' << r.strategy << ',' << r.t_rho_effective << ',' << phi << ','
       << r.transitions_sent << ',' << (r.synced ? 1 : 0) << ',' << (r.detector_fired ? 1 : 0) << '\n';
}

inline std::vector<EpisodeRecord> read_records(std::istream& in)
{
    std::vector<EpisodeRecord> out;
    std::string line;
    if (!std::getline(in, line) || detail::trim(line) != kRecordsHeader) throw DataError("records file lacks the expected header");
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        const auto f = detail::split(line, ',');
        if (f.size() != 8) throw DataError("records line " + std::to_string(lineno) + ": expected 8 fields");
        try {
            EpisodeRecord r;
            r.run_id = std::stoi(f[0]);
            r.episode = std::stoi(f[1]);
            r.strategy = f[2];
            r.t_rho_effective = std::stoi(f[3]);
            r.mean_phi = std::stod(f[4]);
            r.transitions_sent = std::stoi(f[5]);
            r.synced = f[6] == "1";
            r.detector_fired = f[7] == "1";
            out.push_back(std::move(r));
        } catch (const std::exception&) {
            throw DataError("records line " + std::to_string(lineno) + ": malformed field");
        }
    }
    return out;
}

inline std::vector<EpisodeRecord> read_records(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw DataError("cannot open records file " + path.string());
    return read_records(in);
}

// ---------------------------------------------------------------------------
// Simulation.

using EpisodeCallback = std::function<void(const EpisodeRecord&)>;

/// Simulates one coherence period of `strategy` for run `run_id`.
inline void simulate_run(const ExperimentConfig& config, const StrategyMode& strategy, int run_id,
                         const EpisodeCallback& on_episode)
{
    CoherenceRun run(config.env, config.agent, config.sched, strategy, config.memory_capacity,
                     run_seed(config.base_seed, strategy, run_id, config.common_random_numbers));
    const std::string name = strategy.name();
    for (int k = 0; k < config.episodes; ++k) {
        const EpisodeSummary s = run.step_episode();
        EpisodeRecord r;
        r.run_id = run_id;
        r.episode = s.episode;
        r.strategy = name;
        r.t_rho_effective = s.t_rho_effective;
        r.mean_phi = s.result.mean_reward;
        r.transitions_sent = s.result.transitions_sent;
        r.synced = s.result.synced;
        r.detector_fired = s.detector_fired;
        on_episode(r);
    }
}

inline std::vector<EpisodeRecord> simulate_run(const ExperimentConfig& config, const StrategyMode& strategy, int run_id)
{
    std::vector<EpisodeRecord> out;
    out.reserve(static_cast<std::size_t>(config.episodes));
    simulate_run(config, strategy, run_id, [&](const EpisodeRecord& r) { out.push_back(r); });
    return out;
}

/// Mean over runs of per-run episode rewards, indexed by episode.
inline std::vector<double> mean_curve(const ExperimentConfig& config, const StrategyMode& strategy, int runs)
{
    std::vector<double> curve(static_cast<std::size_t>(config.episodes), 0.0);
    for (int r = 0; r < runs; ++r) {
        simulate_run(config, strategy, r, [&](const EpisodeRecord& rec) {
            curve[static_cast<std::size_t>(rec.episode)] += rec.mean_phi / runs;
        });
    }
    return curve;
}

struct ExperimentOutput {
    std::filesystem::path records_file;
    std::size_t record_count = 0;
};

/// Runs every (strategy, run) pair and writes `records.csv` plus
/// `metadata.txt` into the output directory. Each pair first streams to
/// its own part file; parts are concatenated in (strategy, run) order so
/// the result does not depend on scheduling.
inline ExperimentOutput run_experiment(const ExperimentConfig& config,
                                       const std::function<void(const std::string&)>& progress = {})
{
    config.validate();
    namespace fs = std::filesystem;
    const fs::path out_dir(config.output_dir);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    const fs::path parts_dir = out_dir / "parts";
    fs::create_directories(parts_dir, ec);
    {
        std::ofstream probe(out_dir / "records.csv");
        if (!probe) throw ConfigError("output directory " + out_dir.string() + " is not writable");
    }

    struct Job {
        StrategyMode strategy;
        int run_id;
        fs::path part;
    };
    std::vector<Job> jobs;
    for (std::size_t s = 0; s < config.strategies.size(); ++s) {
        for (int r = 0; r < config.num_runs; ++r) {
            jobs.push_back(Job{config.strategies[s], r, parts_dir / ("part-" + std::to_string(s) + "-" + std::to_string(r) + ".csv")});
        }
    }

    std::mutex mu;
    std::size_t next = 0;
    std::exception_ptr failure;
    auto worker = [&]() {
        while (true) {
            std::size_t j = 0;
            {
                std::lock_guard lock(mu);
                if (next >= jobs.size() || failure) return;
                j = next++;
            }
            try {
                std::ofstream part(jobs[j].part);
                if (!part) throw ConfigError("cannot write " + jobs[j].part.string());
                simulate_run(config, jobs[j].strategy, jobs[j].run_id, [&](const EpisodeRecord& r) { write_record(part, r); });
                if (progress) {
                    std::lock_guard lock(mu);
                    progress(jobs[j].strategy.name() + " run " + std::to_string(jobs[j].run_id) + " done");
                }
            } catch (...) {
                std::lock_guard lock(mu);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const int n_threads = std::min<int>(config.threads, static_cast<int>(jobs.size()));
    std::vector<std::thread> pool;
    for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);

    ExperimentOutput result;
    result.records_file = out_dir / "records.csv";
    std::ofstream records(result.records_file, std::ios::binary);
    records << kRecordsHeader << '\n';
    for (const auto& job : jobs) {
        std::ifstream part(job.part, std::ios::binary);
        std::string line;
        while (std::getline(part, line)) {
            records << line << '\n';
            ++result.record_count;
        }
        part.close();
        fs::remove(job.part, ec);
    }
    fs::remove(parts_dir, ec);

    std::ofstream meta(out_dir / "metadata.txt");
    meta << "episodes = " << config.episodes << '\n'
         << "num_runs = " << config.num_runs << '\n'
         << "base_seed = " << config.base_seed << '\n'
         << "common_random_numbers = " << (config.common_random_numbers ? "true" : "false") << '\n'
         << "sample_stride = " << config.sample_stride << '\n'
         << "smoothing_window = " << config.smoothing_window << '\n'
         << "strategies = ";
    for (std::size_t s = 0; s < config.strategies.size(); ++s) meta << (s ? "," : "") << config.strategies[s].name();
    meta << '\n';
    return result;
}

// ---------------------------------------------------------------------------
// Aggregation.

/// Nearest-rank percentile of sorted data: element ceil(p/100 * n), 1-based.
inline double nearest_rank(std::span<const double> sorted, double p)
{
    expects(!sorted.empty(), "percentile of empty data");
    const auto n = static_cast<double>(sorted.size());
    auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * n));
    rank = std::clamp<std::size_t>(rank, 1, sorted.size());
    return sorted[rank - 1];
}

struct AggregateRow {
    int episode = 0;
    std::string strategy;
    double mean = 0.0;
    double p5 = 0.0;
    double p25 = 0.0;
    double p50 = 0.0;
    double p75 = 0.0;
    double p95 = 0.0;
};

/// Records regrouped as strategy -> run -> per-episode rewards. Throws
/// DataError naming the first missing (strategy, run, episode).
inline std::map<std::string, std::map<int, std::vector<double>>> group_records(std::span<const EpisodeRecord> records)
{
    std::map<std::string, std::map<int, std::map<int, double>>> raw;
    std::map<std::string, int> horizon;
    for (const auto& r : records) {
        auto& slot = raw[r.strategy][r.run_id];
        if (!slot.emplace(r.episode, r.mean_phi).second) {
            throw DataError("duplicate record for strategy " + r.strategy + ", run " + std::to_string(r.run_id) +
                            ", episode " + std::to_string(r.episode));
        }
        horizon[r.strategy] = std::max(horizon[r.strategy], r.episode + 1);
    }
    std::map<std::string, std::map<int, std::vector<double>>> out;
    for (const auto& [strategy, runs] : raw) {
        const int n = horizon[strategy];
        for (const auto& [run, episodes] : runs) {
            std::vector<double> series;
            series.reserve(static_cast<std::size_t>(n));
            for (int e = 0; e < n; ++e) {
                const auto it = episodes.find(e);
                if (it == episodes.end()) {
                    throw DataError("missing record for strategy " + strategy + ", run " + std::to_string(run) +
                                    ", episode " + std::to_string(e));
                }
                series.push_back(it->second);
            }
            out[strategy][run] = std::move(series);
        }
    }
    return out;
}

/// At episodes stride, 2*stride, ...: each run's reward is first averaged
/// over the trailing `window` episodes, then mean and nearest-rank
/// percentiles are taken across runs.
inline std::vector<AggregateRow> aggregate(std::span<const EpisodeRecord> records, int stride, int window)
{
    expects(stride > 0 && window > 0, "stride and window must be positive");
    std::vector<AggregateRow> rows;
    for (const auto& [strategy, runs] : group_records(records)) {
        const int horizon = static_cast<int>(runs.begin()->second.size());
        std::vector<double> values;
        for (int e = stride; e <= horizon; e += stride) {
            values.clear();
            for (const auto& [run, series] : runs) {
                const int lo = std::max(0, e - window);
                double sum = 0.0;
                for (int k = lo; k < e; ++k) sum += series[static_cast<std::size_t>(k)];
                values.push_back(sum / (e - lo));
            }
            std::sort(values.begin(), values.end());
            AggregateRow row;
            row.episode = e;
            row.strategy = strategy;
            double total = 0.0;
            for (double v : values) total += v;
            row.mean = total / static_cast<double>(values.size());
            row.p5 = nearest_rank(values, 5);
            row.p25 = nearest_rank(values, 25);
            row.p50 = nearest_rank(values, 50);
            row.p75 = nearest_rank(values, 75);
            row.p95 = nearest_rank(values, 95);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

inline constexpr std::string_view kAggregateHeader = "episode,strategy,mean,p5,p25,p50,p75,p95";

inline void write_aggregate(std::ostream& os, std::span<const AggregateRow> rows)
{
    os << kAggregateHeader << '\n';
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%d,%s,%.9f,%.9f,%.9f,%.9f,%.9f,%.9f\n", r.episode, r.strategy.c_str(), r.mean,
                      r.p5, r.p25, r.p50, r.p75, r.p95);
        os << buf;
    }
}

// ---------------------------------------------------------------------------
// Sweep summary: the empirical argmax over update lengths.

struct StrategySummary {
    std::string strategy;
    StrategyMode mode;
    int runs = 0;
    int episodes = 0;
    double mean_reward = 0.0; // mean of episode means over all episodes and runs
    int fired_runs = 0;
    std::vector<int> convergence_episodes; // per run: first fired episode, or the horizon
};

struct SweepSummary {
    std::vector<StrategySummary> strategies;
    std::optional<std::string> best_constant;
    std::optional<std::string> best_adaptive;
};

inline SweepSummary sweep_report(std::span<const EpisodeRecord> records)
{
    std::map<std::pair<std::string, int>, int> first_fired;
    for (const auto& r : records) {
        if (!r.detector_fired) continue;
        auto key = std::make_pair(r.strategy, r.run_id);
        auto it = first_fired.find(key);
        if (it == first_fired.end() || r.episode < it->second) first_fired[key] = r.episode;
    }
    SweepSummary out;
    double best_c = -1.0;
    double best_a = -1.0;
    for (const auto& [strategy, runs] : group_records(records)) {
        StrategySummary s;
        s.strategy = strategy;
        s.mode = StrategyMode::parse(strategy);
        s.runs = static_cast<int>(runs.size());
        s.episodes = static_cast<int>(runs.begin()->second.size());
        double total = 0.0;
        for (const auto& [run, series] : runs) {
            for (double v : series) total += v;
            const auto it = first_fired.find({strategy, run});
            if (it != first_fired.end()) {
                ++s.fired_runs;
                s.convergence_episodes.push_back(it->second);
            } else {
                s.convergence_episodes.push_back(s.episodes);
            }
        }
        s.mean_reward = total / (static_cast<double>(s.runs) * s.episodes);
        if (s.mode.mode == Mode::Constant && s.mean_reward > best_c) {
            best_c = s.mean_reward;
            out.best_constant = strategy;
        }
        if (s.mode.mode == Mode::Adaptive && s.mean_reward > best_a) {
            best_a = s.mean_reward;
            out.best_adaptive = strategy;
        }
        out.strategies.push_back(std::move(s));
    }
    return out;
}

inline void write_summary(std::ostream& os, const SweepSummary& summary)
{
    os << "strategy,runs,episodes,mean_reward,fired_runs,eta_p5,eta_p50,eta_p95\n";
    char buf[256];
    for (const auto& s : summary.strategies) {
        std::vector<double> eta(s.convergence_episodes.begin(), s.convergence_episodes.end());
        std::sort(eta.begin(), eta.end());
        if (s.mode.mode == Mode::Adaptive) {
            std::snprintf(buf, sizeof buf, "%s,%d,%d,%.9f,%d,%g,%g,%g\n", s.strategy.c_str(), s.runs, s.episodes,
                          s.mean_reward, s.fired_runs, nearest_rank(eta, 5), nearest_rank(eta, 50), nearest_rank(eta, 95));
        } else {
            std::snprintf(buf, sizeof buf, "%s,%d,%d,%.9f,%d,,,\n", s.strategy.c_str(), s.runs, s.episodes,
                          s.mean_reward, s.fired_runs);
        }
        os << buf;
    }
}

} // namespace colsim
