// colsim: command-line driver for cost-of-learning experiments.
//
//   colsim run       --config <file> [--seed N] [--runs N] [--out DIR] [--strategy NAME]
//   colsim aggregate [--config <file>] [--out DIR] [--strategy NAME]
//   colsim report    [--config <file>] [--out DIR] [--strategy NAME]
//   colsim validate
//
// Output directory precedence: config file, then $COLSIM_OUTPUT_DIR, then --out.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "colsim/harness.hpp"
#include "colsim/validation.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> runs;
    std::optional<int> threads;
    std::string out;
    std::string strategy;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool simulation_flags)
{
    cmd->add_option("--config", f.config_path, "experiment config file (key = value)");
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--strategy", f.strategy, "only this strategy, e.g. constant:3");
    if (simulation_flags) {
        cmd->add_option("--seed", f.seed, "base seed");
        cmd->add_option("--runs", f.runs, "independent runs per strategy");
        cmd->add_option("--threads", f.threads, "concurrent runs");
    }
}

colsim::ExperimentConfig resolve_config(const CommonFlags& f)
{
    colsim::ExperimentConfig config;
    if (!f.config_path.empty()) {
        config = colsim::load_config(f.config_path);
    }
    if (const char* env = std::getenv("COLSIM_OUTPUT_DIR"); env != nullptr && *env != '\0') config.output_dir = env;
    if (!f.out.empty()) config.output_dir = f.out;
    if (f.seed) config.base_seed = *f.seed;
    if (f.runs) config.num_runs = *f.runs;
    if (f.threads) config.threads = *f.threads;
    if (!f.strategy.empty()) {
        const auto wanted = colsim::StrategyMode::parse(f.strategy);
        std::vector<colsim::StrategyMode> kept;
        for (const auto& s : config.strategies) {
            if (s == wanted) kept.push_back(s);
        }
        if (kept.empty()) kept.push_back(wanted);
        config.strategies = kept;
    }
    config.validate();
    return config;
}

std::vector<colsim::EpisodeRecord> load_filtered(const colsim::ExperimentConfig& config, const std::string& strategy)
{
    auto records = colsim::read_records(std::filesystem::path(config.output_dir) / "records.csv");
    if (strategy.empty()) return records;
    const std::string name = colsim::StrategyMode::parse(strategy).name();
    std::erase_if(records, [&](const colsim::EpisodeRecord& r) { return r.strategy != name; });
    if (records.empty()) throw colsim::DataError("no records for strategy " + name);
    return records;
}

int cmd_run(const CommonFlags& f)
{
    const auto config = resolve_config(f);
    const auto out = colsim::run_experiment(config, [](const std::string& msg) { std::cerr << msg << '\n'; });
    std::cout << "wrote " << out.record_count << " records to " << out.records_file.string() << '\n';
    return 0;
}

int cmd_aggregate(const CommonFlags& f)
{
    const auto config = resolve_config(f);
    const auto records = load_filtered(config, f.strategy);
    const auto rows = colsim::aggregate(records, config.sample_stride, config.smoothing_window);
    const auto path = std::filesystem::path(config.output_dir) / "aggregate.csv";
    std::ofstream os(path);
    if (!os) throw colsim::ConfigError("cannot write " + path.string());
    colsim::write_aggregate(os, rows);
    std::cout << "wrote " << rows.size() << " rows to " << path.string() << '\n';
    return 0;
}

int cmd_report(const CommonFlags& f)
{
    const auto config = resolve_config(f);
    const auto records = load_filtered(config, f.strategy);
    const auto summary = colsim::sweep_report(records);
    const auto path = std::filesystem::path(config.output_dir) / "summary.csv";
    std::ofstream os(path);
    if (!os) throw colsim::ConfigError("cannot write " + path.string());
    colsim::write_summary(os, summary);
    colsim::write_summary(std::cout, summary);
    std::cout << "best constant: " << summary.best_constant.value_or("-") << '\n'
              << "best adaptive: " << summary.best_adaptive.value_or("-") << '\n';
    return 0;
}

int cmd_validate()
{
    bool ok = true;
    for (const auto& r : colsim::validation::quick_suite()) {
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
        ok = ok && r.passed;
    }
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Cost-of-learning simulator for a sliced backhaul link"};
    app.require_subcommand(1);
    CommonFlags run_flags, agg_flags, report_flags;
    auto* run = app.add_subcommand("run", "simulate every strategy and run, write records.csv");
    add_common(run, run_flags, true);
    auto* agg = app.add_subcommand("aggregate", "records.csv -> aggregate.csv (mean and percentiles)");
    add_common(agg, agg_flags, false);
    auto* report = app.add_subcommand("report", "sweep summary: mean reward per strategy, argmax, convergence");
    add_common(report, report_flags, false);
    auto* validate = app.add_subcommand("validate", "run the built-in oracle and property checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << app.help();
        return 2;
    }

    try {
        if (*run) return cmd_run(run_flags);
        if (*agg) return cmd_aggregate(agg_flags);
        if (*report) return cmd_report(report_flags);
        if (*validate) return cmd_validate();
    } catch (const std::exception& e) {
        std::cerr << "colsim: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
