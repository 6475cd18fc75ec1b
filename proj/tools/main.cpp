// orcdsim: batch driver for the opportunistic-routing simulator.
//
// Subcommands:
//   run        one scenario, all seeds -> results.csv (+ backlog csv per seed)
//   sweep      one parameter sweep     -> results.csv, one row per (value, seed)
//   stability  bounded/unbounded verdict per seed -> stability.csv
//   lyapunov   drift-vs-backlog estimate per seed -> drift csv + fit summary
//   oracle     max stable scaling of the configured traffic direction
//   validate   config + topology diagnostics
//
// Exit codes: 0 ok, 2 bad config, 3 infeasible oracle size, 4 I/O failure.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "orcd/analysis.hpp"
#include "orcd/csv.hpp"
#include "orcd/runner.hpp"
#include "orcd/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitOracle = 3;
constexpr int kExitIo = 4;

struct CommonOptions {
    std::string config_path;
    std::string out_dir;
    std::string policy_override;
    std::string mode_override;
    std::vector<std::uint64_t> seed_override;
    int jobs = 0;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--config", opts.config_path, "scenario config (JSON)")->required();
    cmd->add_option("--out", opts.out_dir, "output directory (overrides config)");
    cmd->add_option("--policy", opts.policy_override,
                    "policy override: dorcd|pdorcd|corcd|divbar|edivbar|exor");
    cmd->add_option("--mode", opts.mode_override, "mac mode override: ideal|contention");
    cmd->add_option("--seed-override", opts.seed_override, "replace the config seed list");
    cmd->add_option("--jobs", opts.jobs, "worker pool size (default: hardware)");
}

orcd::ScenarioConfig load(const CommonOptions& opts) {
    orcd::ScenarioConfig config = orcd::load_config_file(opts.config_path);
    if (!opts.policy_override.empty()) config.policy = orcd::policy_from_name(opts.policy_override);
    if (!opts.mode_override.empty()) {
        if (opts.mode_override == "ideal")
            config.mac.mode = orcd::MacMode::kIdealSlotted;
        else if (opts.mode_override == "contention")
            config.mac.mode = orcd::MacMode::kContentionTimed;
        else
            throw orcd::ConfigError("--mode must be ideal or contention");
    }
    if (!opts.seed_override.empty()) config.seeds = opts.seed_override;
    if (!opts.out_dir.empty()) config.out_dir = opts.out_dir;

    const auto problems = orcd::validate_config(config);
    if (!problems.empty()) {
        std::string message = "config validation failed:";
        for (const auto& p : problems) message += "\n  - " + p;
        throw orcd::ConfigError(message);
    }
    return config;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path);
    if (!out) throw std::ios_base::failure("cannot write " + path.string());
    return out;
}

int cmd_run(const CommonOptions& opts) {
    const orcd::ScenarioConfig config = load(opts);
    const auto runs = orcd::run_seeds(config, opts.jobs);

    std::vector<orcd::ResultRow> rows;
    for (const auto& run : runs) rows.push_back(orcd::summarize(config, run.seed, run.metrics, ""));

    const std::filesystem::path dir(config.out_dir);
    auto results = open_output(dir / "results.csv");
    orcd::write_results_csv(results, rows);

    const orcd::Topology topology = orcd::build_topology(config.topology);
    if (config.write_backlog_series && config.sim.record_node_backlog) {
        for (const auto& run : runs) {
            auto backlog = open_output(dir / ("backlog_" + std::to_string(run.seed) + ".csv"));
            orcd::write_backlog_csv(backlog, run.metrics, topology.node_count());
        }
    }
    for (const auto& row : rows) {
        std::cout << "seed " << row.seed << ": mean_delay=" << orcd::format_double(row.mean_delay_slots)
                  << " slots, delivered=" << row.delivered << ", drops(buffer/ttl/retry/fo)="
                  << row.drop_buffer << '/' << row.drop_ttl << '/' << row.drop_retry << '/'
                  << row.drop_fo << "\n";
    }
    std::cout << "wrote " << (dir / "results.csv").string() << "\n";
    return kExitOk;
}

int cmd_sweep(const CommonOptions& opts, const std::string& sweep_text) {
    const orcd::ScenarioConfig config = load(opts);
    const orcd::SweepSpec sweep = orcd::parse_sweep(sweep_text);
    const auto rows = orcd::run_sweep(config, sweep, opts.jobs);

    auto out = open_output(std::filesystem::path(config.out_dir) / "results.csv");
    orcd::write_results_csv(out, rows);
    std::cout << "wrote " << rows.size() << " rows ("
              << sweep.values.size() << " values x " << config.seeds.size() << " seeds)\n";
    return kExitOk;
}

int cmd_stability(const CommonOptions& opts) {
    const orcd::ScenarioConfig config = load(opts);
    const auto runs = orcd::run_seeds(config, opts.jobs);
    const std::uint64_t hash = orcd::scenario_hash(config);

    std::vector<orcd::StabilityRow> rows;
    for (const auto& run : runs) {
        const auto& series = run.metrics.total_backlog;
        const std::size_t warmup = static_cast<std::size_t>(run.metrics.warmup_slots);
        std::vector<double> post(series.begin() + warmup, series.end());
        rows.push_back({hash, run.seed, orcd::stability_verdict(post)});
    }
    auto out = open_output(std::filesystem::path(config.out_dir) / "stability.csv");
    orcd::write_stability_csv(out, rows);
    for (const auto& row : rows)
        std::cout << "seed " << row.seed << ": " << (row.verdict.bounded ? "bounded" : "unbounded")
                  << " (slope " << orcd::format_double(row.verdict.slope) << " pkt/slot)\n";
    return kExitOk;
}

int cmd_lyapunov(const CommonOptions& opts) {
    orcd::ScenarioConfig config = load(opts);
    config.sim.record_node_backlog = true;
    const orcd::Topology topology = orcd::build_topology(config.topology);
    if (topology.destinations().size() != 1)
        throw orcd::ConfigError("lyapunov analysis expects a single destination");
    const orcd::NodeId dest = topology.destinations()[0];
    const auto lyap_config = orcd::LyapunovConfig::from_topology(topology);

    const auto runs = orcd::run_seeds(config, opts.jobs);
    const std::filesystem::path dir(config.out_dir);
    for (const auto& run : runs) {
        const std::int64_t warmup = run.metrics.warmup_slots;
        const auto lyap = orcd::lyapunov_series(topology, run.metrics, dest, lyap_config, warmup);
        std::vector<double> backlog(run.metrics.total_backlog.begin() + warmup,
                                    run.metrics.total_backlog.end());
        const auto drift = orcd::drift_estimate(backlog, lyap);
        auto out = open_output(dir / ("drift_" + std::to_string(run.seed) + ".csv"));
        orcd::write_drift_csv(out, drift);
        std::cout << "seed " << run.seed << ": B_hat=" << orcd::format_double(drift.b_hat)
                  << " eps_hat=" << orcd::format_double(drift.eps_hat) << "\n";
    }
    return kExitOk;
}

int cmd_oracle(const CommonOptions& opts) {
    const orcd::ScenarioConfig config = load(opts);
    const orcd::Topology topology = orcd::build_topology(config.topology);
    if (topology.destinations().size() != 1)
        throw orcd::ConfigError("oracle expects a single destination");
    const orcd::NodeId dest = topology.destinations()[0];

    std::vector<double> direction(topology.node_count() + 1, 0.0);
    double peak = 0.0;
    for (const auto& t : config.sim.traffic) {
        direction[t.node] += t.rate;
        peak = std::max(peak, direction[t.node]);
    }
    // Normalize to a unit peak so theta_star reads as the maximum sustainable
    // per-slot rate at the heaviest source under this traffic pattern.
    if (peak > 0.0)
        for (double& d : direction) d /= peak;
    const double theta = orcd::stability_region_max_rate(topology, direction, dest);
    std::cout << "theta_star=" << orcd::format_double(theta) << "\n";
    if (peak > 0.0 && !std::isinf(theta))
        std::cout << "configured_rates_scale=" << orcd::format_double(theta / peak) << "\n";
    return kExitOk;
}

int cmd_validate(const CommonOptions& opts) {
    orcd::ScenarioConfig config = orcd::load_config_file(opts.config_path);
    const auto problems = orcd::validate_config(config);
    if (problems.empty()) {
        std::cout << "ok\n";
        return kExitOk;
    }
    for (const auto& p : problems) std::cerr << p << "\n";
    return kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"opportunistic routing with congestion diversity: simulator and analysis"};
    app.require_subcommand(1);

    CommonOptions opts;
    std::string sweep_text;

    auto* run = app.add_subcommand("run", "run one scenario over its seeds");
    add_common(run, opts);
    auto* sweep = app.add_subcommand("sweep", "sweep one parameter");
    add_common(sweep, opts);
    sweep->add_option("--sweep", sweep_text, "param=v1,v2,... (lambda | N | M | Tc_multiple)")
        ->required();
    auto* stability = app.add_subcommand("stability", "stability verdict per seed");
    add_common(stability, opts);
    auto* lyapunov = app.add_subcommand("lyapunov", "drift estimate per seed");
    add_common(lyapunov, opts);
    auto* oracle = app.add_subcommand("oracle", "max stable rate scaling for the traffic direction");
    add_common(oracle, opts);
    auto* validate = app.add_subcommand("validate", "check config and topology");
    add_common(validate, opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(opts);
        if (sweep->parsed()) return cmd_sweep(opts, sweep_text);
        if (stability->parsed()) return cmd_stability(opts);
        if (lyapunov->parsed()) return cmd_lyapunov(opts);
        if (oracle->parsed()) return cmd_oracle(opts);
        if (validate->parsed()) return cmd_validate(opts);
    } catch (const orcd::OracleSizeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitOracle;
    } catch (const orcd::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
