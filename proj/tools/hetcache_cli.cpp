// hetcache: hit probability, placement optimisation and Monte Carlo checks for
// cache-enabled multi-tier cellular networks.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "hetcache/config.hpp"
#include "hetcache/experiment.hpp"
#include "hetcache/results.hpp"
#include "hetcache/sim.hpp"

using namespace hetcache;

namespace {

struct CommonFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> trials;
    std::string out;
    std::string format;
    int threads = 0;
};

void add_common(CLI::App* sub, CommonFlags& f) {
    sub->add_option("--config", f.config, "experiment configuration (YAML)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", f.seed, "Monte Carlo seed (overrides simulation.seed)");
    sub->add_option("--trials", f.trials, "Monte Carlo trials (overrides simulation.trials)")->check(CLI::PositiveNumber);
    sub->add_option("--out", f.out, "output file; '-' or omitted: stdout (unless output.path is set)");
    sub->add_option("--format", f.format, "csv or json (overrides output.format)")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--threads", f.threads, "worker threads; 0 = OpenMP default")->check(CLI::NonNegativeNumber);
}

ExperimentConfig load_with_overrides(const CommonFlags& f) {
    ExperimentConfig cfg = load_config(f.config);
    if (f.seed) cfg.simulation.config.seed = *f.seed;
    if (f.trials) cfg.simulation.config.trials = *f.trials;
    if (!f.format.empty()) cfg.output_format = parse_output_format(f.format);
    if (!f.out.empty()) cfg.output_path = f.out;
    cfg.simulation.config.threads = f.threads;
    validate_config(cfg);
    return cfg;
}

void warn_sim(const ExperimentConfig& cfg) {
    for (const std::string& w : check_sim_config(build_model(cfg), cfg.simulation.config))
        std::cerr << "warning: " << w << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hit probability, tier-level cache placement and Monte Carlo validation for multi-tier networks"};
    app.require_subcommand(1);

    CommonFlags analyze_f, optimize_f, simulate_f, sweep_f;
    CLI::App* analyze = app.add_subcommand("analyze", "closed-form hit probability of each configured policy");
    add_common(analyze, analyze_f);
    CLI::App* optimize = app.add_subcommand("optimize", "placement matrix of each configured policy");
    add_common(optimize, optimize_f);
    CLI::App* simulate = app.add_subcommand("simulate", "closed form next to a Monte Carlo estimate");
    add_common(simulate, simulate_f);
    std::optional<std::size_t> target_file;
    simulate->add_option("--file", target_file, "estimate the conditional hit probability of this file (1-based)")
        ->check(CLI::PositiveNumber);
    CLI::App* sweep = app.add_subcommand("sweep", "evaluate every sweep point of the configuration");
    add_common(sweep, sweep_f);
    bool no_sim = false;
    sweep->add_flag("--no-sim", no_sim, "skip Monte Carlo even if simulation.enabled is set");

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze->parsed()) {
            const ExperimentConfig cfg = load_with_overrides(analyze_f);
            RunOptions opt;
            opt.analytic_only = true;
            opt.use_sweep = false;
            emit_results(run_experiment(cfg, opt), cfg.output_format, cfg.output_path);
        } else if (optimize->parsed()) {
            const ExperimentConfig cfg = load_with_overrides(optimize_f);
            const auto placements = optimize_all(cfg);
            write_text(cfg.output_format == OutputFormat::Csv ? placements_to_csv(placements)
                                                              : placements_to_json(placements),
                       cfg.output_path);
        } else if (simulate->parsed()) {
            ExperimentConfig cfg = load_with_overrides(simulate_f);
            if (target_file) cfg.simulation.config.target_file = *target_file - 1;
            validate_config(cfg);
            warn_sim(cfg);
            RunOptions opt;
            opt.simulate = true;
            opt.use_sweep = false;
            emit_results(run_experiment(cfg, opt), cfg.output_format, cfg.output_path);
        } else if (sweep->parsed()) {
            const ExperimentConfig cfg = load_with_overrides(sweep_f);
            if (!cfg.sweep) {
                std::cerr << "error: sweep: the configuration has no sweep section\n";
                return 2;
            }
            RunOptions opt;
            opt.analytic_only = no_sim;
            opt.threads = sweep_f.threads;
            if (cfg.simulation.enabled && !no_sim) warn_sim(cfg);
            emit_results(run_experiment(cfg, opt), cfg.output_format, cfg.output_path);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
