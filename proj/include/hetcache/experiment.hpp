#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hetcache/config.hpp"

namespace hetcache {

struct ResultRow {
    std::optional<double> sweep_value;
    std::string policy;
    double analytic_hit = 0.0;
    std::optional<double> simulated_hit;
    std::optional<double> std_error;  // emitted under the key "stderr"
    std::optional<double> objective_gap;  // (reference - policy) / reference, when tlcp-reference runs
    std::optional<double> backhaul_latency_ms;
};

struct RunOptions {
    bool simulate = false;  // force Monte Carlo on even if the config leaves it off
    bool analytic_only = false;  // skip Monte Carlo even if enabled in the config
    bool use_sweep = true;  // false: evaluate the base point only
    int threads = 0;        // sweep-point parallelism; 0 leaves the OpenMP default, 1 runs serially
};

/// Placement produced by one named policy on the model and popularity of cfg.
PlacementMatrix compute_placement(const ExperimentConfig& cfg, const NetworkModel& model, const PopularityProfile& q,
                                  const std::string& policy);

/// Placements of every configured policy, sorted by policy name.
std::vector<std::pair<std::string, PlacementMatrix>> optimize_all(const ExperimentConfig& cfg);

/// One row per (sweep value, policy), ordered by sweep index then policy name.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});

}  // namespace hetcache
