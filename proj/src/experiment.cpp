#include "hetcache/experiment.hpp"

#include <algorithm>
#include <exception>

#include <omp.h>

#include "hetcache/baselines.hpp"
#include "hetcache/errors.hpp"
#include "hetcache/placement.hpp"
#include "hetcache/sim.hpp"

namespace hetcache {

namespace {

std::vector<std::string> sorted_policies(const ExperimentConfig& cfg) {
    std::vector<std::string> p = cfg.policies;
    std::sort(p.begin(), p.end());
    return p;
}

std::vector<ResultRow> evaluate_point(const ExperimentConfig& cfg, std::optional<double> sweep_value, bool simulate) {
    const NetworkModel model = build_model(cfg);
    const PopularityProfile q = build_popularity(cfg);
    std::vector<ResultRow> rows;
    std::optional<double> reference_hit;
    std::vector<PlacementMatrix> placements;
    for (const std::string& policy : sorted_policies(cfg)) {
        placements.push_back(compute_placement(cfg, model, q, policy));
        ResultRow row;
        row.sweep_value = sweep_value;
        row.policy = policy;
        row.analytic_hit = hit_probability(model, placements.back(), q);
        row.backhaul_latency_ms = backhaul_latency(row.analytic_hit, cfg.latency);
        if (policy == "tlcp-reference") reference_hit = row.analytic_hit;
        rows.push_back(std::move(row));
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (reference_hit && *reference_hit > 0.0)
            rows[i].objective_gap = (*reference_hit - rows[i].analytic_hit) / *reference_hit;
        else if (reference_hit)
            rows[i].objective_gap = 0.0;
        if (!simulate) continue;
        const SimConfig& sc = cfg.simulation.config;
        const SimEstimate est = sc.target_file ? simulate_conditional_hit(model, placements[i], *sc.target_file, sc)
                                               : simulate_hit(model, placements[i], q, sc);
        rows[i].simulated_hit = est.mean;
        rows[i].std_error = est.std_error;
    }
    // With a target file the analytic column is the conditional probability too.
    if (cfg.simulation.config.target_file && simulate)
        for (std::size_t i = 0; i < rows.size(); ++i)
            rows[i].analytic_hit = conditional_hit_probability(model, placements[i], *cfg.simulation.config.target_file);
    return rows;
}

}  // namespace

PlacementMatrix compute_placement(const ExperimentConfig& cfg, const NetworkModel& model, const PopularityProfile& q,
                                  const std::string& policy) {
    if (policy == "tlcp-uniform") return solve_uniform(model, q).first;
    if (policy == "tlcp-suboptimal") return solve_nonuniform_suboptimal(model, q).first;
    if (policy == "tlcp-reference") return solve_reference(model, q, cfg.reference).first;
    if (policy == "mpcp") return mpcp_placement(model, q.size());
    if (policy == "hcp") return hcp_placement(model, q, cfg.hcp_variant);
    if (policy == "explicit-matrix") {
        if (!cfg.placement) throw ValidationError("placement", "explicit-matrix policy requires a placement matrix");
        PlacementMatrix p = PlacementMatrix::from_rows(*cfg.placement);
        p.check_feasible(model);
        return p;
    }
    throw ValidationError("policies", "unknown policy '" + policy + "'");
}

std::vector<std::pair<std::string, PlacementMatrix>> optimize_all(const ExperimentConfig& cfg) {
    const NetworkModel model = build_model(cfg);
    const PopularityProfile q = build_popularity(cfg);
    std::vector<std::pair<std::string, PlacementMatrix>> out;
    for (const std::string& policy : sorted_policies(cfg)) out.emplace_back(policy, compute_placement(cfg, model, q, policy));
    return out;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
    const bool simulate = !options.analytic_only && (options.simulate || cfg.simulation.enabled);
    if (!cfg.sweep || !options.use_sweep) return evaluate_point(cfg, std::nullopt, simulate);

    const std::vector<double>& values = cfg.sweep->values;
    const auto n = static_cast<std::int64_t>(values.size());
    std::vector<std::vector<ResultRow>> per_point(values.size());
    std::vector<std::exception_ptr> errors(values.size());
    const int threads = options.threads > 0 ? options.threads : omp_get_max_threads();
#pragma omp parallel for num_threads(threads) schedule(dynamic, 1)
    for (std::int64_t i = 0; i < n; ++i) {
        try {
            const ExperimentConfig point = apply_sweep_value(cfg, cfg.sweep->parameter, values[i]);
            per_point[i] = evaluate_point(point, values[i], simulate);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    std::vector<ResultRow> rows;
    for (auto& pr : per_point)
        for (auto& r : pr) rows.push_back(std::move(r));
    return rows;
}

}  // namespace hetcache
