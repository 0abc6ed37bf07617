#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "hetcache/model.hpp"

namespace hetcache {

/// Optimal single-tier placement: p_m = clamp(sqrt(V q_m / u) / W - V / W, 0, 1).
struct SingleTierSolution {
    std::vector<double> p;
    double multiplier = 0.0;  // u*
    double t0 = 0.0;          // q_m <= t0 -> p_m = 0
    double t1 = 0.0;          // q_m >= t1 -> p_m = 1
    int iterations = 0;
};

/// Relaxed uniform-SIR solution in terms of g_m = sum_k p_mk z_k.
struct WeightedSumSolution {
    std::vector<double> g;
    double multiplier = 0.0;  // eta*
    double t0 = 0.0;
    double t1 = 0.0;
    double w = 0.0;           // W(beta)
    double v_scaled = 0.0;    // V' = V(beta) * sum_k z_k
    int iterations = 0;
};

struct SolverReport {
    double objective = 0.0;
    int iterations = 0;
    bool converged = true;
    std::optional<double> gap_vs_reference;
    std::optional<double> duality_gap;  // reference solver only
    bool relaxation_tight = true;       // uniform solver: the relaxed weighted sums were realisable
};

struct BisectionResult {
    double root = 0.0;
    int iterations = 0;
};

/// Finds u with budget(u) = target for a non-increasing budget, by bisection.
/// The bracket is expanded geometrically (lo halved, hi doubled, at most 64 times
/// each) until budget(lo) >= target >= budget(hi); BracketError otherwise.
/// Stops when hi - lo < tol * (1 + |u|), |budget(u) - target| < budget_tol, or
/// after max_iter halvings.
BisectionResult bisect_multiplier(const std::function<double(double)>& budget, double target,
                                  double lo, double hi, double tol = 1e-15,
                                  double budget_tol = 1e-10, int max_iter = 200);

/// Single-tier objective sum_m q_m p_m / (W p_m + V).
double single_tier_objective(std::span<const double> q, std::span<const double> p, double w, double v);

/// Solves max sum_m q_m p_m/(W p_m + V) s.t. sum p <= C, p in [0,1], given W and V directly.
SingleTierSolution solve_single_tier(std::span<const double> q, double capacity, double w, double v);
/// Same problem for a single tier with SIR threshold beta under exponent delta.
SingleTierSolution solve_single_tier(const PopularityProfile& q, double capacity, double beta, double delta);

/// Uniform-SIR relaxation over g. Throws UniformBetaRequired when thresholds differ.
WeightedSumSolution solve_uniform_relaxed(const PopularityProfile& q, const NetworkModel& model);

/// True when some placement matrix within the capacities has exactly these
/// weighted sums: for g sorted non-increasing, sum_{m<=n} g_m <= sum_k z_k min(n, C_k)
/// for every n (the n = 1 and n = M cases are the relaxation's own constraints).
bool weighted_sums_realizable(std::span<const double> g, const NetworkModel& model, double rel_tol = 1e-9);

/// Optimum of the weighted-sum problem with every prefix constraint above
/// enforced. Equal to solve_uniform_relaxed whenever that solution is realisable;
/// otherwise the files split into consecutive blocks, each with its own multiplier
/// (multiplier and thresholds then refer to the first block).
WeightedSumSolution solve_uniform_realizable(const PopularityProfile& q, const NetworkModel& model);

/// Turns weighted sums into a placement matrix row by row (files in popularity
/// order) using each tier's remaining capacity. Throws FillInfeasible if the row
/// identity or the column budgets cannot be met.
PlacementMatrix sequential_fill(const WeightedSumSolution& gsol, const NetworkModel& model,
                                const PopularityProfile& q);

/// Optimal placement for uniform SIR thresholds (relaxation + sequential fill).
std::pair<PlacementMatrix, SolverReport> solve_uniform(const NetworkModel& model, const PopularityProfile& q);

/// Per-tier decomposition for arbitrary thresholds: column k solves the single-tier
/// problem with V replaced by V(beta_k) * sum_i z_i / z_k.
std::pair<PlacementMatrix, SolverReport> solve_nonuniform_suboptimal(const NetworkModel& model,
                                                                     const PopularityProfile& q);

struct ReferenceOptions {
    std::uint64_t seed = 7;
    int restarts = 8;             // random starts of the per-file inner solver
    int inner_iterations = 500;   // projected-gradient steps, step 0.1/sqrt(iter)
    int dual_sweeps = 6;          // cyclic coordinate passes over the K multipliers
    int dual_bisections = 40;     // bisection steps per coordinate and pass
    int polish_iterations = 3000; // primal projected-gradient ascent after recovery
};

/// Dual-decomposition solver for the general (non-convex) placement problem,
/// intended for small instances. Never throws on non-convergence; see report.
std::pair<PlacementMatrix, SolverReport> solve_reference(const NetworkModel& model, const PopularityProfile& q,
                                                         const ReferenceOptions& options = {});

/// Euclidean projection of v onto {x in [0,1]^n : sum x <= cap}.
void project_capped_box(std::span<double> v, double cap);

}  // namespace hetcache
