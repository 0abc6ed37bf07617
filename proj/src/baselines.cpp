#include "hetcache/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "hetcache/errors.hpp"
#include "hetcache/placement.hpp"

namespace hetcache {

PopularityProfile zipf_popularity(const ZipfParams& params) {
    if (params.num_files < 1) throw InvariantError("zipf: need at least one file");
    if (!(params.exponent >= 0.0) || !std::isfinite(params.exponent)) throw InvariantError("zipf: exponent must be >= 0");
    std::vector<double> q(params.num_files);
    double norm = 0.0;
    for (std::size_t m = 0; m < q.size(); ++m) {
        q[m] = std::pow(static_cast<double>(m + 1), -params.exponent);
        norm += q[m];
    }
    for (double& v : q) v /= norm;
    // Uniform profiles must compare equal elementwise after rounding.
    if (params.exponent == 0.0) std::fill(q.begin(), q.end(), 1.0 / static_cast<double>(q.size()));
    return PopularityProfile(std::move(q));
}

namespace {

std::vector<double> top_files(double capacity, std::size_t num_files) {
    std::vector<double> col(num_files, 0.0);
    double left = std::min(capacity, static_cast<double>(num_files));
    for (std::size_t m = 0; m < num_files && left > 0.0; ++m) {
        col[m] = std::min(1.0, left);
        left -= col[m];
    }
    return col;
}

}  // namespace

PlacementMatrix mpcp_placement(const NetworkModel& model, std::size_t num_files) {
    PlacementMatrix p(num_files, model.num_tiers());
    for (std::size_t k = 0; k < model.num_tiers(); ++k) p.set_column(k, top_files(model.tier(k).cache_capacity, num_files));
    return p;
}

PlacementMatrix hcp_placement(const NetworkModel& model, const PopularityProfile& q, HcpInterference variant) {
    if (model.num_tiers() != 2) throw KRequired2("hcp_placement: defined for a macro tier plus one small-cell tier");
    const std::size_t files = q.size();
    PlacementMatrix p(files, 2);
    const std::vector<double> macro = top_files(model.tier(0).cache_capacity, files);
    p.set_column(0, macro);

    // Files the macro tier does not touch at all.
    std::size_t first = 0;
    while (first < files && macro[first] > 0.0) ++first;
    if (first == files) return p;

    std::vector<double> rest(q.values().begin() + static_cast<std::ptrdiff_t>(first), q.values().end());
    double mass = 0.0;
    for (double v : rest) mass += v;
    const double cap = std::min(model.tier(1).cache_capacity, static_cast<double>(rest.size()));
    if (cap <= 0.0) return p;

    std::vector<double> col(files, 0.0);
    if (mass <= 0.0) {
        // No demand left; fill in index order so the budget is still spent.
        const std::vector<double> fill = top_files(cap, rest.size());
        std::copy(fill.begin(), fill.end(), col.begin() + static_cast<std::ptrdiff_t>(first));
    } else {
        for (double& v : rest) v /= mass;
        const double delta = model.delta();
        const double beta = model.tier(1).sir_threshold;
        const double v = v_func(beta, delta);
        const double w = 1.0 + q_func(beta, delta) - v;
        const double v_used = variant == HcpInterference::Corrected ? v * model.total_weight() / model.z(1) : v;
        const SingleTierSolution sol = solve_single_tier(rest, cap, w, v_used);
        std::copy(sol.p.begin(), sol.p.end(), col.begin() + static_cast<std::ptrdiff_t>(first));
    }
    p.set_column(1, col);
    return p;
}

}  // namespace hetcache
