#include "hetcache/placement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "hetcache/errors.hpp"

namespace hetcache {

namespace {

// Shared water-filling kernel. Each item gets
//   x_m(u) = clamp((sqrt(a q_m / u) - a) / w, 0, cap),
// the stationary point of q x / (w x + a) - u x, and u is chosen so that
// sum_m x_m(u) = budget. The single-tier problem is (a, cap) = (V, 1); the
// uniform-SIR relaxation is (a, cap) = (V', sum_k z_k).
struct OffsetSqrtSolution {
    std::vector<double> x;
    double u = 0.0;
    double t0 = 0.0;
    double t1 = 0.0;
    int iterations = 0;
};

double offset_sqrt_item(double q, double u, double a, double w, double cap) {
    if (q <= 0.0) return 0.0;
    const double x = (std::sqrt(a * q / u) - a) / w;
    return std::clamp(x, 0.0, cap);
}

void fill_items(std::span<const double> q, double u, double a, double w, double cap, std::vector<double>& x) {
    x.resize(q.size());
    for (std::size_t m = 0; m < q.size(); ++m) x[m] = offset_sqrt_item(q[m], u, a, w, cap);
}

double sum_of(const std::vector<double>& x) { return std::accumulate(x.begin(), x.end(), 0.0); }

void set_thresholds(OffsetSqrtSolution& s, double a, double w, double cap) {
    s.t0 = s.u * a;
    s.t1 = s.u * (w * cap + a) * (w * cap + a) / a;
}

OffsetSqrtSolution solve_offset_sqrt(std::span<const double> q, double budget, double a, double w, double cap) {
    const std::size_t n = q.size();
    OffsetSqrtSolution s;
    s.x.assign(n, 0.0);
    const double q_max = q.front();
    const std::size_t positive =
        static_cast<std::size_t>(std::count_if(q.begin(), q.end(), [](double v) { return v > 0.0; }));

    if (budget <= 0.0 || q_max <= 0.0) {
        s.u = q_max > 0.0 ? q_max / a : 1.0;
        set_thresholds(s, a, w, cap);
        return s;
    }
    if (budget >= cap * static_cast<double>(positive)) {
        // Every requested file saturates; leftover capacity only lands on zero-demand files.
        double left = budget;
        for (std::size_t m = 0; m < n && left > 0.0; ++m) {
            if (q[m] > 0.0) {
                s.x[m] = cap;
                left -= cap;
            }
        }
        for (std::size_t m = 0; m < n && left > 0.0; ++m) {
            if (q[m] <= 0.0) {
                s.x[m] = std::min(cap, left);
                left -= s.x[m];
            }
        }
        double q_min_pos = q_max;
        for (double v : q)
            if (v > 0.0) q_min_pos = std::min(q_min_pos, v);
        s.u = q_min_pos * a / ((w * cap + a) * (w * cap + a));
        set_thresholds(s, a, w, cap);
        return s;
    }

    double q_min_pos = q_max;
    for (double v : q)
        if (v > 0.0) q_min_pos = std::min(q_min_pos, v);
    const double lo = q_min_pos * a / ((w * cap + a) * (w * cap + a));
    const double hi = q_max / a;
    std::vector<double> scratch;
    const auto budget_at = [&](double u) {
        fill_items(q, u, a, w, cap, scratch);
        return sum_of(scratch);
    };
    const BisectionResult b = bisect_multiplier(budget_at, budget, lo, hi);
    s.u = b.root;
    s.iterations = b.iterations;
    fill_items(q, s.u, a, w, cap, s.x);

    // Given the saturated/interior split at u, the budget equation has a closed
    // form in sqrt(u); use it to remove the residual bisection error.
    double saturated = 0.0;
    double interior_root_sum = 0.0;
    double interior_count = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
        if (s.x[m] >= cap) {
            saturated += cap;
        } else if (s.x[m] > 0.0) {
            interior_root_sum += std::sqrt(a * q[m]);
            interior_count += 1.0;
        }
    }
    if (interior_count > 0.0) {
        const double denom = w * (budget - saturated) + interior_count * a;
        if (denom > 0.0) {
            const double root_u = interior_root_sum / denom;
            const double u_polished = root_u * root_u;
            std::vector<double> x_polished;
            fill_items(q, u_polished, a, w, cap, x_polished);
            if (std::abs(sum_of(x_polished) - budget) <= std::abs(sum_of(s.x) - budget)) {
                s.u = u_polished;
                s.x = std::move(x_polished);
            }
        }
    }
    set_thresholds(s, a, w, cap);
    return s;
}

}  // namespace

BisectionResult bisect_multiplier(const std::function<double(double)>& budget, double target, double lo,
                                  double hi, double tol, double budget_tol, int max_iter) {
    if (!(lo < hi)) throw BracketError("bisect_multiplier: need lo < hi");
    int expansions = 0;
    while (budget(lo) < target) {
        lo *= 0.5;
        if (++expansions > 64) throw BracketError("bisect_multiplier: budget(lo) stays below target");
    }
    expansions = 0;
    while (budget(hi) > target) {
        hi *= 2.0;
        if (++expansions > 64) throw BracketError("bisect_multiplier: budget(hi) stays above target");
    }
    BisectionResult r;
    double mid = lo + 0.5 * (hi - lo);
    for (r.iterations = 1; r.iterations <= max_iter; ++r.iterations) {
        mid = lo + 0.5 * (hi - lo);
        const double f = budget(mid);
        if (std::abs(f - target) < budget_tol) break;
        if (f < target) {
            hi = mid;
        } else {
            lo = mid;
        }
        if (hi - lo < tol * (1.0 + std::abs(mid))) {
            mid = lo + 0.5 * (hi - lo);
            break;
        }
    }
    r.iterations = std::min(r.iterations, max_iter);
    r.root = mid;
    return r;
}

double single_tier_objective(std::span<const double> q, std::span<const double> p, double w, double v) {
    if (q.size() != p.size()) throw DimensionMismatch("single_tier_objective: size mismatch");
    double obj = 0.0;
    for (std::size_t m = 0; m < q.size(); ++m) obj += q[m] * p[m] / (w * p[m] + v);
    return obj;
}

SingleTierSolution solve_single_tier(std::span<const double> q, double capacity, double w, double v) {
    if (q.empty()) throw DimensionMismatch("solve_single_tier: empty popularity");
    if (!(w > 0.0 && v > 0.0)) throw DomainError("solve_single_tier: W and V must be positive");
    if (!(capacity >= 0.0)) throw DomainError("solve_single_tier: capacity must be >= 0");
    const double budget = std::min(capacity, static_cast<double>(q.size()));
    OffsetSqrtSolution s = solve_offset_sqrt(q, budget, v, w, 1.0);
    return {std::move(s.x), s.u, s.t0, s.t1, s.iterations};
}

SingleTierSolution solve_single_tier(const PopularityProfile& q, double capacity, double beta, double delta) {
    const double v = v_func(beta, delta);
    const double w = 1.0 + q_func(beta, delta) - v;
    return solve_single_tier(q.values(), capacity, w, v);
}

WeightedSumSolution solve_uniform_relaxed(const PopularityProfile& q, const NetworkModel& model) {
    if (!model.uniform_sir()) throw UniformBetaRequired("solve_uniform_relaxed: tiers have different SIR thresholds");
    model.check_capacities(q.size());
    const double beta = model.tier(0).sir_threshold;
    const double v = v_func(beta, model.delta());
    const double w = 1.0 + q_func(beta, model.delta()) - v;
    const double z_total = model.total_weight();

    double budget = 0.0;
    for (std::size_t k = 0; k < model.num_tiers(); ++k) budget += model.tier(k).cache_capacity * model.z(k);

    WeightedSumSolution out;
    out.w = w;
    out.v_scaled = v * z_total;
    OffsetSqrtSolution s = solve_offset_sqrt(q.values(), budget, out.v_scaled, w, z_total);
    out.g = std::move(s.x);
    out.multiplier = s.u;
    out.t0 = s.t0;
    out.t1 = s.t1;
    out.iterations = s.iterations;
    return out;
}

namespace {

// Largest total weighted sum any n files can carry: sum_k z_k min(n, C_k).
double prefix_capacity(const NetworkModel& model, double n) {
    double h = 0.0;
    for (std::size_t k = 0; k < model.num_tiers(); ++k) h += model.z(k) * std::min(n, model.tier(k).cache_capacity);
    return h;
}

}  // namespace

bool weighted_sums_realizable(std::span<const double> g, const NetworkModel& model, double rel_tol) {
    std::vector<double> sorted(g.begin(), g.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const double scale = std::max(1.0, prefix_capacity(model, static_cast<double>(sorted.size())));
    double acc = 0.0;
    for (std::size_t n = 0; n < sorted.size(); ++n) {
        if (sorted[n] < -rel_tol * scale) return false;
        acc += sorted[n];
        if (acc > prefix_capacity(model, static_cast<double>(n + 1)) + rel_tol * scale) return false;
    }
    return true;
}

WeightedSumSolution solve_uniform_realizable(const PopularityProfile& q, const NetworkModel& model) {
    if (!model.uniform_sir()) throw UniformBetaRequired("solve_uniform_realizable: tiers have different SIR thresholds");
    model.check_capacities(q.size());
    const double beta = model.tier(0).sir_threshold;
    const double v = v_func(beta, model.delta());
    const double w = 1.0 + q_func(beta, model.delta()) - v;
    const double z_total = model.total_weight();
    const double a = v * z_total;
    const std::size_t files = q.size();
    const std::span<const double> qs = q.values();
    const double scale = std::max(1.0, prefix_capacity(model, static_cast<double>(files)));
    const double tol = 1e-12 * scale;

    WeightedSumSolution out;
    out.w = w;
    out.v_scaled = a;
    out.g.assign(files, 0.0);

    // The tightest prefix constraint fixes the common multiplier of the leading
    // block; the rest is the same problem on the remaining files and budgets.
    std::size_t start = 0;
    double used = 0.0;
    bool first = true;
    while (start < files) {
        const auto slacks = [&](double eta) {
            std::vector<double> out_slack(files - start);
            double acc = used;
            for (std::size_t n = start; n < files; ++n) {
                acc += eta > 0.0 ? offset_sqrt_item(qs[n], eta, a, w, z_total) : (qs[n] > 0.0 ? z_total : 0.0);
                out_slack[n - start] = prefix_capacity(model, static_cast<double>(n + 1)) - acc;
            }
            return out_slack;
        };
        const auto slack_min = [&](double eta, std::size_t* tight_end) {
            const std::vector<double> sl = slacks(eta);
            const double worst = *std::min_element(sl.begin(), sl.end());
            if (tight_end) {
                // Longest block among the (numerically) tight prefixes.
                for (std::size_t i = sl.size(); i-- > 0;)
                    if (sl[i] <= worst + 1e-9 * scale) {
                        *tight_end = start + i;
                        break;
                    }
            }
            return worst;
        };
        if (slack_min(0.0, nullptr) >= -tol) {
            for (std::size_t n = start; n < files; ++n) out.g[n] = qs[n] > 0.0 ? z_total : 0.0;
            break;
        }
        double hi = qs[start] / a;  // every item is zero at and beyond this multiplier
        double lo = hi;
        for (int i = 0; i < 2000 && slack_min(lo, nullptr) >= -tol; ++i) lo *= 0.5;
        for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (slack_min(mid, nullptr) >= -tol) hi = mid;
            else lo = mid;
        }
        std::size_t end = files - 1;
        slack_min(hi, &end);
        const std::size_t len = end - start + 1;
        const double budget = prefix_capacity(model, static_cast<double>(end + 1)) - used;
        const OffsetSqrtSolution block = solve_offset_sqrt(qs.subspan(start, len), budget, a, w, z_total);
        std::copy(block.x.begin(), block.x.end(), out.g.begin() + static_cast<std::ptrdiff_t>(start));
        if (first) {
            out.multiplier = block.u;
            out.t0 = block.t0;
            out.t1 = block.t1;
            first = false;
        }
        out.iterations += block.iterations;
        used += sum_of(block.x);
        start = end + 1;
    }
    return out;
}

namespace {

constexpr double kFillTol = 1e-10;

bool verify_fill(const PlacementMatrix& p, const WeightedSumSolution& gsol, const NetworkModel& model) {
    const std::size_t files = p.files();
    const std::size_t tiers = p.tiers();
    const double z_total = model.total_weight();
    for (std::size_t m = 0; m < files; ++m) {
        double g = 0.0;
        for (std::size_t k = 0; k < tiers; ++k) {
            if (p(m, k) < -kFillTol || p(m, k) > 1.0 + kFillTol) return false;
            g += p(m, k) * model.z(k);
        }
        if (std::abs(g - gsol.g[m]) > 1e-9 * std::max(1.0, z_total)) return false;
    }
    double budget = 0.0;
    for (std::size_t k = 0; k < tiers; ++k) budget += model.tier(k).cache_capacity * model.z(k);
    const double used = std::accumulate(gsol.g.begin(), gsol.g.end(), 0.0);
    // Columns are only expected to be full when the relaxed budget is active.
    const bool budget_active = std::abs(used - budget) <= 1e-9 * std::max(1.0, budget);
    for (std::size_t k = 0; k < tiers; ++k) {
        const double col = p.column_sum(k);
        const double cap = model.tier(k).cache_capacity;
        if (col > cap + 1e-9) return false;
        if (budget_active && std::abs(col - cap) > 1e-9) return false;
    }
    return true;
}

void clean_entries(PlacementMatrix& p) {
    for (std::size_t m = 0; m < p.files(); ++m)
        for (std::size_t k = 0; k < p.tiers(); ++k) p(m, k) = std::clamp(p(m, k), 0.0, 1.0);
}

bool is_full_row(double g, double z_total) { return g >= z_total * (1.0 - 1e-12); }

// The rule of the sequential computation: tier j contributes the share
// g_m / sum_{i>=m} g_i of its remaining capacity; a tier clipped at one passes
// its shortfall on to the following tiers, and any residual shortfall after the
// last tier is pushed back onto tiers that still have room.
PlacementMatrix proportional_fill(const WeightedSumSolution& gsol, const NetworkModel& model) {
    const std::size_t files = gsol.g.size();
    const std::size_t tiers = model.num_tiers();
    const double z_total = model.total_weight();
    PlacementMatrix p(files, tiers);
    std::vector<double> remaining(tiers);
    for (std::size_t k = 0; k < tiers; ++k) remaining[k] = model.tier(k).cache_capacity;
    std::vector<double> tail(files + 1, 0.0);
    for (std::size_t m = files; m-- > 0;) tail[m] = tail[m + 1] + gsol.g[m];

    for (std::size_t m = 0; m < files; ++m) {
        const double g = gsol.g[m];
        if (is_full_row(g, z_total)) {
            for (std::size_t k = 0; k < tiers; ++k) p(m, k) = 1.0;
        } else if (g > 0.0) {
            const double share = g / tail[m];
            double target = 0.0;
            double placed = 0.0;
            for (std::size_t k = 0; k < tiers; ++k) {
                target += share * std::max(remaining[k], 0.0) * model.z(k);
                const double want = (target - placed) / model.z(k);
                const double take = std::clamp(std::min(want, remaining[k]), 0.0, 1.0);
                p(m, k) = take;
                placed += take * model.z(k);
            }
            double shortfall = g - placed;
            for (std::size_t k = tiers; k-- > 0 && shortfall > 0.0;) {
                const double room = std::min(1.0, remaining[k]) - p(m, k);
                if (room <= 0.0) continue;
                const double add = std::min(room, shortfall / model.z(k));
                p(m, k) += add;
                shortfall -= add * model.z(k);
            }
        }
        for (std::size_t k = 0; k < tiers; ++k) remaining[k] -= p(m, k);
    }
    return p;
}

// Repair pass: each row draws from the tiers with the most remaining capacity
// first (p_mk = clamp(C'_k - tau, 0, 1), tau chosen to meet g_m), which keeps
// the remaining capacities as level as possible for the rows that follow.
PlacementMatrix levelling_fill(const WeightedSumSolution& gsol, const NetworkModel& model) {
    const std::size_t files = gsol.g.size();
    const std::size_t tiers = model.num_tiers();
    const double z_total = model.total_weight();
    PlacementMatrix p(files, tiers);
    std::vector<double> remaining(tiers);
    for (std::size_t k = 0; k < tiers; ++k) remaining[k] = model.tier(k).cache_capacity;

    for (std::size_t m = 0; m < files; ++m) {
        const double g = gsol.g[m];
        if (is_full_row(g, z_total)) {
            for (std::size_t k = 0; k < tiers; ++k) p(m, k) = 1.0;
        } else if (g > 0.0) {
            const auto take = [&](double tau, std::size_t k) {
                return std::clamp(std::min(remaining[k] - tau, remaining[k]), 0.0, 1.0);
            };
            const auto supplied = [&](double tau) {
                double s = 0.0;
                for (std::size_t k = 0; k < tiers; ++k) s += take(tau, k) * model.z(k);
                return s;
            };
            double lo = -1.0;
            double hi = *std::max_element(remaining.begin(), remaining.end());
            for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(hi)); ++it) {
                const double mid = 0.5 * (lo + hi);
                if (supplied(mid) > g) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            const double tau = 0.5 * (lo + hi);
            double placed = 0.0;
            for (std::size_t k = 0; k < tiers; ++k) {
                p(m, k) = take(tau, k);
                placed += p(m, k) * model.z(k);
            }
            // Absorb the bisection residual on the first tier with room.
            double residual = g - placed;
            for (std::size_t k = 0; k < tiers && std::abs(residual) > 0.0; ++k) {
                const double adj = std::clamp(p(m, k) + residual / model.z(k), 0.0,
                                              std::clamp(remaining[k], 0.0, 1.0));
                residual -= (adj - p(m, k)) * model.z(k);
                p(m, k) = adj;
            }
        }
        for (std::size_t k = 0; k < tiers; ++k) remaining[k] -= p(m, k);
    }
    return p;
}

}  // namespace

PlacementMatrix sequential_fill(const WeightedSumSolution& gsol, const NetworkModel& model,
                                const PopularityProfile& q) {
    if (gsol.g.size() != q.size()) throw DimensionMismatch("sequential_fill: g and popularity differ in length");
    PlacementMatrix p = proportional_fill(gsol, model);
    if (verify_fill(p, gsol, model)) {
        clean_entries(p);
        return p;
    }
    p = levelling_fill(gsol, model);
    if (verify_fill(p, gsol, model)) {
        clean_entries(p);
        return p;
    }
    throw FillInfeasible(
        "sequential_fill: the relaxed weighted sums cannot be realised within the per-tier capacities");
}

std::pair<PlacementMatrix, SolverReport> solve_uniform(const NetworkModel& model, const PopularityProfile& q) {
    WeightedSumSolution gsol = solve_uniform_relaxed(q, model);
    const bool tight = weighted_sums_realizable(gsol.g, model);
    // No matrix reproduces unrealisable relaxed sums; use the constrained optimum instead.
    if (!tight) gsol = solve_uniform_realizable(q, model);
    PlacementMatrix p = sequential_fill(gsol, model, q);
    SolverReport report;
    report.relaxation_tight = tight;
    report.objective = hit_probability(model, p, q);
    report.iterations = gsol.iterations;
    report.converged = true;
    return {std::move(p), report};
}

std::pair<PlacementMatrix, SolverReport> solve_nonuniform_suboptimal(const NetworkModel& model,
                                                                     const PopularityProfile& q) {
    model.check_capacities(q.size());
    const InterferenceTerms terms = InterferenceTerms::of(model);
    PlacementMatrix p(q.size(), model.num_tiers());
    SolverReport report;
    for (std::size_t k = 0; k < model.num_tiers(); ++k) {
        const double v_tilde = terms.v[k] * model.total_weight() / model.z(k);
        const SingleTierSolution col = solve_single_tier(q.values(), model.tier(k).cache_capacity, terms.w[k], v_tilde);
        p.set_column(k, col.p);
        report.iterations += col.iterations;
    }
    report.objective = hit_probability(model, p, q);
    return {std::move(p), report};
}

void project_capped_box(std::span<double> v, double cap) {
    // The projection is clamp(v_i - tau, 0, 1) with the smallest tau >= 0 meeting the budget.
    const auto mass = [&](double tau) {
        double s = 0.0;
        for (double x : v) s += std::clamp(x - tau, 0.0, 1.0);
        return s;
    };
    if (mass(0.0) <= cap) {
        for (double& x : v) x = std::clamp(x, 0.0, 1.0);
        return;
    }
    if (cap <= 0.0) {
        std::fill(v.begin(), v.end(), 0.0);
        return;
    }
    double lo = 0.0;
    double hi = *std::max_element(v.begin(), v.end());
    for (int it = 0; it < 200 && hi - lo > 1e-16 * (1.0 + hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mass(mid) > cap) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    for (double& x : v) x = std::clamp(x - hi, 0.0, 1.0);
}

}  // namespace hetcache
