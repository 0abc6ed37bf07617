// Dual-decomposition reference solver for the general placement problem.
//
// For a fixed multiplier vector mu >= 0 the Lagrangian separates across files:
//   L(P, mu) = sum_m [f_m(P_m) - mu . P_m] + mu . C,
// so each file needs one K-variable maximisation over [0,1]^K. That inner
// problem is non-convex for unequal thresholds; it is attacked from random
// starts and from every corner of the cube. The multipliers are set by cyclic
// per-coordinate bisection on the capacity subgradient. The primal point read
// off at the final multipliers is projected onto the capacity constraints and
// polished by projected-gradient ascent on the true objective.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "hetcache/errors.hpp"
#include "hetcache/placement.hpp"

namespace hetcache {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Objective pieces in normalised weights w_k = z_k / sum_i z_i.
struct Problem {
    std::vector<double> q;
    std::vector<double> wt;  // normalised tier weights
    std::vector<double> W;
    std::vector<double> V;
    std::vector<double> cap;
    std::size_t files = 0;
    std::size_t tiers = 0;

    // Per-file objective without the q_m factor.
    double file_value(const double* x) const {
        double g = 0.0;
        for (std::size_t k = 0; k < tiers; ++k) g += x[k] * wt[k];
        if (g <= 0.0) return 0.0;
        double f = 0.0;
        for (std::size_t k = 0; k < tiers; ++k) f += x[k] * wt[k] / (W[k] * g + V[k]);
        return f;
    }

    void file_gradient(const double* x, double* grad) const {
        double g = 0.0;
        for (std::size_t k = 0; k < tiers; ++k) g += x[k] * wt[k];
        double cross = 0.0;
        for (std::size_t k = 0; k < tiers; ++k) {
            const double d = W[k] * g + V[k];
            cross += x[k] * wt[k] * W[k] / (d * d);
        }
        for (std::size_t j = 0; j < tiers; ++j) grad[j] = wt[j] / (W[j] * g + V[j]) - wt[j] * cross;
    }

    double total(const std::vector<double>& p) const {
        double f = 0.0;
        for (std::size_t m = 0; m < files; ++m) f += q[m] * file_value(&p[m * tiers]);
        return f;
    }
};

Problem make_problem(const NetworkModel& model, const PopularityProfile& q) {
    Problem pb;
    pb.files = q.size();
    pb.tiers = model.num_tiers();
    pb.q.assign(q.values().begin(), q.values().end());
    const InterferenceTerms terms = InterferenceTerms::of(model);
    pb.W = terms.w;
    pb.V = terms.v;
    for (std::size_t k = 0; k < pb.tiers; ++k) {
        pb.wt.push_back(model.z(k) / model.total_weight());
        pb.cap.push_back(model.tier(k).cache_capacity);
    }
    return pb;
}

// Inner maximisation of value(x) - (mu / q_m) . x over the unit cube, for one file.
class InnerSolver {
public:
    InnerSolver(const Problem& pb, const ReferenceOptions& opt) : pb_(pb), opt_(opt) {
        const std::size_t k = pb.tiers;
        starts_.resize(pb.files);
        for (std::size_t m = 0; m < pb.files; ++m) {
            std::mt19937_64 rng(splitmix64(opt.seed ^ splitmix64(m + 1)));
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            auto& s = starts_[m];
            for (int r = 0; r < opt.restarts; ++r)
                for (std::size_t j = 0; j < k; ++j) s.push_back(unit(rng));
            for (std::size_t corner = 0; corner < (std::size_t{1} << k); ++corner)
                for (std::size_t j = 0; j < k; ++j) s.push_back((corner >> j) & 1U ? 1.0 : 0.0);
        }
    }

    /// Writes the best point into x and returns the Lagrangian term value (with q_m).
    double solve(std::size_t m, const std::vector<double>& mu, double* x) const {
        const std::size_t k = pb_.tiers;
        const double qm = pb_.q[m];
        std::vector<double> price(k);
        for (std::size_t j = 0; j < k; ++j) price[j] = qm > 0.0 ? mu[j] / qm : std::numeric_limits<double>::infinity();
        const auto merit = [&](const double* y) {
            double val = pb_.file_value(y);
            for (std::size_t j = 0; j < k; ++j) val -= (price[j] == 0.0 ? 0.0 : price[j] * y[j]);
            return val;
        };
        if (qm <= 0.0) {
            std::fill(x, x + k, 0.0);
            return 0.0;
        }

        std::vector<double> y(k), grad(k);
        double best = -std::numeric_limits<double>::infinity();
        const auto& s = starts_[m];
        const std::size_t n_starts = s.size() / k;
        const std::size_t n_random = static_cast<std::size_t>(opt_.restarts);
        for (std::size_t st = 0; st < n_starts; ++st) {
            std::copy(s.begin() + st * k, s.begin() + (st + 1) * k, y.begin());
            if (st >= n_random) {
                // Corner patterns are candidates as they stand.
                const double val = merit(y.data());
                if (val > best) {
                    best = val;
                    std::copy(y.begin(), y.end(), x);
                }
            }
            for (int it = 1; it <= opt_.inner_iterations; ++it) {
                pb_.file_gradient(y.data(), grad.data());
                const double step = 0.1 / std::sqrt(static_cast<double>(it));
                for (std::size_t j = 0; j < k; ++j) y[j] = std::clamp(y[j] + step * (grad[j] - price[j]), 0.0, 1.0);
            }
            const double val = merit(y.data());
            if (val > best) {
                best = val;
                std::copy(y.begin(), y.end(), x);
            }
        }
        return qm * best;
    }

private:
    const Problem& pb_;
    const ReferenceOptions& opt_;
    std::vector<std::vector<double>> starts_;
};

struct DualPoint {
    std::vector<double> x;  // files x tiers
    std::vector<double> usage;
    double value = 0.0;     // D(mu)
};

DualPoint evaluate_dual(const Problem& pb, const InnerSolver& inner, const std::vector<double>& mu) {
    DualPoint d;
    d.x.assign(pb.files * pb.tiers, 0.0);
    d.usage.assign(pb.tiers, 0.0);
    for (std::size_t m = 0; m < pb.files; ++m) {
        d.value += inner.solve(m, mu, &d.x[m * pb.tiers]);
        for (std::size_t k = 0; k < pb.tiers; ++k) d.usage[k] += d.x[m * pb.tiers + k];
    }
    for (std::size_t k = 0; k < pb.tiers; ++k) d.value += mu[k] * pb.cap[k];
    return d;
}

void project_columns(const Problem& pb, std::vector<double>& p) {
    std::vector<double> col(pb.files);
    for (std::size_t k = 0; k < pb.tiers; ++k) {
        for (std::size_t m = 0; m < pb.files; ++m) col[m] = p[m * pb.tiers + k];
        project_capped_box(col, pb.cap[k]);
        for (std::size_t m = 0; m < pb.files; ++m) p[m * pb.tiers + k] = col[m];
    }
}

// Projected-gradient ascent with backtracking on the full objective.
double polish(const Problem& pb, std::vector<double>& p, int iterations, bool& converged) {
    std::vector<double> grad(p.size()), trial(p.size()), g_file(pb.tiers);
    double f = pb.total(p);
    double step = 1.0;
    converged = false;
    for (int it = 0; it < iterations; ++it) {
        for (std::size_t m = 0; m < pb.files; ++m) {
            pb.file_gradient(&p[m * pb.tiers], g_file.data());
            for (std::size_t k = 0; k < pb.tiers; ++k) grad[m * pb.tiers + k] = pb.q[m] * g_file[k];
        }
        bool moved = false;
        for (int bt = 0; bt < 60; ++bt) {
            for (std::size_t i = 0; i < p.size(); ++i) trial[i] = p[i] + step * grad[i];
            project_columns(pb, trial);
            double lin = 0.0;
            double dist2 = 0.0;
            for (std::size_t i = 0; i < p.size(); ++i) {
                lin += grad[i] * (trial[i] - p[i]);
                dist2 += (trial[i] - p[i]) * (trial[i] - p[i]);
            }
            if (dist2 == 0.0) break;
            const double ft = pb.total(trial);
            if (ft >= f + 1e-4 * lin) {
                moved = ft > f;
                p.swap(trial);
                f = ft;
                step *= 2.0;
                break;
            }
            step *= 0.5;
        }
        if (!moved) {
            converged = true;
            break;
        }
    }
    return f;
}

}  // namespace

std::pair<PlacementMatrix, SolverReport> solve_reference(const NetworkModel& model, const PopularityProfile& q,
                                                         const ReferenceOptions& options) {
    model.check_capacities(q.size());
    const Problem pb = make_problem(model, q);
    const InnerSolver inner(pb, options);
    SolverReport report;

    // Above mu_k = q_1 w_k / V_k the tier-k derivative is negative everywhere.
    std::vector<double> mu(pb.tiers, 0.0), mu_max(pb.tiers);
    for (std::size_t k = 0; k < pb.tiers; ++k) mu_max[k] = 1.01 * pb.q.front() * pb.wt[k] / pb.V[k];

    double best_dual = std::numeric_limits<double>::infinity();
    const auto eval = [&](const std::vector<double>& at) {
        DualPoint d = evaluate_dual(pb, inner, at);
        ++report.iterations;
        best_dual = std::min(best_dual, d.value);
        return d;
    };

    for (int sweep = 0; sweep < options.dual_sweeps; ++sweep) {
        for (std::size_t k = 0; k < pb.tiers; ++k) {
            std::vector<double> trial = mu;
            trial[k] = 0.0;
            if (eval(trial).usage[k] <= pb.cap[k]) {
                mu[k] = 0.0;
                continue;
            }
            double lo = 0.0;
            double hi = mu_max[k];
            for (int b = 0; b < options.dual_bisections; ++b) {
                trial[k] = 0.5 * (lo + hi);
                if (eval(trial).usage[k] > pb.cap[k]) {
                    lo = trial[k];
                } else {
                    hi = trial[k];
                }
            }
            mu[k] = hi;
        }
    }
    const DualPoint final_point = eval(mu);

    // Candidate primal starts: the dual-recovered point, an even spread, and top-C filling.
    std::vector<std::vector<double>> starts;
    starts.push_back(final_point.x);
    {
        std::vector<double> even(pb.files * pb.tiers);
        for (std::size_t m = 0; m < pb.files; ++m)
            for (std::size_t k = 0; k < pb.tiers; ++k)
                even[m * pb.tiers + k] = std::min(1.0, pb.cap[k] / static_cast<double>(pb.files));
        starts.push_back(std::move(even));
        std::vector<double> top(pb.files * pb.tiers, 0.0);
        for (std::size_t k = 0; k < pb.tiers; ++k) {
            double left = pb.cap[k];
            for (std::size_t m = 0; m < pb.files && left > 0.0; ++m) {
                top[m * pb.tiers + k] = std::min(1.0, left);
                left -= top[m * pb.tiers + k];
            }
        }
        starts.push_back(std::move(top));
    }

    std::vector<double> best_p;
    double best_f = -1.0;
    bool best_converged = false;
    for (auto& start : starts) {
        project_columns(pb, start);
        bool conv = false;
        const double f = polish(pb, start, options.polish_iterations, conv);
        if (f > best_f) {
            best_f = f;
            best_p = start;
            best_converged = conv;
        }
    }

    PlacementMatrix out(pb.files, pb.tiers);
    for (std::size_t m = 0; m < pb.files; ++m)
        for (std::size_t k = 0; k < pb.tiers; ++k) out(m, k) = std::clamp(best_p[m * pb.tiers + k], 0.0, 1.0);
    report.objective = hit_probability(model, out, q);
    report.converged = best_converged;
    report.duality_gap = best_dual - report.objective;
    return {std::move(out), report};
}

}  // namespace hetcache
