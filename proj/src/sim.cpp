#include "hetcache/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <omp.h>

#include "hetcache/errors.hpp"

namespace hetcache {

namespace {

constexpr std::uint64_t kDirectStratum = 0xD1EC7ULL;
// Hard stop when searching beyond the disc for a file holder.
constexpr std::uint64_t kMaxExtension = 50'000'000;

// s^(-alpha/2) for a squared distance s.
class PathLoss {
public:
    explicit PathLoss(double alpha) : half_alpha_(0.5 * alpha), kind_(classify(alpha)) {}

    double operator()(double s) const noexcept {
        switch (kind_) {
            case Kind::Three: return 1.0 / (s * std::sqrt(s));
            case Kind::Four: return 1.0 / (s * s);
            default: return std::exp(-half_alpha_ * std::log(s));
        }
    }

private:
    enum class Kind { Three, Four, General };
    static Kind classify(double alpha) {
        if (alpha == 3.0) return Kind::Three;
        if (alpha == 4.0) return Kind::Four;
        return Kind::General;
    }
    double half_alpha_;
    Kind kind_;
};

struct TierDraw {
    bool holder_found = false;
    double holder_s = 0.0;      // squared distance of the nearest holder
    double holder_rx = 0.0;     // its received power including fading
    double other_rx = 0.0;      // every other explicitly drawn BS of the tier
    double reach_s = 0.0;       // squared radius up to which the tier was drawn
    double last_s = 0.0;        // squared distance of the last drawn point
};

}  // namespace

double default_region_radius(const NetworkModel& model, double expected_bs) {
    double sparsest = std::numeric_limits<double>::infinity();
    for (const TierParams& t : model.tiers()) sparsest = std::min(sparsest, t.density);
    return std::sqrt(expected_bs / (std::numbers::pi * sparsest));
}

double effective_region_radius(const NetworkModel& model, const SimConfig& cfg) {
    return cfg.region_radius_km > 0.0 ? cfg.region_radius_km : default_region_radius(model);
}

std::vector<std::string> check_sim_config(const NetworkModel& model, const SimConfig& cfg) {
    std::vector<std::string> out;
    const double r = effective_region_radius(model, cfg);
    for (std::size_t k = 0; k < model.num_tiers(); ++k) {
        const double expected = std::numbers::pi * r * r * model.tier(k).density;
        if (expected < 100.0) {
            std::ostringstream os;
            os << "tier " << k << " expects only " << expected << " BSs in the simulation disc (radius " << r
               << " km); boundary effects may bias the estimate";
            out.push_back(os.str());
        }
    }
    if (cfg.trials == 0) out.emplace_back("trials is zero");
    return out;
}

bool sample_realization(const NetworkModel& model, const PlacementMatrix& placement, std::size_t m,
                        const SimConfig& cfg, const TrialRng& rng) {
    const std::size_t tiers = model.num_tiers();
    if (placement.tiers() != tiers) throw DimensionMismatch("sample_realization: placement/model tier mismatch");
    bool any = false;
    for (std::size_t k = 0; k < tiers; ++k) any = any || placement(m, k) > 0.0;
    if (!any) return false;

    const double alpha = model.path_loss_exponent();
    const PathLoss loss(alpha);
    const double radius = effective_region_radius(model, cfg);
    const double disc_s = radius * radius;

    std::vector<TierDraw> draws(tiers);
    std::vector<PhiloxStream> streams;
    streams.reserve(tiers);
    for (std::size_t k = 0; k < tiers; ++k) streams.push_back(rng.stream(static_cast<std::uint32_t>(k)));

    // Squared distances of a planar PPP of density lambda are the arrival
    // times of a rate pi*lambda Poisson process on the half-line, so each tier
    // is drawn nearest-first and can be paused and resumed. Per BS the stream
    // yields the gap, the fading and (until a holder is found) the mark.
    //
    // Pass 1: every tier up to its nearest holder, or to the disc edge.
    for (std::size_t k = 0; k < tiers; ++k) {
        const TierParams& t = model.tier(k);
        const double rate = std::numbers::pi * t.density;
        const double hold = placement(m, k);
        PhiloxStream& rs = streams[k];
        TierDraw& d = draws[k];
        double s = 0.0;
        for (;;) {
            s += rs.exponential() / rate;
            if (s > disc_s) break;
            const double rx = t.power * rs.exponential() * loss(s);
            if (hold > 0.0 && rs.uniform() < hold) {
                d.holder_found = true;
                d.holder_s = s;
                d.holder_rx = rx;
                break;
            }
            d.other_rx += rx;
        }
        d.reach_s = disc_s;
        d.last_s = s;  // holder position, or the first arrival beyond the disc
    }

    const auto best_mean_power = [&]() {
        double best = 0.0;
        for (std::size_t k = 0; k < tiers; ++k)
            if (draws[k].holder_found) best = std::max(best, model.tier(k).power * loss(draws[k].holder_s));
        return best;
    };

    // Pass 2: a tier without a holder inside the disc may still supply the
    // serving BS from beyond it; continue while that remains possible.
    std::vector<bool> complete(tiers, false);
    for (std::size_t k = 0; k < tiers; ++k) {
        TierDraw& d = draws[k];
        if (d.holder_found) continue;
        complete[k] = true;
        const TierParams& t = model.tier(k);
        const double hold = placement(m, k);
        if (hold <= 0.0) continue;
        PhiloxStream& rs = streams[k];
        const double rate = std::numbers::pi * t.density;
        double s = d.last_s;  // pending arrival, gap already consumed
        for (std::uint64_t n = 0; n < kMaxExtension; ++n) {
            if (t.power * loss(s) <= best_mean_power()) break;
            const double rx = t.power * rs.exponential() * loss(s);
            d.reach_s = s;
            if (rs.uniform() < hold) {
                d.holder_found = true;
                d.holder_s = s;
                d.holder_rx = rx;
                break;
            }
            d.other_rx += rx;
            s += rs.exponential() / rate;
        }
    }

    std::size_t serving = tiers;
    double best = 0.0;
    for (std::size_t k = 0; k < tiers; ++k) {
        if (!draws[k].holder_found) continue;
        const double mean_rx = model.tier(k).power * loss(draws[k].holder_s);
        if (serving == tiers || mean_rx > best) {
            best = mean_rx;
            serving = k;
        }
    }
    if (serving == tiers) return false;

    // Hit iff the total interference stays at or below signal / beta. The sum only
    // grows as BSs are added, so the trial can stop as soon as it exceeds that.
    const double limit = draws[serving].holder_rx / model.tier(serving).sir_threshold;
    double interference = 0.0;
    for (std::size_t k = 0; k < tiers; ++k) {
        const TierDraw& d = draws[k];
        interference += d.other_rx;
        if (k != serving && d.holder_found) interference += d.holder_rx;
        if (cfg.far_field == FarField::Mean) {
            // E[sum beyond rho] = 2 pi lambda P rho^(2-alpha) / (alpha - 2), rho^2 = reach_s.
            const TierParams& t = model.tier(k);
            interference += 2.0 * std::numbers::pi * t.density * t.power *
                            std::pow(d.reach_s, 1.0 - 0.5 * alpha) / (alpha - 2.0);
        }
    }
    if (interference > limit) return false;

    // Pass 3: tiers paused at a holder inside the disc continue to the edge.
    for (std::size_t k = 0; k < tiers; ++k) {
        if (complete[k]) continue;
        const TierParams& t = model.tier(k);
        const double rate = std::numbers::pi * t.density;
        PhiloxStream& rs = streams[k];
        double s = draws[k].last_s;
        for (;;) {
            s += rs.exponential() / rate;
            if (s > disc_s) break;
            interference += t.power * rs.exponential() * loss(s);
            if (interference > limit) return false;
        }
    }
    return true;
}

SimEstimate make_estimate(std::uint64_t hits, std::uint64_t trials) {
    SimEstimate e;
    e.trials = trials;
    if (trials == 0) return e;
    e.mean = static_cast<double>(hits) / static_cast<double>(trials);
    e.std_error = std::sqrt(e.mean * (1.0 - e.mean) / static_cast<double>(trials));
    e.ci_lo = std::max(0.0, e.mean - 1.96 * e.std_error);
    e.ci_hi = std::min(1.0, e.mean + 1.96 * e.std_error);
    return e;
}

std::uint64_t count_hits_serial(const NetworkModel& model, const PlacementMatrix& placement, std::size_t m,
                                const SimConfig& cfg, std::uint64_t key, std::uint64_t trials) {
    std::uint64_t hits = 0;
    for (std::uint64_t t = 0; t < trials; ++t) hits += sample_realization(model, placement, m, cfg, {key, t}) ? 1 : 0;
    return hits;
}

std::uint64_t count_hits_parallel(const NetworkModel& model, const PlacementMatrix& placement, std::size_t m,
                                  const SimConfig& cfg, std::uint64_t key, std::uint64_t trials) {
    const int threads = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();
    const auto n = static_cast<std::int64_t>(trials);
    std::uint64_t hits = 0;
#pragma omp parallel for num_threads(threads) schedule(dynamic, 256) reduction(+ : hits)
    for (std::int64_t t = 0; t < n; ++t)
        hits += sample_realization(model, placement, m, cfg, {key, static_cast<std::uint64_t>(t)}) ? 1 : 0;
    return hits;
}

namespace {

std::uint64_t count_hits(const NetworkModel& model, const PlacementMatrix& placement, std::size_t m,
                         const SimConfig& cfg, std::uint64_t key, std::uint64_t trials) {
    return cfg.execution == Execution::Serial ? count_hits_serial(model, placement, m, cfg, key, trials)
                                              : count_hits_parallel(model, placement, m, cfg, key, trials);
}

void check_inputs(const NetworkModel& model, const PlacementMatrix& placement) {
    if (placement.tiers() != model.num_tiers()) throw DimensionMismatch("simulation: placement/model tier mismatch");
}

}  // namespace

SimEstimate simulate_conditional_hit(const NetworkModel& model, const PlacementMatrix& placement, std::size_t m,
                                     const SimConfig& cfg) {
    check_inputs(model, placement);
    if (m >= placement.files()) throw std::out_of_range("simulate_conditional_hit: file index");
    const std::uint64_t key = mix_key(cfg.seed, m);
    return make_estimate(count_hits(model, placement, m, cfg, key, cfg.trials), cfg.trials);
}

SimEstimate simulate_hit(const NetworkModel& model, const PlacementMatrix& placement, const PopularityProfile& q,
                         const SimConfig& cfg) {
    check_inputs(model, placement);
    if (placement.files() != q.size()) throw DimensionMismatch("simulate_hit: placement/popularity mismatch");
    const std::size_t files = q.size();

    if (cfg.mode == SamplingMode::Direct) {
        // Lane K of each trial picks the file; lanes 0..K-1 drive the tiers.
        std::vector<double> cdf(files);
        double acc = 0.0;
        for (std::size_t m = 0; m < files; ++m) cdf[m] = (acc += q[m]);
        const std::uint64_t key = mix_key(cfg.seed, kDirectStratum);
        const auto lane = static_cast<std::uint32_t>(model.num_tiers());
        const auto one = [&](std::uint64_t t) {
            PhiloxStream pick(key, t, lane);
            const double u = pick.uniform() * acc;
            const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
            const std::size_t m = std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), files - 1);
            return sample_realization(model, placement, m, cfg, {key, t}) ? 1ULL : 0ULL;
        };
        std::uint64_t hits = 0;
        const auto n = static_cast<std::int64_t>(cfg.trials);
        if (cfg.execution == Execution::Serial) {
            for (std::int64_t t = 0; t < n; ++t) hits += one(static_cast<std::uint64_t>(t));
        } else {
            const int threads = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();
#pragma omp parallel for num_threads(threads) schedule(dynamic, 256) reduction(+ : hits)
            for (std::int64_t t = 0; t < n; ++t) hits += one(static_cast<std::uint64_t>(t));
        }
        return make_estimate(hits, cfg.trials);
    }

    // Stratified: files nobody caches contribute exactly zero and get no trials;
    // the rest share the budget in proportion to q (largest remainder, >= 1 each).
    std::vector<std::size_t> active;
    double active_mass = 0.0;
    for (std::size_t m = 0; m < files; ++m) {
        bool cached = false;
        for (std::size_t k = 0; k < model.num_tiers(); ++k) cached = cached || placement(m, k) > 0.0;
        if (cached && q[m] > 0.0) {
            active.push_back(m);
            active_mass += q[m];
        }
    }
    SimEstimate out;
    if (active.empty()) {
        out.trials = 0;
        return out;
    }
    const double budget = static_cast<double>(cfg.trials);
    std::vector<std::uint64_t> alloc(active.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    std::uint64_t assigned = 0;
    for (std::size_t i = 0; i < active.size(); ++i) {
        const double share = budget * q[active[i]] / active_mass;
        alloc[i] = static_cast<std::uint64_t>(std::floor(share));
        assigned += alloc[i];
        remainders.emplace_back(share - std::floor(share), i);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t j = 0; assigned < cfg.trials && j < remainders.size(); ++j, ++assigned) ++alloc[remainders[j].second];
    for (auto& a : alloc) a = std::max<std::uint64_t>(a, 1);

    double mean = 0.0;
    double var = 0.0;
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < active.size(); ++i) {
        const std::size_t m = active[i];
        const std::uint64_t hits = count_hits(model, placement, m, cfg, mix_key(cfg.seed, m), alloc[i]);
        const SimEstimate e = make_estimate(hits, alloc[i]);
        mean += q[m] * e.mean;
        var += q[m] * q[m] * e.std_error * e.std_error;
        total += alloc[i];
    }
    out.mean = mean;
    out.std_error = std::sqrt(var);
    out.trials = total;
    out.ci_lo = std::max(0.0, mean - 1.96 * out.std_error);
    out.ci_hi = std::min(1.0, mean + 1.96 * out.std_error);
    return out;
}

}  // namespace hetcache
