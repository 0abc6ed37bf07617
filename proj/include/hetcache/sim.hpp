#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hetcache/model.hpp"
#include "hetcache/philox.hpp"

namespace hetcache {

/// How interference from outside the simulated disc is treated.
enum class FarField {
    None,  // truncate at the disc edge
    Mean,  // add the mean interference of each tier's PPP beyond its simulated radius
};

enum class Execution { Serial, Parallel };

enum class SamplingMode {
    Stratified,  // sum_m q_m * conditional estimate, trials allocated in proportion to q
    Direct,      // each trial draws the requested file from q
};

struct SimConfig {
    double region_radius_km = 0.0;  // <= 0: choose so the sparsest tier expects 500 BSs
    std::uint64_t trials = 100000;
    std::uint64_t seed = 1;
    std::optional<std::size_t> target_file;
    FarField far_field = FarField::Mean;
    SamplingMode mode = SamplingMode::Stratified;
    Execution execution = Execution::Parallel;
    int threads = 0;  // 0: OpenMP default
};

struct SimEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t trials = 0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
};

/// Radius at which the sparsest tier expects `expected_bs` base stations.
double default_region_radius(const NetworkModel& model, double expected_bs = 500.0);
double effective_region_radius(const NetworkModel& model, const SimConfig& cfg);

/// Human-readable warnings about a configuration (e.g. a sparse disc).
std::vector<std::string> check_sim_config(const NetworkModel& model, const SimConfig& cfg);

/// Random source of one trial: lane k of (key, trial) drives tier k.
struct TrialRng {
    std::uint64_t key = 0;
    std::uint64_t trial = 0;
    PhiloxStream stream(std::uint32_t lane) const noexcept { return {key, trial, lane}; }
};

/// One Bernoulli sample of the hit event for a request of file m.
/// Tier-k BSs are drawn with increasing distance from the user at the origin;
/// each holds file m independently with probability p_mk. The user is served by
/// the holder with the largest mean received power P_k r^-alpha, fading is
/// Rayleigh on every link, and the request hits iff SIR >= beta of the serving tier.
bool sample_realization(const NetworkModel& model, const PlacementMatrix& placement, std::size_t m,
                        const SimConfig& cfg, const TrialRng& rng);

/// Bernoulli estimate from an integer hit count.
SimEstimate make_estimate(std::uint64_t hits, std::uint64_t trials);

/// Reference single-threaded loop over trials.
std::uint64_t count_hits_serial(const NetworkModel& model, const PlacementMatrix& placement, std::size_t m,
                                const SimConfig& cfg, std::uint64_t key, std::uint64_t trials);
/// OpenMP loop over trials; returns exactly the serial count for any thread count.
std::uint64_t count_hits_parallel(const NetworkModel& model, const PlacementMatrix& placement, std::size_t m,
                                  const SimConfig& cfg, std::uint64_t key, std::uint64_t trials);

/// Monte Carlo estimate of the conditional hit probability of file m.
SimEstimate simulate_conditional_hit(const NetworkModel& model, const PlacementMatrix& placement, std::size_t m,
                                     const SimConfig& cfg);

/// Monte Carlo estimate of the popularity-weighted hit probability.
SimEstimate simulate_hit(const NetworkModel& model, const PlacementMatrix& placement, const PopularityProfile& q,
                         const SimConfig& cfg);

}  // namespace hetcache
