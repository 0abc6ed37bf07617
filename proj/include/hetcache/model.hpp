#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hetcache {

/// Physical and caching parameters of one BS tier. All quantities linear:
/// density in BSs/km^2, power in W, SIR threshold as a ratio, capacity in files.
struct TierParams {
    double density = 1.0;
    double power = 1.0;
    double sir_threshold = 1.0;
    double cache_capacity = 1.0;
};

/// Path-loss exponent plus an ordered list of tiers (tier 0 is the macro tier
/// by convention). Immutable after construction.
class NetworkModel {
public:
    NetworkModel(double path_loss_exponent, std::vector<TierParams> tiers);

    double path_loss_exponent() const noexcept { return alpha_; }
    double delta() const noexcept { return 2.0 / alpha_; }
    std::size_t num_tiers() const noexcept { return tiers_.size(); }
    const std::vector<TierParams>& tiers() const noexcept { return tiers_; }
    const TierParams& tier(std::size_t k) const { return tiers_.at(k); }

    /// Tier weight lambda_k * P_k^delta.
    double z(std::size_t k) const { return z_.at(k); }
    std::span<const double> weights() const noexcept { return z_; }
    double total_weight() const noexcept { return z_total_; }

    /// True when every tier's SIR threshold equals tier 0's within rel_tol.
    bool uniform_sir(double rel_tol = 1e-12) const noexcept;

    /// Throws InvariantError if some tier's capacity exceeds the number of files.
    void check_capacities(std::size_t num_files) const;

private:
    double alpha_;
    std::vector<TierParams> tiers_;
    std::vector<double> z_;
    double z_total_ = 0.0;
};

/// Request probabilities over M files, sorted non-increasing, summing to one.
class PopularityProfile {
public:
    explicit PopularityProfile(std::vector<double> q);

    std::size_t size() const noexcept { return q_.size(); }
    double operator[](std::size_t m) const noexcept { return q_[m]; }
    std::span<const double> values() const noexcept { return q_; }

private:
    std::vector<double> q_;
};

/// M x K matrix of placement probabilities, row-major (file-major).
class PlacementMatrix {
public:
    PlacementMatrix(std::size_t files, std::size_t tiers, double fill = 0.0);
    /// Builds from rows; throws InvariantError on ragged rows or entries outside [0, 1].
    static PlacementMatrix from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t files() const noexcept { return files_; }
    std::size_t tiers() const noexcept { return tiers_; }

    double operator()(std::size_t m, std::size_t k) const noexcept { return p_[m * tiers_ + k]; }
    double& operator()(std::size_t m, std::size_t k) noexcept { return p_[m * tiers_ + k]; }
    std::span<const double> row(std::size_t m) const noexcept {
        return {p_.data() + m * tiers_, tiers_};
    }

    double column_sum(std::size_t k) const noexcept;
    std::vector<double> column(std::size_t k) const;
    void set_column(std::size_t k, std::span<const double> values);

    /// Entries in [0, 1] and per-tier budgets sum_m p_mk <= C_k + tol.
    bool feasible(const NetworkModel& model, double tol = 1e-9) const noexcept;
    /// Same check, throwing InvariantError with the offending tier or entry.
    void check_feasible(const NetworkModel& model, double tol = 1e-9) const;

    friend bool operator==(const PlacementMatrix&, const PlacementMatrix&) = default;

private:
    std::size_t files_;
    std::size_t tiers_;
    std::vector<double> p_;
};

/// Wired-backhaul delay model inputs; c1, c2 in milliseconds.
struct LatencyParams {
    double bs_density = 10.0;
    double gateway_density = 1.0;
    double c1_ms = 10.0;
    double c2_ms = 100.0;
};

// Interference functions of the SIR threshold. beta is linear, delta = 2/alpha in (0, 1).

/// Interference from the file-holding tiers beyond the serving distance:
/// delta*beta/(1-delta) * 2F1(1, 1-delta; 2-delta; -beta), evaluated by quadrature.
double q_func(double beta, double delta);
/// beta^delta * delta*pi / sin(delta*pi).
double v_func(double beta, double delta);
/// 1 + Q - V. Strictly positive for every beta >= 0.
double w_func(double beta, double delta);

/// Per-tier W(beta_k), V(beta_k) for a model, computed once and reused.
struct InterferenceTerms {
    std::vector<double> w;
    std::vector<double> v;

    static InterferenceTerms of(const NetworkModel& model);
};

/// Probability that a user requesting file m is served by tier k.
/// Throws FileUncached if no tier holds file m.
double association_probability(const NetworkModel& model, const PlacementMatrix& placement,
                               std::size_t m, std::size_t k);

/// Density of the serving distance r (km, the length unit of the densities)
/// given service by tier k for file m.
double serving_distance_pdf(const NetworkModel& model, const PlacementMatrix& placement,
                            std::size_t m, std::size_t k, double r);

/// Hit probability conditioned on a request for file m; 0 when m is cached nowhere.
double conditional_hit_probability(const NetworkModel& model, const PlacementMatrix& placement,
                                   std::size_t m);
double conditional_hit_probability(const NetworkModel& model, const InterferenceTerms& terms,
                                   std::span<const double> row);

/// Popularity-weighted hit probability. Dispatches to the single-tier or
/// uniform-SIR specialisation when they apply.
double hit_probability(const NetworkModel& model, const PlacementMatrix& placement,
                       const PopularityProfile& popularity);

/// General K-tier formula, never specialised.
double hit_probability_general(const NetworkModel& model, const PlacementMatrix& placement,
                               const PopularityProfile& popularity);
/// K = 1 closed form: sum_m q_m p_m / (W p_m + V).
double hit_probability_single_tier(const NetworkModel& model, const PlacementMatrix& placement,
                                   const PopularityProfile& popularity);
/// Uniform-SIR closed form in terms of g_m = sum_k p_mk z_k.
double hit_probability_uniform_sir(const NetworkModel& model, const PlacementMatrix& placement,
                                   const PopularityProfile& popularity);

/// Mean wired-backhaul delay in ms for a given hit probability.
double backhaul_latency(double hit_prob, const LatencyParams& params);

/// dBm -> W and dB -> linear conversions.
double dbm_to_watt(double dbm);
double db_to_linear(double db);

}  // namespace hetcache
