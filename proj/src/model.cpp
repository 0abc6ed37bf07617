#include "hetcache/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>

#include "hetcache/errors.hpp"
#include "hetcache/quadrature.hpp"

namespace hetcache {

namespace {

void check_beta_delta(double beta, double delta, const char* fn) {
    if (!(beta >= 0.0) || !std::isfinite(beta))
        throw DomainError(std::string(fn) + ": beta must be finite and >= 0");
    if (!(delta > 0.0 && delta < 1.0))
        throw DomainError(std::string(fn) + ": delta must lie in (0, 1)");
}

void check_dims(const NetworkModel& model, const PlacementMatrix& placement) {
    if (placement.tiers() != model.num_tiers())
        throw DimensionMismatch("placement has " + std::to_string(placement.tiers()) +
                                " tiers, model has " + std::to_string(model.num_tiers()));
}

void check_dims(const NetworkModel& model, const PlacementMatrix& placement,
                const PopularityProfile& popularity) {
    check_dims(model, placement);
    if (placement.files() != popularity.size())
        throw DimensionMismatch("placement has " + std::to_string(placement.files()) +
                                " files, popularity has " + std::to_string(popularity.size()));
}

double weighted_row_sum(const NetworkModel& model, std::span<const double> row) {
    double g = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k) g += row[k] * model.z(k);
    return g;
}

}  // namespace

NetworkModel::NetworkModel(double path_loss_exponent, std::vector<TierParams> tiers)
    : alpha_(path_loss_exponent), tiers_(std::move(tiers)) {
    if (!(alpha_ > 2.0) || !std::isfinite(alpha_))
        throw InvariantError("path-loss exponent must exceed 2");
    if (tiers_.empty()) throw InvariantError("a network needs at least one tier");
    const double d = delta();
    z_.reserve(tiers_.size());
    for (std::size_t k = 0; k < tiers_.size(); ++k) {
        const TierParams& t = tiers_[k];
        const std::string at = "tier " + std::to_string(k) + ": ";
        if (!(t.density > 0.0) || !std::isfinite(t.density)) throw InvariantError(at + "density must be > 0");
        if (!(t.power > 0.0) || !std::isfinite(t.power)) throw InvariantError(at + "power must be > 0");
        if (!(t.sir_threshold > 0.0) || !std::isfinite(t.sir_threshold))
            throw InvariantError(at + "SIR threshold must be > 0");
        // C_k = 0 is allowed: the tier then caches nothing.
        if (!(t.cache_capacity >= 0.0) || !std::isfinite(t.cache_capacity))
            throw InvariantError(at + "cache capacity must be >= 0");
        z_.push_back(t.density * std::pow(t.power, d));
    }
    z_total_ = std::accumulate(z_.begin(), z_.end(), 0.0);
}

bool NetworkModel::uniform_sir(double rel_tol) const noexcept {
    const double b0 = tiers_.front().sir_threshold;
    return std::all_of(tiers_.begin(), tiers_.end(), [&](const TierParams& t) {
        return std::abs(t.sir_threshold - b0) <= rel_tol * b0;
    });
}

void NetworkModel::check_capacities(std::size_t num_files) const {
    for (std::size_t k = 0; k < tiers_.size(); ++k) {
        if (tiers_[k].cache_capacity > static_cast<double>(num_files))
            throw InvariantError("tier " + std::to_string(k) + ": cache capacity exceeds the " +
                                 std::to_string(num_files) + " files in the library");
    }
}

PopularityProfile::PopularityProfile(std::vector<double> q) : q_(std::move(q)) {
    if (q_.empty()) throw InvariantError("popularity profile is empty");
    double sum = 0.0;
    for (std::size_t m = 0; m < q_.size(); ++m) {
        if (!(q_[m] >= 0.0 && q_[m] <= 1.0))
            throw InvariantError("popularity q[" + std::to_string(m) + "] outside [0, 1]");
        if (m > 0 && q_[m] > q_[m - 1])
            throw InvariantError("popularity must be non-increasing (q[" + std::to_string(m) +
                                 "] > q[" + std::to_string(m - 1) + "])");
        sum += q_[m];
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        std::ostringstream os;
        os.precision(17);
        os << "popularity sums to " << sum << ", expected 1";
        throw InvariantError(os.str());
    }
}

PlacementMatrix::PlacementMatrix(std::size_t files, std::size_t tiers, double fill)
    : files_(files), tiers_(tiers), p_(files * tiers, fill) {
    if (files == 0 || tiers == 0) throw InvariantError("placement matrix needs M >= 1 and K >= 1");
    if (!(fill >= 0.0 && fill <= 1.0)) throw InvariantError("placement entries must lie in [0, 1]");
}

PlacementMatrix PlacementMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty() || rows.front().empty()) throw InvariantError("placement matrix is empty");
    PlacementMatrix out(rows.size(), rows.front().size());
    for (std::size_t m = 0; m < rows.size(); ++m) {
        if (rows[m].size() != out.tiers_)
            throw InvariantError("placement row " + std::to_string(m) + " has the wrong length");
        for (std::size_t k = 0; k < out.tiers_; ++k) {
            const double v = rows[m][k];
            if (!(v >= 0.0 && v <= 1.0))
                throw InvariantError("placement entry (" + std::to_string(m) + ", " + std::to_string(k) +
                                     ") outside [0, 1]");
            out(m, k) = v;
        }
    }
    return out;
}

double PlacementMatrix::column_sum(std::size_t k) const noexcept {
    double s = 0.0;
    for (std::size_t m = 0; m < files_; ++m) s += (*this)(m, k);
    return s;
}

std::vector<double> PlacementMatrix::column(std::size_t k) const {
    std::vector<double> out(files_);
    for (std::size_t m = 0; m < files_; ++m) out[m] = (*this)(m, k);
    return out;
}

void PlacementMatrix::set_column(std::size_t k, std::span<const double> values) {
    if (values.size() != files_) throw DimensionMismatch("column length does not match file count");
    for (std::size_t m = 0; m < files_; ++m) (*this)(m, k) = values[m];
}

bool PlacementMatrix::feasible(const NetworkModel& model, double tol) const noexcept {
    try {
        check_feasible(model, tol);
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

void PlacementMatrix::check_feasible(const NetworkModel& model, double tol) const {
    check_dims(model, *this);
    for (std::size_t i = 0; i < p_.size(); ++i) {
        if (!(p_[i] >= 0.0 && p_[i] <= 1.0))
            throw InvariantError("placement entry (" + std::to_string(i / tiers_) + ", " +
                                 std::to_string(i % tiers_) + ") outside [0, 1]");
    }
    for (std::size_t k = 0; k < tiers_; ++k) {
        const double used = column_sum(k);
        if (used > model.tier(k).cache_capacity + tol) {
            std::ostringstream os;
            os.precision(15);
            os << "tier " << k << " stores " << used << " files, capacity " << model.tier(k).cache_capacity;
            throw InvariantError(os.str());
        }
    }
}

double q_func(double beta, double delta) {
    check_beta_delta(beta, delta, "q_func");
    if (beta == 0.0) return 0.0;
    // With t = w^(1/(1-delta)) the Euler integral of 2F1(1, 1-delta; 2-delta; -beta)
    // loses its endpoint singularity:
    //   Q = delta*beta/(1-delta) * int_0^1 dw / (1 + beta * w^(1/(1-delta))).
    const double expo = 1.0 / (1.0 - delta);
    const auto integrand = [&](double w) { return 1.0 / (1.0 + beta * std::pow(w, expo)); };
    // Split at the knee w* = beta^(-(1-delta)) where beta*w^expo = 1.
    const double knee = std::pow(beta, -(1.0 - delta));
    double integral = 0.0;
    if (knee < 1.0) {
        integral = quad::integrate(integrand, 0.0, knee, 1e-14) + quad::integrate(integrand, knee, 1.0, 1e-14);
    } else {
        integral = quad::integrate(integrand, 0.0, 1.0, 1e-14);
    }
    return delta * beta / (1.0 - delta) * integral;
}

double v_func(double beta, double delta) {
    check_beta_delta(beta, delta, "v_func");
    const double pd = std::numbers::pi * delta;
    return std::pow(beta, delta) * pd / std::sin(pd);
}

double w_func(double beta, double delta) { return 1.0 + q_func(beta, delta) - v_func(beta, delta); }

InterferenceTerms InterferenceTerms::of(const NetworkModel& model) {
    InterferenceTerms terms;
    terms.w.reserve(model.num_tiers());
    terms.v.reserve(model.num_tiers());
    for (const TierParams& t : model.tiers()) {
        const double v = v_func(t.sir_threshold, model.delta());
        terms.v.push_back(v);
        terms.w.push_back(1.0 + q_func(t.sir_threshold, model.delta()) - v);
    }
    return terms;
}

double association_probability(const NetworkModel& model, const PlacementMatrix& placement,
                               std::size_t m, std::size_t k) {
    check_dims(model, placement);
    if (m >= placement.files() || k >= placement.tiers()) throw std::out_of_range("association_probability");
    const double g = weighted_row_sum(model, placement.row(m));
    if (!(g > 0.0)) throw FileUncached(m);
    return placement(m, k) * model.z(k) / g;
}

double serving_distance_pdf(const NetworkModel& model, const PlacementMatrix& placement,
                            std::size_t m, std::size_t k, double r) {
    if (!(r >= 0.0)) throw DomainError("serving_distance_pdf: r must be >= 0");
    const double assoc = association_probability(model, placement, m, k);
    if (!(assoc > 0.0))
        throw DomainError("serving_distance_pdf: tier " + std::to_string(k) + " does not hold file " +
                          std::to_string(m));
    const double d = model.delta();
    const double pk = model.tier(k).power;
    double rate = 0.0;
    for (std::size_t j = 0; j < model.num_tiers(); ++j)
        rate += placement(m, j) * model.tier(j).density * std::pow(model.tier(j).power / pk, d);
    const double lead = 2.0 * std::numbers::pi * placement(m, k) * model.tier(k).density / assoc;
    return lead * r * std::exp(-std::numbers::pi * rate * r * r);
}

double conditional_hit_probability(const NetworkModel& model, const InterferenceTerms& terms,
                                   std::span<const double> row) {
    const double g = weighted_row_sum(model, row);
    if (!(g > 0.0)) return 0.0;
    const double z_total = model.total_weight();
    double hit = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k) {
        if (row[k] == 0.0) continue;
        hit += row[k] * model.z(k) / (terms.w[k] * g + terms.v[k] * z_total);
    }
    return hit;
}

double conditional_hit_probability(const NetworkModel& model, const PlacementMatrix& placement,
                                   std::size_t m) {
    check_dims(model, placement);
    if (m >= placement.files()) throw std::out_of_range("conditional_hit_probability");
    return conditional_hit_probability(model, InterferenceTerms::of(model), placement.row(m));
}

double hit_probability_general(const NetworkModel& model, const PlacementMatrix& placement,
                               const PopularityProfile& popularity) {
    check_dims(model, placement, popularity);
    const InterferenceTerms terms = InterferenceTerms::of(model);
    double hit = 0.0;
    for (std::size_t m = 0; m < popularity.size(); ++m)
        hit += popularity[m] * conditional_hit_probability(model, terms, placement.row(m));
    return hit;
}

double hit_probability_single_tier(const NetworkModel& model, const PlacementMatrix& placement,
                                   const PopularityProfile& popularity) {
    check_dims(model, placement, popularity);
    if (model.num_tiers() != 1) throw DimensionMismatch("single-tier closed form needs K = 1");
    const double beta = model.tier(0).sir_threshold;
    const double v = v_func(beta, model.delta());
    const double w = 1.0 + q_func(beta, model.delta()) - v;
    double hit = 0.0;
    for (std::size_t m = 0; m < popularity.size(); ++m) {
        const double p = placement(m, 0);
        hit += popularity[m] * p / (w * p + v);
    }
    return hit;
}

double hit_probability_uniform_sir(const NetworkModel& model, const PlacementMatrix& placement,
                                   const PopularityProfile& popularity) {
    check_dims(model, placement, popularity);
    if (!model.uniform_sir()) throw UniformBetaRequired("uniform-SIR closed form needs equal thresholds");
    const double beta = model.tier(0).sir_threshold;
    const double v = v_func(beta, model.delta());
    const double w = 1.0 + q_func(beta, model.delta()) - v;
    const double v_scaled = v * model.total_weight();
    double hit = 0.0;
    for (std::size_t m = 0; m < popularity.size(); ++m) {
        const double g = weighted_row_sum(model, placement.row(m));
        hit += popularity[m] * g / (w * g + v_scaled);
    }
    return hit;
}

double hit_probability(const NetworkModel& model, const PlacementMatrix& placement,
                       const PopularityProfile& popularity) {
    if (model.num_tiers() == 1) return hit_probability_single_tier(model, placement, popularity);
    if (model.uniform_sir()) return hit_probability_uniform_sir(model, placement, popularity);
    return hit_probability_general(model, placement, popularity);
}

double backhaul_latency(double hit_prob, const LatencyParams& params) {
    if (!(hit_prob >= 0.0 && hit_prob <= 1.0)) throw DomainError("backhaul_latency: hit probability outside [0, 1]");
    if (!(params.bs_density > 0.0 && params.gateway_density > 0.0 && params.c1_ms > 0.0 && params.c2_ms > 0.0))
        throw DomainError("backhaul_latency: latency parameters must be positive");
    const double miss = 1.0 - hit_prob;
    return miss * (1.0 + 1.28 * miss * params.bs_density / params.gateway_density) * params.c1_ms + params.c2_ms;
}

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace hetcache
