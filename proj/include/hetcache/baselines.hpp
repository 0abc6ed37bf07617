#pragma once

#include <cstddef>

#include "hetcache/model.hpp"

namespace hetcache {

struct ZipfParams {
    std::size_t num_files = 1;
    double exponent = 0.0;
};

/// q_m = m^-gamma / sum_i i^-gamma, m = 1..M.
PopularityProfile zipf_popularity(const ZipfParams& params);

/// Most-popular placement: tier k caches files 1..floor(C_k) and the next file
/// with probability C_k - floor(C_k).
PlacementMatrix mpcp_placement(const NetworkModel& model, std::size_t num_files);

enum class HcpInterference {
    SingleTier,  // plain V(beta_2), W(beta_2)
    Corrected,   // V scaled by sum_i z_i / z_2, as in the per-tier decomposition
};

/// Hybrid placement for K = 2: the macro tier (tier 0) caches its top files,
/// the small tier optimally places the files the macro tier does not hold.
PlacementMatrix hcp_placement(const NetworkModel& model, const PopularityProfile& q,
                              HcpInterference variant = HcpInterference::SingleTier);

}  // namespace hetcache
