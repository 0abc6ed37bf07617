#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace hetcache {

/// Philox-4x32-10 counter-based generator.
/// A stream is fixed by (key, id, lane); draws within it advance a 32-bit block
/// counter. Identical arguments always produce the identical sequence, so any
/// schedule of independent streams is reproducible.
class PhiloxStream {
public:
    using result_type = std::uint32_t;
    using Block = std::array<std::uint32_t, 4>;

    PhiloxStream(std::uint64_t key, std::uint64_t id, std::uint32_t lane = 0) noexcept
        : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)},
          id_lo_(static_cast<std::uint32_t>(id)),
          id_hi_(static_cast<std::uint32_t>(id >> 32)),
          lane_(lane) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        if (pos_ == 4) {
            buf_ = bijection({block_++, lane_, id_lo_, id_hi_}, key_);
            pos_ = 0;
        }
        return buf_[pos_++];
    }

    std::uint64_t next_u64() noexcept {
        const std::uint64_t hi = (*this)();
        return (hi << 32) | (*this)();
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
    /// Uniform on (0, 1].
    double uniform_pos() noexcept { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; }
    /// Exp(1) by inversion.
    double exponential() noexcept { return -std::log(uniform_pos()); }

    /// The keyed bijection on one 128-bit counter block.
    static Block bijection(Block ctr, std::array<std::uint32_t, 2> key) noexcept {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += 0x9E3779B9U;
                key[1] += 0xBB67AE85U;
            }
            const std::uint64_t p0 = std::uint64_t{0xD2511F53U} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{0xCD9E8D57U} * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
        }
        return ctr;
    }

private:
    std::array<std::uint32_t, 2> key_;
    std::uint32_t id_lo_;
    std::uint32_t id_hi_;
    std::uint32_t lane_;
    std::uint32_t block_ = 0;
    Block buf_{};
    int pos_ = 4;
};

/// Mixes several 64-bit words into one key (splitmix64 finaliser chain).
inline std::uint64_t mix_key(std::uint64_t a, std::uint64_t b) noexcept {
    std::uint64_t x = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace hetcache
