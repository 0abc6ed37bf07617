#include <doctest.h>

#include <cmath>
#include <set>

#include "hetcache/philox.hpp"

using namespace hetcache;
using Block = PhiloxStream::Block;

TEST_SUITE("philox") {

TEST_CASE("known-answer vectors of the 4x32-10 bijection") {
    CHECK(PhiloxStream::bijection({0, 0, 0, 0}, {0, 0}) == Block{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(PhiloxStream::bijection({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          Block{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(PhiloxStream::bijection({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          Block{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct") {
    PhiloxStream a(123, 7, 0), b(123, 7, 0), c(123, 7, 1), d(123, 8, 0), e(124, 7, 0);
    std::set<std::uint64_t> firsts;
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next_u64();
        CHECK(x == b.next_u64());
        if (i == 0) {
            firsts.insert(x);
            firsts.insert(c.next_u64());
            firsts.insert(d.next_u64());
            firsts.insert(e.next_u64());
        }
    }
    CHECK(firsts.size() == 4);
}

TEST_CASE("uniform and exponential draws have the right range and moments") {
    PhiloxStream s(99, 0);
    const int n = 200000;
    double sum_u = 0.0, sum_e = 0.0, sum_e2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = s.uniform();
        CHECK_UNARY(u >= 0.0 && u < 1.0);
        sum_u += u;
        const double p = s.uniform_pos();
        CHECK_UNARY(p > 0.0 && p <= 1.0);
        const double x = s.exponential();
        sum_e += x;
        sum_e2 += x * x;
    }
    CHECK(std::abs(sum_u / n - 0.5) < 5 * std::sqrt(1.0 / 12 / n));
    CHECK(std::abs(sum_e / n - 1.0) < 5 * std::sqrt(1.0 / n));
    CHECK(std::abs(sum_e2 / n - 2.0) < 5 * std::sqrt(20.0 / n));
}

TEST_CASE("key mixing separates nearby inputs") {
    std::set<std::uint64_t> keys;
    for (std::uint64_t a = 0; a < 20; ++a)
        for (std::uint64_t b = 0; b < 20; ++b) keys.insert(mix_key(a, b));
    CHECK(keys.size() == 400);
}

}  // TEST_SUITE
