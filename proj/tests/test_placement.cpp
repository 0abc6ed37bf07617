#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "hetcache/baselines.hpp"
#include "hetcache/errors.hpp"
#include "hetcache/placement.hpp"
#include "oracles.hpp"

using namespace hetcache;
using doctest::Approx;

namespace {

double sum(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0); }

std::vector<double> random_popularity(std::mt19937_64& rng, std::size_t M) {
    std::uniform_real_distribution<double> U(0.01, 1.0);
    std::vector<double> q(M);
    for (double& v : q) v = U(rng);
    std::sort(q.begin(), q.end(), std::greater<>());
    const double s = sum(q);
    for (double& v : q) v /= s;
    return q;
}

NetworkModel uniform_model(std::mt19937_64& rng, std::size_t K, std::size_t M) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const double alpha = 2.5 + 2.0 * U(rng);
    const double beta = std::pow(10.0, -0.8 + 1.2 * U(rng));
    std::vector<TierParams> tiers;
    for (std::size_t k = 0; k < K; ++k)
        tiers.push_back({0.1 + 10.0 * U(rng), std::pow(10.0, 2.0 * U(rng)), beta,
                         std::floor(static_cast<double>(M) * (0.1 + 0.8 * U(rng)))});
    return NetworkModel(alpha, tiers);
}

}  // namespace

TEST_SUITE("placement") {

TEST_CASE("bisection finds the root of a decreasing budget") {
    const auto f = [](double u) { return 1.0 / u; };
    const BisectionResult r = bisect_multiplier(f, 4.0, 1.0, 2.0);  // bracket has to expand downward
    CHECK(r.root == Approx(0.25).epsilon(1e-9));
    CHECK(r.iterations > 0);
    CHECK_THROWS_AS(bisect_multiplier(f, 1.0, 2.0, 1.0), BracketError);
    CHECK_THROWS_AS(bisect_multiplier([](double) { return 0.0; }, 1.0, 1.0, 2.0), BracketError);
}

TEST_CASE("capped-box projection matches the independent projection") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> N(0.5, 0.8);
    for (int it = 0; it < 100; ++it) {
        std::vector<double> v(1 + it % 9);
        for (double& x : v) x = N(rng);
        const double cap = 0.3 * static_cast<double>(it % 7);
        std::vector<double> a = v, b = v;
        project_capped_box(a, cap);
        oracle::project_box_budget(b, cap);
        for (std::size_t i = 0; i < v.size(); ++i) CHECK(a[i] == Approx(b[i]).epsilon(1e-9));
        CHECK(sum(a) <= cap + 1e-9);
        // No feasible point is closer to v.
        const auto dist = [&](const std::vector<double>& y) {
            double d = 0.0;
            for (std::size_t i = 0; i < v.size(); ++i) d += (v[i] - y[i]) * (v[i] - y[i]);
            return d;
        };
        std::uniform_real_distribution<double> U(0.0, 1.0);
        for (int j = 0; j < 50; ++j) {
            std::vector<double> y(v.size());
            double s = 0.0;
            for (double& t : y) s += (t = U(rng));
            if (s > cap)
                for (double& t : y) t *= cap / s;
            CHECK(dist(a) <= dist(y) + 1e-12);
        }
    }
}

TEST_CASE("single-tier solution beats the exhaustive grid and has threshold structure") {
    std::mt19937_64 rng(42);
    for (int it = 0; it < 12; ++it) {
        const std::size_t M = 2 + it % 4;
        const std::vector<double> q = random_popularity(rng, M);
        const int units = 200 * static_cast<int>(1 + it % (M - 1));  // C = 1 .. M-1
        const double C = units * 0.005;
        const double beta = std::pow(10.0, -0.5 + 0.1 * it);
        const double d = 2.0 / (2.5 + 0.25 * it);
        const double v = v_func(beta, d), w = w_func(beta, d);
        const SingleTierSolution s = solve_single_tier(q, C, w, v);
        const double obj = single_tier_objective(q, s.p, w, v);
        const oracle::GridResult grid = oracle::single_tier_grid(q, units, w, v);
        CHECK(obj >= grid.objective - 1e-12);
        CHECK(obj <= grid.objective + 1e-3);
        CHECK(sum(s.p) == Approx(C).epsilon(1e-10));
        for (std::size_t m = 0; m < M; ++m) {
            if (q[m] >= s.t1) CHECK(s.p[m] == Approx(1.0).epsilon(1e-9));
            if (q[m] <= s.t0) CHECK(s.p[m] == 0.0);
            if (q[m] > s.t0 && q[m] < s.t1) {
                const double interior = (std::sqrt(v * q[m] / s.multiplier) - v) / w;
                CHECK(s.p[m] == Approx(interior).epsilon(1e-12));
            }
            if (m > 0) CHECK(s.p[m] <= s.p[m - 1] + 1e-12);
        }
    }
}

TEST_CASE("grid DP oracle agrees with literal enumeration") {
    const std::vector<double> q{0.5, 0.3, 0.2};
    for (int units : {100, 200, 350}) {
        const double w = w_func(0.4, 2.0 / 3.0), v = v_func(0.4, 2.0 / 3.0);
        CHECK(oracle::single_tier_grid(q, units / 10, w, v, 0.05).objective ==
              Approx(oracle::single_tier_brute_force(q, units / 10, w, v, 0.05)).epsilon(1e-12));
    }
}

TEST_CASE("single-tier edge cases") {
    const std::vector<double> q{0.6, 0.3, 0.1};
    const double w = 0.4, v = 0.9;
    auto none = solve_single_tier(q, 0.0, w, v);
    CHECK(sum(none.p) == 0.0);
    auto all = solve_single_tier(q, 3.0, w, v);
    for (double p : all.p) CHECK(p == 1.0);
    auto more = solve_single_tier(q, 10.0, w, v);
    for (double p : more.p) CHECK(p == 1.0);
    CHECK_THROWS_AS(solve_single_tier(q, -1.0, w, v), DomainError);
    CHECK_THROWS_AS(solve_single_tier(std::vector<double>{}, 1.0, w, v), DimensionMismatch);
    // Equal popularities split the budget evenly.
    auto flat = solve_single_tier(std::vector<double>{0.25, 0.25, 0.25, 0.25}, 1.0, w, v);
    for (double p : flat.p) CHECK(p == Approx(0.25).epsilon(1e-10));
}

TEST_CASE("realisability of weighted sums") {
    // Two tiers of weight 1, capacities 2 and 0: at most one unit per file.
    const NetworkModel model(3.0, {{1, 1, 1, 2}, {1, 1, 1, 0}});
    CHECK(weighted_sums_realizable(std::vector<double>{1.0, 1.0, 0.0}, model));
    CHECK_FALSE(weighted_sums_realizable(std::vector<double>{1.5, 0.5, 0.0}, model));
    CHECK_FALSE(weighted_sums_realizable(std::vector<double>{1.0, 1.0, 0.5}, model));
}

TEST_CASE("uniform solver: feasibility, row identity and convex-oracle optimality") {
    std::mt19937_64 rng(77);
    int non_tight = 0;
    for (int it = 0; it < 10; ++it) {
        const std::size_t K = 1 + it % 3;
        const std::size_t M = 4 + it % 4;
        const NetworkModel model = uniform_model(rng, K, M);
        const PopularityProfile q = zipf_popularity({M, 0.4 + 0.1 * it});
        const auto [p, report] = solve_uniform(model, q);
        CHECK(p.feasible(model));
        WeightedSumSolution g = solve_uniform_relaxed(q, model);
        if (!report.relaxation_tight) {
            ++non_tight;
            g = solve_uniform_realizable(q, model);
        }
        for (std::size_t m = 0; m < M; ++m) {
            double row = 0.0;
            for (std::size_t k = 0; k < K; ++k) row += p(m, k) * model.z(k);
            CHECK(row == Approx(g.g[m]).epsilon(1e-8));
        }
        CHECK(report.objective == Approx(hit_probability(model, p, q)).epsilon(1e-14));
        std::vector<double> z, caps;
        for (std::size_t k = 0; k < K; ++k) {
            z.push_back(model.z(k));
            caps.push_back(model.tier(k).cache_capacity);
        }
        const double beta = model.tier(0).sir_threshold;
        const auto ref = oracle::uniform_convex(q.values(), z, caps, w_func(beta, model.delta()),
                                                v_func(beta, model.delta()), 100 + it, 3, 20000);
        CHECK(report.objective >= ref.objective - 1e-5);
        CHECK(report.objective <= ref.objective + 1e-5);
    }
    MESSAGE("non-tight relaxations: " << non_tight);
}

TEST_CASE("realisable solve equals the relaxed solve when the latter is realisable") {
    const NetworkModel model(3.0, {{1.0, 40.0, 0.4, 3}, {10.0, 1.0, 0.4, 3}});
    const PopularityProfile q = zipf_popularity({8, 0.8});
    const WeightedSumSolution a = solve_uniform_relaxed(q, model);
    REQUIRE(weighted_sums_realizable(a.g, model));
    const WeightedSumSolution b = solve_uniform_realizable(q, model);
    for (std::size_t m = 0; m < 8; ++m) CHECK(b.g[m] == Approx(a.g[m]).epsilon(1e-9));
}

TEST_CASE("an unrealisable relaxation is detected and repaired") {
    // A heavy tier with no cache next to a light one: the relaxation spreads
    // the light tier's budget as if the heavy tier could carry it.
    const NetworkModel model(4.0, {{1.0, 100.0, 1.0, 1}, {1.0, 1.0, 1.0, 3}});
    const PopularityProfile q = zipf_popularity({4, 0.3});
    const WeightedSumSolution relaxed = solve_uniform_relaxed(q, model);
    const bool tight = weighted_sums_realizable(relaxed.g, model);
    const auto [p, report] = solve_uniform(model, q);
    CHECK(report.relaxation_tight == tight);
    CHECK(p.feasible(model));
    if (!tight) CHECK_THROWS_AS(sequential_fill(relaxed, model, q), FillInfeasible);
    // Best possible among a brute-force grid over the two columns.
    double best = 0.0;
    const int n = 10;
    for (int a = 0; a <= n; ++a)
        for (int b = 0; b <= n; ++b) {
            PlacementMatrix x(4, 2);
            // macro tier caches file 1 fully or in part, the rest spread.
            x(0, 0) = 1.0 * a / n;
            x(1, 0) = 1.0 - x(0, 0);
            for (std::size_t m = 0; m < 4; ++m) x(m, 1) = 0.0;
            const double s = 3.0 * b / n;
            double left = s;
            for (std::size_t m = 0; m < 4; ++m) {
                x(m, 1) = std::min(1.0, left);
                left -= x(m, 1);
            }
            if (x.feasible(model)) best = std::max(best, hit_probability(model, x, q));
        }
    CHECK(report.objective >= best - 1e-12);
}

TEST_CASE("uniform solver rejects differing thresholds") {
    const NetworkModel model(3.0, {{1, 1, 1, 1}, {1, 1, 2, 1}});
    CHECK_THROWS_AS(solve_uniform(model, zipf_popularity({3, 0.5})), UniformBetaRequired);
}

TEST_CASE("per-tier decomposition") {
    // K = 1 is the single-tier problem itself.
    const NetworkModel one(3.5, {{2.0, 5.0, 0.7, 2.5}});
    const PopularityProfile q = zipf_popularity({6, 0.9});
    const auto [p, rep] = solve_nonuniform_suboptimal(one, q);
    const SingleTierSolution s = solve_single_tier(q, 2.5, 0.7, one.delta());
    for (std::size_t m = 0; m < 6; ++m) CHECK(p(m, 0) == Approx(s.p[m]).epsilon(1e-12));

    const NetworkModel two(3.0, {{1.0, 40.0, 0.4, 3}, {10.0, 1.0, 0.63, 2}});
    const auto [p2, rep2] = solve_nonuniform_suboptimal(two, q);
    CHECK(p2.feasible(two));
    CHECK(p2.column_sum(0) == Approx(3.0).epsilon(1e-9));
    CHECK(p2.column_sum(1) == Approx(2.0).epsilon(1e-9));
    CHECK(rep2.objective == Approx(hit_probability(two, p2, q)));
}

TEST_CASE("bisection examples") {
    CHECK(bisect_multiplier([](double u) { return 1.0 / u; }, 2.0, 0.1, 10.0).root == doctest::Approx(0.5).epsilon(1e-9));
    const BisectionResult lin = bisect_multiplier([](double u) { return 3.0 - u; }, 1.0, 0.0, 3.0, 1e-12, 0.0);
    CHECK(std::abs(lin.root - 2.0) < 1e-11);
    // The single-tier bracket [q_M V/(W+V)^2, q_1/V] contains the multiplier.
    const PopularityProfile q = zipf_popularity({10, 0.9});
    const double d = 2.0 / 3.0, beta = 0.4;
    const double w = w_func(beta, d), v = v_func(beta, d);
    const SingleTierSolution s = solve_single_tier(q.values(), 4.0, w, v);
    CHECK(s.multiplier >= q[9] * v / ((w + v) * (w + v)));
    CHECK(s.multiplier <= q[0] / v);
}

TEST_CASE("single-tier threshold law, three ranges and stationarity") {
    const PopularityProfile q = zipf_popularity({30, 0.5});
    const double d = 0.8, beta = 0.6;
    const double w = w_func(beta, d), v = v_func(beta, d);
    const SingleTierSolution s = solve_single_tier(q.values(), 10.0, w, v);
    CHECK(s.t0 == Approx(s.multiplier * v));
    CHECK(s.t1 == Approx(s.multiplier * (w + v) * (w + v) / v));
    // Interior entries are affine in sqrt(q) with slope sqrt(V/u)/W.
    std::vector<double> xs, ys;
    for (std::size_t m = 0; m < 30; ++m) {
        const bool zero = s.p[m] == 0.0, one = s.p[m] == 1.0;
        CHECK((zero ? 1 : 0) + (one ? 1 : 0) + (!zero && !one ? 1 : 0) == 1);
        CHECK(zero == (q[m] <= s.t0));
        CHECK(one == (q[m] >= s.t1));
        if (zero || one) continue;
        xs.push_back(std::sqrt(q[m]));
        ys.push_back(s.p[m]);
        // d/dp [q p/(w p + v)] = u at interior points.
        const double h = 1e-6;
        const auto f = [&](double p) { return q[m] * p / (w * p + v); };
        CHECK((f(s.p[m] + h) - f(s.p[m] - h)) / (2 * h) == Approx(s.multiplier).epsilon(1e-6));
    }
    REQUIRE(xs.size() >= 3);
    const double slope = std::sqrt(v / s.multiplier) / w;
    for (std::size_t i = 0; i < xs.size(); ++i) CHECK(std::abs(ys[i] - (slope * xs[i] - v / w)) < 1e-10);
}

TEST_CASE("threshold dependence on the SIR threshold at a fixed multiplier") {
    // T0 = uV rises everywhere. T1 = u(1+Q)^2/V diverges as beta -> 0, so it only
    // rises past its minimum, near beta = 0.29 for alpha = 3.
    const double u = 0.05, d = 2.0 / 3.0;
    const auto t1 = [&](double beta) { return u * std::pow(1.0 + q_func(beta, d), 2) / v_func(beta, d); };
    double prev0 = 0.0, prev1 = 0.0;
    for (int i = 0; i <= 40; ++i) {
        const double beta = std::pow(10.0, -2.0 + 0.1 * i);
        const double n0 = u * v_func(beta, d);
        CHECK(n0 > prev0);
        prev0 = n0;
        if (beta >= 0.3) {
            CHECK(t1(beta) >= prev1);
            prev1 = t1(beta);
        }
    }
    CHECK(t1(0.01) > t1(0.1));
    CHECK(t1(0.25) > t1(0.29));
    CHECK(t1(0.33) > t1(0.29));
}

TEST_CASE("relaxed weighted sums") {
    const NetworkModel model(3.0, {{1.0, 40.0, 0.4, 3}, {10.0, 1.0, 0.4, 2}});
    const double budget = 3 * model.z(0) + 2 * model.z(1);
    const WeightedSumSolution g = solve_uniform_relaxed(zipf_popularity({6, 0.8}), model);
    CHECK(sum(g.g) == Approx(budget).epsilon(1e-10));
    for (std::size_t m = 0; m < 6; ++m) {
        CHECK(g.g[m] >= 0.0);
        CHECK(g.g[m] <= model.total_weight() * (1 + 1e-12));
        if (m > 0) CHECK(g.g[m] <= g.g[m - 1] + 1e-12);
    }
    const WeightedSumSolution flat = solve_uniform_relaxed(zipf_popularity({6, 0.0}), model);
    for (double x : flat.g) CHECK(x == Approx(budget / 6).epsilon(1e-10));
    // Files below the lower threshold get nothing.
    const PopularityProfile steep = zipf_popularity({40, 1.6});
    const NetworkModel small(3.0, {{1.0, 40.0, 0.4, 1}, {10.0, 1.0, 0.4, 1}});
    const WeightedSumSolution gs = solve_uniform_relaxed(steep, small);
    bool saw_zero = false;
    for (std::size_t m = 0; m < 40; ++m)
        if (steep[m] <= gs.t0) {
            CHECK(gs.g[m] == 0.0);
            saw_zero = true;
        }
    CHECK(saw_zero);
}

TEST_CASE("sequential fill structure") {
    const PopularityProfile q = zipf_popularity({12, 1.0});
    const NetworkModel model(3.0, {{1.0, 40.0, 0.4, 4}, {10.0, 1.0, 0.4, 3}, {3.0, 4.0, 0.4, 2}});
    const WeightedSumSolution g = solve_uniform_realizable(q, model);
    REQUIRE(weighted_sums_realizable(g.g, model));
    const PlacementMatrix p = sequential_fill(g, model, q);
    for (std::size_t k = 0; k < 3; ++k) CHECK(p.column_sum(k) == Approx(model.tier(k).cache_capacity).epsilon(1e-9));
    for (std::size_t m = 0; m < 12; ++m) {
        double row = 0.0;
        for (std::size_t k = 0; k < 3; ++k) row += model.z(k) * p(m, k);
        CHECK(row == Approx(g.g[m]).epsilon(1e-9).scale(model.total_weight()));
        if (g.g[m] == 0.0)
            for (std::size_t k = 0; k < 3; ++k) CHECK(p(m, k) == 0.0);
    }
    // K = 1 reduces to the single-tier solution.
    const NetworkModel one(3.0, {{2.0, 5.0, 0.4, 4}});
    const PlacementMatrix p1 = solve_uniform(one, q).first;
    const SingleTierSolution s = solve_single_tier(q, 4.0, 0.4, one.delta());
    for (std::size_t m = 0; m < 12; ++m) CHECK(p1(m, 0) == Approx(s.p[m]).epsilon(1e-9));
    // Identical tiers, uniform demand: an even split.
    const NetworkModel twins(3.0, {{1, 1, 0.5, 1}, {1, 1, 0.5, 1}});
    const PlacementMatrix pt = solve_uniform(twins, zipf_popularity({2, 0.0})).first;
    for (std::size_t m = 0; m < 2; ++m)
        for (std::size_t k = 0; k < 2; ++k) CHECK(pt(m, k) == Approx(0.5).epsilon(1e-9));
}

TEST_CASE("uniform solver symmetries and saturation") {
    const PopularityProfile q = zipf_popularity({6, 0.7});
    const NetworkModel full(3.0, {{1.0, 40.0, 0.4, 6}, {10.0, 1.0, 0.4, 6}});
    const PlacementMatrix p = solve_uniform(full, q).first;
    for (std::size_t m = 0; m < 6; ++m)
        for (std::size_t k = 0; k < 2; ++k) CHECK(p(m, k) == 1.0);
    // Permuting tiers, including two identical ones, leaves the optimum unchanged.
    const TierParams a{1.0, 40.0, 0.4, 2}, b{10.0, 1.0, 0.4, 3}, c{10.0, 1.0, 0.4, 3};
    const double h1 = solve_uniform(NetworkModel(3.0, {a, b, c}), q).second.objective;
    const double h2 = solve_uniform(NetworkModel(3.0, {c, a, b}), q).second.objective;
    const double h3 = solve_uniform(NetworkModel(3.0, {b, c, a}), q).second.objective;
    CHECK(h1 == Approx(h2).epsilon(1e-10));
    CHECK(h1 == Approx(h3).epsilon(1e-10));
}

TEST_CASE("matrices with equal weighted sums have equal hit probability") {
    const NetworkModel model(3.0, {{1.0, 1.0, 0.4, 2}, {1.0, 1.0, 0.4, 2}});
    const PopularityProfile q = zipf_popularity({4, 0.8});
    const PlacementMatrix a = PlacementMatrix::from_rows({{1.0, 0.6}, {0.6, 0.6}, {0.4, 0.4}, {0.0, 0.4}});
    const PlacementMatrix b = PlacementMatrix::from_rows({{0.8, 0.8}, {0.3, 0.9}, {0.5, 0.3}, {0.4, 0.0}});
    CHECK(hit_probability(model, a, q) == Approx(hit_probability(model, b, q)).epsilon(1e-12));
}

}  // TEST_SUITE
