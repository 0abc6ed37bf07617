#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "hetcache/baselines.hpp"
#include "hetcache/placement.hpp"

using namespace hetcache;
using doctest::Approx;

namespace {

NetworkModel two_tier(double beta2_db, double c1, double c2) {
    return NetworkModel(3.0, {{1.0, dbm_to_watt(46), db_to_linear(-4), c1},
                              {10.0, dbm_to_watt(30), db_to_linear(beta2_db), c2}});
}

ReferenceOptions quick() {
    ReferenceOptions o;
    o.restarts = 4;
    o.inner_iterations = 300;
    o.polish_iterations = 1500;
    return o;
}

}  // namespace

TEST_SUITE("reference") {

TEST_CASE("reference solver recovers the uniform-threshold optimum") {
    const NetworkModel model = two_tier(-4, 3, 2);
    const PopularityProfile q = zipf_popularity({8, 0.8});
    const auto [p, rep] = solve_reference(model, q, quick());
    CHECK(p.feasible(model));
    const double opt = solve_uniform(model, q).second.objective;
    CHECK(rep.objective <= opt + 1e-9);
    CHECK(rep.objective >= opt * (1.0 - 1e-4));
    REQUIRE(rep.duality_gap.has_value());
    // The inner maximisation is approximate, so the dual value is an estimate.
    CHECK(std::abs(*rep.duality_gap) < 1e-3);
}

TEST_CASE("reference solver on a single tier matches the closed form") {
    const NetworkModel model(4.0, {{1.0, 1.0, 0.5, 2.0}});
    const PopularityProfile q = zipf_popularity({6, 1.0});
    const auto [p, rep] = solve_reference(model, q, quick());
    const double best = solve_uniform(model, q).second.objective;
    CHECK(rep.objective == Approx(best).epsilon(1e-5));
}

TEST_CASE("reference solver is at least as good as a coarse grid on a tiny instance") {
    const NetworkModel model = two_tier(-2, 1, 1);
    const PopularityProfile q = zipf_popularity({2, 0.8});
    const auto [p, rep] = solve_reference(model, q, quick());
    CHECK(p.feasible(model));
    // Column budgets are active at the optimum, so p(1,k) = 1 - p(0,k).
    double best = 0.0;
    const int n = 200;
    for (int a = 0; a <= n; ++a)
        for (int b = 0; b <= n; ++b) {
            PlacementMatrix x(2, 2);
            x(0, 0) = 1.0 * a / n;
            x(1, 0) = 1.0 - x(0, 0);
            x(0, 1) = 1.0 * b / n;
            x(1, 1) = 1.0 - x(0, 1);
            best = std::max(best, hit_probability(model, x, q));
        }
    CHECK(rep.objective >= best - 1e-6);
}

TEST_CASE("reference solver is deterministic for a fixed seed") {
    const NetworkModel model = two_tier(-2, 3, 2);
    const PopularityProfile q = zipf_popularity({7, 0.6});
    const auto a = solve_reference(model, q, quick());
    const auto b = solve_reference(model, q, quick());
    CHECK(a.first == b.first);
    CHECK(a.second.objective == b.second.objective);
}

TEST_CASE("reference solver dominates the per-tier decomposition") {
    for (double b2 : {-2.0, 0.0, 2.0}) {
        const NetworkModel model = two_tier(b2, 4, 3);
        const PopularityProfile q = zipf_popularity({10, 0.8});
        const double ref = solve_reference(model, q, quick()).second.objective;
        const double sub = solve_nonuniform_suboptimal(model, q).second.objective;
        CHECK(ref >= sub - 1e-6);
    }
}

TEST_CASE("a single file is cached everywhere") {
    const NetworkModel model = two_tier(-2, 1, 1);
    const auto [p, rep] = solve_reference(model, PopularityProfile({1.0}), quick());
    CHECK(p(0, 0) == Approx(1.0).epsilon(1e-9));
    CHECK(p(0, 1) == Approx(1.0).epsilon(1e-9));
}

TEST_CASE("reference solver beats random feasible matrices") {
    const NetworkModel model = two_tier(-2, 1.3, 0.7);
    const PopularityProfile q = zipf_popularity({3, 0.7});
    const double ref = solve_reference(model, q, quick()).second.objective;
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const std::vector<double> caps{1.3, 0.7};
    double best = 0.0;
    for (int i = 0; i < 10000; ++i) {
        PlacementMatrix x(3, 2);
        for (std::size_t k = 0; k < 2; ++k) {
            std::vector<double> col(3);
            for (double& v : col) v = 1.5 * U(rng);
            project_capped_box(col, caps[k]);
            x.set_column(k, col);
        }
        best = std::max(best, hit_probability(model, x, q));
    }
    CHECK(ref >= best - 1e-9);
}

}  // TEST_SUITE
