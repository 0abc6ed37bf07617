#include <doctest.h>

#include <cmath>

#include "hetcache/baselines.hpp"
#include "hetcache/errors.hpp"
#include "hetcache/placement.hpp"

using namespace hetcache;
using doctest::Approx;

TEST_SUITE("baselines") {

TEST_CASE("zipf popularity") {
    const PopularityProfile q = zipf_popularity({4, 1.0});
    const double h = 1.0 + 0.5 + 1.0 / 3 + 0.25;
    CHECK(q[0] == Approx(1.0 / h).epsilon(1e-15));
    CHECK(q[3] == Approx(0.25 / h).epsilon(1e-15));
    const PopularityProfile flat = zipf_popularity({7, 0.0});
    for (std::size_t m = 0; m < 7; ++m) CHECK(flat[m] == 1.0 / 7.0);
    CHECK(zipf_popularity({1, 2.0})[0] == 1.0);
    CHECK_THROWS_AS(zipf_popularity({0, 1.0}), InvariantError);
    CHECK_THROWS_AS(zipf_popularity({3, -0.5}), InvariantError);
}

TEST_CASE("most-popular placement") {
    const NetworkModel model(3.0, {{1, 1, 1, 2.0}, {1, 1, 1, 1.5}, {1, 1, 1, 0.0}});
    const PlacementMatrix p = mpcp_placement(model, 4);
    CHECK(p(0, 0) == 1.0);
    CHECK(p(1, 0) == 1.0);
    CHECK(p(2, 0) == 0.0);
    CHECK(p(0, 1) == 1.0);
    CHECK(p(1, 1) == 0.5);
    CHECK(p(2, 1) == 0.0);
    for (std::size_t m = 0; m < 4; ++m) CHECK(p(m, 2) == 0.0);
    CHECK(p.feasible(model));
}

TEST_CASE("hybrid placement") {
    const NetworkModel model(3.0, {{1.0, 40.0, 0.4, 3.0}, {10.0, 1.0, 0.63, 2.0}});
    const PopularityProfile q = zipf_popularity({10, 0.8});
    for (auto variant : {HcpInterference::SingleTier, HcpInterference::Corrected}) {
        const PlacementMatrix p = hcp_placement(model, q, variant);
        CHECK(p.feasible(model));
        for (std::size_t m = 0; m < 3; ++m) {
            CHECK(p(m, 0) == 1.0);
            CHECK(p(m, 1) == 0.0);
        }
        CHECK(p.column_sum(1) == Approx(2.0).epsilon(1e-9));
        for (std::size_t m = 4; m < 10; ++m) CHECK(p(m, 1) <= p(m - 1, 1) + 1e-12);
    }
    // The small tier solves the single-tier problem on the renormalised tail.
    const PlacementMatrix p = hcp_placement(model, q, HcpInterference::SingleTier);
    std::vector<double> rest(q.values().begin() + 3, q.values().end());
    double s = 0.0;
    for (double v : rest) s += v;
    for (double& v : rest) v /= s;
    const SingleTierSolution st = solve_single_tier(rest, 2.0, w_func(0.63, model.delta()), v_func(0.63, model.delta()));
    for (std::size_t i = 0; i < rest.size(); ++i) CHECK(p(3 + i, 1) == Approx(st.p[i]).epsilon(1e-12));

    const NetworkModel three(3.0, {{1, 1, 1, 1}, {1, 1, 1, 1}, {1, 1, 1, 1}});
    CHECK_THROWS_AS(hcp_placement(three, q), KRequired2);
}

TEST_CASE("hybrid placement with a fractional or full macro cache") {
    const NetworkModel model(3.0, {{1.0, 40.0, 0.4, 2.5}, {10.0, 1.0, 0.4, 2.0}});
    const PopularityProfile q = zipf_popularity({6, 0.8});
    const PlacementMatrix p = hcp_placement(model, q);
    CHECK(p(2, 0) == 0.5);
    CHECK(p(2, 1) == 0.0);  // partially cached files stay off the small tier
    CHECK(p.column_sum(1) == Approx(2.0).epsilon(1e-9));
    const NetworkModel full(3.0, {{1.0, 40.0, 0.4, 6.0}, {10.0, 1.0, 0.4, 2.0}});
    const PlacementMatrix pf = hcp_placement(full, q);
    CHECK(pf.column_sum(1) == 0.0);
}

TEST_CASE("the advantage over most-popular placement shrinks with skew") {
    const NetworkModel model(3.0, {{1.0, dbm_to_watt(46), db_to_linear(-4), 10},
                                   {10.0, dbm_to_watt(30), db_to_linear(-4), 8}});
    double prev = 1.0;
    for (double gamma = 1.0; gamma <= 3.01; gamma += 0.25) {
        const PopularityProfile q = zipf_popularity({20, gamma});
        const double gap = solve_uniform(model, q).second.objective - hit_probability(model, mpcp_placement(model, 20), q);
        CHECK(gap >= -1e-12);
        CHECK(gap <= prev + 1e-12);
        prev = gap;
    }
}

TEST_CASE("per-tier decomposition beats both baselines across macro cache sizes") {
    for (double c1 = 4; c1 <= 16; c1 += 2) {
        const NetworkModel model(3.0, {{1.0, dbm_to_watt(46), db_to_linear(-4), c1},
                                       {10.0, dbm_to_watt(30), db_to_linear(-2), 8}});
        const PopularityProfile q = zipf_popularity({20, 0.8});
        const double sub = solve_nonuniform_suboptimal(model, q).second.objective;
        CHECK(sub >= hit_probability(model, mpcp_placement(model, 20), q));
        CHECK(sub >= hit_probability(model, hcp_placement(model, q), q));
    }
}

}  // TEST_SUITE
