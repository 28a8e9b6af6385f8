#include "conflictnet/sbm.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace conflictnet;
using testutil::graph_from_edges;

namespace {

EmConfig config(std::uint64_t seed) {
    EmConfig c;
    c.seed = seed;
    return c;
}

/// Direct sum over pairs with exact rates (no floor).
double loglik_oracle(const WeightedGraph &g, const std::vector<std::size_t> &z, const std::vector<double> &lambda,
                     const std::vector<double> &theta) {
    const auto q = theta.size();
    double total = 0.0;
    for (std::size_t i = 0; i < g.order(); ++i) total += std::log(theta[z[i]]);
    for (std::size_t i = 0; i < g.order(); ++i)
        for (std::size_t j = i + 1; j < g.order(); ++j) {
            const double y = static_cast<double>(g.weight(i, j));
            const double l = lambda[z[i] * q + z[j]];
            total += (y > 0 ? y * std::log(l) : 0.0) - l - std::lgamma(y + 1.0);
        }
    return total;
}

void check_fit_invariants(const SbmFit &fit) {
    CHECK(fit.theta.size() == fit.q);
    CHECK(std::accumulate(fit.theta.begin(), fit.theta.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-9));
    for (auto t : fit.theta) CHECK(t > 0.0);
    for (std::size_t a = 0; a < fit.q; ++a)
        for (std::size_t b = 0; b < fit.q; ++b) {
            CHECK(fit.rate(a, b) == fit.rate(b, a));
            CHECK(fit.rate(a, b) >= 0.0);
        }
    for (std::size_t i = 0; i < fit.n; ++i) {
        double row = 0.0;
        for (std::size_t a = 0; a < fit.q; ++a) row += fit.responsibility(i, a);
        CHECK(row == doctest::Approx(1.0).epsilon(1e-9));
    }
    CHECK(fit.map_partition.size() == fit.n);
}

std::size_t monotonicity_violations(const SbmFit &fit, double slack = 1e-9) {
    std::size_t violations = 0;
    for (std::size_t k = 1; k < fit.bound_trajectory.size(); ++k) {
        const bool segment_start = std::find(fit.compaction_points.begin(), fit.compaction_points.end(), k) !=
                                   fit.compaction_points.end();
        if (!segment_start && fit.bound_trajectory[k] < fit.bound_trajectory[k - 1] - slack) ++violations;
    }
    return violations;
}

} // namespace

TEST_SUITE("sbm") {

TEST_CASE("edgeless graph with one block") {
    const auto fit = sbm_fit(graph_from_edges(6, {}), 1, config(1));
    CHECK(fit.q == 1);
    CHECK(fit.theta == std::vector<double>{1.0});
    CHECK(fit.rate(0, 0) == doctest::Approx(0.0));
    CHECK(std::isfinite(fit.log_likelihood_bound));
    check_fit_invariants(fit);
}

TEST_CASE("single block rate is the pair-averaged weight") {
    std::mt19937_64 rng{9};
    for (int trial = 0; trial < 10; ++trial) {
        const auto g = testutil::random_graph(5 + rng() % 20, 0.3, rng, 6);
        const auto fit = sbm_fit(g, 1, config(trial));
        const double n = static_cast<double>(g.order());
        CHECK(fit.rate(0, 0) == doctest::Approx(2.0 * static_cast<double>(g.total_weight()) / (n * (n - 1))).epsilon(1e-12));
        CHECK(fit.theta[0] == doctest::Approx(1.0));
    }
}

TEST_CASE("errors on block counts") {
    const auto g = testutil::path_graph(4);
    CHECK_THROWS_AS(sbm_fit(g, 0, config(1)), std::invalid_argument);
    CHECK_THROWS_AS(sbm_fit(g, 5, config(1)), std::invalid_argument);
    CHECK_THROWS_AS(select_communities(g, 3, 2, config(1)), std::invalid_argument);
}

TEST_CASE("planted two blocks without cross edges are recovered exactly") {
    const auto planted = testutil::planted_poisson(60, 2, 4.0, 0.0, 12345);
    const auto fit = sbm_fit(planted.graph, 2, config(77));
    CHECK(adjusted_rand_index(fit.map_partition, Partition{planted.labels}) == doctest::Approx(1.0));
    check_fit_invariants(fit);
}

TEST_CASE("planted three blocks select three by ICL") {
    const auto planted = testutil::planted_poisson(90, 3, 5.0, 0.5, 4242);
    const auto selection = select_communities(planted.graph, 1, 5, config(5));
    CHECK(selection.best.q == 3);
    CHECK(selection.curve.size() == 5);
    CHECK(selection.fits.size() == 5);
    for (std::size_t k = 0; k < selection.curve.size(); ++k) {
        CHECK(selection.curve[k].requested_q == k + 1);
        CHECK(selection.curve[k].icl <= selection.best.icl);
    }
    CHECK(adjusted_rand_index(selection.best.map_partition, Partition{planted.labels}) >= 0.95);
}

TEST_CASE("bound is monotone and responsibilities stay stochastic") {
    std::mt19937_64 rng{31};
    for (int trial = 0; trial < 8; ++trial) {
        const auto g = testutil::random_graph(20 + rng() % 20, 0.25, rng, 3);
        for (std::size_t q = 1; q <= 4; ++q) {
            const auto fit = sbm_fit(g, q, config(trial * 10 + q));
            CHECK(monotonicity_violations(fit) == 0);
            CHECK(fit.q <= q);
            CHECK(fit.compacted == (fit.q < q));
            check_fit_invariants(fit);
        }
    }
}

TEST_CASE("fits are reproducible for a fixed seed") {
    const auto planted = testutil::planted_poisson(50, 3, 3.0, 0.3, 1);
    const auto a = sbm_fit(planted.graph, 3, config(8));
    const auto b = sbm_fit(planted.graph, 3, config(8));
    CHECK(a.responsibilities == b.responsibilities);
    CHECK(a.lambda == b.lambda);
    CHECK(a.bound_trajectory == b.bound_trajectory);
    const auto s1 = select_communities(planted.graph, 1, 4, config(8));
    const auto s2 = select_communities(planted.graph, 1, 4, config(8));
    for (std::size_t k = 0; k < s1.curve.size(); ++k) CHECK(s1.curve[k].icl == s2.curve[k].icl);
}

TEST_CASE("scalar Poisson log-likelihood") {
    const auto g = graph_from_edges(2, {{0, 1}}, 2);
    const std::vector<std::size_t> z{0, 0};
    const std::vector<double> lambda{1.0}, theta{1.0};
    CHECK(poisson_complete_loglik(g, z, lambda, theta) == doctest::Approx(-1.0 - std::log(2.0)).epsilon(1e-14));
    CHECK(poisson_block_loglik(g, z, lambda, theta) == doctest::Approx(-1.0 - std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("zero rates with and without smoothing") {
    const auto empty = graph_from_edges(4, {});
    const std::vector<std::size_t> z{0, 0, 0, 0};
    const std::vector<double> zero{0.0}, theta{1.0};
    LoglikOptions exact;
    exact.smoothing = false;
    CHECK(poisson_complete_loglik(empty, z, zero, theta, exact) == 0.0);
    CHECK(std::isfinite(poisson_complete_loglik(empty, z, zero, theta)));
    const auto edge = graph_from_edges(4, {{0, 1}});
    CHECK_THROWS_AS(poisson_complete_loglik(edge, z, zero, theta, exact), std::domain_error);
    CHECK(std::isfinite(poisson_complete_loglik(edge, z, zero, theta)));
}

TEST_CASE("pair and block forms agree with an independent pair sum") {
    std::mt19937_64 rng{55};
    std::uniform_real_distribution<double> rate{0.05, 4.0};
    for (int trial = 0; trial < 50; ++trial) {
        const auto n = 10 + rng() % 20;
        const auto q = 1 + rng() % 4;
        const auto g = testutil::random_graph(n, 0.4, rng, 5);
        std::vector<std::size_t> z(n);
        for (auto &x : z) x = rng() % q;
        std::vector<double> lambda(q * q);
        for (std::size_t a = 0; a < q; ++a)
            for (std::size_t b = a; b < q; ++b) lambda[a * q + b] = lambda[b * q + a] = rate(rng);
        std::vector<double> theta(q);
        for (auto &t : theta) t = 0.1 + rate(rng);
        const double sum = std::accumulate(theta.begin(), theta.end(), 0.0);
        for (auto &t : theta) t /= sum;
        const double expected = loglik_oracle(g, z, lambda, theta);
        CHECK(poisson_complete_loglik(g, z, lambda, theta) == doctest::Approx(expected).epsilon(1e-12));
        CHECK(std::abs(poisson_block_loglik(g, z, lambda, theta) - expected) <= 1e-9 * std::max(1.0, std::abs(expected)));
    }
}

TEST_CASE("complete log-likelihood is invariant to relabeling blocks") {
    std::mt19937_64 rng{56};
    const std::size_t q = 3;
    const auto g = testutil::random_graph(25, 0.3, rng, 4);
    std::vector<std::size_t> z(g.order());
    for (auto &x : z) x = rng() % q;
    const std::vector<double> lambda{2.0, 0.5, 0.1, 0.5, 1.5, 0.3, 0.1, 0.3, 0.9};
    const std::vector<double> theta{0.5, 0.3, 0.2};
    const std::vector<std::size_t> perm{2, 0, 1};
    std::vector<std::size_t> pz(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) pz[i] = perm[z[i]];
    std::vector<double> plambda(q * q), ptheta(q);
    for (std::size_t a = 0; a < q; ++a) {
        ptheta[perm[a]] = theta[a];
        for (std::size_t b = 0; b < q; ++b) plambda[perm[a] * q + perm[b]] = lambda[a * q + b];
    }
    CHECK(poisson_complete_loglik(g, pz, plambda, ptheta) ==
          doctest::Approx(poisson_complete_loglik(g, z, lambda, theta)).epsilon(1e-12));
}

TEST_CASE("ICL penalty") {
    const std::size_t n = 40;
    CHECK(icl_penalty(1, n) == doctest::Approx(0.5 * std::log(n * (n - 1) / 2.0)));
    CHECK(icl_penalty(3, n) ==
          doctest::Approx(1.0 * std::log(double(n)) + 3.0 * std::log(n * (n - 1) / 2.0)));
    for (std::size_t q = 1; q < 10; ++q) CHECK(icl_penalty(q + 1, n) > icl_penalty(q, n));
}

TEST_CASE("ICL is the MAP complete log-likelihood minus the penalty") {
    const auto planted = testutil::planted_poisson(45, 3, 4.0, 0.4, 99);
    const auto fit = sbm_fit(planted.graph, 3, config(3));
    std::vector<double> floored = fit.lambda;
    for (auto &l : floored) l = std::max(l, 1e-10);
    const double complete = loglik_oracle(planted.graph, fit.map_blocks, floored, fit.theta);
    CHECK(fit.map_complete_loglik == doctest::Approx(complete).epsilon(1e-9));
    CHECK(fit.icl == doctest::Approx(complete - icl_penalty(fit.q, 45)).epsilon(1e-9));
    CHECK(icl_score(fit, 45) == doctest::Approx(fit.icl).epsilon(1e-12));
}

TEST_CASE("community selection edge cases") {
    const auto empty = select_communities(graph_from_edges(8, {}), 1, 4, config(2));
    CHECK(empty.best.q == 1);
    const auto single = select_communities(testutil::path_graph(6), 1, 1, config(2));
    CHECK(single.curve.size() == 1);
}

TEST_CASE("product-of-sizes pair counting fits and differs on the diagonal") {
    const auto planted = testutil::planted_poisson(40, 2, 3.0, 0.2, 7);
    auto c = config(4);
    c.pair_counting = PairCounting::product_of_sizes;
    const auto fit = sbm_fit(planted.graph, 2, c);
    CHECK(fit.pair_counting == PairCounting::product_of_sizes);
    check_fit_invariants(fit);
    const auto proper = sbm_fit(planted.graph, 2, config(4));
    CHECK(fit.rate(0, 0) < proper.rate(0, 0));
}

} // TEST_SUITE
