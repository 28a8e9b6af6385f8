#include "conflictnet/gof.hpp"

#include "conflictnet/bipartite.hpp"
#include "conflictnet/parallel.hpp"
#include "conflictnet/projection.hpp"
#include "conflictnet/random.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace conflictnet {

std::vector<double> gof_statistics(const WeightedGraph &g) {
    const auto n = g.order();
    std::vector<double> strengths(n);
    for (std::size_t v = 0; v < n; ++v) {
        strengths[v] = static_cast<double>(g.strength(v));
    }
    double mean_strength = 0.0;
    double sd = 0.0;
    double max_strength = 0.0;
    if (n > 0) {
        const auto summary = strength_summary(strengths);
        mean_strength = summary.mean;
        sd = summary.sd;
        max_strength = summary.max;
    }
    double mean_core = 0.0;
    for (auto c : core_decomposition(g)) {
        mean_core += static_cast<double>(c);
    }
    if (n > 0) {
        mean_core /= static_cast<double>(n);
    }
    const auto cliques = maximal_cliques(g);
    return {
        n >= 2 ? graph_density(g) : 0.0,
        global_transitivity(g),
        mean_strength,
        sd,
        n >= 3 ? centralization(g, CentralizationKind::betweenness).value : 0.0,
        mean_core,
        static_cast<double>(cliques.clique_number),
        static_cast<double>(cliques.cliques.size()),
        max_strength,
    };
}

WeightedGraph simulate_adjacency(const SbmFit &fit, std::uint64_t seed, MembershipSampling membership) {
    const auto n = fit.n;
    const auto q = fit.q;
    std::mt19937_64 rng{seed};
    std::vector<std::size_t> blocks(n);
    if (membership == MembershipSampling::condition_on_map) {
        blocks = fit.map_blocks;
    } else {
        std::discrete_distribution<std::size_t> pick(fit.theta.begin(), fit.theta.end());
        for (auto &b : blocks) {
            b = pick(rng);
        }
    }
    std::vector<std::poisson_distribution<std::int64_t>> draws;
    draws.reserve(q * q);
    for (std::size_t k = 0; k < q * q; ++k) {
        draws.emplace_back(fit.lambda[k] > 0.0 ? fit.lambda[k] : 1.0);
    }
    std::vector<WeightedEdge> edges;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto k = blocks[i] * q + blocks[j];
            if (fit.lambda[k] <= 0.0) {
                continue;
            }
            const auto y = draws[k](rng);
            if (y > 0) {
                edges.push_back({i, j, y});
            }
        }
    }
    std::vector<std::string> ids(n);
    for (std::size_t i = 0; i < n; ++i) {
        ids[i] = std::to_string(i + 1);
    }
    return WeightedGraph::from_edges(std::move(ids), edges);
}

const GofStatistic &GofReport::at(std::string_view name) const {
    for (const auto &s : statistics) {
        if (s.name == name) {
            return s;
        }
    }
    throw std::out_of_range("gof report: no statistic '" + std::string{name} + "'");
}

GofReport gof_report(const WeightedGraph &observed, const SbmFit &fit, std::size_t n_sims,
                     std::uint64_t seed, const GofOptions &options) {
    if (n_sims == 0) {
        throw std::invalid_argument("gof report: n_sims must be at least 1");
    }
    const auto k = gof_statistic_names.size();
    std::vector<std::vector<double>> per_draw(n_sims);
    parallel_for(
        n_sims,
        [&](std::size_t draw) {
            const auto sim = simulate_adjacency(fit, derive_seed(seed, {draw}), options.membership);
            per_draw[draw] = gof_statistics(sim);
        },
        options.threads);

    const auto seen = gof_statistics(observed);
    GofReport report;
    report.n_sims = n_sims;
    report.seed = seed;
    report.membership = options.membership;
    for (std::size_t s = 0; s < k; ++s) {
        GofStatistic stat;
        stat.name = std::string{gof_statistic_names[s]};
        stat.observed = seen[s];
        stat.draws.resize(n_sims);
        for (std::size_t d = 0; d < n_sims; ++d) {
            stat.draws[d] = per_draw[d][s];
        }
        auto sorted = stat.draws;
        std::sort(sorted.begin(), sorted.end());
        stat.q025 = quantile_type7(sorted, 0.025);
        stat.q500 = quantile_type7(sorted, 0.5);
        stat.q975 = quantile_type7(sorted, 0.975);
        const auto below = std::lower_bound(sorted.begin(), sorted.end(), stat.observed) - sorted.begin();
        const auto upto = std::upper_bound(sorted.begin(), sorted.end(), stat.observed) - sorted.begin();
        stat.percentile = 100.0 * (static_cast<double>(below) + 0.5 * static_cast<double>(upto - below)) /
                          static_cast<double>(n_sims);
        stat.in_envelope = stat.q025 <= stat.observed && stat.observed <= stat.q975;
        report.statistics.push_back(std::move(stat));
    }
    return report;
}

} // namespace conflictnet
