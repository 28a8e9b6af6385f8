#pragma once

#include "conflictnet/graph.hpp"
#include "conflictnet/sbm.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace conflictnet {

enum class MembershipSampling {
    /// Draw a fresh block for every node from theta.
    resample_from_theta,
    /// Keep the fitted MAP blocks.
    condition_on_map,
};

inline constexpr std::array<std::string_view, 9> gof_statistic_names{
    "density",           "transitivity", "mean_strength",       "strength_sd",
    "betweenness_centralization", "mean_coreness", "clique_number",
    "maximal_clique_count", "max_strength"};

/// Values in the order of gof_statistic_names. Graphs too small for a
/// statistic (density < 2 nodes, centralization < 3) report 0.
std::vector<double> gof_statistics(const WeightedGraph &g);

/// Y_ij ~ Poisson(lambda_{z_i z_j}) for i < j, nodes named "1".."n".
WeightedGraph simulate_adjacency(const SbmFit &fit, std::uint64_t seed,
                                 MembershipSampling membership = MembershipSampling::resample_from_theta);

struct GofStatistic {
    std::string name;
    double observed = 0.0;
    double q025 = 0.0;
    double q500 = 0.0;
    double q975 = 0.0;
    /// 100 x (share of draws below observed + half the share equal to it).
    double percentile = 0.0;
    bool in_envelope = false;
    std::vector<double> draws;
};

struct GofReport {
    std::size_t n_sims = 0;
    std::uint64_t seed = 0;
    MembershipSampling membership = MembershipSampling::resample_from_theta;
    std::vector<GofStatistic> statistics;

    /// Throws std::out_of_range for an unknown name.
    const GofStatistic &at(std::string_view name) const;
};

struct GofOptions {
    MembershipSampling membership = MembershipSampling::resample_from_theta;
    /// Worker threads; 0 uses the hardware concurrency. Results do not depend on it.
    std::size_t threads = 0;
};

/// Draw k uses seed derive_seed(seed, {k}). Throws when n_sims == 0.
GofReport gof_report(const WeightedGraph &observed, const SbmFit &fit, std::size_t n_sims,
                     std::uint64_t seed, const GofOptions &options = {});

} // namespace conflictnet
