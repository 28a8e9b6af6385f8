#pragma once

#include "conflictnet/graph.hpp"
#include "conflictnet/partition.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace conflictnet {

/// How many vertex pairs a block pair contributes to the Poisson rate.
///
/// `undirected_pairs` counts every unordered pair of distinct vertices once:
/// n_q n_r across blocks and n_q (n_q - 1) / 2 inside a block. This is the
/// exact likelihood of a loop-free undirected count graph.
/// `product_of_sizes` uses n_q n_r for every block pair, including q = r.
/// It is kept for comparison with software that aggregates that way; the EM
/// bound is only guaranteed non-decreasing under `undirected_pairs`.
enum class PairCounting { undirected_pairs, product_of_sizes };

std::string_view to_string(PairCounting counting) noexcept;

struct EmConfig {
    int restarts = 5;
    int max_iter = 500;
    /// Stop when the relative change of the bound falls below this.
    double tol = 1e-6;
    std::uint64_t seed = 0;
    PairCounting pair_counting = PairCounting::undirected_pairs;
    /// Floor applied to rates inside logarithms.
    double rate_floor = 1e-10;
    /// Fixed-point sweeps per E-step and their convergence threshold.
    int max_e_sweeps = 50;
    double e_step_tol = 1e-9;
    /// Blocks whose responsibility mass drops below this are removed.
    double empty_block_mass = 1e-8;
};

/// Fitted Poisson stochastic block model.
struct SbmFit {
    std::size_t requested_q = 0;
    std::size_t q = 0;
    std::size_t n = 0;
    std::vector<double> theta;
    /// q x q row-major, symmetric.
    std::vector<double> lambda;
    /// n x q row-major, rows sum to 1.
    std::vector<double> responsibilities;

    double log_likelihood_bound = 0.0;
    /// Complete-data log-likelihood at the MAP blocks with the fitted parameters.
    double map_complete_loglik = 0.0;
    double icl = 0.0;

    /// Bound after every M-step, starting with the one following initialization.
    std::vector<double> bound_trajectory;
    /// Trajectory indices where an emptied block was removed; the bound is
    /// monotone within each segment.
    std::vector<std::size_t> compaction_points;
    bool compacted = false;
    bool converged = false;
    int iterations = 0;
    int restart = 0;
    std::uint64_t seed = 0;
    PairCounting pair_counting = PairCounting::undirected_pairs;

    /// Argmax block per node (ties to the lowest index), indexing theta/lambda.
    std::vector<std::size_t> map_blocks;
    /// map_blocks compacted to nonempty communities.
    Partition map_partition;

    double rate(std::size_t a, std::size_t b) const { return lambda[a * q + b]; }
    double responsibility(std::size_t node, std::size_t block) const {
        return responsibilities[node * q + block];
    }
};

/// Variational EM over `config.restarts` initializations (the first from
/// k-means on weight-matrix rows, the rest random soft assignments); returns
/// the run with the highest final bound. Throws std::invalid_argument when
/// q == 0 or q > order.
SbmFit sbm_fit(const WeightedGraph &g, std::size_t q, const EmConfig &config);

struct LoglikOptions {
    /// Floor rates inside logs; without it a zero rate facing a positive
    /// count throws std::domain_error.
    bool smoothing = true;
    double rate_floor = 1e-10;
    PairCounting pair_counting = PairCounting::undirected_pairs;
};

/// log P(Y, Z) summed pair by pair: sum_i log theta_{z_i} +
/// sum_{i<j} [Y_ij log L_{z_i z_j} - L_{z_i z_j} - log Y_ij!].
/// `blocks[i]` indexes theta and the q x q `lambda`.
double poisson_complete_loglik(const WeightedGraph &g, std::span<const std::size_t> blocks,
                               std::span<const double> lambda, std::span<const double> theta,
                               const LoglikOptions &options = {});

/// Same quantity through block totals: per block pair the summed count and
/// the number of vertex pairs (per `options.pair_counting`).
double poisson_block_loglik(const WeightedGraph &g, std::span<const std::size_t> blocks,
                            std::span<const double> lambda, std::span<const double> theta,
                            const LoglikOptions &options = {});

double poisson_complete_loglik(const WeightedGraph &g, const Partition &p,
                               std::span<const double> lambda, std::span<const double> theta,
                               const LoglikOptions &options = {});

/// (q - 1)/2 log n + q (q + 1)/4 log(n (n - 1) / 2).
double icl_penalty(std::size_t q, std::size_t n);

/// Completed log-likelihood at the MAP assignment minus icl_penalty(fit.q, n).
double icl_score(const SbmFit &fit, std::size_t n);

struct IclPoint {
    std::size_t requested_q;
    std::size_t effective_q;
    double icl;
};

struct CommunitySelection {
    SbmFit best;
    std::vector<IclPoint> curve;
    std::vector<SbmFit> fits;
};

/// Fits every q in [q_min, q_max] (in parallel) and keeps the highest ICL;
/// ties go to the smaller q.
CommunitySelection select_communities(const WeightedGraph &g, std::size_t q_min,
                                      std::size_t q_max, const EmConfig &config);

} // namespace conflictnet
