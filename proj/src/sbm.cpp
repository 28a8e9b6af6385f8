#include "conflictnet/sbm.hpp"

#include "conflictnet/parallel.hpp"
#include "conflictnet/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace conflictnet {

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

/// Mutable state of one EM run.
struct EmState {
    std::size_t n = 0;
    std::size_t q = 0;
    std::vector<double> tau;      // n x q
    std::vector<double> mass;     // column sums of tau
    std::vector<double> theta;    // q
    std::vector<double> lambda;   // q x q
    std::vector<double> edge_sum; // ordered-pair expected weight per block pair
    std::vector<double> pairs;    // expected pair count per block pair (ordered convention)
};

double log_factorial_total(const WeightedGraph &g) {
    double total = 0.0;
    for (const auto &e : g.edges()) {
        total += std::lgamma(static_cast<double>(e.weight) + 1.0);
    }
    return total;
}

/// s[r] = sum_j Y_uj tau_jr over the neighbors of u.
void neighbor_mass(const WeightedGraph &g, const EmState &s, std::size_t u, std::vector<double> &out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (auto v : g.neighbors(u)) {
        const auto w = static_cast<double>(g.weight(u, v));
        const double *row = &s.tau[v * s.q];
        for (std::size_t r = 0; r < s.q; ++r) {
            out[r] += w * row[r];
        }
    }
}

void m_step(const WeightedGraph &g, EmState &s, const EmConfig &config) {
    const auto q = s.q;
    s.mass.assign(q, 0.0);
    std::vector<double> squares(q * q, 0.0);
    s.edge_sum.assign(q * q, 0.0);
    std::vector<double> local(q);
    for (std::size_t i = 0; i < s.n; ++i) {
        const double *row = &s.tau[i * q];
        for (std::size_t a = 0; a < q; ++a) {
            s.mass[a] += row[a];
            for (std::size_t b = 0; b < q; ++b) {
                squares[a * q + b] += row[a] * row[b];
            }
        }
        neighbor_mass(g, s, i, local);
        for (std::size_t a = 0; a < q; ++a) {
            for (std::size_t b = 0; b < q; ++b) {
                s.edge_sum[a * q + b] += row[a] * local[b];
            }
        }
    }
    s.theta.resize(q);
    for (std::size_t a = 0; a < q; ++a) {
        s.theta[a] = s.mass[a] / static_cast<double>(s.n);
    }
    s.pairs.assign(q * q, 0.0);
    s.lambda.assign(q * q, 0.0);
    for (std::size_t a = 0; a < q; ++a) {
        for (std::size_t b = a; b < q; ++b) {
            const double sum = 0.5 * (s.edge_sum[a * q + b] + s.edge_sum[b * q + a]);
            double pairs = 0.0;
            if (config.pair_counting == PairCounting::undirected_pairs) {
                pairs = s.mass[a] * s.mass[b] - squares[a * q + b];
            } else {
                pairs = s.mass[a] * s.mass[b] * (a == b ? 2.0 : 1.0);
            }
            pairs = std::max(pairs, 0.0);
            const double rate = pairs > 0.0 ? sum / pairs : 0.0;
            s.edge_sum[a * q + b] = s.edge_sum[b * q + a] = sum;
            s.pairs[a * q + b] = s.pairs[b * q + a] = pairs;
            s.lambda[a * q + b] = s.lambda[b * q + a] = rate;
        }
    }
}

double floored_log(double rate, double floor) { return std::log(std::max(rate, floor)); }

double bound(const EmState &s, const EmConfig &config, double log_factorials) {
    double value = 0.0;
    for (std::size_t i = 0; i < s.n; ++i) {
        for (std::size_t a = 0; a < s.q; ++a) {
            const double t = s.tau[i * s.q + a];
            if (t > 0.0) {
                value += t * (std::log(s.theta[a]) - std::log(t));
            }
        }
    }
    double edges = 0.0;
    for (std::size_t k = 0; k < s.q * s.q; ++k) {
        if (s.edge_sum[k] > 0.0) {
            edges += s.edge_sum[k] * floored_log(s.lambda[k], config.rate_floor);
        }
        edges -= s.lambda[k] * s.pairs[k];
    }
    return value + 0.5 * edges - log_factorials;
}

/// Sequential fixed-point sweeps; each node update maximizes the bound in
/// that node's responsibilities with everything else held fixed.
void e_step(const WeightedGraph &g, EmState &s, const EmConfig &config) {
    const auto q = s.q;
    std::vector<double> log_rate(q * q);
    for (std::size_t k = 0; k < q * q; ++k) {
        log_rate[k] = floored_log(s.lambda[k], config.rate_floor);
    }
    std::vector<double> log_theta(q);
    for (std::size_t a = 0; a < q; ++a) {
        log_theta[a] = s.theta[a] > 0.0 ? std::log(s.theta[a]) : neg_inf;
    }
    const double self_factor = config.pair_counting == PairCounting::product_of_sizes ? 2.0 : 1.0;

    std::vector<double> mass = s.mass;
    std::vector<double> local(q);
    std::vector<double> score(q);
    for (int sweep = 0; sweep < config.max_e_sweeps; ++sweep) {
        double change = 0.0;
        for (std::size_t i = 0; i < s.n; ++i) {
            double *row = &s.tau[i * q];
            neighbor_mass(g, s, i, local);
            double top = neg_inf;
            for (std::size_t a = 0; a < q; ++a) {
                double v = log_theta[a];
                if (v != neg_inf) {
                    for (std::size_t b = 0; b < q; ++b) {
                        const double others = mass[b] - row[b];
                        const double factor = a == b ? self_factor : 1.0;
                        v += local[b] * log_rate[a * q + b] - factor * s.lambda[a * q + b] * others;
                    }
                }
                score[a] = v;
                top = std::max(top, v);
            }
            double total = 0.0;
            for (std::size_t a = 0; a < q; ++a) {
                score[a] = score[a] == neg_inf ? 0.0 : std::exp(score[a] - top);
                total += score[a];
            }
            for (std::size_t a = 0; a < q; ++a) {
                const double updated = score[a] / total;
                change = std::max(change, std::abs(updated - row[a]));
                mass[a] += updated - row[a];
                row[a] = updated;
            }
        }
        if (change < config.e_step_tol) {
            break;
        }
    }
}

/// Drops blocks whose mass fell below the threshold. Returns true if any did.
bool compact(EmState &s, const EmConfig &config) {
    std::vector<std::size_t> keep;
    for (std::size_t a = 0; a < s.q; ++a) {
        if (s.mass[a] >= config.empty_block_mass) {
            keep.push_back(a);
        }
    }
    if (keep.size() == s.q || keep.empty()) {
        return false;
    }
    std::vector<double> tau(s.n * keep.size());
    for (std::size_t i = 0; i < s.n; ++i) {
        double total = 0.0;
        for (std::size_t k = 0; k < keep.size(); ++k) {
            tau[i * keep.size() + k] = s.tau[i * s.q + keep[k]];
            total += tau[i * keep.size() + k];
        }
        for (std::size_t k = 0; k < keep.size(); ++k) {
            tau[i * keep.size() + k] = total > 0.0 ? tau[i * keep.size() + k] / total
                                                   : 1.0 / static_cast<double>(keep.size());
        }
    }
    s.tau = std::move(tau);
    s.q = keep.size();
    return true;
}

/// Lloyd's k-means with k-means++ seeding on the rows of the weight matrix.
std::vector<std::size_t> kmeans_labels(const WeightedGraph &g, std::size_t k, std::mt19937_64 &rng) {
    const auto n = g.order();
    std::vector<double> norms(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (auto j : g.neighbors(i)) {
            const auto w = static_cast<double>(g.weight(i, j));
            norms[i] += w * w;
        }
    }
    std::vector<double> centers(k * n, 0.0);
    std::vector<double> center_norms(k, 0.0);
    auto distance = [&](std::size_t i, std::size_t c) {
        double dot = 0.0;
        for (auto j : g.neighbors(i)) {
            dot += static_cast<double>(g.weight(i, j)) * centers[c * n + j];
        }
        return std::max(0.0, norms[i] - 2.0 * dot + center_norms[c]);
    };
    auto set_center_to_point = [&](std::size_t c, std::size_t i) {
        std::fill(centers.begin() + static_cast<std::ptrdiff_t>(c * n),
                  centers.begin() + static_cast<std::ptrdiff_t>((c + 1) * n), 0.0);
        for (auto j : g.neighbors(i)) {
            centers[c * n + j] = static_cast<double>(g.weight(i, j));
        }
        center_norms[c] = norms[i];
    };

    std::vector<bool> chosen(n, false);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto first = pick(rng);
    chosen[first] = true;
    set_center_to_point(0, first);
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    for (std::size_t c = 1; c < k; ++c) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            nearest[i] = std::min(nearest[i], distance(i, c - 1));
            total += chosen[i] ? 0.0 : nearest[i];
        }
        std::size_t next = n;
        if (total > 0.0) {
            double target = unit(rng) * total;
            for (std::size_t i = 0; i < n; ++i) {
                if (chosen[i]) {
                    continue;
                }
                target -= nearest[i];
                next = i;
                if (target <= 0.0) {
                    break;
                }
            }
        }
        if (next == n || chosen[next]) {
            // All remaining points coincide with a center; take any unused one.
            std::vector<std::size_t> unused;
            for (std::size_t i = 0; i < n; ++i) {
                if (!chosen[i]) {
                    unused.push_back(i);
                }
            }
            next = unused[std::uniform_int_distribution<std::size_t>(0, unused.size() - 1)(rng)];
        }
        chosen[next] = true;
        set_center_to_point(c, next);
    }

    std::vector<std::size_t> labels(n, k);
    std::vector<double> dist(n, 0.0);
    for (int iteration = 0; iteration < 100; ++iteration) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = 0;
            double best_d = distance(i, 0);
            for (std::size_t c = 1; c < k; ++c) {
                const double d = distance(i, c);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            dist[i] = best_d;
            if (labels[i] != best) {
                labels[i] = best;
                changed = true;
            }
        }
        std::vector<std::size_t> counts(k, 0);
        for (auto l : labels) {
            ++counts[l];
        }
        // Refill empty clusters with the worst-fitting points of larger ones.
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] > 0) {
                continue;
            }
            std::size_t worst = n;
            for (std::size_t i = 0; i < n; ++i) {
                if (counts[labels[i]] > 1 && (worst == n || dist[i] > dist[worst])) {
                    worst = i;
                }
            }
            --counts[labels[worst]];
            labels[worst] = c;
            counts[c] = 1;
            dist[worst] = 0.0;
            changed = true;
        }
        if (!changed && iteration > 0) {
            break;
        }
        std::fill(centers.begin(), centers.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (auto j : g.neighbors(i)) {
                centers[labels[i] * n + j] += static_cast<double>(g.weight(i, j));
            }
        }
        for (std::size_t c = 0; c < k; ++c) {
            center_norms[c] = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                auto &x = centers[c * n + j];
                x /= static_cast<double>(counts[c]);
                center_norms[c] += x * x;
            }
        }
    }
    return labels;
}

std::vector<double> initial_responsibilities(const WeightedGraph &g, std::size_t q, int restart,
                                             std::mt19937_64 &rng) {
    const auto n = g.order();
    std::vector<double> tau(n * q, 0.0);
    if (restart == 0) {
        const auto labels = kmeans_labels(g, q, rng);
        for (std::size_t i = 0; i < n; ++i) {
            tau[i * q + labels[i]] = 1.0;
        }
        return tau;
    }
    std::exponential_distribution<double> gamma_one(1.0);
    for (std::size_t i = 0; i < n; ++i) {
        double total = 0.0;
        for (std::size_t a = 0; a < q; ++a) {
            tau[i * q + a] = gamma_one(rng);
            total += tau[i * q + a];
        }
        for (std::size_t a = 0; a < q; ++a) {
            tau[i * q + a] /= total;
        }
    }
    return tau;
}

SbmFit run_em(const WeightedGraph &g, std::size_t q, int restart, const EmConfig &config,
              double log_factorials) {
    SbmFit fit;
    fit.requested_q = q;
    fit.n = g.order();
    fit.restart = restart;
    fit.seed = derive_seed(config.seed, {q, static_cast<std::uint64_t>(restart)});
    fit.pair_counting = config.pair_counting;
    std::mt19937_64 rng{fit.seed};

    EmState s;
    s.n = g.order();
    s.q = q;
    s.tau = initial_responsibilities(g, q, restart, rng);

    auto maximize = [&] {
        bool dropped = false;
        m_step(g, s, config);
        while (compact(s, config)) {
            dropped = true;
            m_step(g, s, config);
        }
        return dropped;
    };

    if (maximize()) {
        fit.compacted = true;
    }
    double current = bound(s, config, log_factorials);
    fit.bound_trajectory.push_back(current);
    for (int it = 1; it <= config.max_iter; ++it) {
        e_step(g, s, config);
        const bool dropped = maximize();
        const double next = bound(s, config, log_factorials);
        if (dropped) {
            fit.compacted = true;
            fit.compaction_points.push_back(fit.bound_trajectory.size());
        }
        fit.bound_trajectory.push_back(next);
        fit.iterations = it;
        const bool settled = std::abs(next - current) <= config.tol * std::abs(current);
        current = next;
        if (!dropped && settled) {
            fit.converged = true;
            break;
        }
    }

    fit.q = s.q;
    fit.theta = s.theta;
    fit.lambda = s.lambda;
    fit.responsibilities = s.tau;
    fit.log_likelihood_bound = current;
    return fit;
}

} // namespace

std::string_view to_string(PairCounting counting) noexcept {
    return counting == PairCounting::undirected_pairs ? "undirected_pairs" : "product_of_sizes";
}

SbmFit sbm_fit(const WeightedGraph &g, std::size_t q, const EmConfig &config) {
    if (q == 0) {
        throw std::invalid_argument("sbm fit: number of blocks must be positive");
    }
    if (q > g.order()) {
        throw std::invalid_argument("sbm fit: " + std::to_string(q) + " blocks exceed " +
                                    std::to_string(g.order()) + " nodes");
    }
    if (config.restarts < 1 || config.max_iter < 1 || !(config.tol > 0.0)) {
        throw std::invalid_argument("sbm fit: restarts and max_iter must be >= 1 and tol > 0");
    }
    const double log_factorials = log_factorial_total(g);

    SbmFit best;
    for (int restart = 0; restart < config.restarts; ++restart) {
        auto fit = run_em(g, q, restart, config, log_factorials);
        if (restart == 0 || fit.log_likelihood_bound > best.log_likelihood_bound) {
            best = std::move(fit);
        }
    }

    best.map_blocks.resize(best.n);
    for (std::size_t i = 0; i < best.n; ++i) {
        std::size_t arg = 0;
        for (std::size_t a = 1; a < best.q; ++a) {
            if (best.responsibility(i, a) > best.responsibility(i, arg)) {
                arg = a;
            }
        }
        best.map_blocks[i] = arg;
    }
    best.map_partition = Partition{best.map_blocks};
    LoglikOptions options;
    options.rate_floor = config.rate_floor;
    options.pair_counting = config.pair_counting;
    best.map_complete_loglik = poisson_block_loglik(g, best.map_blocks, best.lambda, best.theta, options);
    best.icl = icl_score(best, best.n);
    return best;
}

namespace {

void check_dimensions(const WeightedGraph &g, std::span<const std::size_t> blocks,
                      std::span<const double> lambda, std::span<const double> theta) {
    const auto q = theta.size();
    if (blocks.size() != g.order()) {
        throw std::invalid_argument("log-likelihood: block vector does not cover the graph");
    }
    if (lambda.size() != q * q) {
        throw std::invalid_argument("log-likelihood: lambda is not q x q");
    }
    for (auto b : blocks) {
        if (b >= q) {
            throw std::invalid_argument("log-likelihood: block index out of range");
        }
    }
}

double log_theta(double theta) {
    if (!(theta > 0.0)) {
        throw std::domain_error("log-likelihood: node assigned to a block with zero proportion");
    }
    return std::log(theta);
}

/// count * log(rate), honoring the smoothing policy.
double count_log_rate(double count, double rate, const LoglikOptions &options) {
    if (count == 0.0) {
        return 0.0;
    }
    if (rate <= 0.0 && !options.smoothing) {
        throw std::domain_error("log-likelihood: positive count under a zero rate");
    }
    return count * (options.smoothing ? std::log(std::max(rate, options.rate_floor)) : std::log(rate));
}

} // namespace

double poisson_complete_loglik(const WeightedGraph &g, std::span<const std::size_t> blocks,
                               std::span<const double> lambda, std::span<const double> theta,
                               const LoglikOptions &options) {
    check_dimensions(g, blocks, lambda, theta);
    const auto q = theta.size();
    const auto n = g.order();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        total += log_theta(theta[blocks[i]]);
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double y = static_cast<double>(g.weight(i, j));
            const double rate = lambda[blocks[i] * q + blocks[j]];
            total += count_log_rate(y, rate, options) - rate - std::lgamma(y + 1.0);
        }
    }
    return total;
}

double poisson_block_loglik(const WeightedGraph &g, std::span<const std::size_t> blocks,
                            std::span<const double> lambda, std::span<const double> theta,
                            const LoglikOptions &options) {
    check_dimensions(g, blocks, lambda, theta);
    const auto q = theta.size();
    std::vector<double> sizes(q, 0.0);
    for (auto b : blocks) {
        sizes[b] += 1.0;
    }
    std::vector<double> counts(q * q, 0.0); // L_qr, stored at [min][max]
    double log_factorials = 0.0;
    for (const auto &e : g.edges()) {
        const auto a = std::min(blocks[e.u], blocks[e.v]);
        const auto b = std::max(blocks[e.u], blocks[e.v]);
        counts[a * q + b] += static_cast<double>(e.weight);
        log_factorials += std::lgamma(static_cast<double>(e.weight) + 1.0);
    }
    double total = 0.0;
    for (std::size_t a = 0; a < q; ++a) {
        if (sizes[a] > 0.0) {
            total += sizes[a] * log_theta(theta[a]);
        }
        for (std::size_t b = a; b < q; ++b) {
            double pairs = sizes[a] * sizes[b];
            if (a == b && options.pair_counting == PairCounting::undirected_pairs) {
                pairs = sizes[a] * (sizes[a] - 1.0) / 2.0;
            }
            const double rate = lambda[a * q + b];
            total += count_log_rate(counts[a * q + b], rate, options) - rate * pairs;
        }
    }
    return total - log_factorials;
}

double poisson_complete_loglik(const WeightedGraph &g, const Partition &p,
                               std::span<const double> lambda, std::span<const double> theta,
                               const LoglikOptions &options) {
    return poisson_complete_loglik(g, p.labels(), lambda, theta, options);
}

double icl_penalty(std::size_t q, std::size_t n) {
    const double nodes = static_cast<double>(n);
    const double dyads = std::max(1.0, nodes * (nodes - 1.0) / 2.0);
    const double blocks = static_cast<double>(q);
    return (blocks - 1.0) / 2.0 * std::log(std::max(1.0, nodes)) +
           blocks * (blocks + 1.0) / 4.0 * std::log(dyads);
}

double icl_score(const SbmFit &fit, std::size_t n) {
    return fit.map_complete_loglik - icl_penalty(fit.q, n);
}

CommunitySelection select_communities(const WeightedGraph &g, std::size_t q_min,
                                      std::size_t q_max, const EmConfig &config) {
    if (q_min < 1 || q_min > q_max || q_max > g.order()) {
        throw std::invalid_argument("community selection: q range [" + std::to_string(q_min) +
                                    ", " + std::to_string(q_max) + "] is not within [1, " +
                                    std::to_string(g.order()) + "]");
    }
    CommunitySelection selection;
    selection.fits.resize(q_max - q_min + 1);
    parallel_for(selection.fits.size(),
                 [&](std::size_t k) { selection.fits[k] = sbm_fit(g, q_min + k, config); });
    std::size_t best = 0;
    for (std::size_t k = 0; k < selection.fits.size(); ++k) {
        const auto &fit = selection.fits[k];
        selection.curve.push_back({fit.requested_q, fit.q, fit.icl});
        if (fit.icl > selection.fits[best].icl) {
            best = k;
        }
    }
    selection.best = selection.fits[best];
    return selection;
}

} // namespace conflictnet
