#include "conflictnet/community_stats.hpp"
#include "conflictnet/flow.hpp"
#include "conflictnet/gof.hpp"
#include "conflictnet/modularity.hpp"
#include "conflictnet/pipeline.hpp"
#include "conflictnet/projection.hpp"
#include "conflictnet/random.hpp"
#include "conflictnet/sbm.hpp"

#include "support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <unistd.h>

using namespace conflictnet;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass;
    std::string detail;
};

int failures = 0;

void criterion(int number, const char *title, const std::function<Verdict()> &body) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v{false, ""};
    try {
        v = body();
    } catch (const std::exception &e) {
        v = {false, std::string{"exception: "} + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %2d %s: %s (%.2f s)\n", v.pass ? "PASS" : "FAIL", number, title, v.detail.c_str(), seconds);
    std::fflush(stdout);
    failures += v.pass ? 0 : 1;
}

double elapsed_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char *format, auto... args) {
    char buffer[512];
    std::snprintf(buffer, sizeof buffer, format, args...);
    return buffer;
}

Verdict projection_oracle() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng{20240101};
    int matches = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto a = testutil::random_incidence(1 + rng() % 20, 1 + rng() % 10, rng, 0.3, 1);
        bool ok = true;
        for (auto side : {Side::municipalities, Side::structures}) {
            const bool rows = side == Side::municipalities;
            const auto n = rows ? a.n_rows() : a.n_cols();
            const auto k = rows ? a.n_cols() : a.n_rows();
            const auto g = project(a, side);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    std::int64_t shared = 0;
                    if (i != j)
                        for (std::size_t c = 0; c < k; ++c)
                            shared += (rows ? a.at(i, c) * a.at(j, c) : a.at(c, i) * a.at(c, j)) > 0;
                    ok = ok && g.weight(i, j) == shared;
                }
        }
        matches += ok;
    }
    const double seconds = elapsed_since(start);
    return {matches == 100 && seconds < 5.0, fmt("%d/100 matrices equal, %.3f s of 5 s", matches, seconds)};
}

Verdict modularity_truth() {
    const auto triangles = testutil::graph_from_edges(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}});
    const double split = modularity(triangles, Partition{0, 0, 0, 1, 1, 1});
    const double whole = modularity(triangles, Partition::whole(6));
    return {split == 0.5 && whole == 0.0, fmt("by triangle %.17g, single community %.17g", split, whole)};
}

Verdict clique_oracle() {
    std::mt19937_64 rng{20240303};
    int matches = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const auto g = testutil::random_graph(1 + rng() % 15, 0.15 + 0.7 * (rng() % 100) / 100.0, rng);
        matches += maximal_cliques(g).cliques == testutil::brute_force_maximal_cliques(g);
    }
    return {matches == 50, fmt("%d/50 graphs match exhaustive enumeration", matches)};
}

struct PlantedRun {
    double ari;
    std::size_t selected_q;
    std::size_t violations;
    std::size_t fits;
};

std::vector<PlantedRun> planted_runs;
double planted_seconds = 0.0;

void run_planted() {
    if (!planted_runs.empty()) return;
    const auto start = std::chrono::steady_clock::now();
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto planted = testutil::planted_poisson(120, 3, 5.0, 0.5, derive_seed(4000, {s}));
        EmConfig config;
        config.seed = derive_seed(5000, {s});
        const auto selection = select_communities(planted.graph, 1, 6, config);
        PlantedRun run{};
        run.ari = adjusted_rand_index(selection.fits[2].map_partition, Partition{planted.labels});
        run.selected_q = selection.best.q;
        for (const auto &fit : selection.fits) {
            ++run.fits;
            for (std::size_t k = 1; k < fit.bound_trajectory.size(); ++k) {
                const bool restart = std::find(fit.compaction_points.begin(), fit.compaction_points.end(), k) !=
                                     fit.compaction_points.end();
                if (!restart && fit.bound_trajectory[k] < fit.bound_trajectory[k - 1] - 1e-9) ++run.violations;
            }
        }
        planted_runs.push_back(run);
    }
    planted_seconds = elapsed_since(start);
}

Verdict planted_recovery() {
    run_planted();
    int good_ari = 0, good_q = 0;
    double worst = 1.0;
    for (const auto &r : planted_runs) {
        good_ari += r.ari >= 0.95;
        good_q += r.selected_q == 3;
        worst = std::min(worst, r.ari);
    }
    return {good_ari >= 18 && good_q >= 18 && planted_seconds < 60.0,
            fmt("ARI >= 0.95 in %d/20 (min %.4f), ICL argmax = 3 in %d/20, %.1f s of 60 s", good_ari, worst, good_q,
                planted_seconds)};
}

Verdict em_monotonicity() {
    run_planted();
    std::size_t violations = 0, fits = 0;
    for (const auto &r : planted_runs) violations += r.violations, fits += r.fits;
    return {violations == 0 && fits == 120, fmt("%zu violations over %zu fits (slack 1e-9)", violations, fits)};
}

Verdict likelihood_identity() {
    std::mt19937_64 rng{20240606};
    std::uniform_real_distribution<double> rate{0.01, 5.0};
    double worst = 0.0;
    int within = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 8 + rng() % 25, q = 1 + rng() % 5;
        const auto g = testutil::random_graph(n, 0.2 + 0.6 * (rng() % 100) / 100.0, rng, 1 + rng() % 8);
        std::vector<std::size_t> z(n);
        for (auto &x : z) x = rng() % q;
        std::vector<double> lambda(q * q), theta(q);
        for (std::size_t a = 0; a < q; ++a)
            for (std::size_t b = a; b < q; ++b) lambda[a * q + b] = lambda[b * q + a] = rate(rng);
        double total = 0.0;
        for (auto &t : theta) total += (t = rate(rng));
        for (auto &t : theta) t /= total;
        const double diff =
            std::abs(poisson_complete_loglik(g, z, lambda, theta) - poisson_block_loglik(g, z, lambda, theta));
        worst = std::max(worst, diff);
        within += diff <= 1e-9;
    }
    return {within == 50, fmt("%d/50 triples within 1e-9, max |difference| %.3g", within, worst)};
}

SbmFit known_fit(std::size_t n, std::vector<double> theta, std::vector<double> lambda) {
    SbmFit fit;
    fit.q = fit.requested_q = theta.size();
    fit.n = n;
    fit.theta = std::move(theta);
    fit.lambda = std::move(lambda);
    fit.responsibilities.assign(n * fit.q, 0.0);
    fit.map_blocks.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        fit.map_blocks[i] = i * fit.q / n;
        fit.responsibilities[i * fit.q + fit.map_blocks[i]] = 1.0;
    }
    fit.map_partition = Partition{fit.map_blocks};
    return fit;
}

Verdict gof_calibration() {
    const auto fit = known_fit(40, {0.3, 0.3, 0.4}, {1.0, 0.1, 0.05, 0.1, 0.8, 0.1, 0.05, 0.1, 0.6});
    int inside[3] = {0, 0, 0};
    const char *names[3] = {"density", "transitivity", "mean_strength"};
    for (std::uint64_t trial = 0; trial < 100; ++trial) {
        const auto observed = simulate_adjacency(fit, derive_seed(7000, {trial}));
        const auto report = gof_report(observed, fit, 2000, derive_seed(7001, {trial}));
        for (int k = 0; k < 3; ++k) inside[k] += report.at(names[k]).in_envelope;
    }
    const bool coverage = inside[0] >= 90 && inside[1] >= 90 && inside[2] >= 90;

    const auto big = known_fit(200, {0.25, 0.25, 0.5}, {0.4, 0.02, 0.01, 0.02, 0.3, 0.02, 0.01, 0.02, 0.15});
    const auto observed = simulate_adjacency(big, 11);
    const auto start = std::chrono::steady_clock::now();
    const auto report = gof_report(observed, big, 10000, 12);
    const double seconds = elapsed_since(start);
    const bool fast = seconds < 120.0 && report.statistics.front().draws.size() == 10000;
    return {coverage && fast,
            fmt("in envelope over 100 trials: density %d, transitivity %d, mean strength %d; "
                "N=200 with 10000 draws in %.1f s of 120 s",
                inside[0], inside[1], inside[2], seconds)};
}

Verdict complete_communities() {
    std::mt19937_64 rng{20240808};
    int complete = 0, correct = 0;
    for (int trial = 0; trial < 30; ++trial) {
        // Communities of random sizes; some are made complete, every pair across communities is random.
        const std::size_t k = 2 + rng() % 4;
        std::vector<std::size_t> sizes(k), labels;
        for (std::size_t c = 0; c < k; ++c) {
            sizes[c] = 3 + rng() % 12;
            labels.insert(labels.end(), sizes[c], c);
        }
        const auto n = labels.size();
        std::vector<bool> make_complete(k);
        for (std::size_t c = 0; c < k; ++c) make_complete[c] = rng() % 2 == 0;
        std::vector<std::int64_t> w(n * n, 0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const bool same = labels[i] == labels[j];
                const bool edge = same && make_complete[labels[i]] ? true : rng() % 4 == 0;
                if (edge) w[i * n + j] = w[j * n + i] = 1 + static_cast<std::int64_t>(rng() % 5);
            }
        const WeightedGraph g{testutil::numbered("v", n), w};
        const auto stats = community_vertex_stats(g, Partition{labels});
        for (std::size_t c = 0; c < k; ++c) {
            // Any community whose induced subgraph is complete counts, planted or not.
            bool is_complete = true;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j)
                    if (labels[i] == c && labels[j] == c && w[i * n + j] == 0) is_complete = false;
            if (!is_complete) continue;
            ++complete;
            const auto &p = stats.communities[c];
            correct += fmt("%.2f", p.intra_degree_cv) == "0.00" && fmt("%.2f", p.clustering) == "1.00";
        }
    }
    return {complete > 0 && correct == complete,
            fmt("%d/%d complete communities report CV 0.00 and clustering 1.00", correct, complete)};
}

Verdict determinism() {
    const fs::path data{TEST_DATA_DIR};
    const auto base = fs::temp_directory_path() / ("conflictnet_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(base);
    auto config = run_config_from_json(nlohmann::json::parse(read_file(data / "toy_config.json")), data);
    config.output = base / "first";
    const auto a = run_pipeline(config);
    config.output = base / "second";
    const auto b = run_pipeline(config);
    if (a.status != 0 || b.status != 0) {
        return {false, "pipeline failed: " + (a.diagnostics.empty() ? b.diagnostics : a.diagnostics).front()};
    }
    const auto first = read_file(base / "first" / "manifest.json");
    const auto second = read_file(base / "second" / "manifest.json");
    fs::remove_all(base);
    return {first == second && !a.manifest.empty(),
            fmt("%zu files, manifests %s", a.manifest.size(), first == second ? "byte-identical" : "differ")};
}

Verdict flow_conservation() {
    std::mt19937_64 rng{20241010};
    int balanced = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t universe = 5 + rng() % 60;
        std::vector<std::string> a_ids, b_ids;
        std::vector<std::size_t> a_labels, b_labels;
        for (std::size_t v = 0; v < universe; ++v) {
            const auto id = "n" + std::to_string(v);
            if (rng() % 4 != 0) a_ids.push_back(id), a_labels.push_back(rng() % 6);
            if (rng() % 4 != 0) b_ids.push_back(id), b_labels.push_back(rng() % 6);
        }
        const LabeledPartition a{Partition{a_labels}, a_ids}, b{Partition{b_labels}, b_ids};
        const auto f = community_flow(a, b);
        const auto rows = f.row_sums(), cols = f.column_sums();
        const auto sa = a.partition.community_sizes(), sb = b.partition.community_sizes();
        const std::set<std::string> in_a(a_ids.begin(), a_ids.end()), in_b(b_ids.begin(), b_ids.end());
        std::int64_t fresh = 0, gone = 0;
        for (const auto &id : b_ids) fresh += !in_a.count(id);
        for (const auto &id : a_ids) gone += !in_b.count(id);
        bool ok = rows.size() == sa.size() + 1 && cols.size() == sb.size() + 1;
        for (std::size_t q = 0; ok && q < sa.size(); ++q) ok = rows[q] == static_cast<std::int64_t>(sa[q]);
        for (std::size_t r = 0; ok && r < sb.size(); ++r) ok = cols[r] == static_cast<std::int64_t>(sb[r]);
        ok = ok && rows.back() == fresh && cols.back() == gone;
        ok = ok && f.at(sa.size(), sb.size()) == 0;
        std::int64_t total = 0;
        for (auto c : f.counts) total += c;
        ok = ok && total == static_cast<std::int64_t>(a_ids.size()) + fresh;
        balanced += ok;
    }
    return {balanced == 200, fmt("%d/200 partition pairs balance", balanced)};
}

} // namespace

int main() {
    criterion(1, "projection oracle equivalence", projection_oracle);
    criterion(2, "modularity ground truth", modularity_truth);
    criterion(3, "clique oracle", clique_oracle);
    criterion(4, "planted-partition recovery", planted_recovery);
    criterion(5, "EM monotonicity", em_monotonicity);
    criterion(6, "likelihood identity", likelihood_identity);
    criterion(7, "GOF calibration", gof_calibration);
    criterion(8, "complete-community statistics", complete_communities);
    criterion(9, "determinism", determinism);
    criterion(10, "flow conservation", flow_conservation);
    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
