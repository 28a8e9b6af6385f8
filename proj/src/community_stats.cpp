#include "conflictnet/community_stats.hpp"

#include "conflictnet/projection.hpp"

#include <cmath>
#include <stdexcept>

namespace conflictnet {

namespace {

struct Moments {
    double mean = 0.0;
    double cv = 0.0;
};

Moments moments(const std::vector<double> &values) {
    Moments m;
    if (values.empty()) {
        return m;
    }
    for (auto v : values) {
        m.mean += v;
    }
    m.mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (auto v : values) {
        var += (v - m.mean) * (v - m.mean);
    }
    var /= static_cast<double>(values.size());
    m.cv = m.mean > 0.0 ? 100.0 * std::sqrt(var) / m.mean : 0.0;
    return m;
}

} // namespace

CommunityStats community_vertex_stats(const WeightedGraph &g, const Partition &p) {
    if (p.size() != g.order()) {
        throw std::invalid_argument("community stats: partition does not cover the graph");
    }
    const auto whole = local_clustering(g);
    CommunityStats stats;
    stats.communities.resize(p.community_count());
    for (std::size_t c = 0; c < p.community_count(); ++c) {
        const auto members = p.members(c);
        std::vector<double> intra;
        std::vector<double> total;
        double induced = 0.0;
        double graph_wide = 0.0;
        for (auto v : members) {
            std::vector<std::size_t> inside;
            for (auto u : g.neighbors(v)) {
                if (p.label(u) == c) {
                    inside.push_back(u);
                }
            }
            intra.push_back(static_cast<double>(inside.size()));
            total.push_back(static_cast<double>(g.degree(v)));
            graph_wide += whole[v];
            const auto d = inside.size();
            if (d >= 2) {
                std::size_t links = 0;
                for (std::size_t x = 0; x < d; ++x) {
                    for (std::size_t y = x + 1; y < d; ++y) {
                        links += g.weight(inside[x], inside[y]) > 0 ? 1 : 0;
                    }
                }
                induced += static_cast<double>(links) /
                           (static_cast<double>(d) * static_cast<double>(d - 1) / 2.0);
            }
        }
        auto &profile = stats.communities[c];
        profile.count = members.size();
        const auto mi = moments(intra);
        const auto mt = moments(total);
        profile.mean_intra_degree = mi.mean;
        profile.intra_degree_cv = mi.cv;
        profile.mean_degree = mt.mean;
        profile.degree_cv = mt.cv;
        const auto size = static_cast<double>(members.size());
        profile.clustering = induced / size;
        profile.graph_clustering = graph_wide / size;
    }
    return stats;
}

} // namespace conflictnet
