#include "conflictnet/flow.hpp"

#include <stdexcept>
#include <unordered_map>

namespace conflictnet {

namespace {

std::unordered_map<std::string, std::size_t> index_labels(const LabeledPartition &lp) {
    if (lp.partition.size() != lp.node_ids.size()) {
        throw std::invalid_argument("community flow: partition and node ids differ in size");
    }
    std::unordered_map<std::string, std::size_t> labels;
    for (std::size_t v = 0; v < lp.node_ids.size(); ++v) {
        if (!labels.emplace(lp.node_ids[v], lp.partition.label(v)).second) {
            throw std::invalid_argument("community flow: duplicate node id '" + lp.node_ids[v] + "'");
        }
    }
    return labels;
}

} // namespace

std::vector<std::int64_t> FlowMatrix::row_sums() const {
    std::vector<std::int64_t> sums(sources.size(), 0);
    for (std::size_t s = 0; s < sources.size(); ++s) {
        for (std::size_t t = 0; t < targets.size(); ++t) {
            sums[s] += at(s, t);
        }
    }
    return sums;
}

std::vector<std::int64_t> FlowMatrix::column_sums() const {
    std::vector<std::int64_t> sums(targets.size(), 0);
    for (std::size_t s = 0; s < sources.size(); ++s) {
        for (std::size_t t = 0; t < targets.size(); ++t) {
            sums[t] += at(s, t);
        }
    }
    return sums;
}

FlowMatrix community_flow(const LabeledPartition &previous, const LabeledPartition &next) {
    const auto before = index_labels(previous);
    const auto after = index_labels(next);
    const auto q_before = previous.partition.community_count();
    const auto q_after = next.partition.community_count();

    FlowMatrix flow;
    for (std::size_t c = 0; c < q_before; ++c) {
        flow.sources.push_back("Q" + std::to_string(c + 1));
    }
    flow.sources.emplace_back("new");
    for (std::size_t c = 0; c < q_after; ++c) {
        flow.targets.push_back("Q" + std::to_string(c + 1));
    }
    flow.targets.emplace_back("inactive");
    flow.counts.assign(flow.sources.size() * flow.targets.size(), 0);
    const auto width = flow.targets.size();

    for (std::size_t v = 0; v < previous.node_ids.size(); ++v) {
        const auto source = previous.partition.label(v);
        auto it = after.find(previous.node_ids[v]);
        const auto target = it == after.end() ? q_after : it->second;
        ++flow.counts[source * width + target];
    }
    for (std::size_t v = 0; v < next.node_ids.size(); ++v) {
        if (!before.contains(next.node_ids[v])) {
            ++flow.counts[q_before * width + next.partition.label(v)];
        }
    }
    return flow;
}

} // namespace conflictnet
