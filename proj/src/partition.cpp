#include "conflictnet/partition.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

namespace conflictnet {

Partition::Partition(std::span<const std::size_t> labels) : labels_(labels.begin(), labels.end()) {
    std::vector<std::size_t> distinct(labels.begin(), labels.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    for (auto &l : labels_) {
        l = static_cast<std::size_t>(std::lower_bound(distinct.begin(), distinct.end(), l) -
                                     distinct.begin());
    }
    community_count_ = distinct.size();
}

Partition Partition::singletons(std::size_t n) {
    std::vector<std::size_t> labels(n);
    std::iota(labels.begin(), labels.end(), std::size_t{0});
    return Partition{labels};
}

Partition Partition::whole(std::size_t n) {
    std::vector<std::size_t> labels(n, 0);
    return Partition{labels};
}

std::vector<std::size_t> Partition::community_sizes() const {
    std::vector<std::size_t> sizes(community_count_, 0);
    for (auto l : labels_) {
        ++sizes[l];
    }
    return sizes;
}

std::vector<std::size_t> Partition::members(std::size_t community) const {
    std::vector<std::size_t> out;
    for (std::size_t v = 0; v < labels_.size(); ++v) {
        if (labels_[v] == community) {
            out.push_back(v);
        }
    }
    return out;
}

double adjusted_rand_index(const Partition &a, const Partition &b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("adjusted Rand index: partitions cover different node counts");
    }
    auto choose2 = [](double x) { return x * (x - 1.0) / 2.0; };
    std::map<std::pair<std::size_t, std::size_t>, double> table;
    for (std::size_t v = 0; v < a.size(); ++v) {
        table[{a.label(v), b.label(v)}] += 1.0;
    }
    double index = 0.0;
    for (const auto &[key, count] : table) {
        index += choose2(count);
    }
    double rows = 0.0;
    for (auto s : a.community_sizes()) {
        rows += choose2(static_cast<double>(s));
    }
    double cols = 0.0;
    for (auto s : b.community_sizes()) {
        cols += choose2(static_cast<double>(s));
    }
    const double total = choose2(static_cast<double>(a.size()));
    if (total == 0.0) {
        return 1.0;
    }
    const double expected = rows * cols / total;
    const double maximum = (rows + cols) / 2.0;
    if (maximum == expected) {
        return 1.0;
    }
    return (index - expected) / (maximum - expected);
}

} // namespace conflictnet
