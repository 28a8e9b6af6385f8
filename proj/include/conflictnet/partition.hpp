#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace conflictnet {

/// Hard assignment of nodes 0..n-1 to communities.
///
/// Labels are stored 0-based and compacted: the distinct input labels are
/// mapped to 0..Q-1 in ascending order, so every community is nonempty.
/// Files and reports print them 1-based.
class Partition {
public:
    Partition() = default;
    explicit Partition(std::span<const std::size_t> labels);
    Partition(std::initializer_list<std::size_t> labels)
        : Partition(std::span<const std::size_t>{labels.begin(), labels.size()}) {}

    static Partition singletons(std::size_t n);
    static Partition whole(std::size_t n);

    std::size_t size() const noexcept { return labels_.size(); }
    std::size_t community_count() const noexcept { return community_count_; }
    std::size_t label(std::size_t node) const { return labels_[node]; }
    const std::vector<std::size_t> &labels() const noexcept { return labels_; }

    std::vector<std::size_t> community_sizes() const;
    std::vector<std::size_t> members(std::size_t community) const;

    friend bool operator==(const Partition &, const Partition &) = default;

private:
    std::vector<std::size_t> labels_;
    std::size_t community_count_ = 0;
};

/// Hubert-Arabie adjusted Rand index; 1 when the partitions agree up to
/// relabeling. Two single-community partitions score 1.
double adjusted_rand_index(const Partition &a, const Partition &b);

} // namespace conflictnet
