#include "conflictnet/incidence.hpp"

#include <numeric>
#include <stdexcept>

namespace conflictnet {

IncidenceMatrix::IncidenceMatrix(std::vector<std::string> rows, std::vector<std::string> cols,
                                 std::vector<std::int64_t> entries)
    : rows_{std::move(rows)}, cols_{std::move(cols)}, entries_{std::move(entries)} {
    if (entries_.size() != rows_.size() * cols_.size()) {
        throw std::invalid_argument("incidence matrix: entry count does not match dimensions");
    }
    for (auto value : entries_) {
        if (value < 0) {
            throw std::invalid_argument("incidence matrix: negative entry");
        }
    }
}

std::int64_t IncidenceMatrix::total() const noexcept {
    return std::accumulate(entries_.begin(), entries_.end(), std::int64_t{0});
}

IncidenceMatrix IncidenceMatrix::transposed() const {
    std::vector<std::int64_t> flipped(entries_.size());
    for (std::size_t i = 0; i < n_rows(); ++i) {
        for (std::size_t j = 0; j < n_cols(); ++j) {
            flipped[j * n_rows() + i] = at(i, j);
        }
    }
    return IncidenceMatrix{cols_, rows_, std::move(flipped)};
}

void IncidenceMatrix::require_active_nodes() const {
    for (std::size_t i = 0; i < n_rows(); ++i) {
        bool active = false;
        for (std::size_t j = 0; j < n_cols() && !active; ++j) {
            active = at(i, j) > 0;
        }
        if (!active) {
            throw std::invalid_argument("incidence matrix: municipality '" + rows_[i] +
                                        "' has no recorded victims");
        }
    }
    for (std::size_t j = 0; j < n_cols(); ++j) {
        bool active = false;
        for (std::size_t i = 0; i < n_rows() && !active; ++i) {
            active = at(i, j) > 0;
        }
        if (!active) {
            throw std::invalid_argument("incidence matrix: structure '" + cols_[j] +
                                        "' has no recorded victims");
        }
    }
}

} // namespace conflictnet
