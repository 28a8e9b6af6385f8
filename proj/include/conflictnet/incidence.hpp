#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace conflictnet {

/// Municipality x armed-structure victim counts for one period.
///
/// Rows are municipalities and columns are armed structures, both in the
/// order given at construction (build_incidence sorts them). Entries are
/// dense and row-major.
class IncidenceMatrix {
public:
    IncidenceMatrix() = default;
    IncidenceMatrix(std::vector<std::string> rows, std::vector<std::string> cols,
                    std::vector<std::int64_t> entries);

    std::size_t n_rows() const noexcept { return rows_.size(); }
    std::size_t n_cols() const noexcept { return cols_.size(); }
    bool empty() const noexcept { return rows_.empty() && cols_.empty(); }

    const std::vector<std::string> &rows() const noexcept { return rows_; }
    const std::vector<std::string> &cols() const noexcept { return cols_; }
    const std::vector<std::int64_t> &entries() const noexcept { return entries_; }

    std::int64_t at(std::size_t row, std::size_t col) const {
        return entries_[row * cols_.size() + col];
    }

    std::int64_t total() const noexcept;
    IncidenceMatrix transposed() const;

    /// Throws std::invalid_argument when a row or column carries no positive entry.
    void require_active_nodes() const;

    friend bool operator==(const IncidenceMatrix &, const IncidenceMatrix &) = default;

private:
    std::vector<std::string> rows_;
    std::vector<std::string> cols_;
    std::vector<std::int64_t> entries_;
};

} // namespace conflictnet
