#include "conflictnet/bipartite.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace conflictnet {

std::string_view to_string(Side side) noexcept {
    return side == Side::municipalities ? "municipalities" : "structures";
}

BipartiteSizes bipartite_order_size_density(const IncidenceMatrix &a) {
    BipartiteSizes sizes;
    sizes.n_municipalities = a.n_rows();
    sizes.n_structures = a.n_cols();
    sizes.n_edges = static_cast<std::size_t>(
        std::count_if(a.entries().begin(), a.entries().end(), [](auto v) { return v > 0; }));
    const auto cells = sizes.n_municipalities * sizes.n_structures;
    sizes.density = cells == 0 ? 0.0 : static_cast<double>(sizes.n_edges) / static_cast<double>(cells);
    return sizes;
}

std::vector<NodeDegree> degree_and_strength(const IncidenceMatrix &a, Side side) {
    const bool by_row = side == Side::municipalities;
    const auto &ids = by_row ? a.rows() : a.cols();
    const auto other = by_row ? a.n_cols() : a.n_rows();
    std::vector<NodeDegree> out;
    out.reserve(ids.size());
    for (std::size_t k = 0; k < ids.size(); ++k) {
        NodeDegree node{ids[k], 0, 0};
        for (std::size_t l = 0; l < other; ++l) {
            const auto value = by_row ? a.at(k, l) : a.at(l, k);
            if (value > 0) {
                ++node.degree;
                node.strength += value;
            }
        }
        out.push_back(std::move(node));
    }
    return out;
}

ComponentSummary bipartite_components(const IncidenceMatrix &a) {
    // Nodes 0..rows-1 are municipalities, rows..rows+cols-1 structures.
    const auto rows = a.n_rows();
    const auto total = rows + a.n_cols();
    std::vector<bool> seen(total, false);
    std::vector<std::size_t> stack;
    ComponentSummary summary;
    for (std::size_t start = 0; start < total; ++start) {
        if (seen[start]) {
            continue;
        }
        ++summary.component_count;
        std::size_t order = 0;
        seen[start] = true;
        stack.push_back(start);
        while (!stack.empty()) {
            const auto node = stack.back();
            stack.pop_back();
            ++order;
            if (node < rows) {
                for (std::size_t j = 0; j < a.n_cols(); ++j) {
                    if (a.at(node, j) > 0 && !seen[rows + j]) {
                        seen[rows + j] = true;
                        stack.push_back(rows + j);
                    }
                }
            } else {
                const auto j = node - rows;
                for (std::size_t i = 0; i < rows; ++i) {
                    if (a.at(i, j) > 0 && !seen[i]) {
                        seen[i] = true;
                        stack.push_back(i);
                    }
                }
            }
        }
        summary.giant_order = std::max(summary.giant_order, order);
    }
    return summary;
}

double quantile_type7(std::span<const double> sorted, double p) {
    if (sorted.empty()) {
        throw std::invalid_argument("quantile of an empty sample");
    }
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

StrengthSummary strength_summary(std::span<const double> values) {
    if (values.empty()) {
        throw std::invalid_argument("strength summary of an empty sample");
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const auto n = static_cast<double>(sorted.size());

    StrengthSummary s;
    s.min = sorted.front();
    s.max = sorted.back();
    s.q1 = quantile_type7(sorted, 0.25);
    s.median = quantile_type7(sorted, 0.5);
    s.q3 = quantile_type7(sorted, 0.75);
    s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / n;

    double m2 = 0.0;
    double m3 = 0.0;
    for (auto v : sorted) {
        const auto d = v - s.mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    s.sd = sorted.size() > 1 ? std::sqrt(m2 / (n - 1.0)) : 0.0;
    m2 /= n;
    m3 /= n;
    // Relative threshold: rounding of a constant sample leaves m2 ~ 1e-32 * mean^2.
    const bool constant = m2 <= 1e-24 * std::max(1.0, s.mean * s.mean);
    s.skewness = constant ? 0.0 : m3 / std::pow(m2, 1.5);
    return s;
}

} // namespace conflictnet
