#pragma once

#include "conflictnet/incidence.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace conflictnet {

enum class Side { municipalities, structures };

std::string_view to_string(Side side) noexcept;

struct BipartiteSizes {
    std::size_t n_municipalities = 0;
    std::size_t n_structures = 0;
    std::size_t n_edges = 0;
    /// n_edges / (n_municipalities * n_structures); 0 for an empty matrix.
    double density = 0.0;
};

struct NodeDegree {
    std::string id;
    std::int64_t degree = 0;
    std::int64_t strength = 0;

    friend bool operator==(const NodeDegree &, const NodeDegree &) = default;
};

struct ComponentSummary {
    std::size_t component_count = 0;
    std::size_t giant_order = 0;

    friend bool operator==(const ComponentSummary &, const ComponentSummary &) = default;
};

/// Five-number summary plus mean, sample sd, and moment skewness.
struct StrengthSummary {
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double mean = 0.0;
    double q3 = 0.0;
    double max = 0.0;
    double sd = 0.0;
    double skewness = 0.0;
};

BipartiteSizes bipartite_order_size_density(const IncidenceMatrix &a);

/// Degree counts distinct counterparts; strength sums victims.
std::vector<NodeDegree> degree_and_strength(const IncidenceMatrix &a, Side side);

/// Components of the two-mode graph; the giant order counts nodes of both modes.
ComponentSummary bipartite_components(const IncidenceMatrix &a);

/// Quantiles are R type 7; sd uses n-1 (0 for a single value); skewness is
/// g1 = m3 / m2^1.5 and 0 for a constant sample. Throws on empty input.
StrengthSummary strength_summary(std::span<const double> values);

/// R type-7 quantile of an ascending-sorted, nonempty sample.
double quantile_type7(std::span<const double> sorted, double p);

} // namespace conflictnet
