#pragma once

#include "conflictnet/graph.hpp"

#include <string>
#include <string_view>

namespace conflictnet {

enum class GraphFormat { graphml, edgelist_csv, json };

/// Accepts "graphml", "edgelist_csv" (or "edgelist", "csv"), and "json".
/// Throws std::invalid_argument for anything else.
GraphFormat parse_graph_format(std::string_view name);
std::string_view to_string(GraphFormat format) noexcept;

/// GraphML carries `weight` on edges and `mode`/`faction` on nodes; JSON
/// carries the same. The edge list has columns src,dst,weight: one
/// declaration row per node (`id,,`) in node order, then one row per edge.
/// Node attributes do not survive the edge list.
std::string export_graph(const WeightedGraph &g, GraphFormat format);

/// Inverse of export_graph. Throws std::runtime_error on malformed input,
/// including non-integer or negative weights.
WeightedGraph parse_graph(std::string_view text, GraphFormat format);

} // namespace conflictnet
