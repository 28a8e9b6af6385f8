#pragma once

#include "conflictnet/bipartite.hpp"
#include "conflictnet/community_stats.hpp"
#include "conflictnet/flow.hpp"
#include "conflictnet/gof.hpp"
#include "conflictnet/incidence.hpp"
#include "conflictnet/sbm.hpp"

#include <json.hpp>

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace conflictnet {

/// Shortest decimal text that parses back to the same double ("NA" for NaN).
std::string format_number(double value);

/// Header `municipality_id,<structure ids...>`, one row per municipality.
std::string incidence_to_csv(const IncidenceMatrix &a);
IncidenceMatrix incidence_from_csv(std::string_view text);

/// Columns node,community with 1-based community labels.
std::string partition_to_csv(const LabeledPartition &p);
LabeledPartition partition_from_csv(std::string_view text);

/// theta, lambda, MAP assignment, ICL, and the bound trajectory.
nlohmann::ordered_json fit_to_json(const SbmFit &fit, const std::vector<std::string> &node_ids);
/// Restores every field written by fit_to_json except the trajectory details
/// needed only for diagnostics.
SbmFit fit_from_json(const nlohmann::json &doc);
std::vector<std::string> fit_node_ids(const nlohmann::json &doc);

std::string icl_curve_to_csv(const std::vector<IclPoint> &curve);

/// Columns community,count,mean_intra_degree,intra_cv,mean_degree,degree_cv,clustering,graph_clustering.
std::string community_stats_to_csv(const CommunityStats &stats);

/// Long format source,target,count over positive cells.
std::string flow_to_csv(const FlowMatrix &flow);

/// statistic,observed,q025,q500,q975,percentile,in_envelope
std::string gof_report_to_csv(const GofReport &report);
/// statistic,draw,value
std::string gof_draws_to_csv(const GofReport &report);

/// One labeled row per summary; columns follow Min, Q1, Median, Mean, Q3, Max, SD, Asymmetry.
std::string strength_table_to_csv(std::string_view label_column,
                                  const std::vector<std::pair<std::string, StrengthSummary>> &rows);

/// Two-column metric,value table.
std::string metrics_to_csv(const std::vector<std::pair<std::string, std::string>> &rows);

} // namespace conflictnet
