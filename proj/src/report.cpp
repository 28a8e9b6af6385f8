#include "conflictnet/report.hpp"

#include "conflictnet/csv.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace conflictnet {

std::string format_number(double value) {
    if (std::isnan(value)) {
        return "NA";
    }
    char buffer[64];
    auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    if (ec != std::errc{}) {
        throw std::runtime_error("format_number: conversion failed");
    }
    return std::string{buffer, ptr};
}

std::string incidence_to_csv(const IncidenceMatrix &a) {
    std::ostringstream out;
    out << "municipality_id";
    for (const auto &c : a.cols()) {
        out << ',' << csv::escape(c);
    }
    out << '\n';
    for (std::size_t i = 0; i < a.n_rows(); ++i) {
        out << csv::escape(a.rows()[i]);
        for (std::size_t j = 0; j < a.n_cols(); ++j) {
            out << ',' << a.at(i, j);
        }
        out << '\n';
    }
    return out.str();
}

IncidenceMatrix incidence_from_csv(std::string_view text) {
    std::istringstream in{std::string{text}};
    std::string line;
    if (!csv::read_line(in, line)) {
        throw std::runtime_error("incidence csv: missing header");
    }
    auto header = csv::split_line(line);
    if (header.empty() || header.front() != "municipality_id") {
        throw std::runtime_error("incidence csv: header must start with municipality_id");
    }
    std::vector<std::string> cols(header.begin() + 1, header.end());
    if (cols.size() == 1 && cols.front().empty()) {
        cols.clear();
    }
    std::vector<std::string> rows;
    std::vector<std::int64_t> entries;
    std::size_t line_no = 1;
    while (csv::read_line(in, line)) {
        ++line_no;
        if (csv::trim(line).empty()) {
            continue;
        }
        const auto fields = csv::split_line(line);
        if (fields.size() != cols.size() + 1) {
            throw std::runtime_error("incidence csv: line " + std::to_string(line_no) +
                                     " has the wrong number of fields");
        }
        rows.push_back(fields[0]);
        for (std::size_t j = 1; j < fields.size(); ++j) {
            std::int64_t value = 0;
            const auto &f = fields[j];
            auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
            if (f.empty() || ec != std::errc{} || ptr != f.data() + f.size()) {
                throw std::runtime_error("incidence csv: line " + std::to_string(line_no) +
                                         ": non-integer count '" + f + "'");
            }
            entries.push_back(value);
        }
    }
    return IncidenceMatrix{std::move(rows), std::move(cols), std::move(entries)};
}

std::string partition_to_csv(const LabeledPartition &p) {
    std::ostringstream out;
    out << "node,community\n";
    for (std::size_t v = 0; v < p.node_ids.size(); ++v) {
        out << csv::escape(p.node_ids[v]) << ',' << p.partition.label(v) + 1 << '\n';
    }
    return out.str();
}

LabeledPartition partition_from_csv(std::string_view text) {
    std::istringstream in{std::string{text}};
    std::string line;
    if (!csv::read_line(in, line) || csv::split_line(line) != std::vector<std::string>{"node", "community"}) {
        throw std::runtime_error("partition csv: expected header node,community");
    }
    LabeledPartition out;
    std::vector<std::size_t> labels;
    while (csv::read_line(in, line)) {
        if (csv::trim(line).empty()) {
            continue;
        }
        const auto fields = csv::split_line(line);
        std::size_t label = 0;
        const auto &f = fields.size() == 2 ? fields[1] : std::string{};
        auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), label);
        if (fields.size() != 2 || f.empty() || ec != std::errc{} || ptr != f.data() + f.size() || label == 0) {
            throw std::runtime_error("partition csv: malformed row '" + line + "'");
        }
        out.node_ids.push_back(fields[0]);
        labels.push_back(label);
    }
    out.partition = Partition{labels};
    return out;
}

nlohmann::ordered_json fit_to_json(const SbmFit &fit, const std::vector<std::string> &node_ids) {
    if (node_ids.size() != fit.n) {
        throw std::invalid_argument("fit json: node id count does not match the fit");
    }
    nlohmann::ordered_json doc;
    doc["requested_q"] = fit.requested_q;
    doc["q"] = fit.q;
    doc["n"] = fit.n;
    doc["pair_counting"] = std::string{to_string(fit.pair_counting)};
    doc["theta"] = fit.theta;
    auto lambda = nlohmann::ordered_json::array();
    for (std::size_t a = 0; a < fit.q; ++a) {
        std::vector<double> row(fit.lambda.begin() + static_cast<std::ptrdiff_t>(a * fit.q),
                                fit.lambda.begin() + static_cast<std::ptrdiff_t>((a + 1) * fit.q));
        lambda.push_back(row);
    }
    doc["lambda"] = lambda;
    doc["icl"] = fit.icl;
    doc["map_complete_loglik"] = fit.map_complete_loglik;
    doc["log_likelihood_bound"] = fit.log_likelihood_bound;
    doc["converged"] = fit.converged;
    doc["iterations"] = fit.iterations;
    doc["restart"] = fit.restart;
    doc["seed"] = fit.seed;
    doc["compacted"] = fit.compacted;
    doc["compaction_points"] = fit.compaction_points;
    doc["bound_trajectory"] = fit.bound_trajectory;
    auto assignment = nlohmann::ordered_json::array();
    for (std::size_t v = 0; v < fit.n; ++v) {
        assignment.push_back({{"node", node_ids[v]},
                              {"block", fit.map_blocks[v] + 1},
                              {"community", fit.map_partition.label(v) + 1}});
    }
    doc["map_assignment"] = assignment;
    auto tau = nlohmann::ordered_json::array();
    for (std::size_t v = 0; v < fit.n; ++v) {
        std::vector<double> row(fit.responsibilities.begin() + static_cast<std::ptrdiff_t>(v * fit.q),
                                fit.responsibilities.begin() + static_cast<std::ptrdiff_t>((v + 1) * fit.q));
        tau.push_back(row);
    }
    doc["responsibilities"] = tau;
    return doc;
}

SbmFit fit_from_json(const nlohmann::json &doc) {
    try {
        SbmFit fit;
        fit.requested_q = doc.at("requested_q").get<std::size_t>();
        fit.q = doc.at("q").get<std::size_t>();
        fit.n = doc.at("n").get<std::size_t>();
        fit.pair_counting = doc.value("pair_counting", std::string{"undirected_pairs"}) == "product_of_sizes"
                                ? PairCounting::product_of_sizes
                                : PairCounting::undirected_pairs;
        fit.theta = doc.at("theta").get<std::vector<double>>();
        for (const auto &row : doc.at("lambda")) {
            for (const auto &x : row) {
                fit.lambda.push_back(x.get<double>());
            }
        }
        fit.icl = doc.value("icl", 0.0);
        fit.map_complete_loglik = doc.value("map_complete_loglik", 0.0);
        fit.log_likelihood_bound = doc.value("log_likelihood_bound", 0.0);
        fit.converged = doc.value("converged", false);
        fit.iterations = doc.value("iterations", 0);
        fit.restart = doc.value("restart", 0);
        fit.seed = doc.value("seed", std::uint64_t{0});
        fit.compacted = doc.value("compacted", false);
        if (doc.contains("bound_trajectory")) {
            fit.bound_trajectory = doc.at("bound_trajectory").get<std::vector<double>>();
        }
        for (const auto &entry : doc.at("map_assignment")) {
            fit.map_blocks.push_back(entry.at("block").get<std::size_t>() - 1);
        }
        if (doc.contains("responsibilities")) {
            for (const auto &row : doc.at("responsibilities")) {
                for (const auto &x : row) {
                    fit.responsibilities.push_back(x.get<double>());
                }
            }
        }
        if (fit.theta.size() != fit.q || fit.lambda.size() != fit.q * fit.q || fit.map_blocks.size() != fit.n) {
            throw std::runtime_error("fit json: inconsistent dimensions");
        }
        fit.map_partition = Partition{fit.map_blocks};
        return fit;
    } catch (const nlohmann::json::exception &e) {
        throw std::runtime_error(std::string{"fit json: "} + e.what());
    }
}

std::vector<std::string> fit_node_ids(const nlohmann::json &doc) {
    std::vector<std::string> ids;
    for (const auto &entry : doc.at("map_assignment")) {
        ids.push_back(entry.at("node").get<std::string>());
    }
    return ids;
}

std::string icl_curve_to_csv(const std::vector<IclPoint> &curve) {
    std::ostringstream out;
    out << "q,effective_q,icl\n";
    for (const auto &p : curve) {
        out << p.requested_q << ',' << p.effective_q << ',' << format_number(p.icl) << '\n';
    }
    return out.str();
}

std::string community_stats_to_csv(const CommunityStats &stats) {
    std::ostringstream out;
    out << "community,count,mean_intra_degree,intra_cv,mean_degree,degree_cv,clustering,graph_clustering\n";
    for (std::size_t c = 0; c < stats.communities.size(); ++c) {
        const auto &p = stats.communities[c];
        out << c + 1 << ',' << p.count << ',' << format_number(p.mean_intra_degree) << ','
            << format_number(p.intra_degree_cv) << ',' << format_number(p.mean_degree) << ','
            << format_number(p.degree_cv) << ',' << format_number(p.clustering) << ','
            << format_number(p.graph_clustering) << '\n';
    }
    return out.str();
}

std::string flow_to_csv(const FlowMatrix &flow) {
    std::ostringstream out;
    out << "source,target,count\n";
    for (std::size_t s = 0; s < flow.sources.size(); ++s) {
        for (std::size_t t = 0; t < flow.targets.size(); ++t) {
            if (flow.at(s, t) > 0) {
                out << flow.sources[s] << ',' << flow.targets[t] << ',' << flow.at(s, t) << '\n';
            }
        }
    }
    return out.str();
}

std::string gof_report_to_csv(const GofReport &report) {
    std::ostringstream out;
    out << "statistic,observed,q025,q500,q975,percentile,in_envelope\n";
    for (const auto &s : report.statistics) {
        out << s.name << ',' << format_number(s.observed) << ',' << format_number(s.q025) << ','
            << format_number(s.q500) << ',' << format_number(s.q975) << ','
            << format_number(s.percentile) << ',' << (s.in_envelope ? "true" : "false") << '\n';
    }
    return out.str();
}

std::string gof_draws_to_csv(const GofReport &report) {
    std::ostringstream out;
    out << "statistic,draw,value\n";
    for (const auto &s : report.statistics) {
        for (std::size_t d = 0; d < s.draws.size(); ++d) {
            out << s.name << ',' << d << ',' << format_number(s.draws[d]) << '\n';
        }
    }
    return out.str();
}

std::string strength_table_to_csv(std::string_view label_column,
                                  const std::vector<std::pair<std::string, StrengthSummary>> &rows) {
    std::ostringstream out;
    out << label_column << ",Min,Q1,Median,Mean,Q3,Max,SD,Asymmetry\n";
    for (const auto &[label, s] : rows) {
        out << csv::escape(label) << ',' << format_number(s.min) << ',' << format_number(s.q1) << ','
            << format_number(s.median) << ',' << format_number(s.mean) << ','
            << format_number(s.q3) << ',' << format_number(s.max) << ',' << format_number(s.sd)
            << ',' << format_number(s.skewness) << '\n';
    }
    return out.str();
}

std::string metrics_to_csv(const std::vector<std::pair<std::string, std::string>> &rows) {
    std::ostringstream out;
    out << "metric,value\n";
    for (const auto &[name, value] : rows) {
        out << csv::escape(name) << ',' << csv::escape(value) << '\n';
    }
    return out.str();
}

} // namespace conflictnet
