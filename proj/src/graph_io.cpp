#include "conflictnet/graph_io.hpp"

#include "conflictnet/csv.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <json.hpp>

#include <charconv>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace conflictnet {

namespace {

std::string xml_escape(std::string_view text) {
    std::string out;
    for (char c : text) {
        switch (c) {
        case '&':
            out += "&amp;";
            break;
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        case '"':
            out += "&quot;";
            break;
        case '\'':
            out += "&apos;";
            break;
        default:
            out.push_back(c);
        }
    }
    return out;
}

std::int64_t parse_weight(std::string_view text) {
    text = csv::trim(text);
    std::int64_t value = 0;
    const auto *end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc{} || ptr != end) {
        throw std::runtime_error("graph: weight '" + std::string{text} + "' is not an integer");
    }
    if (value < 0) {
        throw std::runtime_error("graph: negative weight " + std::string{text});
    }
    return value;
}

/// Collects nodes and edges by id, then builds the graph.
class GraphBuilder {
public:
    std::size_t add_node(const std::string &id, NodeAttributes attributes = {}) {
        auto [it, inserted] = index_.emplace(id, ids_.size());
        if (!inserted) {
            throw std::runtime_error("graph: duplicate node '" + id + "'");
        }
        ids_.push_back(id);
        attributes_.push_back(std::move(attributes));
        return it->second;
    }

    void add_edge(const std::string &source, const std::string &target, std::int64_t weight) {
        edges_.push_back({lookup(source), lookup(target), weight});
        if (edges_.back().u == edges_.back().v) {
            throw std::runtime_error("graph: loop at '" + source + "'");
        }
    }

    WeightedGraph build() {
        std::vector<std::int64_t> weights(ids_.size() * ids_.size(), 0);
        const auto n = ids_.size();
        for (const auto &e : edges_) {
            if (weights[e.u * n + e.v] != 0) {
                throw std::runtime_error("graph: repeated edge " + ids_[e.u] + " - " + ids_[e.v]);
            }
            weights[e.u * n + e.v] = weights[e.v * n + e.u] = e.weight;
        }
        WeightedGraph g{std::move(ids_), std::move(weights)};
        g.set_attributes(std::move(attributes_));
        return g;
    }

private:
    std::size_t lookup(const std::string &id) const {
        auto it = index_.find(id);
        if (it == index_.end()) {
            throw std::runtime_error("graph: edge references undeclared node '" + id + "'");
        }
        return it->second;
    }

    std::vector<std::string> ids_;
    std::vector<NodeAttributes> attributes_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<WeightedEdge> edges_;
};

std::string to_graphml(const WeightedGraph &g) {
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
        << "  <key id=\"mode\" for=\"node\" attr.name=\"mode\" attr.type=\"string\"/>\n"
        << "  <key id=\"faction\" for=\"node\" attr.name=\"faction\" attr.type=\"string\"/>\n"
        << "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"long\"/>\n"
        << "  <graph id=\"G\" edgedefault=\"undirected\">\n";
    for (std::size_t v = 0; v < g.order(); ++v) {
        const auto &a = g.attributes()[v];
        out << "    <node id=\"" << xml_escape(g.ids()[v]) << "\"><data key=\"mode\">"
            << xml_escape(a.mode) << "</data><data key=\"faction\">" << xml_escape(a.faction)
            << "</data></node>\n";
    }
    for (const auto &e : g.edges()) {
        out << "    <edge source=\"" << xml_escape(g.ids()[e.u]) << "\" target=\""
            << xml_escape(g.ids()[e.v]) << "\"><data key=\"weight\">" << e.weight
            << "</data></edge>\n";
    }
    out << "  </graph>\n</graphml>\n";
    return out.str();
}

WeightedGraph from_graphml(std::string_view text) {
    namespace pt = boost::property_tree;
    pt::ptree doc;
    try {
        std::istringstream in{std::string{text}};
        pt::read_xml(in, doc);
    } catch (const pt::xml_parser_error &e) {
        throw std::runtime_error(std::string{"graphml: "} + e.what());
    }
    const auto graphml = doc.get_child_optional("graphml");
    if (!graphml) {
        throw std::runtime_error("graphml: missing <graphml> root");
    }
    const auto graph = graphml->get_child_optional("graph");
    if (!graph) {
        throw std::runtime_error("graphml: missing <graph> element");
    }
    auto data_of = [](const pt::ptree &element, const std::string &key) -> std::optional<std::string> {
        for (const auto &[name, child] : element) {
            if (name == "data" && child.get<std::string>("<xmlattr>.key", "") == key) {
                return child.data();
            }
        }
        return std::nullopt;
    };

    GraphBuilder builder;
    for (const auto &[name, child] : *graph) {
        if (name == "node") {
            NodeAttributes attributes;
            attributes.mode = data_of(child, "mode").value_or("");
            attributes.faction = data_of(child, "faction").value_or("");
            builder.add_node(child.get<std::string>("<xmlattr>.id"), std::move(attributes));
        }
    }
    for (const auto &[name, child] : *graph) {
        if (name == "edge") {
            const auto weight = data_of(child, "weight");
            builder.add_edge(child.get<std::string>("<xmlattr>.source"),
                             child.get<std::string>("<xmlattr>.target"),
                             weight ? parse_weight(*weight) : 1);
        }
    }
    return builder.build();
}

std::string to_edgelist(const WeightedGraph &g) {
    std::ostringstream out;
    out << "src,dst,weight\n";
    for (const auto &id : g.ids()) {
        out << csv::escape(id) << ",,\n";
    }
    for (const auto &e : g.edges()) {
        out << csv::escape(g.ids()[e.u]) << ',' << csv::escape(g.ids()[e.v]) << ',' << e.weight << '\n';
    }
    return out.str();
}

WeightedGraph from_edgelist(std::string_view text) {
    std::istringstream in{std::string{text}};
    std::string line;
    if (!csv::read_line(in, line) || csv::split_line(line) != std::vector<std::string>{"src", "dst", "weight"}) {
        throw std::runtime_error("edge list: expected header src,dst,weight");
    }
    GraphBuilder builder;
    std::size_t line_no = 1;
    while (csv::read_line(in, line)) {
        ++line_no;
        if (csv::trim(line).empty()) {
            continue;
        }
        const auto fields = csv::split_line(line);
        if (fields.size() != 3) {
            throw std::runtime_error("edge list: line " + std::to_string(line_no) + " has " +
                                     std::to_string(fields.size()) + " fields");
        }
        if (fields[1].empty() && fields[2].empty()) {
            builder.add_node(fields[0]);
        } else {
            builder.add_edge(fields[0], fields[1], parse_weight(fields[2]));
        }
    }
    return builder.build();
}

std::string to_json(const WeightedGraph &g) {
    nlohmann::ordered_json doc;
    doc["nodes"] = nlohmann::ordered_json::array();
    for (std::size_t v = 0; v < g.order(); ++v) {
        doc["nodes"].push_back({{"id", g.ids()[v]},
                                {"mode", g.attributes()[v].mode},
                                {"faction", g.attributes()[v].faction}});
    }
    doc["edges"] = nlohmann::ordered_json::array();
    for (const auto &e : g.edges()) {
        doc["edges"].push_back(
            {{"source", g.ids()[e.u]}, {"target", g.ids()[e.v]}, {"weight", e.weight}});
    }
    return doc.dump(2) + "\n";
}

WeightedGraph from_json(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
        GraphBuilder builder;
        for (const auto &node : doc.at("nodes")) {
            builder.add_node(node.at("id").get<std::string>(),
                             {node.value("mode", ""), node.value("faction", "")});
        }
        for (const auto &edge : doc.at("edges")) {
            const auto &w = edge.at("weight");
            if (!w.is_number_integer() || w.get<std::int64_t>() < 0) {
                throw std::runtime_error("graph json: weight must be a nonnegative integer");
            }
            builder.add_edge(edge.at("source").get<std::string>(), edge.at("target").get<std::string>(),
                             w.get<std::int64_t>());
        }
        return builder.build();
    } catch (const nlohmann::json::exception &e) {
        throw std::runtime_error(std::string{"graph json: "} + e.what());
    }
}

} // namespace

GraphFormat parse_graph_format(std::string_view name) {
    if (name == "graphml") {
        return GraphFormat::graphml;
    }
    if (name == "edgelist_csv" || name == "edgelist" || name == "csv") {
        return GraphFormat::edgelist_csv;
    }
    if (name == "json") {
        return GraphFormat::json;
    }
    throw std::invalid_argument("unknown graph format '" + std::string{name} + "'");
}

std::string_view to_string(GraphFormat format) noexcept {
    switch (format) {
    case GraphFormat::graphml:
        return "graphml";
    case GraphFormat::edgelist_csv:
        return "edgelist_csv";
    case GraphFormat::json:
        return "json";
    }
    return "unknown";
}

std::string export_graph(const WeightedGraph &g, GraphFormat format) {
    switch (format) {
    case GraphFormat::graphml:
        return to_graphml(g);
    case GraphFormat::edgelist_csv:
        return to_edgelist(g);
    case GraphFormat::json:
        return to_json(g);
    }
    throw std::invalid_argument("unknown graph format");
}

WeightedGraph parse_graph(std::string_view text, GraphFormat format) {
    switch (format) {
    case GraphFormat::graphml:
        return from_graphml(text);
    case GraphFormat::edgelist_csv:
        return from_edgelist(text);
    case GraphFormat::json:
        return from_json(text);
    }
    throw std::invalid_argument("unknown graph format");
}

} // namespace conflictnet
