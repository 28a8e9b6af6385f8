#include "conflictnet/pipeline.hpp"

#include "conflictnet/community_stats.hpp"
#include "conflictnet/csv.hpp"
#include "conflictnet/graph_io.hpp"
#include "conflictnet/modularity.hpp"
#include "conflictnet/parallel.hpp"
#include "conflictnet/projection.hpp"
#include "conflictnet/random.hpp"
#include "conflictnet/report.hpp"

#include <openssl/evp.h>

#include <unistd.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace conflictnet {

namespace {

std::string join(const std::vector<std::string> &parts, std::string_view separator) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) {
            out += separator;
        }
        out += parts[i];
    }
    return out;
}

std::string count_text(std::size_t value) { return std::to_string(value); }
std::string count_text(std::int64_t value) { return std::to_string(value); }

} // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error("invalid configuration: " + join(problems, "; ")), problems_{std::move(problems)} {}

InputError::InputError(std::vector<std::string> diagnostics)
    : std::runtime_error(join(diagnostics, "\n")), diagnostics_{std::move(diagnostics)} {}

std::optional<Side> parse_side(std::string_view name) {
    if (name == "municipalities" || name == "municipality") {
        return Side::municipalities;
    }
    if (name == "structures" || name == "structure") {
        return Side::structures;
    }
    return std::nullopt;
}

std::optional<PairCounting> parse_pair_counting(std::string_view name) {
    if (name == "undirected_pairs") {
        return PairCounting::undirected_pairs;
    }
    if (name == "product_of_sizes") {
        return PairCounting::product_of_sizes;
    }
    return std::nullopt;
}

std::optional<MembershipSampling> parse_membership(std::string_view name) {
    if (name == "resample_from_theta") {
        return MembershipSampling::resample_from_theta;
    }
    if (name == "condition_on_map") {
        return MembershipSampling::condition_on_map;
    }
    return std::nullopt;
}

std::string_view to_string(MembershipSampling membership) noexcept {
    return membership == MembershipSampling::resample_from_theta ? "resample_from_theta" : "condition_on_map";
}

// ---------------------------------------------------------------------------
// Configuration

namespace {

class ConfigReader {
public:
    explicit ConfigReader(fs::path base) : base_{std::move(base)} {}

    void check_keys(const json &object, std::string_view where, std::initializer_list<std::string_view> allowed) {
        if (!object.is_object()) {
            problems.push_back(std::string{where} + " must be an object");
            return;
        }
        for (const auto &item : object.items()) {
            if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
                problems.push_back("unknown key '" + std::string{where} + "." + item.key() + "'");
            }
        }
    }

    void path(const json &object, const char *key, fs::path &target) {
        if (auto *value = find(object, key)) {
            if (!value->is_string()) {
                problems.push_back(std::string{key} + " must be a string path");
                return;
            }
            fs::path p{value->get<std::string>()};
            target = p.is_relative() && !p.empty() ? base_ / p : p;
        }
    }

    void text(const json &object, const char *key, std::string &target) {
        if (auto *value = find(object, key)) {
            if (!value->is_string()) {
                problems.push_back(std::string{key} + " must be a string");
                return;
            }
            target = value->get<std::string>();
        }
    }

    template <typename T>
    void unsigned_integer(const json &object, const char *key, T &target) {
        if (auto *value = find(object, key)) {
            if (!value->is_number_unsigned()) {
                problems.push_back(std::string{key} + " must be a nonnegative integer");
                return;
            }
            target = value->get<T>();
        }
    }

    void seed(const json &object, const char *key, std::optional<std::uint64_t> &target) {
        if (auto *value = find(object, key)) {
            if (value->is_null()) {
                target.reset();
            } else if (!value->is_number_unsigned()) {
                problems.push_back(std::string{key} + " must be a nonnegative integer");
            } else {
                target = value->get<std::uint64_t>();
            }
        }
    }

    void integer(const json &object, const char *key, int &target) {
        if (auto *value = find(object, key)) {
            if (!value->is_number_integer()) {
                problems.push_back(std::string{key} + " must be an integer");
                return;
            }
            target = value->get<int>();
        }
    }

    void number(const json &object, const char *key, double &target) {
        if (auto *value = find(object, key)) {
            if (!value->is_number()) {
                problems.push_back(std::string{key} + " must be a number");
                return;
            }
            target = value->get<double>();
        }
    }

    void boolean(const json &object, const char *key, bool &target) {
        if (auto *value = find(object, key)) {
            if (!value->is_boolean()) {
                problems.push_back(std::string{key} + " must be true or false");
                return;
            }
            target = value->get<bool>();
        }
    }

    std::vector<std::string> problems;

private:
    static const json *find(const json &object, const char *key) {
        if (!object.is_object()) {
            return nullptr;
        }
        auto it = object.find(key);
        return it == object.end() ? nullptr : &*it;
    }

    fs::path base_;
};

} // namespace

RunConfig run_config_from_json(const json &doc, const fs::path &base_dir) {
    RunConfig config;
    ConfigReader r{base_dir};
    r.check_keys(doc, "config",
                 {"events", "timelines", "periods", "output", "columns", "q_range", "em", "gof", "sbm_sides",
                  "threads", "overwrite"});
    if (!doc.is_object()) {
        throw ConfigError(r.problems);
    }
    r.path(doc, "events", config.events);
    r.path(doc, "timelines", config.timelines);
    r.path(doc, "periods", config.periods);
    r.path(doc, "output", config.output);
    if (doc.contains("columns")) {
        const auto &c = doc["columns"];
        r.check_keys(c, "columns", {"municipality_id", "group_id", "year", "violence_type", "victim_count"});
        r.text(c, "municipality_id", config.columns.municipality_id);
        r.text(c, "group_id", config.columns.group_id);
        r.text(c, "year", config.columns.year);
        r.text(c, "violence_type", config.columns.violence_type);
        r.text(c, "victim_count", config.columns.victim_count);
    }
    if (doc.contains("q_range")) {
        const auto &q = doc["q_range"];
        if (!q.is_array() || q.size() != 2 || !q[0].is_number_unsigned() || !q[1].is_number_unsigned()) {
            r.problems.push_back("q_range must be a [min, max] pair of nonnegative integers");
        } else {
            config.q_min = q[0].get<std::size_t>();
            config.q_max = q[1].get<std::size_t>();
        }
    }
    if (doc.contains("em")) {
        const auto &em = doc["em"];
        r.check_keys(em, "em", {"restarts", "max_iter", "tol", "seed", "pair_counting"});
        r.integer(em, "restarts", config.restarts);
        r.integer(em, "max_iter", config.max_iter);
        r.number(em, "tol", config.tol);
        r.seed(em, "seed", config.em_seed);
        std::string counting{to_string(config.pair_counting)};
        r.text(em, "pair_counting", counting);
        if (auto parsed = parse_pair_counting(counting)) {
            config.pair_counting = *parsed;
        } else {
            r.problems.push_back("em.pair_counting must be undirected_pairs or product_of_sizes");
        }
    }
    if (doc.contains("gof")) {
        const auto &gof = doc["gof"];
        r.check_keys(gof, "gof", {"enabled", "n_sims", "seed", "membership"});
        r.boolean(gof, "enabled", config.gof_enabled);
        r.unsigned_integer(gof, "n_sims", config.n_sims);
        r.seed(gof, "seed", config.gof_seed);
        std::string membership{to_string(config.membership)};
        r.text(gof, "membership", membership);
        if (auto parsed = parse_membership(membership)) {
            config.membership = *parsed;
        } else {
            r.problems.push_back("gof.membership must be resample_from_theta or condition_on_map");
        }
    }
    if (doc.contains("sbm_sides")) {
        const auto &sides = doc["sbm_sides"];
        config.sbm_sides.clear();
        if (!sides.is_array()) {
            r.problems.push_back("sbm_sides must be an array");
        } else {
            for (const auto &s : sides) {
                std::optional<Side> side;
                if (s.is_string()) {
                    side = parse_side(s.get<std::string>());
                }
                if (!side) {
                    r.problems.push_back("sbm_sides entries must be municipalities or structures");
                } else {
                    config.sbm_sides.push_back(*side);
                }
            }
        }
    }
    r.unsigned_integer(doc, "threads", config.threads);
    r.boolean(doc, "overwrite", config.overwrite);
    if (!r.problems.empty()) {
        throw ConfigError(r.problems);
    }
    return config;
}

ordered_json run_config_to_json(const RunConfig &config) {
    ordered_json doc;
    doc["events"] = config.events.generic_string();
    doc["timelines"] = config.timelines.generic_string();
    doc["periods"] = config.periods.generic_string();
    doc["columns"] = {{"municipality_id", config.columns.municipality_id},
                      {"group_id", config.columns.group_id},
                      {"year", config.columns.year},
                      {"violence_type", config.columns.violence_type},
                      {"victim_count", config.columns.victim_count}};
    doc["q_range"] = {config.q_min, config.q_max};
    doc["em"] = {{"restarts", config.restarts},
                 {"max_iter", config.max_iter},
                 {"tol", config.tol},
                 {"seed", config.em_seed ? ordered_json(*config.em_seed) : ordered_json(nullptr)},
                 {"pair_counting", std::string{to_string(config.pair_counting)}}};
    doc["gof"] = {{"enabled", config.gof_enabled},
                  {"n_sims", config.n_sims},
                  {"seed", config.gof_seed ? ordered_json(*config.gof_seed) : ordered_json(nullptr)},
                  {"membership", std::string{to_string(config.membership)}}};
    auto sides = ordered_json::array();
    for (auto side : config.sbm_sides) {
        sides.push_back(std::string{to_string(side)});
    }
    doc["sbm_sides"] = sides;
    return doc;
}

void validate_run_config(const RunConfig &config, const ConfigRequirements &req) {
    std::vector<std::string> problems;
    if (req.inputs) {
        if (config.events.empty()) {
            problems.push_back("events path is required");
        }
        if (config.timelines.empty()) {
            problems.push_back("timelines path is required");
        }
    }
    if (req.output && config.output.empty()) {
        problems.push_back("output directory is required");
    }
    if (config.q_min < 1 || config.q_min > config.q_max) {
        problems.push_back("q_range must be nonempty with 1 <= min <= max (got [" + std::to_string(config.q_min) +
                           ", " + std::to_string(config.q_max) + "])");
    }
    if (config.restarts < 1) {
        problems.push_back("em.restarts must be >= 1");
    }
    if (config.max_iter < 1) {
        problems.push_back("em.max_iter must be >= 1");
    }
    if (!(config.tol > 0.0) || !std::isfinite(config.tol)) {
        problems.push_back("em.tol must be > 0");
    }
    if (config.n_sims < 1) {
        problems.push_back("gof.n_sims must be >= 1");
    }
    if (req.em_seed && !config.em_seed) {
        problems.push_back("an explicit EM seed is required (--seed or em.seed)");
    }
    if (req.gof_seed && config.gof_enabled && !config.gof_seed) {
        problems.push_back("an explicit GOF seed is required (--seed, --gof-seed, or gof.seed)");
    }
    std::set<Side> seen;
    for (auto side : config.sbm_sides) {
        if (!seen.insert(side).second) {
            problems.push_back("sbm_sides lists " + std::string{to_string(side)} + " twice");
        }
    }
    if (!problems.empty()) {
        throw ConfigError(std::move(problems));
    }
}

EmConfig em_config(const RunConfig &config) {
    if (!config.em_seed) {
        throw ConfigError({"an explicit EM seed is required (--seed or em.seed)"});
    }
    EmConfig em;
    em.restarts = config.restarts;
    em.max_iter = config.max_iter;
    em.tol = config.tol;
    em.seed = *config.em_seed;
    em.pair_counting = config.pair_counting;
    return em;
}

// ---------------------------------------------------------------------------
// Outputs

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256: digest failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * length);
    for (unsigned int i = 0; i < length; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0x0f]);
    }
    return out;
}

void OutputSet::add(std::string relative_path, std::string content) {
    if (relative_path.empty() || relative_path.front() == '/' || relative_path.find("..") != std::string::npos) {
        throw std::logic_error("output path '" + relative_path + "' must be relative");
    }
    if (!files_.emplace(relative_path, std::move(content)).second) {
        throw std::logic_error("output path '" + relative_path + "' written twice");
    }
}

void OutputSet::merge(OutputSet other) {
    for (auto &[path, content] : other.files_) {
        add(path, std::move(content));
    }
}

std::vector<ManifestEntry> OutputSet::manifest() const {
    std::vector<ManifestEntry> entries;
    entries.reserve(files_.size());
    for (const auto &[path, content] : files_) {
        entries.push_back({path, sha256_hex(content), content.size()});
    }
    return entries;
}

std::string manifest_to_json(const std::vector<ManifestEntry> &entries) {
    ordered_json files = ordered_json::array();
    for (const auto &e : entries) {
        files.push_back({{"path", e.path}, {"sha256", e.sha256}, {"bytes", e.bytes}});
    }
    ordered_json doc;
    doc["files"] = files;
    return doc.dump(2) + "\n";
}

namespace {

void write_bytes(const fs::path &path, std::string_view content) {
    std::ofstream out{path, std::ios::binary | std::ios::trunc};
    if (!out) {
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.close();
    if (!out) {
        throw std::runtime_error("failed writing '" + path.string() + "'");
    }
}

fs::path sibling(const fs::path &target, std::string_view tag) {
    auto parent = target.parent_path();
    auto name = "." + target.filename().string() + "." + std::string{tag} + "-" + std::to_string(::getpid());
    return parent.empty() ? fs::path{name} : parent / name;
}

} // namespace

std::vector<ManifestEntry> commit_outputs(const OutputSet &outputs, const fs::path &directory, bool overwrite) {
    if (directory.empty()) {
        throw std::invalid_argument("output directory is empty");
    }
    if (fs::exists(directory) && !overwrite) {
        throw std::runtime_error("output directory '" + directory.string() +
                                 "' already exists (set overwrite to replace it)");
    }
    if (outputs.files().count("manifest.json")) {
        throw std::logic_error("manifest.json is reserved");
    }
    auto entries = outputs.manifest();
    const auto parent = directory.parent_path();
    if (!parent.empty()) {
        fs::create_directories(parent);
    }
    const auto staging = sibling(directory, "staging");
    fs::remove_all(staging);
    try {
        fs::create_directories(staging);
        for (const auto &[relative, content] : outputs.files()) {
            const auto path = staging / fs::path{relative};
            fs::create_directories(path.parent_path());
            write_bytes(path, content);
        }
        write_bytes(staging / "manifest.json", manifest_to_json(entries));
        if (fs::exists(directory)) {
            const auto previous = sibling(directory, "previous");
            fs::remove_all(previous);
            fs::rename(directory, previous);
            fs::rename(staging, directory);
            fs::remove_all(previous);
        } else {
            fs::rename(staging, directory);
        }
    } catch (...) {
        std::error_code ignored;
        fs::remove_all(staging, ignored);
        throw;
    }
    return entries;
}

void write_file_atomically(const fs::path &path, std::string_view content, bool overwrite) {
    if (fs::exists(path) && !overwrite) {
        throw std::runtime_error("output file '" + path.string() + "' already exists (set overwrite to replace it)");
    }
    if (!path.parent_path().empty()) {
        fs::create_directories(path.parent_path());
    }
    const auto temporary = sibling(path, "tmp");
    try {
        write_bytes(temporary, content);
        fs::rename(temporary, path);
    } catch (...) {
        std::error_code ignored;
        fs::remove(temporary, ignored);
        throw;
    }
}

std::string read_file(const fs::path &path) {
    std::ifstream in{path, std::ios::binary};
    if (!in) {
        throw std::runtime_error("cannot read '" + path.string() + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

// ---------------------------------------------------------------------------
// Ingest

Corpus load_corpus(const RunConfig &config) {
    std::vector<std::string> diagnostics;
    auto open = [&](const fs::path &path, std::string_view what) -> std::optional<std::ifstream> {
        if (path.empty()) {
            diagnostics.push_back(std::string{what} + " path is not set");
            return std::nullopt;
        }
        std::error_code ec;
        if (!fs::is_regular_file(path, ec)) {
            diagnostics.push_back(std::string{what} + " file '" + path.string() + "' does not exist or is not a file");
            return std::nullopt;
        }
        std::ifstream in{path, std::ios::binary};
        if (!in) {
            diagnostics.push_back("cannot read " + std::string{what} + " file '" + path.string() + "'");
            return std::nullopt;
        }
        return in;
    };

    Corpus corpus;
    std::vector<EventRecord> events;
    bool events_ok = false;
    bool timelines_ok = false;
    bool periods_ok = true;

    if (auto in = open(config.events, "events")) {
        try {
            events = parse_events(*in, config.columns);
            events_ok = true;
        } catch (const std::exception &e) {
            diagnostics.push_back(config.events.string() + ": " + e.what());
        }
    }
    if (auto in = open(config.timelines, "timelines")) {
        try {
            corpus.timelines = parse_timelines(*in);
            timelines_ok = true;
        } catch (const std::exception &e) {
            diagnostics.push_back(config.timelines.string() + ": " + e.what());
        }
    }
    if (!config.periods.empty()) {
        periods_ok = false;
        if (auto in = open(config.periods, "periods")) {
            try {
                corpus.periods = parse_periods(*in);
                periods_ok = true;
            } catch (const std::exception &e) {
                diagnostics.push_back(config.periods.string() + ": " + e.what());
            }
        }
    }
    if (events_ok && timelines_ok) {
        try {
            corpus.attribution = validate_attribution(events, corpus.timelines);
        } catch (const std::exception &e) {
            diagnostics.push_back(config.events.string() + ": " + e.what());
        }
    }
    if (diagnostics.empty() && periods_ok) {
        try {
            corpus.buckets = assign_periods(corpus.attribution.accepted, corpus.periods);
        } catch (const std::exception &e) {
            diagnostics.push_back(config.events.string() + ": " + e.what());
        }
    }
    if (!diagnostics.empty()) {
        throw InputError(std::move(diagnostics));
    }
    return corpus;
}

std::string period_directory(const PeriodPartition &periods, std::size_t index) {
    std::ostringstream name;
    name << std::setw(2) << std::setfill('0') << index + 1 << '_' << periods[index].label();
    return name.str();
}

void add_ingest_outputs(const Corpus &corpus, OutputSet &out) {
    std::ostringstream rejected;
    rejected << "municipality_id,group_id,year,violence_type,victim_count,reason\n";
    for (const auto &r : corpus.attribution.rejected) {
        rejected << csv::escape(r.event.municipality_id) << ',' << csv::escape(r.event.group_id) << ','
                 << r.event.year << ',' << to_string(r.event.violence_type) << ',' << r.event.victim_count << ','
                 << csv::escape(r.reason) << '\n';
    }
    out.add("ingest/rejected.csv", rejected.str());

    std::ostringstream summary;
    summary << "period,events,victims,municipalities,structures\n";
    for (std::size_t t = 0; t < corpus.periods.size(); ++t) {
        const auto it = corpus.buckets.find(t);
        static const std::vector<EventRecord> none;
        const auto &events = it == corpus.buckets.end() ? none : it->second;
        const auto a = build_incidence(events);
        summary << corpus.periods[t].label() << ',' << events.size() << ',' << a.total() << ',' << a.n_rows()
                << ',' << a.n_cols() << '\n';
        out.add("periods/" + period_directory(corpus.periods, t) + "/incidence.csv", incidence_to_csv(a));
    }
    out.add("ingest/summary.csv", summary.str());
}

// ---------------------------------------------------------------------------
// Metrics

WeightedGraph labeled_projection(const IncidenceMatrix &a, Side side, const std::vector<GroupTimeline> &timelines) {
    auto g = project(a, side);
    if (side == Side::structures) {
        std::unordered_map<std::string, Faction> faction;
        for (const auto &t : timelines) {
            faction.emplace(t.group_id, t.faction);
        }
        auto attributes = g.attributes();
        for (std::size_t v = 0; v < g.order(); ++v) {
            if (auto it = faction.find(g.ids()[v]); it != faction.end()) {
                attributes[v].faction = std::string{to_string(it->second)};
            }
        }
        g.set_attributes(std::move(attributes));
    }
    return g;
}

MetricRows bipartite_metric_rows(const IncidenceMatrix &a) {
    const auto sizes = bipartite_order_size_density(a);
    const auto components = bipartite_components(a);
    return {
        {"n_municipalities", count_text(sizes.n_municipalities)},
        {"n_structures", count_text(sizes.n_structures)},
        {"order", count_text(sizes.n_municipalities + sizes.n_structures)},
        {"size", count_text(sizes.n_edges)},
        {"total_victims", count_text(a.total())},
        {"density", format_number(sizes.density)},
        {"component_count", count_text(components.component_count)},
        {"giant_component_order", count_text(components.giant_order)},
    };
}

MetricRows projection_metric_rows(const WeightedGraph &g) {
    const auto na = std::string{"NA"};
    MetricRows rows;
    rows.emplace_back("order", count_text(g.order()));
    rows.emplace_back("size", count_text(g.size()));
    rows.emplace_back("total_weight", count_text(g.total_weight()));
    rows.emplace_back("density", g.order() >= 2 ? format_number(graph_density(g)) : na);
    const auto components = graph_components(g);
    rows.emplace_back("component_count", count_text(components.component_count));
    rows.emplace_back("giant_component_order", count_text(components.giant_order));
    rows.emplace_back("transitivity", format_number(global_transitivity(g)));
    for (auto kind : {CentralizationKind::degree, CentralizationKind::closeness, CentralizationKind::betweenness}) {
        rows.emplace_back(std::string{to_string(kind)} + "_centralization",
                          g.order() >= 3 ? format_number(centralization(g, kind).value) : na);
    }
    const auto cliques = maximal_cliques(g);
    rows.emplace_back("clique_number", count_text(cliques.clique_number));
    rows.emplace_back("maximal_clique_count", count_text(cliques.cliques.size()));
    const auto cores = core_decomposition(g);
    rows.emplace_back("max_coreness", count_text(cores.empty() ? std::size_t{0}
                                                               : *std::max_element(cores.begin(), cores.end())));
    if (g.order() > 0) {
        double strength = 0.0;
        std::int64_t max_strength = 0;
        for (std::size_t v = 0; v < g.order(); ++v) {
            strength += static_cast<double>(g.strength(v));
            max_strength = std::max(max_strength, g.strength(v));
        }
        rows.emplace_back("mean_strength", format_number(strength / static_cast<double>(g.order())));
        rows.emplace_back("max_strength", count_text(max_strength));
    } else {
        rows.emplace_back("mean_strength", na);
        rows.emplace_back("max_strength", na);
    }
    if (g.total_weight() > 0) {
        const auto greedy = fast_greedy(g);
        rows.emplace_back("fast_greedy_communities", count_text(greedy.partition.community_count()));
        rows.emplace_back("fast_greedy_modularity", format_number(greedy.modularity));
    } else {
        rows.emplace_back("fast_greedy_communities", na);
        rows.emplace_back("fast_greedy_modularity", na);
    }
    return rows;
}

namespace {

std::optional<StrengthSummary> summarize(std::vector<double> values) {
    if (values.empty()) {
        return std::nullopt;
    }
    return strength_summary(values);
}

std::optional<StrengthSummary> bipartite_strengths(const IncidenceMatrix &a, Side side) {
    std::vector<double> values;
    for (const auto &d : degree_and_strength(a, side)) {
        values.push_back(static_cast<double>(d.strength));
    }
    return summarize(std::move(values));
}

std::optional<StrengthSummary> graph_strengths(const WeightedGraph &g) {
    std::vector<double> values;
    for (std::size_t v = 0; v < g.order(); ++v) {
        values.push_back(static_cast<double>(g.strength(v)));
    }
    return summarize(std::move(values));
}

std::string node_table(const WeightedGraph &g) {
    const auto cores = core_decomposition(g);
    const auto clustering = local_clustering(g);
    const auto betweenness = betweenness_centrality(g);
    std::ostringstream out;
    out << "node,faction,degree,strength,coreness,clustering,betweenness\n";
    for (std::size_t v = 0; v < g.order(); ++v) {
        out << csv::escape(g.ids()[v]) << ',' << csv::escape(g.attributes()[v].faction) << ',' << g.degree(v)
            << ',' << g.strength(v) << ',' << cores[v] << ',' << format_number(clustering[v]) << ','
            << format_number(betweenness[v]) << '\n';
    }
    return out.str();
}

std::string degree_table(const IncidenceMatrix &a) {
    std::ostringstream out;
    out << "side,node,degree,strength\n";
    for (auto side : {Side::municipalities, Side::structures}) {
        for (const auto &d : degree_and_strength(a, side)) {
            out << to_string(side) << ',' << csv::escape(d.id) << ',' << d.degree << ',' << d.strength << '\n';
        }
    }
    return out.str();
}

std::string clique_size_table(const WeightedGraph &g) {
    std::ostringstream out;
    out << "size,count\n";
    for (const auto &[size, count] : maximal_cliques(g).size_distribution) {
        out << size << ',' << count << '\n';
    }
    return out.str();
}

/// Everything computed for one incidence matrix that also feeds the summary tables.
struct PeriodMetrics {
    MetricRows bipartite;
    MetricRows projection[2];
    std::optional<StrengthSummary> strengths[4];
    WeightedGraph graphs[2];
};

constexpr std::array<std::string_view, 4> strength_labels{"bipartite_municipalities", "bipartite_structures",
                                                          "projection_municipalities", "projection_structures"};

PeriodMetrics compute_metrics(const IncidenceMatrix &a, const std::vector<GroupTimeline> &timelines,
                              const std::string &prefix, OutputSet &out) {
    PeriodMetrics m;
    m.bipartite = bipartite_metric_rows(a);
    out.add(prefix + "bipartite_metrics.csv", metrics_to_csv(m.bipartite));
    out.add(prefix + "bipartite_degrees.csv", degree_table(a));
    m.strengths[0] = bipartite_strengths(a, Side::municipalities);
    m.strengths[1] = bipartite_strengths(a, Side::structures);
    for (auto side : {Side::municipalities, Side::structures}) {
        const auto s = static_cast<std::size_t>(side);
        m.graphs[s] = labeled_projection(a, side, timelines);
        const auto &g = m.graphs[s];
        const auto dir = prefix + std::string{to_string(side)} + "/";
        out.add(dir + "projection.graphml", export_graph(g, GraphFormat::graphml));
        out.add(dir + "projection_edges.csv", export_graph(g, GraphFormat::edgelist_csv));
        m.projection[s] = projection_metric_rows(g);
        out.add(dir + "metrics.csv", metrics_to_csv(m.projection[s]));
        out.add(dir + "nodes.csv", node_table(g));
        out.add(dir + "clique_sizes.csv", clique_size_table(g));
        m.strengths[2 + s] = graph_strengths(g);
    }
    std::vector<std::pair<std::string, StrengthSummary>> rows;
    for (std::size_t k = 0; k < strength_labels.size(); ++k) {
        if (m.strengths[k]) {
            rows.emplace_back(std::string{strength_labels[k]}, *m.strengths[k]);
        }
    }
    out.add(prefix + "strength_summary.csv", strength_table_to_csv("graph", rows));
    return m;
}

std::string wide_table(const std::vector<std::string> &labels, const std::vector<const MetricRows *> &rows) {
    std::ostringstream out;
    out << "period";
    if (!rows.empty()) {
        for (const auto &[name, value] : *rows.front()) {
            out << ',' << name;
        }
    }
    out << '\n';
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out << labels[i];
        for (const auto &[name, value] : *rows[i]) {
            out << ',' << value;
        }
        out << '\n';
    }
    return out.str();
}

} // namespace

void add_metric_outputs(const IncidenceMatrix &a, const std::vector<GroupTimeline> &timelines,
                        const std::string &prefix, OutputSet &out) {
    compute_metrics(a, timelines, prefix, out);
}

// ---------------------------------------------------------------------------
// Communities

SbmStageResult add_sbm_outputs(const WeightedGraph &g, const RunConfig &config, const std::string &prefix,
                               OutputSet &out) {
    SbmStageResult result;
    result.partition.node_ids = g.ids();
    if (g.order() < 2) {
        result.partition.partition = Partition::whole(g.order());
        out.add(prefix + "partition.csv", partition_to_csv(result.partition));
        return result;
    }
    const auto em = em_config(config);
    const auto q_max = std::min(config.q_max, g.order());
    const auto q_min = std::min(config.q_min, q_max);
    auto selection = select_communities(g, q_min, q_max, em);
    out.add(prefix + "icl_curve.csv", icl_curve_to_csv(selection.curve));
    out.add(prefix + "fit.json", fit_to_json(selection.best, g.ids()).dump(2) + "\n");
    result.partition.partition = selection.best.map_partition;
    out.add(prefix + "partition.csv", partition_to_csv(result.partition));
    out.add(prefix + "community_stats.csv",
            community_stats_to_csv(community_vertex_stats(g, selection.best.map_partition)));
    if (config.gof_enabled) {
        if (!config.gof_seed) {
            throw ConfigError({"an explicit GOF seed is required (--seed, --gof-seed, or gof.seed)"});
        }
        GofOptions options;
        options.membership = config.membership;
        options.threads = config.threads;
        auto report = gof_report(g, selection.best, config.n_sims, *config.gof_seed, options);
        out.add(prefix + "gof_report.csv", gof_report_to_csv(report));
        out.add(prefix + "gof_draws.csv", gof_draws_to_csv(report));
        result.gof = std::move(report);
    }
    result.fit = std::move(selection.best);
    return result;
}

// ---------------------------------------------------------------------------
// Full run

RunOutcome run_pipeline(const RunConfig &config) {
    RunOutcome outcome;
    try {
        validate_run_config(config);
        const auto corpus = load_corpus(config);
        const auto n_periods = corpus.periods.size();

        struct PeriodState {
            OutputSet out;
            PeriodMetrics metrics;
            std::vector<SbmStageResult> sbm;
        };
        std::vector<PeriodState> states(n_periods);
        parallel_for(
            n_periods,
            [&](std::size_t t) {
                auto &state = states[t];
                const auto prefix = "periods/" + period_directory(corpus.periods, t) + "/";
                const auto it = corpus.buckets.find(t);
                const auto a = it == corpus.buckets.end() ? build_incidence(std::span<const EventRecord>{}) : build_incidence(it->second);
                state.metrics = compute_metrics(a, corpus.timelines, prefix, state.out);
                for (auto side : config.sbm_sides) {
                    const auto s = static_cast<std::uint64_t>(side);
                    auto local = config;
                    local.em_seed = derive_seed(*config.em_seed, {t, s});
                    if (config.gof_seed) {
                        local.gof_seed = derive_seed(*config.gof_seed, {t, s});
                    }
                    state.sbm.push_back(add_sbm_outputs(state.metrics.graphs[s], local,
                                                        prefix + std::string{to_string(side)} + "/sbm/",
                                                        state.out));
                }
            },
            config.threads);

        OutputSet out;
        add_ingest_outputs(corpus, out);
        out.add("run_config.json", run_config_to_json(config).dump(2) + "\n");

        std::vector<std::string> labels;
        std::vector<const MetricRows *> bipartite_rows;
        std::vector<const MetricRows *> projection_rows[2];
        for (std::size_t t = 0; t < n_periods; ++t) {
            labels.push_back(corpus.periods[t].label());
            bipartite_rows.push_back(&states[t].metrics.bipartite);
            projection_rows[0].push_back(&states[t].metrics.projection[0]);
            projection_rows[1].push_back(&states[t].metrics.projection[1]);
        }
        out.add("summary/bipartite_metrics.csv", wide_table(labels, bipartite_rows));
        for (auto side : {Side::municipalities, Side::structures}) {
            const auto s = static_cast<std::size_t>(side);
            out.add("summary/projection_metrics_" + std::string{to_string(side)} + ".csv",
                    wide_table(labels, projection_rows[s]));
        }
        for (std::size_t k = 0; k < strength_labels.size(); ++k) {
            std::vector<std::pair<std::string, StrengthSummary>> rows;
            for (std::size_t t = 0; t < n_periods; ++t) {
                if (const auto &s = states[t].metrics.strengths[k]) {
                    rows.emplace_back(labels[t], *s);
                }
            }
            out.add("summary/strength_" + std::string{strength_labels[k]} + ".csv",
                    strength_table_to_csv("period", rows));
        }

        for (std::size_t k = 0; k < config.sbm_sides.size(); ++k) {
            const auto side = std::string{to_string(config.sbm_sides[k])};
            std::ostringstream table;
            table << "period,nodes,q,icl,converged,compacted";
            if (config.gof_enabled) {
                table << ",statistics_in_envelope";
            }
            table << '\n';
            for (std::size_t t = 0; t < n_periods; ++t) {
                const auto &stage = states[t].sbm[k];
                table << labels[t] << ',' << stage.partition.node_ids.size() << ',';
                if (stage.fit) {
                    table << stage.fit->q << ',' << format_number(stage.fit->icl) << ','
                          << (stage.fit->converged ? "true" : "false") << ','
                          << (stage.fit->compacted ? "true" : "false");
                } else {
                    table << stage.partition.partition.community_count() << ",NA,NA,NA";
                }
                if (config.gof_enabled) {
                    if (stage.gof) {
                        const auto inside = std::count_if(stage.gof->statistics.begin(), stage.gof->statistics.end(),
                                                          [](const GofStatistic &s) { return s.in_envelope; });
                        table << ',' << inside;
                    } else {
                        table << ",NA";
                    }
                }
                table << '\n';
            }
            out.add("summary/sbm_" + side + ".csv", table.str());
            for (std::size_t t = 0; t + 1 < n_periods; ++t) {
                const auto flow = community_flow(states[t].sbm[k].partition, states[t + 1].sbm[k].partition);
                out.add("flows/" + side + "_" + labels[t] + "_" + labels[t + 1] + ".csv", flow_to_csv(flow));
            }
        }
        for (auto &state : states) {
            out.merge(std::move(state.out));
        }
        outcome.manifest = commit_outputs(out, config.output, config.overwrite);
    } catch (const ConfigError &e) {
        outcome.status = 2;
        outcome.diagnostics = e.problems();
    } catch (const InputError &e) {
        outcome.status = 3;
        outcome.diagnostics = e.diagnostics();
    } catch (const std::exception &e) {
        outcome.status = 1;
        outcome.diagnostics = {e.what()};
    }
    return outcome;
}

} // namespace conflictnet
