#include "conflictnet/community_stats.hpp"
#include "conflictnet/flow.hpp"
#include "conflictnet/gof.hpp"
#include "conflictnet/graph_io.hpp"
#include "conflictnet/pipeline.hpp"
#include "conflictnet/projection.hpp"
#include "conflictnet/report.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace conflictnet;

namespace {

constexpr int exit_failure = 1;
constexpr int exit_config = 2;
constexpr int exit_input = 3;

/// Flag values; each is applied over the config file only when given.
struct Flags {
    std::string config;
    std::string events, timelines, periods, output;
    std::string col_municipality, col_group, col_year, col_violence, col_count;
    std::size_t q_min = 0, q_max = 0;
    int restarts = 0, max_iter = 0;
    double tol = 0.0;
    std::string pair_counting;
    std::uint64_t seed = 0, em_seed = 0, gof_seed = 0;
    std::size_t n_sims = 0;
    std::string membership;
    bool no_gof = false;
    std::vector<std::string> sides;
    std::size_t threads = 0;
    bool overwrite = false;

    // Stage-specific inputs.
    std::string incidence, graph, graph_format, fit, previous, next, side = "municipalities", format = "graphml";
};

struct Options {
    CLI::Option *config = nullptr;
    std::map<std::string, CLI::Option *> by_name;

    bool given(const std::string &name) const {
        auto it = by_name.find(name);
        return it != by_name.end() && it->second->count() > 0;
    }
};

void add_common(CLI::App &app, Flags &f, Options &o) {
    o.config = app.add_option("--config", f.config, "JSON configuration file; flags override its fields")
                   ->check(CLI::ExistingFile);
    o.by_name["threads"] = app.add_option("--threads", f.threads, "Worker threads (0 = all cores)");
    o.by_name["overwrite"] = app.add_flag("--overwrite", f.overwrite, "Replace an existing output");
}

void add_output(CLI::App &app, Flags &f, Options &o, const std::string &what) {
    o.by_name["output"] = app.add_option("-o,--output", f.output, what);
}

void add_inputs(CLI::App &app, Flags &f, Options &o) {
    o.by_name["events"] = app.add_option("--events", f.events, "Event records CSV");
    o.by_name["timelines"] = app.add_option("--timelines", f.timelines, "Group timelines CSV");
    o.by_name["periods"] = app.add_option("--periods", f.periods, "Periods JSON (default: ten standard intervals)");
    o.by_name["col_municipality"] =
        app.add_option("--col-municipality", f.col_municipality, "Header of the municipality column");
    o.by_name["col_group"] = app.add_option("--col-group", f.col_group, "Header of the group column");
    o.by_name["col_year"] = app.add_option("--col-year", f.col_year, "Header of the year column");
    o.by_name["col_violence"] = app.add_option("--col-violence", f.col_violence, "Header of the violence type column");
    o.by_name["col_count"] = app.add_option("--col-count", f.col_count, "Header of the victim count column");
}

void add_em(CLI::App &app, Flags &f, Options &o) {
    o.by_name["q_min"] = app.add_option("--q-min", f.q_min, "Smallest number of blocks (default 1)");
    o.by_name["q_max"] = app.add_option("--q-max", f.q_max, "Largest number of blocks (default 6)");
    o.by_name["restarts"] = app.add_option("--restarts", f.restarts, "EM initializations per block count (default 5)");
    o.by_name["max_iter"] = app.add_option("--max-iter", f.max_iter, "EM iteration cap (default 500)");
    o.by_name["tol"] = app.add_option("--tol", f.tol, "Relative bound change that stops EM (default 1e-6)");
    o.by_name["pair_counting"] =
        app.add_option("--pair-counting", f.pair_counting, "undirected_pairs (default) or product_of_sizes")
            ->check(CLI::IsMember({"undirected_pairs", "product_of_sizes"}));
    o.by_name["em_seed"] = app.add_option("--em-seed", f.em_seed, "EM seed (overrides --seed for EM)");
}

void add_gof(CLI::App &app, Flags &f, Options &o, bool toggle) {
    o.by_name["n_sims"] = app.add_option("--n-sims", f.n_sims, "Simulated graphs (default 10000)");
    o.by_name["membership"] =
        app.add_option("--membership", f.membership, "resample_from_theta (default) or condition_on_map")
            ->check(CLI::IsMember({"resample_from_theta", "condition_on_map"}));
    o.by_name["gof_seed"] = app.add_option("--gof-seed", f.gof_seed, "GOF seed (overrides --seed for GOF)");
    if (toggle) {
        o.by_name["no_gof"] = app.add_flag("--no-gof", f.no_gof, "Skip the goodness-of-fit stage");
    }
}

void add_seed(CLI::App &app, Flags &f, Options &o) {
    o.by_name["seed"] = app.add_option("--seed", f.seed, "Master seed for every randomized stage (required)");
}

RunConfig resolve(const Flags &f, const Options &o) {
    RunConfig config;
    if (o.config && o.config->count() > 0) {
        const fs::path path{f.config};
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(read_file(path));
        } catch (const nlohmann::json::exception &e) {
            throw ConfigError({path.string() + ": " + e.what()});
        }
        config = run_config_from_json(doc, path.parent_path());
    }
    if (o.given("events")) config.events = f.events;
    if (o.given("timelines")) config.timelines = f.timelines;
    if (o.given("periods")) config.periods = f.periods;
    if (o.given("output")) config.output = f.output;
    if (o.given("col_municipality")) config.columns.municipality_id = f.col_municipality;
    if (o.given("col_group")) config.columns.group_id = f.col_group;
    if (o.given("col_year")) config.columns.year = f.col_year;
    if (o.given("col_violence")) config.columns.violence_type = f.col_violence;
    if (o.given("col_count")) config.columns.victim_count = f.col_count;
    if (o.given("q_min")) config.q_min = f.q_min;
    if (o.given("q_max")) config.q_max = f.q_max;
    if (o.given("restarts")) config.restarts = f.restarts;
    if (o.given("max_iter")) config.max_iter = f.max_iter;
    if (o.given("tol")) config.tol = f.tol;
    if (o.given("pair_counting")) config.pair_counting = *parse_pair_counting(f.pair_counting);
    if (o.given("seed")) {
        config.em_seed = f.seed;
        config.gof_seed = f.seed;
    }
    if (o.given("em_seed")) config.em_seed = f.em_seed;
    if (o.given("gof_seed")) config.gof_seed = f.gof_seed;
    if (o.given("n_sims")) config.n_sims = f.n_sims;
    if (o.given("membership")) config.membership = *parse_membership(f.membership);
    if (o.given("no_gof")) config.gof_enabled = !f.no_gof;
    if (o.given("sides")) {
        config.sbm_sides.clear();
        for (const auto &s : f.sides) {
            config.sbm_sides.push_back(*parse_side(s));
        }
    }
    if (o.given("threads")) config.threads = f.threads;
    if (o.given("overwrite")) config.overwrite = f.overwrite;
    return config;
}

GraphFormat infer_format(const std::string &path, const std::string &explicit_format) {
    if (!explicit_format.empty()) {
        return parse_graph_format(explicit_format);
    }
    const auto ext = fs::path{path}.extension().string();
    if (ext == ".graphml" || ext == ".xml") return GraphFormat::graphml;
    if (ext == ".json") return GraphFormat::json;
    if (ext == ".csv") return GraphFormat::edgelist_csv;
    throw std::invalid_argument("cannot infer the graph format of '" + path + "'; pass --graph-format");
}

WeightedGraph load_graph(const Flags &f) {
    if (f.graph.empty()) {
        throw ConfigError({"--graph is required"});
    }
    return parse_graph(read_file(f.graph), infer_format(f.graph, f.graph_format));
}

void report(const OutputSet &out, const fs::path &dir, bool overwrite) {
    const auto entries = commit_outputs(out, dir, overwrite);
    std::cout << "wrote " << entries.size() << " files to " << dir.string() << "\n";
}

int cmd_ingest(const Flags &f, const Options &o) {
    const auto config = resolve(f, o);
    validate_run_config(config, {.inputs = true, .output = true, .em_seed = false, .gof_seed = false});
    const auto corpus = load_corpus(config);
    OutputSet out;
    add_ingest_outputs(corpus, out);
    report(out, config.output, config.overwrite);
    std::cout << corpus.attribution.accepted.size() << " events accepted, " << corpus.attribution.rejected.size()
              << " rejected\n";
    return 0;
}

int cmd_metrics(const Flags &f, const Options &o) {
    const auto config = resolve(f, o);
    OutputSet out;
    if (!f.incidence.empty()) {
        validate_run_config(config, {.inputs = false, .output = true, .em_seed = false, .gof_seed = false});
        std::vector<GroupTimeline> timelines;
        if (!config.timelines.empty()) {
            std::istringstream in{read_file(config.timelines)};
            timelines = parse_timelines(in);
        }
        add_metric_outputs(incidence_from_csv(read_file(f.incidence)), timelines, "", out);
    } else {
        validate_run_config(config, {.inputs = true, .output = true, .em_seed = false, .gof_seed = false});
        const auto corpus = load_corpus(config);
        for (std::size_t t = 0; t < corpus.periods.size(); ++t) {
            const auto it = corpus.buckets.find(t);
            const auto a = it == corpus.buckets.end() ? build_incidence(std::span<const EventRecord>{})
                                                      : build_incidence(it->second);
            add_metric_outputs(a, corpus.timelines, "periods/" + period_directory(corpus.periods, t) + "/", out);
        }
    }
    report(out, config.output, config.overwrite);
    return 0;
}

int cmd_project(const Flags &f, const Options &o) {
    const auto config = resolve(f, o);
    if (f.incidence.empty()) {
        throw ConfigError({"--incidence is required"});
    }
    if (config.output.empty()) {
        throw ConfigError({"output file is required (--output)"});
    }
    const auto side = parse_side(f.side);
    if (!side) {
        throw ConfigError({"--side must be municipalities or structures"});
    }
    const auto format = parse_graph_format(f.format);
    std::vector<GroupTimeline> timelines;
    if (!config.timelines.empty()) {
        std::istringstream in{read_file(config.timelines)};
        timelines = parse_timelines(in);
    }
    const auto g = labeled_projection(incidence_from_csv(read_file(f.incidence)), *side, timelines);
    write_file_atomically(config.output, export_graph(g, format), config.overwrite);
    std::cout << "wrote " << config.output.string() << " (" << g.order() << " nodes, " << g.size() << " edges)\n";
    return 0;
}

int cmd_sbm(const Flags &f, const Options &o) {
    auto config = resolve(f, o);
    config.gof_enabled = false;
    validate_run_config(config, {.inputs = false, .output = true, .em_seed = true, .gof_seed = false});
    const auto g = load_graph(f);
    OutputSet out;
    const auto stage = add_sbm_outputs(g, config, "", out);
    report(out, config.output, config.overwrite);
    if (stage.fit) {
        std::cout << "selected q = " << stage.fit->q << ", icl = " << format_number(stage.fit->icl) << "\n";
    }
    return 0;
}

int cmd_gof(const Flags &f, const Options &o) {
    const auto config = resolve(f, o);
    validate_run_config(config, {.inputs = false, .output = true, .em_seed = false, .gof_seed = true});
    if (!config.gof_seed) {
        throw ConfigError({"an explicit GOF seed is required (--seed, --gof-seed, or gof.seed)"});
    }
    if (f.fit.empty()) {
        throw ConfigError({"--fit is required"});
    }
    const auto g = load_graph(f);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_file(f.fit));
    } catch (const nlohmann::json::exception &e) {
        throw std::runtime_error(f.fit + ": " + e.what());
    }
    const auto fit = fit_from_json(doc);
    if (fit_node_ids(doc) != g.ids()) {
        throw std::runtime_error("fit '" + f.fit + "' was not estimated on the nodes of '" + f.graph + "'");
    }
    GofOptions options;
    options.membership = config.membership;
    options.threads = config.threads;
    const auto result = gof_report(g, fit, config.n_sims, *config.gof_seed, options);
    OutputSet out;
    out.add("gof_report.csv", gof_report_to_csv(result));
    out.add("gof_draws.csv", gof_draws_to_csv(result));
    report(out, config.output, config.overwrite);
    return 0;
}

int cmd_flow(const Flags &f, const Options &o) {
    const auto config = resolve(f, o);
    if (f.previous.empty() || f.next.empty()) {
        throw ConfigError({"--previous and --next are required"});
    }
    if (config.output.empty()) {
        throw ConfigError({"output file is required (--output)"});
    }
    const auto flow = community_flow(partition_from_csv(read_file(f.previous)), partition_from_csv(read_file(f.next)));
    write_file_atomically(config.output, flow_to_csv(flow), config.overwrite);
    std::cout << "wrote " << config.output.string() << "\n";
    return 0;
}

int cmd_run(const Flags &f, const Options &o) {
    const auto config = resolve(f, o);
    const auto outcome = run_pipeline(config);
    if (outcome.status != 0) {
        for (const auto &d : outcome.diagnostics) {
            std::cerr << "error: " << d << "\n";
        }
        return outcome.status;
    }
    std::cout << "wrote " << outcome.manifest.size() << " files to " << config.output.string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"conflictnet: conflict event networks, block models, and goodness of fit"};
    app.require_subcommand(1);

    Flags f;
    std::map<std::string, Options> options;

    auto *ingest = app.add_subcommand("ingest", "Validate events and write per-period incidence matrices");
    add_common(*ingest, f, options["ingest"]);
    add_inputs(*ingest, f, options["ingest"]);
    add_output(*ingest, f, options["ingest"], "Output directory");

    auto *metrics = app.add_subcommand("metrics", "Bipartite and projection metric tables");
    add_common(*metrics, f, options["metrics"]);
    add_inputs(*metrics, f, options["metrics"]);
    add_output(*metrics, f, options["metrics"], "Output directory");
    metrics->add_option("--incidence", f.incidence, "Single incidence CSV instead of the event inputs")
        ->check(CLI::ExistingFile);

    auto *project = app.add_subcommand("project", "One-mode projection of an incidence matrix");
    add_common(*project, f, options["project"]);
    add_output(*project, f, options["project"], "Output graph file");
    options["project"].by_name["timelines"] =
        project->add_option("--timelines", f.timelines, "Group timelines CSV for faction attributes");
    project->add_option("--incidence", f.incidence, "Incidence CSV")->check(CLI::ExistingFile);
    project->add_option("--side", f.side, "municipalities (default) or structures");
    project->add_option("--format", f.format, "graphml (default), edgelist_csv, or json");

    auto *sbm = app.add_subcommand("sbm", "Poisson SBM fits over a range of block counts with ICL selection");
    add_common(*sbm, f, options["sbm"]);
    add_output(*sbm, f, options["sbm"], "Output directory");
    add_em(*sbm, f, options["sbm"]);
    add_seed(*sbm, f, options["sbm"]);
    sbm->add_option("--graph", f.graph, "Graph file (GraphML, edge-list CSV, or JSON)")->check(CLI::ExistingFile);
    sbm->add_option("--graph-format", f.graph_format, "Graph format when the extension is ambiguous");

    auto *gof = app.add_subcommand("gof", "Goodness of fit of a fitted SBM by simulation");
    add_common(*gof, f, options["gof"]);
    add_output(*gof, f, options["gof"], "Output directory");
    add_gof(*gof, f, options["gof"], false);
    add_seed(*gof, f, options["gof"]);
    gof->add_option("--graph", f.graph, "Observed graph file")->check(CLI::ExistingFile);
    gof->add_option("--graph-format", f.graph_format, "Graph format when the extension is ambiguous");
    gof->add_option("--fit", f.fit, "fit.json written by the sbm stage")->check(CLI::ExistingFile);

    auto *flow = app.add_subcommand("flow", "Community flow between two partitions");
    add_common(*flow, f, options["flow"]);
    add_output(*flow, f, options["flow"], "Output CSV file");
    flow->add_option("--previous", f.previous, "Earlier partition CSV (node,community)")->check(CLI::ExistingFile);
    flow->add_option("--next", f.next, "Later partition CSV (node,community)")->check(CLI::ExistingFile);

    auto *run = app.add_subcommand("run", "Full pipeline from events to flows and goodness of fit");
    add_common(*run, f, options["run"]);
    add_inputs(*run, f, options["run"]);
    add_output(*run, f, options["run"], "Output directory");
    add_em(*run, f, options["run"]);
    add_gof(*run, f, options["run"], true);
    add_seed(*run, f, options["run"]);
    options["run"].by_name["sides"] =
        run->add_option("--sides", f.sides, "Projections for SBM, GOF and flows (default municipalities)")
            ->check(CLI::IsMember({"municipalities", "structures"}));

    CLI11_PARSE(app, argc, argv);

    try {
        for (auto *sub : app.get_subcommands()) {
            const auto name = sub->get_name();
            const auto &o = options[name];
            if (name == "ingest") return cmd_ingest(f, o);
            if (name == "metrics") return cmd_metrics(f, o);
            if (name == "project") return cmd_project(f, o);
            if (name == "sbm") return cmd_sbm(f, o);
            if (name == "gof") return cmd_gof(f, o);
            if (name == "flow") return cmd_flow(f, o);
            if (name == "run") return cmd_run(f, o);
        }
    } catch (const ConfigError &e) {
        for (const auto &p : e.problems()) {
            std::cerr << "error: " << p << "\n";
        }
        return exit_config;
    } catch (const InputError &e) {
        for (const auto &d : e.diagnostics()) {
            std::cerr << "error: " << d << "\n";
        }
        return exit_input;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_failure;
    }
    return exit_failure;
}
