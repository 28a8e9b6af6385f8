#pragma once

#include "conflictnet/bipartite.hpp"
#include "conflictnet/flow.hpp"
#include "conflictnet/gof.hpp"
#include "conflictnet/graph.hpp"
#include "conflictnet/incidence.hpp"
#include "conflictnet/ingest.hpp"
#include "conflictnet/sbm.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace conflictnet {

struct RunConfig {
    std::filesystem::path events;
    std::filesystem::path timelines;
    /// Empty selects PeriodPartition::standard().
    std::filesystem::path periods;
    std::filesystem::path output;
    ColumnMapping columns;

    std::size_t q_min = 1;
    std::size_t q_max = 6;
    int restarts = 5;
    int max_iter = 500;
    double tol = 1e-6;
    PairCounting pair_counting = PairCounting::undirected_pairs;
    std::optional<std::uint64_t> em_seed;

    bool gof_enabled = true;
    std::size_t n_sims = 10000;
    std::optional<std::uint64_t> gof_seed;
    MembershipSampling membership = MembershipSampling::resample_from_theta;

    /// Projections that receive the SBM, GOF, and flow stages.
    std::vector<Side> sbm_sides{Side::municipalities};
    std::size_t threads = 0;
    bool overwrite = false;
};

/// Collects every problem found in a configuration.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> problems);
    const std::vector<std::string> &problems() const noexcept { return problems_; }

private:
    std::vector<std::string> problems_;
};

std::optional<Side> parse_side(std::string_view name);
std::optional<PairCounting> parse_pair_counting(std::string_view name);
std::optional<MembershipSampling> parse_membership(std::string_view name);
std::string_view to_string(MembershipSampling membership) noexcept;

/// Reads the JSON fields of RunConfig; relative paths resolve against `base_dir`.
/// Unknown keys and ill-typed values raise ConfigError.
RunConfig run_config_from_json(const nlohmann::json &doc, const std::filesystem::path &base_dir);

/// Every setting that affects results; the output location, overwrite flag,
/// and thread count are left out so identical runs serialize identically.
nlohmann::ordered_json run_config_to_json(const RunConfig &config);

/// Which optional parts of a RunConfig a command depends on.
struct ConfigRequirements {
    bool inputs = true;
    bool output = true;
    bool em_seed = true;
    /// Only checked when gof_enabled is set.
    bool gof_seed = true;
};

/// Throws ConfigError listing every violated constraint.
void validate_run_config(const RunConfig &config, const ConfigRequirements &requirements = {});

/// Throws ConfigError when em_seed is missing.
EmConfig em_config(const RunConfig &config);

/// Lower-case hex SHA-256.
std::string sha256_hex(std::string_view data);

struct ManifestEntry {
    std::string path;
    std::string sha256;
    std::size_t bytes = 0;

    friend bool operator==(const ManifestEntry &, const ManifestEntry &) = default;
};

/// Output files keyed by relative path ('/'-separated), held in memory until
/// committed.
class OutputSet {
public:
    /// Throws std::logic_error for a repeated path.
    void add(std::string relative_path, std::string content);
    void merge(OutputSet other);
    const std::map<std::string, std::string> &files() const noexcept { return files_; }
    std::vector<ManifestEntry> manifest() const;

private:
    std::map<std::string, std::string> files_;
};

std::string manifest_to_json(const std::vector<ManifestEntry> &entries);

/// Writes the files plus manifest.json into a staging directory next to
/// `directory` and renames it into place. An existing `directory` is an error
/// unless `overwrite` is set, in which case it is replaced.
std::vector<ManifestEntry> commit_outputs(const OutputSet &outputs, const std::filesystem::path &directory,
                                          bool overwrite);

/// Writes a single file through a temporary sibling and a rename.
void write_file_atomically(const std::filesystem::path &path, std::string_view content, bool overwrite);

/// Whole file contents; throws std::runtime_error naming the path.
std::string read_file(const std::filesystem::path &path);

/// Validated, period-binned input.
struct Corpus {
    PeriodPartition periods = PeriodPartition::standard();
    std::vector<GroupTimeline> timelines;
    AttributionResult attribution;
    std::map<std::size_t, std::vector<EventRecord>> buckets;
};

/// Raised by load_corpus; each diagnostic names a path, row, or group.
class InputError : public std::runtime_error {
public:
    explicit InputError(std::vector<std::string> diagnostics);
    const std::vector<std::string> &diagnostics() const noexcept { return diagnostics_; }

private:
    std::vector<std::string> diagnostics_;
};

Corpus load_corpus(const RunConfig &config);

/// Directory name of period `index`, e.g. "01_1978-1981".
std::string period_directory(const PeriodPartition &periods, std::size_t index);

/// Projection of `a` with structure nodes tagged by faction.
WeightedGraph labeled_projection(const IncidenceMatrix &a, Side side,
                                 const std::vector<GroupTimeline> &timelines);

using MetricRows = std::vector<std::pair<std::string, std::string>>;

MetricRows bipartite_metric_rows(const IncidenceMatrix &a);
/// Metrics undefined for a graph this small are reported as NA.
MetricRows projection_metric_rows(const WeightedGraph &g);

/// ingest/rejected.csv, ingest/summary.csv, and one incidence.csv per period.
void add_ingest_outputs(const Corpus &corpus, OutputSet &out);

/// Bipartite and projection tables for one incidence matrix under `prefix`.
void add_metric_outputs(const IncidenceMatrix &a, const std::vector<GroupTimeline> &timelines,
                        const std::string &prefix, OutputSet &out);

struct SbmStageResult {
    std::optional<SbmFit> fit;
    LabeledPartition partition;
    std::optional<GofReport> gof;
};

/// ICL sweep, best fit, partition, community table, and (if enabled) the GOF
/// report under `prefix`. Graphs with fewer than two nodes skip fitting and
/// place every node in one community. Seeds are taken from `config` as is.
SbmStageResult add_sbm_outputs(const WeightedGraph &g, const RunConfig &config, const std::string &prefix,
                               OutputSet &out);

struct RunOutcome {
    int status = 0;
    std::vector<ManifestEntry> manifest;
    /// Empty on success.
    std::vector<std::string> diagnostics;
};

/// Full pipeline. Nothing is written unless every stage succeeds.
RunOutcome run_pipeline(const RunConfig &config);

} // namespace conflictnet
