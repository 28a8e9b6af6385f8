#include "conflictnet/ingest.hpp"

#include "conflictnet/csv.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <set>
#include <sstream>
#include <unordered_map>
#include <utility>

namespace conflictnet {

namespace {

constexpr std::array<std::pair<ViolenceType, std::string_view>, 6> violence_labels{{
    {ViolenceType::selective_killing, "selective_killing"},
    {ViolenceType::forced_disappearance, "forced_disappearance"},
    {ViolenceType::massacre, "massacre"},
    {ViolenceType::kidnapping, "kidnapping"},
    {ViolenceType::recruitment, "recruitment"},
    {ViolenceType::sexual_violence, "sexual_violence"},
}};

constexpr std::array<std::pair<Faction, std::string_view>, 3> faction_labels{{
    {Faction::farc, "farc"},
    {Faction::paramilitary, "paramilitary"},
    {Faction::organized_crime, "organized_crime"},
}};

std::string lowercase(std::string_view text) {
    std::string out{csv::trim(text)};
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

template <typename T>
std::optional<T> parse_integer(std::string_view text) {
    text = csv::trim(text);
    T value{};
    const auto *end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc{} || ptr != end) {
        return std::nullopt;
    }
    return value;
}

/// Maps required header names to column positions.
std::vector<std::size_t> locate_columns(const std::vector<std::string> &header,
                                        const std::vector<std::string_view> &required) {
    std::vector<std::size_t> positions;
    for (auto name : required) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) {
            throw ParseError(1, "missing column '" + std::string{name} + "'");
        }
        positions.push_back(static_cast<std::size_t>(it - header.begin()));
    }
    return positions;
}

std::string describe(const EventRecord &e) {
    std::ostringstream out;
    out << "(" << e.municipality_id << ", " << e.group_id << ", " << e.year << ", "
        << to_string(e.violence_type) << ", " << e.victim_count << ")";
    return out.str();
}

} // namespace

std::string_view to_string(ViolenceType type) noexcept {
    for (const auto &[value, label] : violence_labels) {
        if (value == type) {
            return label;
        }
    }
    return "unknown";
}

std::string_view to_string(Faction faction) noexcept {
    for (const auto &[value, label] : faction_labels) {
        if (value == faction) {
            return label;
        }
    }
    return "unknown";
}

std::optional<ViolenceType> parse_violence_type(std::string_view label) {
    const auto key = lowercase(label);
    for (const auto &[value, name] : violence_labels) {
        if (name == key) {
            return value;
        }
    }
    return std::nullopt;
}

std::optional<Faction> parse_faction(std::string_view label) {
    const auto key = lowercase(label);
    for (const auto &[value, name] : faction_labels) {
        if (name == key) {
            return value;
        }
    }
    return std::nullopt;
}

std::string Period::label() const {
    return std::to_string(start_year) + "-" + std::to_string(end_year);
}

PeriodPartition::PeriodPartition(std::vector<Period> periods) : periods_{std::move(periods)} {
    if (periods_.empty()) {
        throw std::invalid_argument("period partition: no periods");
    }
    for (std::size_t i = 0; i < periods_.size(); ++i) {
        const auto &p = periods_[i];
        if (p.start_year > p.end_year) {
            throw std::invalid_argument("period partition: reversed interval " + p.label());
        }
        if (i > 0) {
            const auto &prev = periods_[i - 1];
            if (p.start_year <= prev.end_year) {
                throw std::invalid_argument("period partition: " + prev.label() + " and " +
                                            p.label() + " overlap or are unsorted");
            }
            if (p.start_year != prev.end_year + 1) {
                throw std::invalid_argument("period partition: gap between " + prev.label() +
                                            " and " + p.label());
            }
        }
    }
}

PeriodPartition PeriodPartition::standard() {
    return PeriodPartition{{{1978, 1981},
                            {1982, 1984},
                            {1985, 1987},
                            {1988, 1990},
                            {1991, 1993},
                            {1994, 1996},
                            {1997, 1999},
                            {2000, 2001},
                            {2002, 2004},
                            {2005, 2007}}};
}

std::optional<std::size_t> PeriodPartition::index_of(int year) const noexcept {
    auto it = std::lower_bound(periods_.begin(), periods_.end(), year,
                               [](const Period &p, int y) { return p.end_year < y; });
    if (it == periods_.end() || !it->contains(year)) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - periods_.begin());
}

ParseError::ParseError(std::size_t line, const std::string &message)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
      line_{line} {}

std::vector<EventRecord> parse_events(std::istream &source, const ColumnMapping &schema) {
    std::string line;
    if (!csv::read_line(source, line)) {
        throw ParseError(0, "event file has no header row");
    }
    const auto header = csv::split_line(line);
    const auto cols = locate_columns(header, {schema.municipality_id, schema.group_id,
                                              schema.year, schema.violence_type,
                                              schema.victim_count});

    std::vector<EventRecord> events;
    std::size_t line_no = 1;
    while (csv::read_line(source, line)) {
        ++line_no;
        if (csv::trim(line).empty()) {
            continue;
        }
        const auto fields = csv::split_line(line);
        if (fields.size() != header.size()) {
            throw ParseError(line_no, "expected " + std::to_string(header.size()) +
                                          " fields, found " + std::to_string(fields.size()));
        }
        EventRecord event;
        event.municipality_id = fields[cols[0]];
        event.group_id = fields[cols[1]];
        if (event.municipality_id.empty() || event.group_id.empty()) {
            throw ParseError(line_no, "empty municipality or group code");
        }
        const auto year = parse_integer<int>(fields[cols[2]]);
        if (!year) {
            throw ParseError(line_no, "non-numeric year '" + fields[cols[2]] + "'");
        }
        event.year = *year;
        const auto type = parse_violence_type(fields[cols[3]]);
        if (!type) {
            throw ParseError(line_no, "unknown violence_type '" + fields[cols[3]] + "'");
        }
        event.violence_type = *type;
        const auto count = parse_integer<std::int64_t>(fields[cols[4]]);
        if (!count) {
            throw ParseError(line_no, "non-numeric victim_count '" + fields[cols[4]] + "'");
        }
        if (*count <= 0) {
            throw ParseError(line_no, "nonpositive count " + std::to_string(*count));
        }
        event.victim_count = *count;
        events.push_back(std::move(event));
    }
    return events;
}

std::vector<GroupTimeline> parse_timelines(std::istream &source) {
    std::string line;
    if (!csv::read_line(source, line)) {
        throw ParseError(0, "timeline file has no header row");
    }
    const auto header = csv::split_line(line);
    const auto cols = locate_columns(header, {"group_id", "active_from", "active_to", "faction"});

    std::vector<GroupTimeline> timelines;
    std::size_t line_no = 1;
    while (csv::read_line(source, line)) {
        ++line_no;
        if (csv::trim(line).empty()) {
            continue;
        }
        const auto fields = csv::split_line(line);
        if (fields.size() != header.size()) {
            throw ParseError(line_no, "expected " + std::to_string(header.size()) +
                                          " fields, found " + std::to_string(fields.size()));
        }
        GroupTimeline timeline;
        timeline.group_id = fields[cols[0]];
        const auto from = parse_integer<int>(fields[cols[1]]);
        const auto to = parse_integer<int>(fields[cols[2]]);
        if (!from || !to) {
            throw ParseError(line_no, "non-numeric activity year");
        }
        if (*from > *to) {
            throw ParseError(line_no, "active_from after active_to for '" + timeline.group_id + "'");
        }
        timeline.active_from = *from;
        timeline.active_to = *to;
        const auto faction = parse_faction(fields[cols[3]]);
        if (!faction) {
            throw ParseError(line_no, "unknown faction '" + fields[cols[3]] + "'");
        }
        timeline.faction = *faction;
        timelines.push_back(std::move(timeline));
    }
    return timelines;
}

PeriodPartition parse_periods(std::istream &source) {
    nlohmann::json doc;
    try {
        source >> doc;
    } catch (const nlohmann::json::exception &e) {
        throw ParseError(0, std::string{"periods: "} + e.what());
    }
    if (!doc.is_array()) {
        throw ParseError(0, "periods: expected a JSON array of [start, end] pairs");
    }
    std::vector<Period> periods;
    for (const auto &item : doc) {
        if (!item.is_array() || item.size() != 2 || !item[0].is_number_integer() ||
            !item[1].is_number_integer()) {
            throw ParseError(0, "periods: each entry must be an integer [start, end] pair");
        }
        periods.push_back({item[0].get<int>(), item[1].get<int>()});
    }
    return PeriodPartition{std::move(periods)};
}

AttributionResult validate_attribution(std::span<const EventRecord> events,
                                       std::span<const GroupTimeline> timelines) {
    std::unordered_map<std::string, const GroupTimeline *> by_group;
    for (const auto &t : timelines) {
        if (!by_group.emplace(t.group_id, &t).second) {
            throw std::invalid_argument("group '" + t.group_id + "' has more than one timeline entry");
        }
    }

    std::set<std::string> missing;
    for (const auto &e : events) {
        if (!by_group.contains(e.group_id)) {
            missing.insert(e.group_id);
        }
    }
    if (!missing.empty()) {
        std::string names;
        for (const auto &name : missing) {
            names += (names.empty() ? "" : ", ") + name;
        }
        throw std::invalid_argument("no timeline entry for group(s): " + names);
    }

    AttributionResult result;
    for (const auto &e : events) {
        const auto &t = *by_group.at(e.group_id);
        if (e.year < t.active_from || e.year > t.active_to) {
            result.rejected.push_back({e, "outside activity interval"});
        } else {
            result.accepted.push_back(e);
        }
    }
    return result;
}

std::map<std::size_t, std::vector<EventRecord>> assign_periods(std::span<const EventRecord> events,
                                                               const PeriodPartition &partition) {
    std::map<std::size_t, std::vector<EventRecord>> buckets;
    for (std::size_t i = 0; i < partition.size(); ++i) {
        buckets[i];
    }
    std::string offenders;
    for (const auto &e : events) {
        if (auto index = partition.index_of(e.year)) {
            buckets[*index].push_back(e);
        } else {
            offenders += "\n  " + describe(e);
        }
    }
    if (!offenders.empty()) {
        throw std::invalid_argument("events outside the study window " +
                                    std::to_string(partition.first_year()) + "-" +
                                    std::to_string(partition.last_year()) + ":" + offenders);
    }
    return buckets;
}

IncidenceMatrix build_incidence(std::span<const EventRecord> events_in_period) {
    std::map<std::string, std::size_t> rows;
    std::map<std::string, std::size_t> cols;
    for (const auto &e : events_in_period) {
        rows.emplace(e.municipality_id, 0);
        cols.emplace(e.group_id, 0);
    }
    std::vector<std::string> row_ids;
    std::vector<std::string> col_ids;
    for (auto &[id, index] : rows) {
        index = row_ids.size();
        row_ids.push_back(id);
    }
    for (auto &[id, index] : cols) {
        index = col_ids.size();
        col_ids.push_back(id);
    }
    std::vector<std::int64_t> entries(row_ids.size() * col_ids.size(), 0);
    for (const auto &e : events_in_period) {
        entries[rows.at(e.municipality_id) * col_ids.size() + cols.at(e.group_id)] += e.victim_count;
    }
    return IncidenceMatrix{std::move(row_ids), std::move(col_ids), std::move(entries)};
}

} // namespace conflictnet
