#pragma once

#include "conflictnet/incidence.hpp"

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace conflictnet {

enum class ViolenceType {
    selective_killing,
    forced_disappearance,
    massacre,
    kidnapping,
    recruitment,
    sexual_violence,
};

enum class Faction { farc, paramilitary, organized_crime };

std::string_view to_string(ViolenceType type) noexcept;
std::string_view to_string(Faction faction) noexcept;
std::optional<ViolenceType> parse_violence_type(std::string_view label);
std::optional<Faction> parse_faction(std::string_view label);

/// One attributed victimization event.
struct EventRecord {
    std::string municipality_id;
    std::string group_id;
    int year = 0;
    ViolenceType violence_type = ViolenceType::selective_killing;
    std::int64_t victim_count = 1;

    friend bool operator==(const EventRecord &, const EventRecord &) = default;
};

/// Activity span of one armed structure, inclusive on both ends.
struct GroupTimeline {
    std::string group_id;
    int active_from = 0;
    int active_to = 0;
    Faction faction = Faction::farc;
};

struct Period {
    int start_year;
    int end_year;

    std::string label() const;
    bool contains(int year) const noexcept { return start_year <= year && year <= end_year; }
    friend bool operator==(const Period &, const Period &) = default;
};

/// Contiguous, sorted, non-overlapping inclusive year intervals.
class PeriodPartition {
public:
    /// Throws std::invalid_argument when intervals are empty, reversed, overlap,
    /// or leave a gap.
    explicit PeriodPartition(std::vector<Period> periods);

    /// The ten intervals 1978-1981 ... 2005-2007.
    static PeriodPartition standard();

    const std::vector<Period> &periods() const noexcept { return periods_; }
    std::size_t size() const noexcept { return periods_.size(); }
    const Period &operator[](std::size_t index) const { return periods_[index]; }
    int first_year() const noexcept { return periods_.front().start_year; }
    int last_year() const noexcept { return periods_.back().end_year; }

    std::optional<std::size_t> index_of(int year) const noexcept;

private:
    std::vector<Period> periods_;
};

/// Raised for input that cannot be parsed; `line()` is the 1-based line number
/// in the source (the header is line 1), or 0 when not tied to a line.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string &message);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Header names for the event columns.
struct ColumnMapping {
    std::string municipality_id = "municipality_id";
    std::string group_id = "group_id";
    std::string year = "year";
    std::string violence_type = "violence_type";
    std::string victim_count = "victim_count";
};

std::vector<EventRecord> parse_events(std::istream &source, const ColumnMapping &schema = {});
std::vector<GroupTimeline> parse_timelines(std::istream &source);
/// JSON array of [start, end] pairs.
PeriodPartition parse_periods(std::istream &source);

struct RejectedEvent {
    EventRecord event;
    std::string reason;
};

struct AttributionResult {
    std::vector<EventRecord> accepted;
    std::vector<RejectedEvent> rejected;
};

/// Splits events by whether their year lies inside the group's activity span.
/// Throws std::invalid_argument naming any group that has no timeline, or a
/// group with more than one timeline entry.
AttributionResult validate_attribution(std::span<const EventRecord> events,
                                       std::span<const GroupTimeline> timelines);

/// One bucket per period index (empty buckets included), events in input order.
/// Throws std::invalid_argument listing every event whose year is outside the
/// partition.
std::map<std::size_t, std::vector<EventRecord>> assign_periods(std::span<const EventRecord> events,
                                                               const PeriodPartition &partition);

/// Victim totals per (municipality, structure); ids sorted ascending.
IncidenceMatrix build_incidence(std::span<const EventRecord> events_in_period);

} // namespace conflictnet
