#include "conflictnet/ingest.hpp"

#include <doctest.h>

#include <algorithm>
#include <functional>
#include <random>
#include <sstream>

using namespace conflictnet;

namespace {

std::vector<EventRecord> parse(const std::string &text) {
    std::istringstream in{text};
    return parse_events(in);
}

const std::string header = "municipality_id,group_id,year,violence_type,victim_count\n";

EventRecord event(std::string m, std::string g, int year, std::int64_t count = 1) {
    return {std::move(m), std::move(g), year, ViolenceType::massacre, count};
}

std::string error_of(const std::function<void()> &f) {
    try {
        f();
    } catch (const std::exception &e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST_SUITE("ingest") {

TEST_CASE("header only parses to no events") {
    CHECK(parse(header).empty());
}

TEST_CASE("single row carries every field") {
    const auto events = parse(header + "05001,G1,1985,massacre,3\n");
    REQUIRE(events.size() == 1);
    CHECK(events[0].municipality_id == "05001");
    CHECK(events[0].group_id == "G1");
    CHECK(events[0].year == 1985);
    CHECK(events[0].violence_type == ViolenceType::massacre);
    CHECK(events[0].victim_count == 3);
}

TEST_CASE("columns are located by header name") {
    std::istringstream in{"victim_count,year,group_id,violence_type,municipality_id\n2,1990,G7,kidnapping,X\n"};
    const auto events = parse_events(in);
    REQUIRE(events.size() == 1);
    CHECK(events[0] == EventRecord{"X", "G7", 1990, ViolenceType::kidnapping, 2});
}

TEST_CASE("custom column mapping") {
    ColumnMapping mapping;
    mapping.municipality_id = "mun";
    mapping.victim_count = "victims";
    std::istringstream in{"mun,group_id,year,violence_type,victims\nA,G,2000,recruitment,1\n"};
    CHECK(parse_events(in, mapping).size() == 1);
}

TEST_CASE("row order is preserved and CRLF is accepted") {
    const auto events = parse(header + "B,G1,1990,massacre,1\r\nA,G1,1991,massacre,2\r\n");
    REQUIRE(events.size() == 2);
    CHECK(events[0].municipality_id == "B");
    CHECK(events[1].municipality_id == "A");
}

TEST_CASE("zero victims is a nonpositive count error") {
    CHECK(error_of([] { parse(header + "05001,G1,1985,massacre,0\n"); }).find("nonpositive count") !=
          std::string::npos);
}

TEST_CASE("malformed rows report their line number") {
    try {
        parse(header + "05001,G1,1985,massacre,1\n05002,G1,1985\n");
        FAIL("expected a parse error");
    } catch (const ParseError &e) {
        CHECK(e.line() == 3);
        CHECK(std::string{e.what()}.find("line 3") != std::string::npos);
    }
    CHECK_THROWS_AS(parse(header + "05001,G1,nineteen,massacre,1\n"), ParseError);
    CHECK_THROWS_AS(parse(header + "05001,G1,1985,massacre,two\n"), ParseError);
    CHECK_THROWS_AS(parse(header + "05001,G1,1985.5,massacre,1\n"), ParseError);
}

TEST_CASE("unknown violence type is an error naming the label") {
    CHECK(error_of([] { parse(header + "05001,G1,1985,arson,1\n"); }).find("arson") != std::string::npos);
}

TEST_CASE("missing header column is an error") {
    std::istringstream in{"municipality_id,group_id,year,victim_count\n"};
    CHECK_THROWS_AS(parse_events(in), ParseError);
}

TEST_CASE("timelines parse and reject reversed spans and unknown factions") {
    std::istringstream ok{"group_id,active_from,active_to,faction\nG1,1997,2005,paramilitary\n"};
    const auto t = parse_timelines(ok);
    REQUIRE(t.size() == 1);
    CHECK(t[0].active_from == 1997);
    CHECK(t[0].faction == Faction::paramilitary);
    std::istringstream reversed{"group_id,active_from,active_to,faction\nG1,2005,1997,farc\n"};
    CHECK_THROWS(parse_timelines(reversed));
    std::istringstream faction{"group_id,active_from,active_to,faction\nG1,1997,2005,navy\n"};
    CHECK_THROWS(parse_timelines(faction));
}

TEST_CASE("attribution rejects events outside the activity interval") {
    const std::vector<GroupTimeline> timelines{{"G1", 1997, 2005, Faction::paramilitary}};
    const std::vector<EventRecord> early{event("m", "G1", 1990)};
    const auto r = validate_attribution(early, timelines);
    CHECK(r.accepted.empty());
    REQUIRE(r.rejected.size() == 1);
    CHECK(r.rejected[0].reason == "outside activity interval");

    const std::vector<EventRecord> boundary{event("m", "G1", 1997), event("m", "G1", 2005)};
    CHECK(validate_attribution(boundary, timelines).accepted.size() == 2);

    const auto empty = validate_attribution(std::span<const EventRecord>{}, timelines);
    CHECK(empty.accepted.empty());
    CHECK(empty.rejected.empty());
}

TEST_CASE("attribution names groups without a timeline") {
    const std::vector<GroupTimeline> timelines{{"G1", 1997, 2005, Faction::farc}};
    const std::vector<EventRecord> events{event("m", "G1", 2000), event("m", "ZZ9", 2000)};
    CHECK(error_of([&] { validate_attribution(events, timelines); }).find("ZZ9") != std::string::npos);
}

TEST_CASE("attribution is a partition of its input") {
    std::mt19937_64 rng{7};
    std::vector<GroupTimeline> timelines;
    for (int g = 0; g < 5; ++g) {
        const int from = 1978 + 4 * g;
        timelines.push_back({"G" + std::to_string(g), from, from + 8, Faction::farc});
    }
    std::uniform_int_distribution<int> pick_group{0, 4}, pick_year{1978, 2007};
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<EventRecord> events;
        for (int k = 0; k < 100; ++k) {
            events.push_back(event("m" + std::to_string(k % 7), "G" + std::to_string(pick_group(rng)), pick_year(rng)));
        }
        const auto r = validate_attribution(events, timelines);
        CHECK(r.accepted.size() + r.rejected.size() == events.size());
        for (const auto &e : r.accepted) {
            const auto &t = *std::find_if(timelines.begin(), timelines.end(),
                                          [&](const GroupTimeline &x) { return x.group_id == e.group_id; });
            CHECK(t.active_from <= e.year);
            CHECK(e.year <= t.active_to);
        }
        auto sorted_input = events;
        std::vector<EventRecord> recombined = r.accepted;
        for (const auto &x : r.rejected) recombined.push_back(x.event);
        auto key = [](const EventRecord &a, const EventRecord &b) {
            return std::tie(a.municipality_id, a.group_id, a.year) < std::tie(b.municipality_id, b.group_id, b.year);
        };
        std::sort(sorted_input.begin(), sorted_input.end(), key);
        std::sort(recombined.begin(), recombined.end(), key);
        CHECK(sorted_input == recombined);
    }
}

TEST_CASE("period partition validation") {
    CHECK_THROWS(PeriodPartition{{}});
    CHECK_THROWS(PeriodPartition{{{1980, 1984}, {1984, 1987}}});
    CHECK_THROWS(PeriodPartition{{{1980, 1984}, {1986, 1987}}});
    CHECK_THROWS(PeriodPartition{{{1985, 1987}, {1980, 1984}}});
    CHECK_THROWS(PeriodPartition{{{1984, 1980}}});
    CHECK_NOTHROW(PeriodPartition{{{1980, 1984}, {1985, 1987}}});
}

TEST_CASE("standard periods are the ten tabulated intervals") {
    const auto p = PeriodPartition::standard();
    REQUIRE(p.size() == 10);
    CHECK(p[0] == Period{1978, 1981});
    CHECK(p[1] == Period{1982, 1984});
    CHECK(p[2] == Period{1985, 1987});
    CHECK(p[9] == Period{2005, 2007});
    CHECK(p.first_year() == 1978);
    CHECK(p.last_year() == 2007);
}

TEST_CASE("periods parse from JSON pairs") {
    std::istringstream in{"[[1980, 1984], [1985, 1987]]"};
    const auto p = parse_periods(in);
    REQUIRE(p.size() == 2);
    CHECK(p[1] == Period{1985, 1987});
    std::istringstream bad{"[[1980, 1984, 1], [1985, 1987]]"};
    CHECK_THROWS(parse_periods(bad));
    std::istringstream not_json{"1980-1984"};
    CHECK_THROWS(parse_periods(not_json));
}

TEST_CASE("assign periods at the boundaries") {
    const PeriodPartition periods{{{1980, 1984}, {1985, 1987}}};
    const std::vector<EventRecord> events{event("a", "G", 1984), event("b", "G", 1985)};
    const auto buckets = assign_periods(events, periods);
    REQUIRE(buckets.size() == 2);
    REQUIRE(buckets.at(0).size() == 1);
    CHECK(buckets.at(0)[0].municipality_id == "a");
    REQUIRE(buckets.at(1).size() == 1);
    CHECK(buckets.at(1)[0].municipality_id == "b");

    const std::vector<EventRecord> outside{event("late", "G", 1979)};
    const auto message = error_of([&] { assign_periods(outside, periods); });
    CHECK(message.find("late") != std::string::npos);
    CHECK(message.find("1979") != std::string::npos);
}

TEST_CASE("assign periods keeps empty buckets and places every event once") {
    const auto periods = PeriodPartition::standard();
    std::mt19937_64 rng{3};
    std::uniform_int_distribution<int> year{1978, 2007};
    std::vector<EventRecord> events;
    for (int k = 0; k < 300; ++k) events.push_back(event("m", "G", year(rng)));
    const auto buckets = assign_periods(events, periods);
    CHECK(buckets.size() == periods.size());
    std::size_t total = 0;
    for (const auto &[index, bucket] : buckets) {
        total += bucket.size();
        for (const auto &e : bucket) CHECK(periods[index].contains(e.year));
    }
    CHECK(total == events.size());
}

TEST_CASE("incidence sums victims over sorted ids") {
    const std::vector<EventRecord> events{event("m1", "e1", 2000, 2), event("m2", "e1", 2000, 1),
                                          event("m2", "e2", 2000, 3)};
    const auto a = build_incidence(events);
    CHECK(a.rows() == std::vector<std::string>{"m1", "m2"});
    CHECK(a.cols() == std::vector<std::string>{"e1", "e2"});
    CHECK(a.entries() == std::vector<std::int64_t>{2, 0, 1, 3});

    const auto empty = build_incidence(std::span<const EventRecord>{});
    CHECK(empty.n_rows() == 0);
    CHECK(empty.n_cols() == 0);

    const std::vector<EventRecord> twice{event("m", "e", 2000, 1), event("m", "e", 2001, 4)};
    CHECK(build_incidence(twice).entries() == std::vector<std::int64_t>{5});
}

TEST_CASE("incidence conserves victims and ignores event order") {
    std::mt19937_64 rng{11};
    std::uniform_int_distribution<int> m{0, 9}, e{0, 4}, count{1, 9};
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<EventRecord> events;
        std::int64_t victims = 0;
        for (int k = 0; k < 60; ++k) {
            events.push_back(event("m" + std::to_string(m(rng)), "e" + std::to_string(e(rng)), 1990, count(rng)));
            victims += events.back().victim_count;
        }
        const auto a = build_incidence(events);
        CHECK(a.total() == victims);
        // Independent per-event loop.
        for (std::size_t i = 0; i < a.n_rows(); ++i)
            for (std::size_t j = 0; j < a.n_cols(); ++j) {
                std::int64_t expected = 0;
                for (const auto &x : events)
                    if (x.municipality_id == a.rows()[i] && x.group_id == a.cols()[j]) expected += x.victim_count;
                CHECK(a.at(i, j) == expected);
            }
        auto shuffled = events;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        CHECK(build_incidence(shuffled) == a);
    }
}

TEST_CASE("incidence matrix validation") {
    CHECK_THROWS(IncidenceMatrix({"a"}, {"x", "y"}, {1}));
    CHECK_THROWS(IncidenceMatrix({"a"}, {"x"}, {-1}));
    CHECK_THROWS(IncidenceMatrix({"a", "b"}, {"x"}, {1, 0}).require_active_nodes());
    CHECK_NOTHROW(IncidenceMatrix({"a", "b"}, {"x"}, {1, 2}).require_active_nodes());
}

} // TEST_SUITE
