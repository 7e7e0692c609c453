#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ocpm/errors.hpp"
#include "ocpm/statistics.hpp"
#include "support/build.hpp"

using namespace ocpm;
using namespace ocpm::stats;

namespace {

OCEventLog region_log() {
    test::LogBuilder b;
    b.object("s1", "schedule", {{"region", AttrValue{std::string("R")}}});
    b.object("s2", "schedule", {{"region", AttrValue{std::string("R")}}});
    b.object("s3", "schedule", {{"region", AttrValue{std::string("R")}}});
    b.object("s4", "schedule", {{"region", AttrValue{std::string("R")}}});
    b.object("t1", "technician", {{"region", AttrValue{std::string("R")}}});
    b.object("t2", "technician", {{"region", AttrValue{std::string("R")}}});
    b.event("ACCEPT", "2023-01-02 08:00", {{"schedule", {"s1"}}, {"technician", {"t1"}}});
    return b.build();
}

} // namespace

TEST_CASE("region_distribution computes the schedules-per-technician ratio") {
    const RegionStats stats = region_distribution(region_log());
    REQUIRE(stats.rows.size() == 1);
    const RegionRow& row = stats.rows.at("R");
    CHECK(row.scheduleCount == 4);
    CHECK(row.technicianCount == 2);
    CHECK(row.ratioDefined);
    CHECK(row.schedulesPerTechnician == doctest::Approx(2.0));
}

TEST_CASE("row sums equal the object totals") {
    test::LogBuilder b;
    b.object("s1", "schedule", {{"region", AttrValue{std::string("X")}}});
    b.object("s2", "schedule", {{"region", AttrValue{std::string("Y")}}});
    b.object("t1", "technician", {{"region", AttrValue{std::string("Y")}}});
    b.object("lone", "schedule"); // no region attribute
    b.event("A", "2023-01-02 08:00", {{"schedule", {"s1"}}});
    const RegionStats stats = region_distribution(b.build());
    std::size_t schedules = 0, technicians = 0;
    for (const auto& [region, row] : stats.rows) {
        schedules += row.scheduleCount;
        technicians += row.technicianCount;
    }
    CHECK(schedules == 3);
    CHECK(technicians == 1);
    CHECK(stats.rows.at("(unknown)").scheduleCount == 1);
    CHECK_FALSE(stats.rows.at("Y").ratioDefined == false); // Y has a technician
    CHECK_FALSE(stats.rows.at("X").ratioDefined);          // X has none
}

TEST_CASE("strict mode raises MissingAttribute with offender oids") {
    test::LogBuilder b;
    b.object("s1", "schedule");
    b.event("A", "2023-01-02 08:00", {{"schedule", {"s1"}}});
    CHECK_THROWS_WITH_AS(region_distribution(b.build(), "region", true),
                         doctest::Contains("s1"), MissingAttribute);
}

TEST_CASE("log_summary on the Table-1 log") {
    test::LogBuilder b;
    b.event("ACCEPT", "2023-01-02 08:54", {{"technician", {"4006975"}}, {"schedule", {"3948148"}}});
    b.event("ENROUTE", "2023-01-02 08:54", {{"technician", {"4006975"}}});
    b.event("ONSITE", "2023-01-02 12:51", {{"technician", {"4006975"}}});
    b.event("INPROCESS", "2023-01-02 12:51",
            {{"technician", {"4006975"}}, {"schedule", {"3948148"}}});
    const LogSummary summary = log_summary(b.build());
    CHECK(summary.eventCount == 4);
    CHECK(summary.objectCounts.at("schedule") == 1);
    CHECK(summary.objectCounts.at("technician") == 1);
    CHECK(summary.activityFrequencies.at("ACCEPT") == 1);
    CHECK(summary.avgEventsPerObject.at("technician") == doctest::Approx(4.0));
    CHECK(summary.avgEventsPerObject.at("schedule") == doctest::Approx(2.0));
}

TEST_CASE("log_summary of an empty log is all zeros") {
    const LogSummary summary = log_summary(OCEventLog{});
    CHECK(summary.eventCount == 0);
    CHECK(summary.objectCounts.empty());
    CHECK(summary.activityFrequencies.empty());
}

TEST_CASE("log_summary is invariant under same-timestamp reordering") {
    auto make = [](bool swapped) {
        std::vector<Event> events;
        for (const char* eid : swapped ? std::vector<const char*>{"b", "a"}
                                       : std::vector<const char*>{"a", "b"}) {
            Event ev;
            ev.eid = eid;
            ev.activity = std::string("ACT_") + eid;
            ev.timestamp = parse_timestamp("2023-01-02 08:00");
            ev.omap["t"] = {"x"};
            events.push_back(ev);
        }
        return OCEventLog::build(events, {ObjectInstance{"x", "t", {}}});
    };
    const LogSummary s1 = log_summary(make(false));
    const LogSummary s2 = log_summary(make(true));
    CHECK(s1.eventCount == s2.eventCount);
    CHECK(s1.activityFrequencies == s2.activityFrequencies);
    CHECK(s1.avgEventsPerObject == s2.avgEventsPerObject);
}

TEST_CASE("region CSV has the four Fig-4-shaped columns") {
    const std::string csv = region_csv(region_distribution(region_log()));
    CHECK(csv == "region,schedules,technicians,ratio\n\"R\",4,2,2.0000\n");
    CHECK(to_json(region_distribution(region_log())) ==
          to_json(region_distribution(region_log())));
}
