#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ocpm/performance.hpp"
#include "support/build.hpp"
#include "support/oracles.hpp"
#include "support/random_logs.hpp"

#include <random>

using namespace ocpm;
using namespace ocpm::perf;

namespace {

const std::vector<std::string> kServiceActivities{
    "SCHEDULER START", "SCHEDULER END", "ACCEPT",        "REJECT",     "ENROUTE",
    "ONSITE",          "INPROCESS",     "HOLD",          "JOB DONE",   "HEAD OFFICE",
    "ARRIVE OFFICE",   "JOB CLOSED",    "SURVEY SENT"};

OCEventLog table1_log() {
    test::LogBuilder b;
    b.event("ACCEPT", "2023-01-02 08:54", {{"technician", {"4006975"}}, {"schedule", {"3948148"}}});
    b.event("ENROUTE", "2023-01-02 08:54", {{"technician", {"4006975"}}});
    b.event("ONSITE", "2023-01-02 12:51", {{"technician", {"4006975"}}});
    b.event("INPROCESS", "2023-01-02 12:51",
            {{"technician", {"4006975"}}, {"schedule", {"3948148"}}});
    return b.build();
}

constexpr double kSecond = 1.0 / 3600.0;

} // namespace

TEST_CASE("Table-1 log yields one trip of 3.95 hours bound to the schedule") {
    const TripAssociation assoc = associate_trips(table1_log());
    REQUIRE(assoc.trips.size() == 1);
    const Trip& trip = assoc.trips[0];
    CHECK(trip.technician == "4006975");
    CHECK(trip.boundSchedule == "3948148");
    CHECK(trip.enrouteAt == parse_timestamp("2023-01-02 08:54"));
    CHECK(trip.onsiteAt == parse_timestamp("2023-01-02 12:51"));
    CHECK(trip.transitHours == doctest::Approx(3.95).epsilon(1e-12));
    CHECK(assoc.unmatchedEnroute == 0);
    CHECK(assoc.unmatchedOnsite == 0);

    const PerfStat stat = transit_times(table1_log());
    CHECK(stat.count == 1);
    CHECK(stat.mean == doctest::Approx(3.95).epsilon(1e-12));
    CHECK(stat.records[0].first == "3948148");
}

TEST_CASE("coincident ENROUTE/ONSITE gives a zero transit") {
    test::LogBuilder b;
    b.eventId("e1", "ENROUTE", "2023-01-02 08:00", {{"technician", {"T"}}});
    b.eventId("e2", "ONSITE", "2023-01-02 08:00", {{"technician", {"T"}}});
    const TripAssociation assoc = associate_trips(b.build());
    REQUIRE(assoc.trips.size() == 1);
    CHECK(assoc.trips[0].transitHours == 0.0);
}

TEST_CASE("a trip binds to the most recent schedule not yet done") {
    test::LogBuilder b;
    b.event("ACCEPT", "2023-01-02 08:00", {{"schedule", {"s1"}}, {"technician", {"T"}}});
    b.event("ACCEPT", "2023-01-02 08:10", {{"schedule", {"s2"}}, {"technician", {"T"}}});
    b.event("ENROUTE", "2023-01-02 08:20", {{"technician", {"T"}}});
    b.event("ONSITE", "2023-01-02 09:00", {{"technician", {"T"}}});
    const TripAssociation assoc = associate_trips(b.build());
    REQUIRE(assoc.trips.size() == 1);
    CHECK(assoc.trips[0].boundSchedule == "s2");

    SUBCASE("after s2 is done the next trip falls back to s1") {
        b.event("JOB DONE", "2023-01-02 10:00", {{"schedule", {"s2"}}, {"technician", {"T"}}});
        b.event("ENROUTE", "2023-01-02 10:30", {{"technician", {"T"}}});
        b.event("ONSITE", "2023-01-02 11:00", {{"technician", {"T"}}});
        const TripAssociation again = associate_trips(b.build());
        REQUIRE(again.trips.size() == 2);
        CHECK(again.trips[1].boundSchedule == "s1");
    }
}

TEST_CASE("trip conservation across unmatched events") {
    test::LogBuilder b;
    b.event("ENROUTE", "2023-01-02 08:00", {{"technician", {"T"}}}); // superseded
    b.event("ENROUTE", "2023-01-02 08:30", {{"technician", {"T"}}});
    b.event("ONSITE", "2023-01-02 09:00", {{"technician", {"T"}}});
    b.event("ONSITE", "2023-01-02 09:30", {{"technician", {"T"}}}); // unmatched
    b.event("ENROUTE", "2023-01-02 10:00", {{"technician", {"T"}}}); // dangling
    const TripAssociation assoc = associate_trips(b.build());
    CHECK(assoc.trips.size() == 1);
    CHECK(assoc.trips[0].enrouteAt == parse_timestamp("2023-01-02 08:30"));
    CHECK(assoc.unmatchedEnroute == 2);
    CHECK(assoc.unmatchedOnsite == 1);
}

TEST_CASE("trip conservation holds on random logs") {
    std::mt19937 rng(307);
    for (int i = 0; i < 50; ++i) {
        const OCEventLog log = test::random_small_log(rng, 30, kServiceActivities);
        if (!log.hasType("technician")) continue;
        const TripAssociation assoc = associate_trips(log);
        std::size_t enrouteRefs = 0;
        for (const auto& ev : log.events()) {
            if (ev.activity != "ENROUTE") continue;
            auto it = ev.omap.find("technician");
            if (it != ev.omap.end()) enrouteRefs += it->second.size();
        }
        CHECK(assoc.trips.size() + assoc.unmatchedEnroute == enrouteRefs);
    }
}

TEST_CASE("lagging excludes early acceptances but counts them") {
    test::LogBuilder b;
    b.event("SCHEDULER START", "2023-01-02 08:00", {{"schedule", {"onTime"}}});
    b.event("ACCEPT", "2023-01-02 08:00", {{"schedule", {"onTime"}}, {"technician", {"T"}}});
    b.event("SCHEDULER START", "2023-01-02 08:00", {{"schedule", {"late"}}});
    b.event("ACCEPT", "2023-01-02 09:30", {{"schedule", {"late"}}, {"technician", {"T"}}});
    b.event("SCHEDULER START", "2023-01-02 09:00", {{"schedule", {"early"}}});
    b.eventId("e0000", "ACCEPT", "2023-01-02 08:30",
              {{"schedule", {"early"}}, {"technician", {"T"}}});
    b.event("SCHEDULER START", "2023-01-03 08:00", {{"schedule", {"unaccepted"}}});

    const LaggingResult result = lagging_times(b.build());
    CHECK(result.stat.count == 1);
    CHECK(result.stat.records[0].first == "late");
    CHECK(result.stat.records[0].second == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(result.earlyCount == 2); // exactly-on-time and early acceptances
    CHECK(result.skippedCount == 1);
}

TEST_CASE("schedule hours and overwork strictness") {
    auto logWith = [](const char* closeTime) {
        test::LogBuilder b;
        b.event("SCHEDULER START", "2023-01-02 08:00", {{"schedule", {"s"}}});
        b.event("ACCEPT", "2023-01-02 08:00", {{"schedule", {"s"}}, {"technician", {"T"}}});
        b.event("JOB CLOSED", closeTime, {{"schedule", {"s"}}, {"technician", {"T"}}});
        b.event("SCHEDULER END", "2023-01-02 17:00", {{"schedule", {"s"}}});
        return b.build();
    };

    SUBCASE("scheduled 9h, actual 11h is overwork") {
        const ScheduleHoursResult result = schedule_hours(logWith("2023-01-02 19:00"));
        REQUIRE(result.records.size() == 1);
        CHECK(result.records[0].scheduledHours == doctest::Approx(9.0));
        CHECK(result.records[0].actualHours == doctest::Approx(11.0));
        CHECK(result.records[0].overwork);
        CHECK(result.overworkCount == 1);
        CHECK(result.overworkStat.records[0].second == doctest::Approx(2.0));
    }
    SUBCASE("actual == scheduled is not overwork; one second more is") {
        const ScheduleHoursResult boundary = schedule_hours(logWith("2023-01-02 17:00"));
        CHECK_FALSE(boundary.records[0].overwork);
        const ScheduleHoursResult flipped = schedule_hours(logWith("2023-01-02 17:00:01"));
        CHECK(flipped.records[0].overwork);
        CHECK(flipped.records[0].actualHours - flipped.records[0].scheduledHours ==
              doctest::Approx(kSecond).epsilon(1e-9));
    }
    SUBCASE("schedules missing anchors are skipped and counted") {
        test::LogBuilder b;
        b.event("ACCEPT", "2023-01-02 08:00", {{"schedule", {"s"}}, {"technician", {"T"}}});
        const ScheduleHoursResult result = schedule_hours(b.build());
        CHECK(result.records.empty());
        CHECK(result.skippedCount == 1);
    }
}

TEST_CASE("daily labor hours measure the day's span") {
    test::LogBuilder b;
    b.event("ACCEPT", "2023-01-02 08:00", {{"technician", {"T"}}, {"schedule", {"s"}}});
    b.event("JOB CLOSED", "2023-01-02 18:00", {{"technician", {"T"}}, {"schedule", {"s"}}});
    b.event("ACCEPT", "2023-01-03 09:00", {{"technician", {"T"}}, {"schedule", {"s2"}}});
    const PerfStat stat = daily_labor_hours(b.build());
    REQUIRE(stat.count == 2);
    CHECK(stat.records[0].first == "T@2023-01-02");
    CHECK(stat.records[0].second == doctest::Approx(10.0));
    CHECK(stat.records[1].second == 0.0); // single-event day
}

TEST_CASE("hold impact partitions days by HOLD presence") {
    test::LogBuilder b;
    b.event("ACCEPT", "2023-01-02 08:00", {{"technician", {"T"}}, {"schedule", {"s1"}}});
    b.event("HOLD", "2023-01-02 12:00", {{"technician", {"T"}}, {"schedule", {"s1"}}});
    b.event("JOB CLOSED", "2023-01-02 18:00", {{"technician", {"T"}}, {"schedule", {"s1"}}});
    b.event("ACCEPT", "2023-01-03 08:00", {{"technician", {"T"}}, {"schedule", {"s2"}}});
    b.event("JOB CLOSED", "2023-01-03 16:00", {{"technician", {"T"}}, {"schedule", {"s2"}}});
    const HoldImpact impact = hold_impact(b.build());
    CHECK(impact.defined);
    CHECK(impact.daysWithHold == 1);
    CHECK(impact.daysWithoutHold == 1);
    CHECK(impact.meanWithHold == doctest::Approx(10.0));
    CHECK(impact.meanWithoutHold == doctest::Approx(8.0));
    CHECK(impact.ratio == doctest::Approx(1.25));
}

TEST_CASE("hold impact undefined when a partition is empty") {
    test::LogBuilder b;
    b.event("ACCEPT", "2023-01-02 08:00", {{"technician", {"T"}}, {"schedule", {"s"}}});
    const HoldImpact impact = hold_impact(b.build());
    CHECK_FALSE(impact.defined);
}

TEST_CASE("transit share relates the first bound trip to the scheduled hours") {
    test::LogBuilder b;
    b.event("SCHEDULER START", "2023-01-02 08:00", {{"schedule", {"s"}}});
    b.event("ACCEPT", "2023-01-02 08:00", {{"schedule", {"s"}}, {"technician", {"T"}}});
    b.event("ENROUTE", "2023-01-02 08:00", {{"technician", {"T"}}});
    b.event("ONSITE", "2023-01-02 12:00", {{"technician", {"T"}}});
    b.event("JOB CLOSED", "2023-01-02 12:30", {{"schedule", {"s"}}, {"technician", {"T"}}});
    b.event("SCHEDULER END", "2023-01-02 13:00", {{"schedule", {"s"}}});
    const TransitShareResult result = transit_share(b.build());
    REQUIRE(result.stat.count == 1);
    CHECK(result.stat.records[0].second == doctest::Approx(0.8)); // 4h of a 5h window

    SUBCASE("schedules without trips have no share record") {
        test::LogBuilder c;
        c.event("SCHEDULER START", "2023-01-02 08:00", {{"schedule", {"x"}}});
        c.event("SCHEDULER END", "2023-01-02 13:00", {{"schedule", {"x"}}});
        CHECK(transit_share(c.build()).stat.count == 0);
    }
    SUBCASE("zero scheduled hours are skipped and counted") {
        test::LogBuilder c;
        c.event("SCHEDULER START", "2023-01-02 08:00", {{"schedule", {"x"}}});
        c.event("SCHEDULER END", "2023-01-02 08:00", {{"schedule", {"x"}}});
        c.event("ACCEPT", "2023-01-02 08:00", {{"schedule", {"x"}}, {"technician", {"T"}}});
        c.event("ENROUTE", "2023-01-02 08:10", {{"technician", {"T"}}});
        c.event("ONSITE", "2023-01-02 08:40", {{"technician", {"T"}}});
        c.event("JOB CLOSED", "2023-01-02 09:00", {{"schedule", {"x"}}, {"technician", {"T"}}});
        const TransitShareResult result = transit_share(c.build());
        CHECK(result.stat.count == 0);
        CHECK(result.skippedCount == 1);
    }
}

TEST_CASE("accumulated transit sums trips and mid-schedule office legs") {
    test::LogBuilder b;
    b.event("ACCEPT", "2023-01-02 08:00", {{"schedule", {"s"}}, {"technician", {"T"}}});
    b.event("ENROUTE", "2023-01-02 08:00", {{"technician", {"T"}}});
    b.event("ONSITE", "2023-01-02 09:00", {{"technician", {"T"}}}); // 1.0 h
    b.event("INPROCESS", "2023-01-02 09:00", {{"schedule", {"s"}}, {"technician", {"T"}}});
    b.event("HEAD OFFICE", "2023-01-02 10:00", {{"technician", {"T"}}});
    b.event("ARRIVE OFFICE", "2023-01-02 10:30", {{"technician", {"T"}}}); // 0.5 h leg
    b.event("ENROUTE", "2023-01-02 10:30", {{"technician", {"T"}}});
    b.event("ONSITE", "2023-01-02 11:00", {{"technician", {"T"}}}); // 0.5 h
    b.event("INPROCESS", "2023-01-02 11:00", {{"schedule", {"s"}}, {"technician", {"T"}}});
    b.event("JOB DONE", "2023-01-02 12:00", {{"schedule", {"s"}}, {"technician", {"T"}}});
    // Return after the job is done: outside the schedule, not accumulated.
    b.event("HEAD OFFICE", "2023-01-02 12:00", {{"technician", {"T"}}});
    b.event("ARRIVE OFFICE", "2023-01-02 12:45", {{"technician", {"T"}}});
    const PerfStat stat = accumulated_transit(b.build());
    REQUIRE(stat.count == 1);
    CHECK(stat.records[0].first == "s");
    CHECK(stat.records[0].second == doctest::Approx(2.0));
}

TEST_CASE("cascade delays key later schedules by day position") {
    test::LogBuilder b;
    // First schedule planned 08:00-12:00 but finished 14:00.
    b.event("SCHEDULER START", "2023-01-02 08:00", {{"schedule", {"s1"}}});
    b.event("ACCEPT", "2023-01-02 08:00", {{"schedule", {"s1"}}, {"technician", {"T"}}});
    b.event("INPROCESS", "2023-01-02 08:30", {{"schedule", {"s1"}}, {"technician", {"T"}}});
    b.event("JOB DONE", "2023-01-02 14:00", {{"schedule", {"s1"}}, {"technician", {"T"}}});
    b.event("SCHEDULER END", "2023-01-02 12:00", {{"schedule", {"s1"}}});
    // Second schedule planned from 12:00; technician arrives after 0.5h transit.
    b.event("SCHEDULER START", "2023-01-02 12:00", {{"schedule", {"s2"}}});
    b.event("ACCEPT", "2023-01-02 14:00", {{"schedule", {"s2"}}, {"technician", {"T"}}});
    b.event("ENROUTE", "2023-01-02 14:00", {{"technician", {"T"}}});
    b.event("ONSITE", "2023-01-02 14:30", {{"technician", {"T"}}});
    b.event("INPROCESS", "2023-01-02 14:30", {{"schedule", {"s2"}}, {"technician", {"T"}}});
    const CascadeResult result = cascade_delays(b.build());
    REQUIRE(result.stat.count == 1);
    CHECK(result.stat.records[0].first == "T@2023-01-02#2");
    CHECK(result.stat.records[0].second == doctest::Approx(2.5));

    SUBCASE("an on-time second schedule records zero") {
        test::LogBuilder c;
        c.event("SCHEDULER START", "2023-01-02 08:00", {{"schedule", {"a"}}});
        c.event("INPROCESS", "2023-01-02 08:30", {{"schedule", {"a"}}, {"technician", {"T"}}});
        c.event("SCHEDULER START", "2023-01-02 12:00", {{"schedule", {"b"}}});
        c.event("INPROCESS", "2023-01-02 11:30", {{"schedule", {"b"}}, {"technician", {"T"}}});
        const CascadeResult onTime = cascade_delays(c.build());
        REQUIRE(onTime.stat.count == 1);
        CHECK(onTime.stat.records[0].second == 0.0); // floored, early start is no delay
    }
    SUBCASE("schedules never reaching INPROCESS are skipped") {
        test::LogBuilder c;
        c.event("SCHEDULER START", "2023-01-02 08:00", {{"schedule", {"a"}}});
        c.event("INPROCESS", "2023-01-02 08:30", {{"schedule", {"a"}}, {"technician", {"T"}}});
        c.event("SCHEDULER START", "2023-01-02 12:00", {{"schedule", {"b"}}});
        c.event("REJECT", "2023-01-02 12:30", {{"schedule", {"b"}}, {"technician", {"T"}}});
        const CascadeResult result2 = cascade_delays(c.build());
        CHECK(result2.stat.count == 0);
        CHECK(result2.skippedCount == 1);
    }
}

TEST_CASE("PerfStat summaries are exact functions of the records") {
    const PerfStat empty = PerfStat::from_records("empty", {});
    CHECK(test::stat_self_consistent(empty));
    CHECK(empty.count == 0);

    PerfStat stat = PerfStat::from_records(
        "demo", {{"a", 2.0}, {"b", 1.0}, {"c", 4.0}, {"d", 3.0}});
    CHECK(stat.min == 1.0);
    CHECK(stat.max == 4.0);
    CHECK(stat.mean == 2.5);
    CHECK(stat.p50 == 2.0); // nearest-rank
    CHECK(stat.p95 == 4.0);
    CHECK(test::stat_self_consistent(stat));
}

TEST_CASE("metrics agree with the replay oracle on random service logs") {
    std::mt19937 rng(401);
    for (int i = 0; i < 60; ++i) {
        test::LogBuilder b;
        b.declare("schedule").declare("technician");
        std::uniform_int_distribution<int> nEvents(1, 30);
        std::uniform_int_distribution<int> minute(0, 200);
        std::uniform_int_distribution<std::size_t> act(0, kServiceActivities.size() - 1);
        std::uniform_int_distribution<int> oidPick(1, 3);
        std::uniform_int_distribution<int> coin(0, 2);
        const int n = nEvents(rng);
        for (int k = 0; k < n; ++k) {
            std::map<std::string, std::vector<std::string>> omap;
            const int which = coin(rng);
            if (which != 1) omap["schedule"] = {"s" + std::to_string(oidPick(rng))};
            if (which != 0) omap["technician"] = {"t" + std::to_string(oidPick(rng))};
            char stamp[40];
            const int m = minute(rng);
            std::snprintf(stamp, sizeof(stamp), "2023-01-02 %02d:%02d", 8 + m / 60, m % 60);
            b.event(kServiceActivities[act(rng)], stamp, std::move(omap));
        }
        const OCEventLog log = b.build();

        const MetricsBundle bundle = compute_all(log);

        // trips
        const auto naiveTrips = test::naive_trips(log);
        REQUIRE(bundle.trips.trips.size() == naiveTrips.size());
        CHECK(test::record_map(bundle.transit) == test::naive_transit_values(log));

        // lagging
        const auto naiveLag = test::naive_lagging(log);
        std::map<std::string, double> lagRecords(bundle.lagging.stat.records.begin(),
                                                 bundle.lagging.stat.records.end());
        CHECK(lagRecords == naiveLag.records);
        CHECK(bundle.lagging.earlyCount == naiveLag.earlyCount);
        CHECK(bundle.lagging.skippedCount == naiveLag.skippedCount);

        // schedule hours
        const auto naiveHours = test::naive_schedule_hours(log);
        CHECK(bundle.scheduleHours.records.size() == naiveHours.records.size());
        CHECK(bundle.scheduleHours.overworkCount == naiveHours.overworkCount);
        CHECK(bundle.scheduleHours.skippedCount == naiveHours.skippedCount);
        for (const auto& rec : bundle.scheduleHours.records) {
            const auto& [scheduled, actual, overwork] = naiveHours.records.at(rec.schedule);
            CHECK(rec.scheduledHours == scheduled);
            CHECK(rec.actualHours == actual);
            CHECK(rec.overwork == overwork);
        }

        // daily spans
        std::map<std::string, double> dailyRecords(bundle.dailyHours.records.begin(),
                                                   bundle.dailyHours.records.end());
        CHECK(dailyRecords == test::naive_daily_spans(log));

        // share / accumulated / cascade
        std::map<std::string, double> shareRecords(bundle.transitShare.stat.records.begin(),
                                                   bundle.transitShare.stat.records.end());
        CHECK(shareRecords == test::naive_transit_share(log));
        std::map<std::string, double> accRecords(bundle.accumulated.records.begin(),
                                                 bundle.accumulated.records.end());
        CHECK(accRecords == test::naive_accumulated_transit(log));
        std::map<std::string, double> cascadeRecords(bundle.cascade.stat.records.begin(),
                                                     bundle.cascade.stat.records.end());
        CHECK(cascadeRecords == test::naive_cascade(log));

        // every emitted stat is self-consistent
        for (const PerfStat* stat :
             {&bundle.transit, &bundle.lagging.stat, &bundle.scheduleHours.overworkStat,
              &bundle.dailyHours, &bundle.transitShare.stat, &bundle.accumulated,
              &bundle.cascade.stat}) {
            CHECK(test::stat_self_consistent(*stat));
        }
    }
}

TEST_CASE("records_csv uses four decimal places") {
    const PerfStat stat = PerfStat::from_records("demo", {{"a", 1.23456}, {"b", 2.0}});
    CHECK(records_csv(stat) == "owner,hours\na,1.2346\nb,2.0000\n");
}
