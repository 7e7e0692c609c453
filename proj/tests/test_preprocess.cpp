#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ocpm/errors.hpp"
#include "ocpm/preprocess.hpp"
#include "support/build.hpp"
#include "support/random_logs.hpp"

#include <random>

using namespace ocpm;
using namespace ocpm::preprocess;

namespace {

// Two schedules handled by one technician; S1 runs to JOB CLOSED, S2 stalls
// at INPROCESS.
OCEventLog two_schedule_log() {
    test::LogBuilder b;
    b.event("SCHEDULER START", "2023-01-02 08:00", {{"schedule", {"S1"}}});
    b.event("ACCEPT", "2023-01-02 08:30", {{"schedule", {"S1"}}, {"technician", {"T1"}}});
    b.event("JOB CLOSED", "2023-01-02 15:00", {{"schedule", {"S1"}}, {"technician", {"T1"}}});
    b.event("SCHEDULER END", "2023-01-02 17:00", {{"schedule", {"S1"}}});
    b.event("SCHEDULER START", "2023-01-03 08:00", {{"schedule", {"S2"}}});
    b.event("ACCEPT", "2023-01-03 08:30", {{"schedule", {"S2"}}, {"technician", {"T1"}}});
    b.event("INPROCESS", "2023-01-03 10:00", {{"schedule", {"S2"}}, {"technician", {"T1"}}});
    b.event("SCHEDULER END", "2023-01-03 17:00", {{"schedule", {"S2"}}});
    return b.build();
}

CompletionSpec schedule_completion() {
    CompletionSpec spec;
    spec.perType["schedule"] = {"JOB CLOSED", "REJECT"};
    return spec;
}

} // namespace

TEST_CASE("filter_incomplete removes objects that never terminate") {
    const OCEventLog log = two_schedule_log();
    const FilterResult result = filter_incomplete(log, schedule_completion());

    CHECK(result.removedObjects.at("schedule") == std::set<std::string>{"S2"});
    CHECK(result.log.objects().count("S1") == 1);
    CHECK(result.log.objects().count("S2") == 0);
    // S2's scheduler events referenced only S2 and are gone; the shared
    // events survive with the reference stripped.
    CHECK(result.removedEventCount == 2);
    CHECK(result.log.events().size() == 6);
    for (const auto& ev : result.log.events()) {
        CHECK(!ev.omap.count("schedule") == (ev.eid == "e0006" || ev.eid == "e0007"));
    }
    // T1 still has events, so it stays.
    CHECK(result.log.objects().count("T1") == 1);
}

TEST_CASE("filter_incomplete: empty spec is the identity") {
    const OCEventLog log = two_schedule_log();
    const FilterResult result = filter_incomplete(log, CompletionSpec{});
    CHECK(result.log == log);
    CHECK(result.removedObjects.empty());
    CHECK(result.removedEventCount == 0);
}

TEST_CASE("stripping preserves co-referenced objects' histories") {
    test::LogBuilder b;
    // T2 only ever worked the incomplete schedule S2. The shared event
    // survives with S2 stripped, so T2 keeps its history and stays.
    b.event("JOB CLOSED", "2023-01-02 15:00", {{"schedule", {"S1"}}, {"technician", {"T1"}}});
    b.event("INPROCESS", "2023-01-03 10:00", {{"schedule", {"S2"}}, {"technician", {"T2"}}});
    const FilterResult result = filter_incomplete(b.build(), schedule_completion());
    CHECK(result.removedObjects.at("schedule") == std::set<std::string>{"S2"});
    CHECK(result.removedObjects.count("technician") == 0);
    CHECK(result.log.objects().count("T2") == 1);
    CHECK(result.log.events().size() == 2);
    CHECK(result.log.events()[1].omap.count("schedule") == 0);
}

TEST_CASE("objects that never had events are not fallout") {
    test::LogBuilder b;
    b.object("idle", "technician");
    b.event("JOB CLOSED", "2023-01-02 15:00", {{"schedule", {"S1"}}, {"technician", {"T1"}}});
    const FilterResult result = filter_incomplete(b.build(), schedule_completion());
    CHECK(result.log.objects().count("idle") == 1);
}

TEST_CASE("filter_order_anomalies whole-trace semantics") {
    test::LogBuilder b;
    b.event("SCHEDULER START", "2023-01-02 08:00", {{"schedule", {"ok"}}});
    b.event("SCHEDULER END", "2023-01-02 17:00", {{"schedule", {"ok"}}});
    b.event("SCHEDULER END", "2023-01-03 08:00", {{"schedule", {"bad"}}});
    b.event("SCHEDULER START", "2023-01-03 17:00", {{"schedule", {"bad"}}});
    b.event("SCHEDULER END", "2023-01-04 08:00", {{"schedule", {"endonly"}}});

    const std::vector<PrecedencePair> pairs{
        {"SCHEDULER START", "SCHEDULER END", "schedule", ScopeMode::WholeTrace}};
    const FilterResult result = filter_order_anomalies(b.build(), pairs);
    CHECK(result.removedObjects.at("schedule") == std::set<std::string>{"bad", "endonly"});
    CHECK(result.log.objects().count("ok") == 1);
}

TEST_CASE("filter_order_anomalies per-pair semantics catch later inversions") {
    test::LogBuilder b;
    // First trip is fine, second trip has ONSITE with no preceding ENROUTE.
    b.event("ENROUTE", "2023-01-02 08:00", {{"technician", {"T1"}}});
    b.event("ONSITE", "2023-01-02 09:00", {{"technician", {"T1"}}});
    b.event("ONSITE", "2023-01-02 11:00", {{"technician", {"T1"}}});
    b.event("ENROUTE", "2023-01-02 12:00", {{"technician", {"T1"}}});
    // A clean two-trip technician.
    b.event("ENROUTE", "2023-01-02 08:00", {{"technician", {"T2"}}});
    b.event("ONSITE", "2023-01-02 09:00", {{"technician", {"T2"}}});
    b.event("ENROUTE", "2023-01-02 10:00", {{"technician", {"T2"}}});
    b.event("ONSITE", "2023-01-02 11:00", {{"technician", {"T2"}}});

    const std::vector<PrecedencePair> pairs{
        {"ENROUTE", "ONSITE", "technician", ScopeMode::PerPair}};
    const FilterResult result = filter_order_anomalies(b.build(), pairs);
    CHECK(result.removedObjects.at("technician") == std::set<std::string>{"T1"});
    CHECK(result.log.objects().count("T2") == 1);

    // Whole-trace mode would have kept T1: its first ONSITE follows an ENROUTE.
    const std::vector<PrecedencePair> whole{
        {"ENROUTE", "ONSITE", "technician", ScopeMode::WholeTrace}};
    const FilterResult relaxed = filter_order_anomalies(b.build(), whole);
    CHECK(relaxed.removedObjects.empty());
}

TEST_CASE("filter_cardinality removes subjects with too many related objects") {
    test::LogBuilder b;
    b.event("ACCEPT", "2023-01-02 08:00", {{"schedule", {"S1"}}, {"technician", {"T1"}}});
    b.event("INPROCESS", "2023-01-02 09:00", {{"schedule", {"S1"}}, {"technician", {"T1"}}});
    b.event("ACCEPT", "2023-01-02 08:00", {{"schedule", {"S2"}}, {"technician", {"T1"}}});
    b.event("INPROCESS", "2023-01-02 09:30", {{"schedule", {"S2"}}, {"technician", {"T2"}}});
    const OCEventLog log = b.build();

    const FilterResult result = filter_cardinality(log, "schedule", "technician", 1);
    CHECK(result.removedObjects.at("schedule") == std::set<std::string>{"S2"});
    CHECK(result.log.objects().count("S1") == 1);

    CHECK_THROWS_AS(filter_cardinality(log, "customer", "technician", 1), UnknownType);
    CHECK_THROWS_AS(filter_cardinality(log, "schedule", "technician", 0), InvalidConfig);
}

TEST_CASE("filters are idempotent and monotone on random logs") {
    std::mt19937 rng(47);
    const std::vector<std::string> acts{"SCHEDULER START", "SCHEDULER END", "ACCEPT",
                                        "JOB CLOSED",      "INPROCESS",     "ENROUTE",
                                        "ONSITE"};
    for (int i = 0; i < 40; ++i) {
        const OCEventLog log = test::random_small_log(rng, 20, acts);
        CompletionSpec spec;
        spec.perType[*log.objectTypes().begin()] = {"JOB CLOSED"};
        const FilterResult once = filter_incomplete(log, spec);
        CHECK(once.log.events().size() <= log.events().size());
        const FilterResult twice = filter_incomplete(once.log, spec);
        CHECK(twice.log == once.log);
        CHECK(twice.removedObjects.empty());

        const std::vector<PrecedencePair> pairs{
            {"ENROUTE", "ONSITE", *log.objectTypes().begin(), ScopeMode::PerPair}};
        const FilterResult anomalies = filter_order_anomalies(log, pairs);
        const FilterResult anomaliesTwice = filter_order_anomalies(anomalies.log, pairs);
        CHECK(anomaliesTwice.log == anomalies.log);
    }
}

TEST_CASE("derive_daily_cases splits by UTC date") {
    test::LogBuilder b;
    b.event("A", "2023-01-02 08:00", {{"technician", {"T1"}}});
    b.event("B", "2023-01-02 18:00", {{"technician", {"T1"}}});
    b.event("C", "2023-01-03 08:00", {{"technician", {"T1"}}});
    const OCEventLog log = b.build();

    const FlattenedLog daily = derive_daily_cases(log, "technician");
    REQUIRE(daily.cases.size() == 2);
    CHECK(daily.cases.at("T1@2023-01-02").size() == 2);
    CHECK(daily.cases.at("T1@2023-01-03").size() == 1);
    CHECK_THROWS_AS(derive_daily_cases(log, "customer"), UnknownType);
}

TEST_CASE("Table-1 technician yields a single daily case of four events") {
    test::LogBuilder b;
    b.event("ACCEPT", "2023-01-02 08:54", {{"technician", {"4006975"}}, {"schedule", {"3948148"}}});
    b.event("ENROUTE", "2023-01-02 08:54", {{"technician", {"4006975"}}});
    b.event("ONSITE", "2023-01-02 12:51", {{"technician", {"4006975"}}});
    b.event("INPROCESS", "2023-01-02 12:51",
            {{"technician", {"4006975"}}, {"schedule", {"3948148"}}});
    const FlattenedLog daily = derive_daily_cases(b.build(), "technician");
    REQUIRE(daily.cases.size() == 1);
    CHECK(daily.cases.at("4006975@2023-01-02").size() == 4);
}

TEST_CASE("daily cases partition the flattened trace") {
    std::mt19937 rng(53);
    for (int i = 0; i < 30; ++i) {
        const OCEventLog log = test::random_small_log(rng, 20);
        const std::string otype = *log.objectTypes().begin();
        const FlattenedLog flat = flatten(log, otype);
        const FlattenedLog daily = derive_daily_cases(log, otype);
        for (const auto& [oid, trace] : flat.cases) {
            std::vector<TraceEvent> concatenated;
            for (const auto& [caseId, dayTrace] : daily.cases) { // map order = date order
                if (caseId.rfind(oid + "@", 0) == 0) {
                    concatenated.insert(concatenated.end(), dayTrace.begin(), dayTrace.end());
                }
            }
            CHECK(concatenated == trace);
        }
    }
}

TEST_CASE("run_pipeline composes the three filters and reports them") {
    const OCEventLog log = two_schedule_log();
    const PipelineResult result = run_pipeline(log, PreprocessConfig::defaults());
    REQUIRE(result.stages.size() == 3);
    CHECK(result.stages[0].name == "incomplete");
    CHECK(result.stages[0].removedObjects.at("schedule") == std::set<std::string>{"S2"});
    CHECK(result.stages[1].name == "order-anomalies");
    CHECK(result.stages[1].removedObjects.empty());
    CHECK(result.stages[2].name == "cardinality");
    CHECK(result.eventsBefore == 8);
    CHECK(result.log.events().size() == 6);

    const std::string report = report_json(result);
    CHECK(report.find("\"eventsBefore\": 8") != std::string::npos);
    CHECK(report.find("incomplete") != std::string::npos);
}

TEST_CASE("preprocess config round-trips through JSON") {
    const PreprocessConfig config = PreprocessConfig::defaults();
    const PreprocessConfig reparsed = PreprocessConfig::from_json(config.to_json());
    CHECK(reparsed.completion.perType == config.completion.perType);
    REQUIRE(reparsed.precedence.size() == config.precedence.size());
    for (std::size_t i = 0; i < config.precedence.size(); ++i) {
        CHECK(reparsed.precedence[i].before == config.precedence[i].before);
        CHECK(reparsed.precedence[i].mode == config.precedence[i].mode);
    }
    CHECK(reparsed.cardinality.size() == config.cardinality.size());
    CHECK_THROWS_AS(PreprocessConfig::from_json("nope"), MalformedInput);
    CHECK_THROWS_AS(PreprocessConfig::from_json(
                        R"({"precedence": [{"before": "A", "after": "A", "scope": "t"}]})"),
                    MalformedInput);
}
