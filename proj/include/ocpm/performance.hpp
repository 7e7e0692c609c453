#pragma once

#include "ocpm/ocel.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ocpm::perf {

/// One technician journey: ENROUTE opening, closed by the technician's next
/// ONSITE. The bound schedule is the one most recently ACCEPTed by the
/// technician and not yet JOB DONE when the trip closes.
struct Trip {
    std::string technician;
    std::optional<std::string> boundSchedule;
    Timestamp enrouteAt;
    Timestamp onsiteAt;
    double transitHours = 0.0;
};

struct TripAssociation {
    std::vector<Trip> trips;
    std::size_t unmatchedEnroute = 0; // superseded or never closed
    std::size_t unmatchedOnsite = 0;  // ONSITE without an open ENROUTE
};

/// Tracks which schedule each technician is working on while scanning a log
/// in order: ACCEPT pushes the event's schedules onto the technician's open
/// list, JOB DONE removes them; the binding is the most recently accepted
/// schedule still open. Shared by trip association, accumulated transit and
/// the cross-object compliance rule (which may rebind it to other types).
class OpenScheduleTracker {
public:
    OpenScheduleTracker(); // schedule items carried by technicians
    OpenScheduleTracker(std::string itemType, std::string carrierType);

    void observe(const Event& ev);
    std::optional<std::string> current(const std::string& carrier) const;

private:
    std::string itemType_;
    std::string carrierType_;
    std::unordered_map<std::string, std::vector<std::string>> open_;
};

TripAssociation associate_trips(const OCEventLog& log);

/// Named duration metric. Summary fields are fixed functions of the records:
/// mean is the left-to-right sum divided by count, p50/p95 use the
/// nearest-rank method on the sorted values, empty stats report all-zero
/// summaries. Recomputing from `records` reproduces them exactly.
struct PerfStat {
    std::string metric;
    std::vector<std::pair<std::string, double>> records; // owner key -> value
    std::size_t count = 0;
    double min = 0.0;
    double mean = 0.0;
    double max = 0.0;
    double p50 = 0.0;
    double p95 = 0.0;

    static PerfStat from_records(std::string metric,
                                 std::vector<std::pair<std::string, double>> records);
};

PerfStat transit_times(const OCEventLog& log);
PerfStat transit_times(const TripAssociation& association);

struct LaggingResult {
    PerfStat stat;               // positive ACCEPT - SCHEDULER START lags only
    std::size_t earlyCount = 0;  // accepted at or before the scheduled start
    std::size_t skippedCount = 0; // schedules missing either anchor
};
LaggingResult lagging_times(const OCEventLog& log);

struct ScheduleHours {
    std::string schedule;
    double scheduledHours = 0.0; // SCHEDULER END - SCHEDULER START
    double actualHours = 0.0;    // JOB CLOSED - ACCEPT
    bool overwork = false;       // strictly actual > scheduled
};
struct ScheduleHoursResult {
    std::vector<ScheduleHours> records;
    std::size_t overworkCount = 0;
    std::size_t skippedCount = 0; // schedules missing one of the four anchors
    PerfStat overworkStat;        // overage (actual - scheduled) of overwork schedules
};
ScheduleHoursResult schedule_hours(const OCEventLog& log);

/// Per technician-day span: last event timestamp minus first.
PerfStat daily_labor_hours(const OCEventLog& log);

struct HoldImpact {
    double meanWithHold = 0.0;
    double meanWithoutHold = 0.0;
    double ratio = 0.0; // meanWithHold / meanWithoutHold
    std::size_t daysWithHold = 0;
    std::size_t daysWithoutHold = 0;
    bool defined = false; // both partitions non-empty
};
HoldImpact hold_impact(const OCEventLog& log);

struct TransitShareResult {
    PerfStat stat;              // first bound trip transit / scheduled hours
    std::size_t skippedCount = 0; // zero or missing scheduled hours
};
TransitShareResult transit_share(const OCEventLog& log);

/// Sum of all transit bound to a schedule: its trips plus office-return legs
/// (HEAD OFFICE -> ARRIVE OFFICE while the schedule is still open, followed by
/// another bound trip).
PerfStat accumulated_transit(const OCEventLog& log);

struct CascadeResult {
    /// Record key "<technician>@<date>#<index>" for the day's 2nd, 3rd, ...
    /// schedule ordered by SCHEDULER START; value is the delay from
    /// SCHEDULER START to the schedule's first INPROCESS, floored at zero.
    PerfStat stat;
    std::size_t skippedCount = 0; // schedules never reaching INPROCESS
};
CascadeResult cascade_delays(const OCEventLog& log);

struct MetricsBundle {
    TripAssociation trips;
    PerfStat transit;
    LaggingResult lagging;
    ScheduleHoursResult scheduleHours;
    PerfStat dailyHours;
    HoldImpact holdImpact;
    TransitShareResult transitShare;
    PerfStat accumulated;
    CascadeResult cascade;
};

/// Runs every metric with the trip association computed once.
MetricsBundle compute_all(const OCEventLog& log);

/// Summary-only JSON report (records are exported separately as CSV).
std::string to_json(const MetricsBundle& bundle);

/// "owner,hours" rows, values to 4 decimal places.
std::string records_csv(const PerfStat& stat);

} // namespace ocpm::perf
