#pragma once

#include "ocpm/ocel.hpp"

#include <cstddef>
#include <map>
#include <string>

namespace ocpm::stats {

struct RegionRow {
    std::size_t scheduleCount = 0;
    std::size_t technicianCount = 0;
    double schedulesPerTechnician = 0.0;
    bool ratioDefined = false; // false when technicianCount == 0
};

struct RegionStats {
    std::string attribute;
    std::map<std::string, RegionRow> rows; // region value -> counts
};

/// Groups schedules and technicians by the string attribute `attr` on the
/// objects. Objects lacking the attribute land in the "(unknown)" bucket, or
/// raise MissingAttribute listing the offending oids when `strict` is set.
RegionStats region_distribution(const OCEventLog& log, const std::string& attr = "region",
                                bool strict = false);

struct LogSummary {
    std::size_t eventCount = 0;
    std::map<std::string, std::size_t> objectCounts;        // per type
    std::map<std::string, std::size_t> activityFrequencies; // per activity
    std::map<std::string, double> avgEventsPerObject;       // per type
};

LogSummary log_summary(const OCEventLog& log);

std::string to_json(const RegionStats& regions);
std::string to_json(const LogSummary& summary);

/// "region,schedules,technicians,ratio" table; ratio blank when undefined.
std::string region_csv(const RegionStats& regions);

} // namespace ocpm::stats
