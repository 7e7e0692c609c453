#include "ocpm/statistics.hpp"

#include "ocpm/activities.hpp"
#include "ocpm/errors.hpp"

#include <json.hpp>

#include <cstdio>
#include <sstream>

namespace ocpm::stats {

namespace act = ocpm::activities;
using ordered_json = nlohmann::ordered_json;

RegionStats region_distribution(const OCEventLog& log, const std::string& attr, bool strict) {
    RegionStats result;
    result.attribute = attr;
    std::string missing;

    auto bucket = [&](const ObjectInstance& obj) -> std::string {
        auto it = obj.attributes.find(attr);
        if (it != obj.attributes.end()) {
            if (const auto* s = std::get_if<std::string>(&it->second)) return *s;
        }
        if (strict) {
            missing += missing.empty() ? obj.oid : ", " + obj.oid;
            return "(unknown)";
        }
        return "(unknown)";
    };

    for (const auto& [oid, obj] : log.objects()) {
        if (obj.otype == act::kScheduleType) {
            ++result.rows[bucket(obj)].scheduleCount;
        } else if (obj.otype == act::kTechnicianType) {
            ++result.rows[bucket(obj)].technicianCount;
        }
    }
    if (strict && !missing.empty()) {
        throw MissingAttribute("objects missing attribute \"" + attr + "\": " + missing);
    }
    for (auto& [region, row] : result.rows) {
        if (row.technicianCount > 0) {
            row.schedulesPerTechnician = static_cast<double>(row.scheduleCount) /
                                         static_cast<double>(row.technicianCount);
            row.ratioDefined = true;
        }
    }
    return result;
}

LogSummary log_summary(const OCEventLog& log) {
    LogSummary summary;
    summary.eventCount = log.events().size();
    std::map<std::string, std::size_t> traceLengthSum;
    for (const auto& otype : log.objectTypes()) {
        summary.objectCounts[otype] = 0;
        traceLengthSum[otype] = 0;
    }
    for (const auto& [oid, obj] : log.objects()) {
        ++summary.objectCounts[obj.otype];
        traceLengthSum[obj.otype] += log.eventsOf(oid).size();
    }
    for (const auto& ev : log.events()) ++summary.activityFrequencies[ev.activity];
    for (const auto& [otype, count] : summary.objectCounts) {
        summary.avgEventsPerObject[otype] =
            count == 0 ? 0.0
                       : static_cast<double>(traceLengthSum[otype]) / static_cast<double>(count);
    }
    return summary;
}

std::string to_json(const RegionStats& regions) {
    ordered_json doc = ordered_json::object();
    doc["attribute"] = regions.attribute;
    ordered_json jRows = ordered_json::object();
    for (const auto& [region, row] : regions.rows) {
        ordered_json jRow = ordered_json::object();
        jRow["schedules"] = row.scheduleCount;
        jRow["technicians"] = row.technicianCount;
        if (row.ratioDefined) {
            jRow["schedulesPerTechnician"] = row.schedulesPerTechnician;
        } else {
            jRow["schedulesPerTechnician"] = nullptr;
        }
        jRows[region] = std::move(jRow);
    }
    doc["regions"] = std::move(jRows);
    return doc.dump(2) + "\n";
}

std::string to_json(const LogSummary& summary) {
    ordered_json doc = ordered_json::object();
    doc["eventCount"] = summary.eventCount;
    doc["objectCounts"] = summary.objectCounts;
    doc["activityFrequencies"] = summary.activityFrequencies;
    doc["avgEventsPerObject"] = summary.avgEventsPerObject;
    return doc.dump(2) + "\n";
}

std::string region_csv(const RegionStats& regions) {
    std::ostringstream out;
    out << "region,schedules,technicians,ratio\n";
    char buf[64];
    for (const auto& [region, row] : regions.rows) {
        out << '"' << region << "\"," << row.scheduleCount << ',' << row.technicianCount << ',';
        if (row.ratioDefined) {
            std::snprintf(buf, sizeof(buf), "%.4f", row.schedulesPerTechnician);
            out << buf;
        }
        out << '\n';
    }
    return out.str();
}

} // namespace ocpm::stats
