#include "ocpm/performance.hpp"

#include "ocpm/activities.hpp"
#include "ocpm/preprocess.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace ocpm::perf {

namespace act = ocpm::activities;
using ordered_json = nlohmann::ordered_json;

OpenScheduleTracker::OpenScheduleTracker()
    : OpenScheduleTracker(act::kScheduleType, act::kTechnicianType) {}

OpenScheduleTracker::OpenScheduleTracker(std::string itemType, std::string carrierType)
    : itemType_(std::move(itemType)), carrierType_(std::move(carrierType)) {}

void OpenScheduleTracker::observe(const Event& ev) {
    const auto* carriers = ev.refs(carrierType_);
    const auto* items = ev.refs(itemType_);
    if (carriers == nullptr || items == nullptr) return;
    if (ev.activity == act::kAccept) {
        for (const auto& carrier : *carriers) {
            auto& open = open_[carrier];
            for (const auto& item : *items) {
                // Re-accepting moves the item to the most-recent slot.
                open.erase(std::remove(open.begin(), open.end(), item), open.end());
                open.push_back(item);
            }
        }
    } else if (ev.activity == act::kJobDone) {
        for (const auto& carrier : *carriers) {
            auto it = open_.find(carrier);
            if (it == open_.end()) continue;
            auto& open = it->second;
            for (const auto& item : *items) {
                open.erase(std::remove(open.begin(), open.end(), item), open.end());
            }
        }
    }
}

std::optional<std::string> OpenScheduleTracker::current(const std::string& carrier) const {
    auto it = open_.find(carrier);
    if (it == open_.end() || it->second.empty()) return std::nullopt;
    return it->second.back();
}

TripAssociation associate_trips(const OCEventLog& log) {
    TripAssociation result;
    OpenScheduleTracker tracker;
    std::unordered_map<std::string, std::optional<Timestamp>> pending;

    for (const Event& ev : log.events()) {
        tracker.observe(ev);
        const auto* techs = ev.refs(act::kTechnicianType);
        if (techs == nullptr) continue;
        if (ev.activity == act::kEnroute) {
            for (const auto& tech : *techs) {
                auto& open = pending[tech];
                if (open.has_value()) ++result.unmatchedEnroute; // superseded
                open = ev.timestamp;
            }
        } else if (ev.activity == act::kOnsite) {
            for (const auto& tech : *techs) {
                auto& open = pending[tech];
                if (!open.has_value()) {
                    ++result.unmatchedOnsite;
                    continue;
                }
                result.trips.push_back(Trip{tech, tracker.current(tech), *open, ev.timestamp,
                                            hours_between(*open, ev.timestamp)});
                open.reset();
            }
        }
    }
    for (const auto& [tech, open] : pending) {
        if (open.has_value()) ++result.unmatchedEnroute;
    }
    return result;
}

PerfStat PerfStat::from_records(std::string metric,
                                std::vector<std::pair<std::string, double>> records) {
    PerfStat stat;
    stat.metric = std::move(metric);
    stat.records = std::move(records);
    stat.count = stat.records.size();
    if (stat.count == 0) return stat;

    std::vector<double> values;
    values.reserve(stat.count);
    double sum = 0.0;
    for (const auto& [owner, value] : stat.records) {
        values.push_back(value);
        sum += value;
    }
    std::sort(values.begin(), values.end());
    auto rank = [&](double q) {
        const auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size())));
        return values[std::min(values.size() - 1, idx == 0 ? 0 : idx - 1)];
    };
    stat.min = values.front();
    stat.max = values.back();
    stat.mean = sum / static_cast<double>(stat.count);
    stat.p50 = rank(0.50);
    stat.p95 = rank(0.95);
    return stat;
}

PerfStat transit_times(const TripAssociation& association) {
    std::vector<std::pair<std::string, double>> records;
    records.reserve(association.trips.size());
    for (const Trip& trip : association.trips) {
        records.emplace_back(trip.boundSchedule.value_or(trip.technician), trip.transitHours);
    }
    return PerfStat::from_records("transit_hours", std::move(records));
}

PerfStat transit_times(const OCEventLog& log) { return transit_times(associate_trips(log)); }

namespace {

// First timestamp of `activity` for every object of `otype`.
std::map<std::string, Timestamp> first_occurrence(const OCEventLog& log, const std::string& otype,
                                                  const std::string& activity) {
    std::map<std::string, Timestamp> first;
    for (const Event& ev : log.events()) {
        if (ev.activity != activity) continue;
        const auto* oids = ev.refs(otype);
        if (oids == nullptr) continue;
        for (const auto& oid : *oids) first.try_emplace(oid, ev.timestamp);
    }
    return first;
}

} // namespace

LaggingResult lagging_times(const OCEventLog& log) {
    const auto starts = first_occurrence(log, act::kScheduleType, act::kSchedulerStart);
    const auto accepts = first_occurrence(log, act::kScheduleType, act::kAccept);

    LaggingResult result;
    std::vector<std::pair<std::string, double>> records;
    for (const auto& oid : log.oidsOfType(act::kScheduleType)) {
        const auto itStart = starts.find(oid);
        const auto itAccept = accepts.find(oid);
        if (itStart == starts.end() || itAccept == accepts.end()) {
            ++result.skippedCount;
            continue;
        }
        const double lag = hours_between(itStart->second, itAccept->second);
        if (lag > 0.0) {
            records.emplace_back(oid, lag);
        } else {
            ++result.earlyCount;
        }
    }
    result.stat = PerfStat::from_records("lagging_hours", std::move(records));
    return result;
}

ScheduleHoursResult schedule_hours(const OCEventLog& log) {
    const auto starts = first_occurrence(log, act::kScheduleType, act::kSchedulerStart);
    const auto ends = first_occurrence(log, act::kScheduleType, act::kSchedulerEnd);
    const auto accepts = first_occurrence(log, act::kScheduleType, act::kAccept);
    const auto closes = first_occurrence(log, act::kScheduleType, act::kJobClosed);

    ScheduleHoursResult result;
    std::vector<std::pair<std::string, double>> overage;
    for (const auto& oid : log.oidsOfType(act::kScheduleType)) {
        const auto itStart = starts.find(oid);
        const auto itEnd = ends.find(oid);
        const auto itAccept = accepts.find(oid);
        const auto itClose = closes.find(oid);
        if (itStart == starts.end() || itEnd == ends.end() || itAccept == accepts.end() ||
            itClose == closes.end()) {
            ++result.skippedCount;
            continue;
        }
        ScheduleHours rec;
        rec.schedule = oid;
        rec.scheduledHours = hours_between(itStart->second, itEnd->second);
        rec.actualHours = hours_between(itAccept->second, itClose->second);
        rec.overwork = rec.actualHours > rec.scheduledHours;
        if (rec.overwork) {
            ++result.overworkCount;
            overage.emplace_back(oid, rec.actualHours - rec.scheduledHours);
        }
        result.records.push_back(std::move(rec));
    }
    result.overworkStat = PerfStat::from_records("overwork_hours", std::move(overage));
    return result;
}

PerfStat daily_labor_hours(const OCEventLog& log) {
    const auto daily = preprocess::derive_daily_cases(log, act::kTechnicianType);
    std::vector<std::pair<std::string, double>> records;
    records.reserve(daily.cases.size());
    for (const auto& [caseId, trace] : daily.cases) {
        records.emplace_back(caseId,
                             hours_between(trace.front().timestamp, trace.back().timestamp));
    }
    return PerfStat::from_records("daily_labor_hours", std::move(records));
}

HoldImpact hold_impact(const OCEventLog& log) {
    const auto daily = preprocess::derive_daily_cases(log, act::kTechnicianType);
    HoldImpact impact;
    double sumWith = 0.0, sumWithout = 0.0;
    for (const auto& [caseId, trace] : daily.cases) {
        const double span = hours_between(trace.front().timestamp, trace.back().timestamp);
        const bool held = std::any_of(trace.begin(), trace.end(), [](const TraceEvent& te) {
            return te.activity == act::kHold;
        });
        if (held) {
            sumWith += span;
            ++impact.daysWithHold;
        } else {
            sumWithout += span;
            ++impact.daysWithoutHold;
        }
    }
    if (impact.daysWithHold > 0) {
        impact.meanWithHold = sumWith / static_cast<double>(impact.daysWithHold);
    }
    if (impact.daysWithoutHold > 0) {
        impact.meanWithoutHold = sumWithout / static_cast<double>(impact.daysWithoutHold);
    }
    impact.defined = impact.daysWithHold > 0 && impact.daysWithoutHold > 0 &&
                     impact.meanWithoutHold > 0.0;
    if (impact.defined) impact.ratio = impact.meanWithHold / impact.meanWithoutHold;
    return impact;
}

namespace {

struct OfficeLeg {
    Timestamp headAt;
    Timestamp arriveAt;
    double hours;
};

// HEAD OFFICE -> ARRIVE OFFICE legs attributed to the technician's open
// schedule at departure time.
std::map<std::string, std::vector<OfficeLeg>> office_legs_by_schedule(const OCEventLog& log) {
    std::map<std::string, std::vector<OfficeLeg>> legs;
    OpenScheduleTracker tracker;
    struct PendingLeg {
        Timestamp headAt;
        std::optional<std::string> schedule;
    };
    std::unordered_map<std::string, std::optional<PendingLeg>> pending;

    for (const Event& ev : log.events()) {
        tracker.observe(ev);
        const auto* techs = ev.refs(act::kTechnicianType);
        if (techs == nullptr) continue;
        if (ev.activity == act::kHeadOffice) {
            for (const auto& tech : *techs) {
                pending[tech] = PendingLeg{ev.timestamp, tracker.current(tech)};
            }
        } else if (ev.activity == act::kArriveOffice) {
            for (const auto& tech : *techs) {
                auto& open = pending[tech];
                if (!open.has_value()) continue;
                if (open->schedule.has_value()) {
                    legs[*open->schedule].push_back(OfficeLeg{
                        open->headAt, ev.timestamp, hours_between(open->headAt, ev.timestamp)});
                }
                open.reset();
            }
        }
    }
    return legs;
}

TransitShareResult transit_share_impl(const TripAssociation& association,
                                      const ScheduleHoursResult& hours) {
    std::map<std::string, double> scheduledOf;
    for (const auto& rec : hours.records) scheduledOf[rec.schedule] = rec.scheduledHours;

    std::map<std::string, double> firstTransit;
    for (const Trip& trip : association.trips) {
        if (trip.boundSchedule.has_value()) {
            firstTransit.try_emplace(*trip.boundSchedule, trip.transitHours);
        }
    }

    TransitShareResult result;
    std::vector<std::pair<std::string, double>> records;
    for (const auto& [oid, transit] : firstTransit) {
        const auto it = scheduledOf.find(oid);
        if (it == scheduledOf.end() || it->second <= 0.0) {
            ++result.skippedCount;
            continue;
        }
        records.emplace_back(oid, transit / it->second);
    }
    result.stat = PerfStat::from_records("transit_share", std::move(records));
    return result;
}

PerfStat accumulated_transit_impl(const OCEventLog& log, const TripAssociation& association) {
    std::map<std::string, std::vector<const Trip*>> tripsOf;
    for (const Trip& trip : association.trips) {
        if (trip.boundSchedule.has_value()) tripsOf[*trip.boundSchedule].push_back(&trip);
    }
    const auto legs = office_legs_by_schedule(log);

    std::vector<std::pair<std::string, double>> records;
    for (const auto& [oid, trips] : tripsOf) {
        double total = 0.0;
        for (const Trip* trip : trips) total += trip->transitHours;
        const auto itLegs = legs.find(oid);
        if (itLegs != legs.end()) {
            for (const OfficeLeg& leg : itLegs->second) {
                // Only legs followed by another bound trip count: the return
                // to the site is what makes the detour part of the schedule.
                const bool followed =
                    std::any_of(trips.begin(), trips.end(), [&](const Trip* trip) {
                        return trip->enrouteAt >= leg.arriveAt;
                    });
                if (followed) total += leg.hours;
            }
        }
        records.emplace_back(oid, total);
    }
    return PerfStat::from_records("accumulated_transit_hours", std::move(records));
}

CascadeResult cascade_delays_impl(const OCEventLog& log) {
    const auto starts = first_occurrence(log, act::kScheduleType, act::kSchedulerStart);
    const auto inprocess = first_occurrence(log, act::kScheduleType, act::kInprocess);

    // First technician co-appearing with each schedule.
    std::map<std::string, std::string> technicianOf;
    for (const Event& ev : log.events()) {
        const auto* scheds = ev.refs(act::kScheduleType);
        const auto* techs = ev.refs(act::kTechnicianType);
        if (scheds == nullptr || techs == nullptr) continue;
        for (const auto& oid : *scheds) technicianOf.try_emplace(oid, techs->front());
    }

    struct DaySchedule {
        Timestamp start;
        std::string oid;
    };
    std::map<std::string, std::vector<DaySchedule>> days; // "<tech>@<date>"
    CascadeResult result;
    for (const auto& oid : log.oidsOfType(act::kScheduleType)) {
        const auto itStart = starts.find(oid);
        const auto itTech = technicianOf.find(oid);
        if (itStart == starts.end() || itTech == technicianOf.end()) {
            ++result.skippedCount;
            continue;
        }
        days[itTech->second + "@" + format_date(itStart->second)].push_back(
            DaySchedule{itStart->second, oid});
    }

    std::vector<std::pair<std::string, double>> records;
    for (auto& [dayKey, schedules] : days) {
        std::sort(schedules.begin(), schedules.end(), [](const DaySchedule& a, const DaySchedule& b) {
            return std::tie(a.start, a.oid) < std::tie(b.start, b.oid);
        });
        for (std::size_t i = 1; i < schedules.size(); ++i) {
            const auto itInp = inprocess.find(schedules[i].oid);
            if (itInp == inprocess.end()) {
                ++result.skippedCount;
                continue;
            }
            const double delay =
                std::max(0.0, hours_between(schedules[i].start, itInp->second));
            records.emplace_back(dayKey + "#" + std::to_string(i + 1), delay);
        }
    }
    result.stat = PerfStat::from_records("cascade_delay_hours", std::move(records));
    return result;
}

} // namespace

TransitShareResult transit_share(const OCEventLog& log) {
    return transit_share_impl(associate_trips(log), schedule_hours(log));
}

PerfStat accumulated_transit(const OCEventLog& log) {
    return accumulated_transit_impl(log, associate_trips(log));
}

CascadeResult cascade_delays(const OCEventLog& log) { return cascade_delays_impl(log); }

MetricsBundle compute_all(const OCEventLog& log) {
    MetricsBundle bundle;
    bundle.trips = associate_trips(log);
    bundle.transit = transit_times(bundle.trips);
    bundle.lagging = lagging_times(log);
    bundle.scheduleHours = schedule_hours(log);
    bundle.dailyHours = daily_labor_hours(log);
    bundle.holdImpact = hold_impact(log);
    bundle.transitShare = transit_share_impl(bundle.trips, bundle.scheduleHours);
    bundle.accumulated = accumulated_transit_impl(log, bundle.trips);
    bundle.cascade = cascade_delays_impl(log);
    return bundle;
}

namespace {

ordered_json stat_json(const PerfStat& stat) {
    return ordered_json{{"metric", stat.metric}, {"count", stat.count}, {"min", stat.min},
                        {"mean", stat.mean},     {"max", stat.max},     {"p50", stat.p50},
                        {"p95", stat.p95}};
}

} // namespace

std::string to_json(const MetricsBundle& bundle) {
    ordered_json doc = ordered_json::object();
    doc["transit"] = stat_json(bundle.transit);
    doc["transit"]["unmatchedEnroute"] = bundle.trips.unmatchedEnroute;
    doc["transit"]["unmatchedOnsite"] = bundle.trips.unmatchedOnsite;
    doc["lagging"] = stat_json(bundle.lagging.stat);
    doc["lagging"]["earlyCount"] = bundle.lagging.earlyCount;
    doc["lagging"]["skippedCount"] = bundle.lagging.skippedCount;
    ordered_json jHours = ordered_json::object();
    jHours["scheduleCount"] = bundle.scheduleHours.records.size();
    jHours["overworkCount"] = bundle.scheduleHours.overworkCount;
    jHours["skippedCount"] = bundle.scheduleHours.skippedCount;
    jHours["overage"] = stat_json(bundle.scheduleHours.overworkStat);
    doc["scheduleHours"] = std::move(jHours);
    doc["dailyLaborHours"] = stat_json(bundle.dailyHours);
    doc["holdImpact"] = ordered_json{{"meanWithHold", bundle.holdImpact.meanWithHold},
                                     {"meanWithoutHold", bundle.holdImpact.meanWithoutHold},
                                     {"ratio", bundle.holdImpact.ratio},
                                     {"daysWithHold", bundle.holdImpact.daysWithHold},
                                     {"daysWithoutHold", bundle.holdImpact.daysWithoutHold},
                                     {"defined", bundle.holdImpact.defined}};
    doc["transitShare"] = stat_json(bundle.transitShare.stat);
    doc["transitShare"]["skippedCount"] = bundle.transitShare.skippedCount;
    doc["accumulatedTransit"] = stat_json(bundle.accumulated);
    doc["cascadeDelays"] = stat_json(bundle.cascade.stat);
    doc["cascadeDelays"]["skippedCount"] = bundle.cascade.skippedCount;
    return doc.dump(2) + "\n";
}

std::string records_csv(const PerfStat& stat) {
    std::ostringstream out;
    out << "owner,hours\n";
    char buf[64];
    for (const auto& [owner, value] : stat.records) {
        std::snprintf(buf, sizeof(buf), "%.4f", value);
        out << owner << ',' << buf << '\n';
    }
    return out.str();
}

} // namespace ocpm::perf
