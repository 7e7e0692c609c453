#include "ocpm/loggen.hpp"

#include "ocpm/activities.hpp"
#include "ocpm/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <unordered_map>
#include <unordered_set>

namespace ocpm::loggen {

namespace act = ocpm::activities;
using ordered_json = nlohmann::ordered_json;

namespace {

// Deterministic sampling source: std::mt19937_64 produces an
// implementation-independent bit stream, and every transform below is our
// own, so a seed pins the log byte-for-byte on any platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
    int uniformInt(int lo, int hi) { // inclusive bounds
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(engine_() % span);
    }
    bool bernoulli(double p) { return uniform01() < p; }

private:
    std::mt19937_64 engine_;
};

double sample(const Dist& dist, Rng& rng) {
    return dist.kind == Dist::Kind::Fixed ? dist.lo : rng.uniform(dist.lo, dist.hi);
}

constexpr double kMinute = 1.0 / 60.0;

struct TimedEvent {
    double at = 0.0; // hours from the day's midnight
    std::string activity;
    bool refSchedule = false;
    bool refTechnician = false;
    std::vector<std::string> extraTechnicians;
};

struct SchedulePlan {
    std::string oid;
    std::string technician;
    std::string deviation = "none";
    bool officeReturn = false;
    bool overrun = false;
    std::vector<TimedEvent> events;

    bool hasJobDone() const {
        return std::any_of(events.begin(), events.end(), [](const TimedEvent& ev) {
            return ev.activity == act::kJobDone;
        });
    }
};

struct PendingEvent {
    Timestamp ts;
    std::int64_t seq = 0;
    std::string activity;
    std::string schedule;    // empty when not referenced
    std::string technician;  // empty when not referenced
    std::vector<std::string> extraTechnicians;
};

// Deviation tags double as GroundTruth keys.
const char* const kTagD1 = "D1";
const char* const kTagD2 = "D2";
const char* const kTagD3 = "D3";
const char* const kTagIncomplete = "incomplete";
const char* const kTagOrderAnomaly = "orderAnomaly";
const char* const kTagMultiTechnician = "multiTechnician";

void check_probability(double p, const char* name) {
    if (p < 0.0 || p > 1.0 || std::isnan(p)) {
        throw InvalidConfig(std::string(name) + " must be within [0, 1]");
    }
}

void check_dist(const Dist& dist, const char* name) {
    if (dist.lo < 0.0 || dist.hi < dist.lo || std::isnan(dist.lo) || std::isnan(dist.hi)) {
        throw InvalidConfig(std::string(name) + " bounds must satisfy 0 <= lo <= hi");
    }
}

} // namespace

double Dist::stddev() const {
    return kind == Kind::Fixed ? 0.0 : (hi - lo) / std::sqrt(12.0);
}

void GenConfig::validate() const {
    if (technicianCount < 0) throw InvalidConfig("technicianCount must be >= 0");
    if (dayCount < 0) throw InvalidConfig("dayCount must be >= 0");
    if (schedulesPerTechnicianPerDay.min < 0 ||
        schedulesPerTechnicianPerDay.max < schedulesPerTechnicianPerDay.min) {
        throw InvalidConfig("schedulesPerTechnicianPerDay must satisfy 0 <= min <= max");
    }
    check_dist(scheduledHours, "scheduledHours");
    check_dist(transitHours, "transitHours");
    check_dist(processingHours, "processingHours");
    check_dist(lagHours, "lagHours");
    check_dist(returnTransitHours, "returnTransitHours");
    check_dist(overrunHours, "overrunHours");
    if (holdSpanFactor < 1.0) throw InvalidConfig("holdSpanFactor must be >= 1");
    check_probability(pReject, "pReject");
    check_probability(pHold, "pHold");
    check_probability(pSurveyOmit, "pSurveyOmit");
    check_probability(pHoldBeforeOnsite, "pHoldBeforeOnsite");
    check_probability(pSurveyBeforeJobDone, "pSurveyBeforeJobDone");
    check_probability(pIncomplete, "pIncomplete");
    check_probability(pOrderAnomaly, "pOrderAnomaly");
    check_probability(pMultiTechnician, "pMultiTechnician");
    check_probability(pOfficeReturn, "pOfficeReturn");
    check_probability(pOverrun, "pOverrun");
    if (pMultiTechnician > 0.0 && technicianCount < 2) {
        throw InvalidConfig("pMultiTechnician > 0 requires at least 2 technicians");
    }
    for (const auto& region : regions) {
        if (region.weight <= 0.0) throw InvalidConfig("region weights must be positive");
    }
}

namespace {

ordered_json dist_json(const Dist& dist) {
    if (dist.kind == Dist::Kind::Fixed) {
        return ordered_json{{"dist", "fixed"}, {"value", dist.lo}};
    }
    return ordered_json{{"dist", "uniform"}, {"lo", dist.lo}, {"hi", dist.hi}};
}

Dist dist_from_json(const ordered_json& j, const char* name) {
    if (!j.is_object()) throw InvalidConfig(std::string(name) + " must be an object");
    const std::string kind = j.value("dist", std::string("uniform"));
    if (kind == "fixed") return Dist::fixed(j.at("value").get<double>());
    if (kind == "uniform") {
        return Dist::uniform(j.at("lo").get<double>(), j.at("hi").get<double>());
    }
    throw InvalidConfig(std::string("unknown distribution kind: ") + kind);
}

} // namespace

GenConfig GenConfig::from_json(std::string_view text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const ordered_json::parse_error& e) {
        throw MalformedInput(std::string("generator config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw MalformedInput("generator config must be a JSON object");

    GenConfig config;
    try {
        config.seed = doc.value("seed", config.seed);
        config.technicianCount = doc.value("technicianCount", config.technicianCount);
        config.dayCount = doc.value("dayCount", config.dayCount);
        if (doc.contains("schedulesPerTechnicianPerDay")) {
            const auto& jr = doc["schedulesPerTechnicianPerDay"];
            config.schedulesPerTechnicianPerDay = {jr.at("min").get<int>(),
                                                   jr.at("max").get<int>()};
        }
        if (doc.contains("regions")) {
            config.regions.clear();
            for (const auto& jr : doc["regions"]) {
                config.regions.push_back(
                    {jr.at("name").get<std::string>(), jr.value("weight", 1.0)});
            }
        }
        auto dist = [&](const char* name, Dist fallback) {
            return doc.contains(name) ? dist_from_json(doc[name], name) : fallback;
        };
        config.scheduledHours = dist("scheduledHours", config.scheduledHours);
        config.transitHours = dist("transitHours", config.transitHours);
        config.processingHours = dist("processingHours", config.processingHours);
        config.lagHours = dist("lagHours", config.lagHours);
        config.returnTransitHours = dist("returnTransitHours", config.returnTransitHours);
        config.overrunHours = dist("overrunHours", config.overrunHours);
        config.holdSpanFactor = doc.value("holdSpanFactor", config.holdSpanFactor);
        config.pReject = doc.value("pReject", config.pReject);
        config.pHold = doc.value("pHold", config.pHold);
        config.pSurveyOmit = doc.value("pSurveyOmit", config.pSurveyOmit);
        config.pHoldBeforeOnsite = doc.value("pHoldBeforeOnsite", config.pHoldBeforeOnsite);
        config.pSurveyBeforeJobDone =
            doc.value("pSurveyBeforeJobDone", config.pSurveyBeforeJobDone);
        config.pIncomplete = doc.value("pIncomplete", config.pIncomplete);
        config.pOrderAnomaly = doc.value("pOrderAnomaly", config.pOrderAnomaly);
        config.pMultiTechnician = doc.value("pMultiTechnician", config.pMultiTechnician);
        config.pOfficeReturn = doc.value("pOfficeReturn", config.pOfficeReturn);
        config.pOverrun = doc.value("pOverrun", config.pOverrun);
    } catch (const ordered_json::exception& e) {
        throw MalformedInput(std::string("bad generator config: ") + e.what());
    }
    config.validate();
    return config;
}

std::string GenConfig::to_json() const {
    ordered_json doc = ordered_json::object();
    doc["seed"] = seed;
    doc["technicianCount"] = technicianCount;
    doc["schedulesPerTechnicianPerDay"] = {{"min", schedulesPerTechnicianPerDay.min},
                                           {"max", schedulesPerTechnicianPerDay.max}};
    doc["dayCount"] = dayCount;
    ordered_json jRegions = ordered_json::array();
    for (const auto& region : regions) {
        jRegions.push_back({{"name", region.name}, {"weight", region.weight}});
    }
    doc["regions"] = std::move(jRegions);
    doc["scheduledHours"] = dist_json(scheduledHours);
    doc["transitHours"] = dist_json(transitHours);
    doc["processingHours"] = dist_json(processingHours);
    doc["lagHours"] = dist_json(lagHours);
    doc["returnTransitHours"] = dist_json(returnTransitHours);
    doc["overrunHours"] = dist_json(overrunHours);
    doc["holdSpanFactor"] = holdSpanFactor;
    doc["pReject"] = pReject;
    doc["pHold"] = pHold;
    doc["pSurveyOmit"] = pSurveyOmit;
    doc["pHoldBeforeOnsite"] = pHoldBeforeOnsite;
    doc["pSurveyBeforeJobDone"] = pSurveyBeforeJobDone;
    doc["pIncomplete"] = pIncomplete;
    doc["pOrderAnomaly"] = pOrderAnomaly;
    doc["pMultiTechnician"] = pMultiTechnician;
    doc["pOfficeReturn"] = pOfficeReturn;
    doc["pOverrun"] = pOverrun;
    return doc.dump(2) + "\n";
}

const std::set<std::string>& GroundTruth::oids(const std::string& tag) const {
    static const std::set<std::string> kEmpty;
    auto it = injected.find(tag);
    return it == injected.end() ? kEmpty : it->second;
}

namespace {

// Builds one schedule's events (hours from midnight). `avail` is when the
// technician becomes free again.
SchedulePlan build_schedule(const GenConfig& config, Rng& rng, std::string oid,
                            std::string technician, double plannedStart, double schedHours,
                            double& avail) {
    SchedulePlan plan;
    plan.oid = std::move(oid);
    plan.technician = std::move(technician);

    const double lag = sample(config.lagHours, rng);
    const double transit = sample(config.transitHours, rng);
    const double processing = sample(config.processingHours, rng);
    const double returnLeg = sample(config.returnTransitHours, rng);

    if (rng.bernoulli(config.pReject)) {
        plan.deviation = "reject";
    } else if (rng.bernoulli(config.pSurveyOmit)) {
        plan.deviation = kTagD1;
    } else if (rng.bernoulli(config.pHoldBeforeOnsite)) {
        plan.deviation = kTagD2;
    } else if (rng.bernoulli(config.pSurveyBeforeJobDone)) {
        plan.deviation = kTagD3;
    } else if (rng.bernoulli(config.pIncomplete)) {
        plan.deviation = kTagIncomplete;
    } else if (rng.bernoulli(config.pOrderAnomaly)) {
        plan.deviation = kTagOrderAnomaly;
    } else if (rng.bernoulli(config.pMultiTechnician)) {
        plan.deviation = kTagMultiTechnician;
    }

    plan.officeReturn = rng.bernoulli(config.pOfficeReturn);
    double legOut = 0.0, legBack = 0.0;
    if (plan.officeReturn) {
        legOut = sample(config.returnTransitHours, rng);
        legBack = sample(config.returnTransitHours, rng);
    }
    plan.overrun = rng.bernoulli(config.pOverrun);
    const double overrun = plan.overrun ? sample(config.overrunHours, rng) : 0.0;

    auto add = [&](double at, const std::string& activity, bool refS, bool refT) {
        plan.events.push_back(TimedEvent{at, activity, refS, refT, {}});
    };

    add(plannedStart, act::kSchedulerStart, true, false);

    if (plan.deviation == "reject") {
        const double tReject = std::max(plannedStart, avail) + lag;
        add(tReject, act::kReject, true, true);
        avail = tReject + kMinute;
    } else {
        const double tAccept = std::max(plannedStart, avail) + lag;
        add(tAccept, act::kAccept, true, true);
        const double tEnroute = tAccept;
        add(tEnroute, act::kEnroute, false, true);
        if (plan.deviation == kTagD2) {
            add(tEnroute + transit / 2.0, act::kHold, true, true);
        }
        const double tOnsite = tEnroute + transit;
        add(tOnsite, act::kOnsite, false, true);
        const double tInprocess = tOnsite;
        add(tInprocess, act::kInprocess, true, true);

        const double working = processing + overrun;
        double detour = 0.0;
        if (plan.officeReturn) {
            const double tHead = tInprocess + working / 3.0;
            add(tHead, act::kHeadOffice, false, true);
            const double tArrive = tHead + legOut;
            add(tArrive, act::kArriveOffice, false, true);
            add(tArrive, act::kEnroute, false, true);
            const double tBack = tArrive + legBack;
            add(tBack, act::kOnsite, false, true);
            add(tBack, act::kInprocess, true, true);
            detour = legOut + legBack;
        }

        const double tJobDone = tInprocess + working + detour;
        add(tJobDone, act::kJobDone, true, true);
        if (plan.deviation == kTagD3) {
            add(tInprocess + (working + detour) / 2.0, act::kSurveySent, true, true);
        }
        const double tHeadHome = tJobDone;
        add(tHeadHome, act::kHeadOffice, false, true);
        const double tArriveHome = tHeadHome + returnLeg;
        add(tArriveHome, act::kArriveOffice, false, true);
        const double tClosed = tArriveHome;
        add(tClosed, act::kJobClosed, true, true);
        double lastTech = tClosed;
        if (plan.deviation != kTagD1 && plan.deviation != kTagD3) {
            const double tSurvey = tClosed + kMinute;
            add(tSurvey, act::kSurveySent, true, true);
            lastTech = tSurvey;
        }
        avail = lastTech + kMinute;
    }

    add(plannedStart + schedHours, act::kSchedulerEnd, true, false);

    if (plan.deviation == kTagIncomplete) {
        // The execution is still "ongoing": nothing recorded past the first
        // INPROCESS, but the system-driven scheduler events remain.
        std::vector<TimedEvent> kept;
        const TimedEvent schedulerEnd = plan.events.back();
        for (const auto& ev : plan.events) {
            kept.push_back(ev);
            if (ev.activity == act::kInprocess) break;
        }
        kept.push_back(schedulerEnd);
        plan.events = std::move(kept);
    } else if (plan.deviation == kTagOrderAnomaly) {
        std::swap(plan.events.front().at, plan.events.back().at); // recording glitch
    }
    return plan;
}

// Stretches the day's span by the configured factor: a HOLD pause inside the
// last schedule's processing, shifting that schedule's subsequent events.
void insert_hold(std::vector<SchedulePlan>& day, double factor) {
    SchedulePlan& target = day.back();
    double spanLo = 0.0, spanHi = 0.0;
    bool any = false;
    for (const auto& plan : day) {
        for (const auto& ev : plan.events) {
            if (!ev.refTechnician) continue;
            if (!any || ev.at < spanLo) spanLo = any ? std::min(spanLo, ev.at) : ev.at;
            spanHi = any ? std::max(spanHi, ev.at) : ev.at;
            any = true;
        }
    }
    if (!any) return;
    const double pause = (factor - 1.0) * (spanHi - spanLo);

    double lastInprocess = 0.0, jobDone = 0.0;
    for (const auto& ev : target.events) {
        if (ev.activity == act::kInprocess) lastInprocess = std::max(lastInprocess, ev.at);
        if (ev.activity == act::kJobDone) jobDone = ev.at;
    }
    const double tHold = (lastInprocess + jobDone) / 2.0;
    for (auto& ev : target.events) {
        if (ev.at > tHold && ev.activity != act::kSchedulerEnd) ev.at += pause;
    }
    target.events.push_back(TimedEvent{tHold, act::kHold, true, true, {}});
    target.events.push_back(TimedEvent{tHold + pause, act::kInprocess, true, true, {}});
}

void audit_or_throw(const OCEventLog& log, const GroundTruth& truth);

} // namespace

GenResult generate(const GenConfig& config) {
    config.validate();

    GenResult result;
    auto& truth = result.truth;
    truth.configuredMeanTransit = config.transitHours.mean();
    truth.configuredMeanLag = config.lagHours.mean();
    for (const char* tag :
         {kTagD1, kTagD2, kTagD3, kTagIncomplete, kTagOrderAnomaly, kTagMultiTechnician}) {
        truth.injected[tag];
    }

    Rng rng(config.seed);
    const Timestamp epochDay0 = make_utc(2023, 1, 2, 0, 0, 0);

    std::vector<ObjectInstance> objects;
    std::vector<std::string> technicianRegion(static_cast<std::size_t>(config.technicianCount));
    double totalWeight = 0.0;
    for (const auto& region : config.regions) totalWeight += region.weight;

    std::vector<std::string> technicians;
    for (int i = 0; i < config.technicianCount; ++i) {
        technicians.push_back(std::to_string(4000000 + i + 1));
    }

    std::vector<PendingEvent> pending;
    std::vector<SchedulePlan> allPlans;
    std::unordered_map<std::string, std::map<std::string, Timestamp>> planFirsts;
    int scheduleCounter = 0;

    for (int i = 0; i < config.technicianCount; ++i) {
        std::string region;
        if (!config.regions.empty()) {
            double pick = rng.uniform01() * totalWeight;
            for (const auto& rw : config.regions) {
                region = rw.name;
                pick -= rw.weight;
                if (pick < 0.0) break;
            }
        }
        technicianRegion[static_cast<std::size_t>(i)] = region;

        for (int d = 0; d < config.dayCount; ++d) {
            const int nSched = rng.uniformInt(config.schedulesPerTechnicianPerDay.min,
                                              config.schedulesPerTechnicianPerDay.max);
            if (nSched == 0) continue;
            std::vector<SchedulePlan> day;
            double avail = 8.0;
            double planned = 8.0;
            for (int s = 0; s < nSched; ++s) {
                const double schedHours = sample(config.scheduledHours, rng);
                std::string oid = std::to_string(3900000 + ++scheduleCounter);
                objects.push_back(ObjectInstance{
                    oid, act::kScheduleType, {{"region", AttrValue{region}}}});
                day.push_back(build_schedule(config, rng, std::move(oid), technicians[i],
                                             planned, schedHours, avail));
                planned += schedHours;
            }
            if (rng.bernoulli(config.pHold)) {
                const auto& last = day.back();
                if (last.hasJobDone() && last.deviation != kTagD2) {
                    insert_hold(day, config.holdSpanFactor);
                }
            }

            const Timestamp dayBase{epochDay0.secs + static_cast<std::int64_t>(d) * 86400};
            for (auto& plan : day) {
                if (plan.deviation == kTagMultiTechnician) {
                    const auto buddy = static_cast<std::size_t>((i + 1) % config.technicianCount);
                    for (auto& ev : plan.events) {
                        if (ev.activity == act::kInprocess) {
                            ev.extraTechnicians.push_back(technicians[buddy]);
                            break;
                        }
                    }
                }
                if (plan.deviation != "none") truth.injected[plan.deviation].insert(plan.oid);
                auto& firstOf = planFirsts[plan.oid];
                for (const auto& ev : plan.events) {
                    PendingEvent out;
                    out.ts = Timestamp{dayBase.secs +
                                       static_cast<std::int64_t>(std::llround(ev.at * 60.0)) * 60};
                    out.seq = static_cast<std::int64_t>(pending.size());
                    out.activity = ev.activity;
                    if (ev.refSchedule) out.schedule = plan.oid;
                    if (ev.refTechnician) out.technician = plan.technician;
                    out.extraTechnicians = ev.extraTechnicians;
                    auto found = firstOf.find(ev.activity);
                    if (found == firstOf.end() || out.ts < found->second) {
                        firstOf[ev.activity] = out.ts;
                    }
                    pending.push_back(std::move(out));
                }
                allPlans.push_back(std::move(plan));
            }
        }
    }
    truth.injected.erase("reject");

    for (int i = 0; i < config.technicianCount; ++i) {
        objects.push_back(ObjectInstance{
            technicians[static_cast<std::size_t>(i)],
            act::kTechnicianType,
            {{"region", AttrValue{technicianRegion[static_cast<std::size_t>(i)]}}}});
    }

    std::stable_sort(pending.begin(), pending.end(),
                     [](const PendingEvent& a, const PendingEvent& b) {
                         if (a.ts != b.ts) return a.ts < b.ts;
                         return a.seq < b.seq;
                     });

    std::vector<Event> events;
    events.reserve(pending.size());
    char eidBuf[24];
    for (std::size_t k = 0; k < pending.size(); ++k) {
        const auto& pe = pending[k];
        Event ev;
        std::snprintf(eidBuf, sizeof(eidBuf), "e%08zu", k + 1);
        ev.eid = eidBuf;
        ev.activity = pe.activity;
        ev.timestamp = pe.ts;
        if (!pe.schedule.empty()) ev.omap[act::kScheduleType] = {pe.schedule};
        if (!pe.technician.empty()) {
            auto& techs = ev.omap[act::kTechnicianType];
            techs.push_back(pe.technician);
            for (const auto& extra : pe.extraTechnicians) techs.push_back(extra);
        }
        if (!pe.technician.empty() && pe.activity == act::kHold) {
            truth.holdDays[pe.technician + "@" + format_date(pe.ts)] = true;
        }
        events.push_back(std::move(ev));
    }

    result.log = OCEventLog::build(std::move(events), std::move(objects),
                                   {act::kScheduleType, act::kTechnicianType});

    for (const auto& plan : allPlans) {
        const auto& firstOf = planFirsts.at(plan.oid);
        ScheduleRecord rec;
        rec.oid = plan.oid;
        rec.technician = plan.technician;
        rec.deviation = plan.deviation;
        rec.officeReturn = plan.officeReturn;
        rec.overrun = plan.overrun;

        auto first = [&](const std::string& activity) -> const Timestamp* {
            auto it = firstOf.find(activity);
            return it == firstOf.end() ? nullptr : &it->second;
        };
        const Timestamp* start = first(act::kSchedulerStart);
        const Timestamp* end = first(act::kSchedulerEnd);
        const Timestamp* accept = first(act::kAccept);
        const Timestamp* reject = first(act::kReject);
        const Timestamp* closed = first(act::kJobClosed);
        const Timestamp* enroute = first(act::kEnroute);
        const Timestamp* onsite = first(act::kOnsite);

        rec.date = start != nullptr ? format_date(*start) : "";
        if (start != nullptr && end != nullptr) rec.scheduledHours = hours_between(*start, *end);
        if (start != nullptr) {
            if (accept != nullptr) {
                rec.lagHours = hours_between(*start, *accept);
            } else if (reject != nullptr) {
                rec.lagHours = hours_between(*start, *reject);
            }
        }
        rec.transitHours =
            enroute != nullptr && onsite != nullptr ? hours_between(*enroute, *onsite) : -1.0;
        if (start != nullptr && end != nullptr && accept != nullptr && closed != nullptr) {
            rec.actualHours = hours_between(*accept, *closed);
            rec.hasActualHours = true;
            rec.overwork = rec.actualHours > rec.scheduledHours;
            if (rec.overwork) ++truth.overworkCount;
        }
        truth.schedules.push_back(std::move(rec));
    }
    std::sort(truth.schedules.begin(), truth.schedules.end(),
              [](const ScheduleRecord& a, const ScheduleRecord& b) { return a.oid < b.oid; });

    audit_or_throw(result.log, truth);
    return result;
}

namespace {

// Verifies that the recorded injections hold in the emitted log, and that no
// untagged schedule exhibits them. Cheap scans, independent of the analysis
// modules.
void audit_or_throw(const OCEventLog& log, const GroundTruth& truth) {
    auto fail = [](const std::string& what) {
        throw Error("generator self-audit failed: " + what);
    };

    std::unordered_map<std::string, const ScheduleRecord*> recordOf;
    for (const auto& rec : truth.schedules) recordOf[rec.oid] = &rec;

    for (const auto& oid : log.oidsOfType(act::kScheduleType)) {
        const auto it = recordOf.find(oid);
        if (it == recordOf.end()) fail("schedule without truth record: " + oid);
        const ScheduleRecord& rec = *it->second;

        bool hasSurvey = false, hasJobClosed = false, hasReject = false;
        std::size_t firstSurvey = SIZE_MAX, firstJobDone = SIZE_MAX;
        std::size_t firstHold = SIZE_MAX, acceptPos = SIZE_MAX;
        std::size_t firstStart = SIZE_MAX, firstEnd = SIZE_MAX;
        std::unordered_set<std::string> relatedTechnicians;

        const auto& indices = log.eventsOf(oid);
        for (std::size_t p = 0; p < indices.size(); ++p) {
            const Event& ev = log.events()[indices[p]];
            if (ev.activity == act::kSurveySent) {
                hasSurvey = true;
                if (firstSurvey == SIZE_MAX) firstSurvey = p;
            } else if (ev.activity == act::kJobClosed) {
                hasJobClosed = true;
            } else if (ev.activity == act::kReject) {
                hasReject = true;
            } else if (ev.activity == act::kJobDone && firstJobDone == SIZE_MAX) {
                firstJobDone = p;
            } else if (ev.activity == act::kHold && firstHold == SIZE_MAX) {
                firstHold = p;
            } else if (ev.activity == act::kAccept && acceptPos == SIZE_MAX) {
                acceptPos = p;
            } else if (ev.activity == act::kSchedulerStart && firstStart == SIZE_MAX) {
                firstStart = p;
            } else if (ev.activity == act::kSchedulerEnd && firstEnd == SIZE_MAX) {
                firstEnd = p;
            }
            if (const auto* techs = ev.refs(act::kTechnicianType)) {
                relatedTechnicians.insert(techs->begin(), techs->end());
            }
        }

        const bool taggedD1 = truth.oids(kTagD1).count(oid) > 0;
        const bool taggedIncomplete = truth.oids(kTagIncomplete).count(oid) > 0;
        const bool taggedAnomaly = truth.oids(kTagOrderAnomaly).count(oid) > 0;
        const bool taggedMulti = truth.oids(kTagMultiTechnician).count(oid) > 0;

        if (taggedD1 && hasSurvey) fail("D1 schedule has a survey: " + oid);
        if (!taggedD1 && !taggedIncomplete && !hasReject &&
            truth.oids(kTagD3).count(oid) == 0 && !hasSurvey) {
            fail("untagged schedule lacks a survey: " + oid);
        }
        if (truth.oids(kTagD3).count(oid) > 0 &&
            !(firstSurvey != SIZE_MAX && firstSurvey < firstJobDone)) {
            fail("D3 schedule survey not before JOB DONE: " + oid);
        }
        if (truth.oids(kTagD2).count(oid) > 0) {
            // The offending HOLD precedes the technician's return on-site.
            std::size_t onsitePos = SIZE_MAX;
            const auto& techIdx = log.eventsOf(rec.technician);
            for (const std::uint32_t idx : techIdx) {
                const Event& ev = log.events()[idx];
                if (ev.activity != act::kOnsite) continue;
                if (acceptPos != SIZE_MAX && idx > indices[acceptPos]) {
                    onsitePos = idx;
                    break;
                }
            }
            if (firstHold == SIZE_MAX ||
                (onsitePos != SIZE_MAX && indices[firstHold] > onsitePos)) {
                fail("D2 schedule HOLD not before ONSITE: " + oid);
            }
        }
        if (taggedIncomplete != (!hasJobClosed && !hasReject)) {
            fail("incompleteness tag does not match events: " + oid);
        }
        if (taggedAnomaly != (firstEnd != SIZE_MAX && firstEnd < firstStart)) {
            fail("order-anomaly tag does not match events: " + oid);
        }
        if (taggedMulti != (relatedTechnicians.size() > 1)) {
            fail("multi-technician tag does not match events: " + oid);
        }
    }
}

} // namespace

std::string GroundTruth::to_json() const {
    ordered_json doc = ordered_json::object();
    ordered_json jInjected = ordered_json::object();
    for (const auto& [tag, oids] : injected) {
        jInjected[tag] = {{"count", oids.size()}, {"oids", oids}};
    }
    doc["injected"] = std::move(jInjected);
    doc["overworkCount"] = overworkCount;
    doc["configuredMeanTransit"] = configuredMeanTransit;
    doc["configuredMeanLag"] = configuredMeanLag;
    ordered_json jHold = ordered_json::object();
    for (const auto& [day, held] : holdDays) jHold[day] = held;
    doc["holdDays"] = std::move(jHold);
    ordered_json jSchedules = ordered_json::array();
    for (const auto& rec : schedules) {
        ordered_json jr = ordered_json::object();
        jr["oid"] = rec.oid;
        jr["technician"] = rec.technician;
        jr["date"] = rec.date;
        jr["scheduledHours"] = rec.scheduledHours;
        jr["lagHours"] = rec.lagHours;
        jr["transitHours"] = rec.transitHours;
        if (rec.hasActualHours) {
            jr["actualHours"] = rec.actualHours;
            jr["overwork"] = rec.overwork;
        }
        jr["deviation"] = rec.deviation;
        jr["officeReturn"] = rec.officeReturn;
        jr["overrun"] = rec.overrun;
        jSchedules.push_back(std::move(jr));
    }
    doc["schedules"] = std::move(jSchedules);
    return doc.dump(2) + "\n";
}

discovery::OCDFG reference_model() {
    discovery::OCDFG model;

    auto edge = [](discovery::DFG& dfg, const std::string& from, const std::string& to) {
        dfg.nodes.insert(from);
        dfg.nodes.insert(to);
        dfg.edges[{from, to}] = 1;
    };

    discovery::DFG& sched = model.perType[act::kScheduleType];
    sched.otype = act::kScheduleType;
    sched.startActivities[act::kSchedulerStart] = 1;
    sched.endActivities[act::kSchedulerEnd] = 1;
    edge(sched, act::kSchedulerStart, act::kAccept);
    edge(sched, act::kSchedulerStart, act::kReject);
    edge(sched, act::kAccept, act::kInprocess);
    edge(sched, act::kInprocess, act::kInprocess); // office return resumes work
    edge(sched, act::kInprocess, act::kHold);
    edge(sched, act::kHold, act::kInprocess);
    edge(sched, act::kInprocess, act::kJobDone);
    edge(sched, act::kJobDone, act::kJobClosed);
    edge(sched, act::kJobClosed, act::kSurveySent);
    edge(sched, act::kSurveySent, act::kSchedulerEnd);
    edge(sched, act::kReject, act::kSchedulerEnd);

    discovery::DFG& tech = model.perType[act::kTechnicianType];
    tech.otype = act::kTechnicianType;
    tech.startActivities[act::kAccept] = 1;
    tech.startActivities[act::kReject] = 1;
    tech.endActivities[act::kSurveySent] = 1;
    tech.endActivities[act::kReject] = 1;
    edge(tech, act::kAccept, act::kEnroute);
    edge(tech, act::kEnroute, act::kOnsite);
    edge(tech, act::kOnsite, act::kInprocess);
    edge(tech, act::kInprocess, act::kHold);
    edge(tech, act::kHold, act::kInprocess);
    edge(tech, act::kInprocess, act::kJobDone);
    edge(tech, act::kInprocess, act::kHeadOffice); // mid-schedule office return
    edge(tech, act::kHeadOffice, act::kArriveOffice);
    edge(tech, act::kArriveOffice, act::kEnroute); // back to the site
    edge(tech, act::kJobDone, act::kHeadOffice);
    edge(tech, act::kArriveOffice, act::kJobClosed);
    edge(tech, act::kJobClosed, act::kSurveySent);
    edge(tech, act::kSurveySent, act::kAccept); // next schedule
    edge(tech, act::kSurveySent, act::kReject);
    edge(tech, act::kReject, act::kAccept);
    edge(tech, act::kReject, act::kReject);

    auto profile = [&](const std::string& activity, bool onSchedule, bool onTechnician) {
        model.profile.stats[{activity, act::kScheduleType}] =
            onSchedule ? discovery::CardinalityStats{1, 1, false}
                       : discovery::CardinalityStats{0, 0, true};
        model.profile.stats[{activity, act::kTechnicianType}] =
            onTechnician ? discovery::CardinalityStats{1, 1, false}
                         : discovery::CardinalityStats{0, 0, true};
        if (onSchedule) model.sharedActivities[activity].insert(act::kScheduleType);
        if (onTechnician) model.sharedActivities[activity].insert(act::kTechnicianType);
    };
    profile(act::kSchedulerStart, true, false);
    profile(act::kSchedulerEnd, true, false);
    profile(act::kAccept, true, true);
    profile(act::kReject, true, true);
    profile(act::kEnroute, false, true);
    profile(act::kOnsite, false, true);
    profile(act::kInprocess, true, true);
    profile(act::kHold, true, true);
    profile(act::kJobDone, true, true);
    profile(act::kHeadOffice, false, true);
    profile(act::kArriveOffice, false, true);
    profile(act::kJobClosed, true, true);
    profile(act::kSurveySent, true, true);

    return model;
}

} // namespace ocpm::loggen
