#include "ocpm/conformance.hpp"

#include "ocpm/activities.hpp"
#include "ocpm/errors.hpp"
#include "ocpm/performance.hpp"

#include <json.hpp>

#include <algorithm>
#include <unordered_map>

namespace ocpm::conformance {

namespace act = ocpm::activities;
using ordered_json = nlohmann::ordered_json;

namespace {

void require_type(const OCEventLog& log, const std::string& otype) {
    if (!log.hasType(otype)) throw UnknownType("unknown object type: " + otype);
}

void require_activity(const OCEventLog& log, const std::string& activity) {
    if (activity.empty()) throw InvalidConfig("rule with empty activity");
    if (log.activityVocabulary().count(activity) == 0) {
        throw UnknownActivity("unknown activity: " + activity);
    }
}

ViolationReport check_existence(const OCEventLog& log, const std::string& ruleId,
                                const ExistenceCount& rule) {
    require_type(log, rule.otype);
    if (rule.activity.empty()) throw InvalidConfig("rule with empty activity");
    if (rule.minCount.has_value() && rule.maxCount.has_value() &&
        *rule.minCount > *rule.maxCount) {
        throw InvalidConfig("minCount > maxCount in rule " + ruleId);
    }

    ViolationReport report;
    report.ruleId = ruleId;
    for (const auto& oid : log.oidsOfType(rule.otype)) {
        const auto& indices = log.eventsOf(oid);

        if (rule.exemptActivity.has_value()) {
            std::size_t exemptFrom = indices.size();
            bool exempt = false;
            for (std::size_t i = 0; i < indices.size(); ++i) {
                if (log.events()[indices[i]].activity == *rule.exemptActivity) {
                    exemptFrom = i;
                    exempt = true;
                    break;
                }
            }
            for (std::size_t i = exemptFrom + 1; exempt && i < indices.size(); ++i) {
                exempt = rule.exemptIgnore.count(log.events()[indices[i]].activity) > 0;
            }
            if (exempt) continue;
        }

        int count = 0;
        for (const std::uint32_t idx : indices) {
            if (log.events()[idx].activity == rule.activity) ++count;
        }
        const bool belowMin = rule.minCount.has_value() && count < *rule.minCount;
        const bool aboveMax = rule.maxCount.has_value() && count > *rule.maxCount;
        if (belowMin || aboveMax) report.offenders.push_back({oid, std::nullopt});
    }
    report.violationCount = report.offenders.size();
    return report;
}

ViolationReport check_intra(const OCEventLog& log, const std::string& ruleId,
                            const IntraObjectPrecedence& rule) {
    require_type(log, rule.otype);
    require_activity(log, rule.firstActivity);
    require_activity(log, rule.thenActivity);

    ViolationReport report;
    report.ruleId = ruleId;
    for (const auto& oid : log.oidsOfType(rule.otype)) {
        bool seenFirst = false;
        for (const std::uint32_t idx : log.eventsOf(oid)) {
            const Event& ev = log.events()[idx];
            if (ev.activity == rule.firstActivity) {
                seenFirst = true;
            } else if (ev.activity == rule.thenActivity && !seenFirst) {
                report.offenders.push_back({oid, ev.eid});
            }
        }
    }
    report.violationCount = report.offenders.size();
    return report;
}

ViolationReport check_cross(const OCEventLog& log, const std::string& ruleId,
                            const CrossObjectPrecedence& rule) {
    require_type(log, rule.subjectType);
    require_type(log, rule.guardType);
    require_activity(log, rule.subjectActivity);
    require_activity(log, rule.guardActivity);

    ViolationReport report;
    report.ruleId = ruleId;
    perf::OpenScheduleTracker tracker(rule.subjectType, rule.guardType);
    std::unordered_map<std::string, bool> guarded; // subject oid -> bound guard seen

    for (const Event& ev : log.events()) {
        tracker.observe(ev);
        if (ev.activity == rule.guardActivity) {
            if (const auto* guards = ev.refs(rule.guardType)) {
                for (const auto& guard : *guards) {
                    if (const auto subject = tracker.current(guard)) guarded[*subject] = true;
                }
            }
        }
        if (ev.activity == rule.subjectActivity) {
            if (const auto* subjects = ev.refs(rule.subjectType)) {
                for (const auto& subject : *subjects) {
                    if (!guarded[subject]) report.offenders.push_back({subject, ev.eid});
                }
            }
        }
    }
    report.violationCount = report.offenders.size();
    return report;
}

} // namespace

ViolationReport check_rule(const OCEventLog& log, const ComplianceRule& rule) {
    return std::visit(
        [&](const auto& params) {
            using T = std::decay_t<decltype(params)>;
            if constexpr (std::is_same_v<T, ExistenceCount>) {
                return check_existence(log, rule.ruleId, params);
            } else if constexpr (std::is_same_v<T, IntraObjectPrecedence>) {
                return check_intra(log, rule.ruleId, params);
            } else {
                return check_cross(log, rule.ruleId, params);
            }
        },
        rule.params);
}

std::vector<ComplianceRule> default_rules() {
    std::vector<ComplianceRule> rules;
    rules.push_back({"R1", ExistenceCount{act::kScheduleType,
                                          act::kSurveySent,
                                          1,
                                          std::nullopt,
                                          act::kReject,
                                          {act::kSchedulerStart, act::kSchedulerEnd}}});
    rules.push_back({"R2", CrossObjectPrecedence{act::kScheduleType, act::kHold,
                                                 act::kTechnicianType, act::kOnsite}});
    rules.push_back(
        {"R3", IntraObjectPrecedence{act::kScheduleType, act::kJobDone, act::kSurveySent}});
    return rules;
}

std::vector<ViolationReport> check_all(const OCEventLog& log,
                                       const std::vector<ComplianceRule>& rules) {
    std::vector<ViolationReport> reports;
    reports.reserve(rules.size());
    for (const auto& rule : rules) {
        try {
            reports.push_back(check_rule(log, rule));
        } catch (const Error& e) {
            ViolationReport failed;
            failed.ruleId = rule.ruleId;
            failed.error = e.what();
            reports.push_back(std::move(failed));
        }
    }
    std::stable_sort(reports.begin(), reports.end(),
                     [](const ViolationReport& a, const ViolationReport& b) {
                         return a.ruleId < b.ruleId;
                     });
    return reports;
}

std::vector<ComplianceRule> rules_from_json(std::string_view text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const ordered_json::parse_error& e) {
        throw MalformedInput(std::string("rule file is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("rules") || !doc["rules"].is_array()) {
        throw MalformedInput("rule file must hold a top-level \"rules\" array");
    }

    std::vector<ComplianceRule> rules;
    try {
        for (const auto& jr : doc["rules"]) {
            ComplianceRule rule;
            rule.ruleId = jr.at("id").get<std::string>();
            const std::string tmpl = jr.at("template").get<std::string>();
            if (tmpl == "ExistenceCount") {
                ExistenceCount p;
                p.otype = jr.at("objectType").get<std::string>();
                p.activity = jr.at("activity").get<std::string>();
                if (jr.contains("minCount")) p.minCount = jr["minCount"].get<int>();
                if (jr.contains("maxCount")) p.maxCount = jr["maxCount"].get<int>();
                if (jr.contains("exemptActivity")) {
                    p.exemptActivity = jr["exemptActivity"].get<std::string>();
                }
                if (jr.contains("exemptIgnore")) {
                    for (const auto& a : jr["exemptIgnore"]) {
                        p.exemptIgnore.insert(a.get<std::string>());
                    }
                }
                rule.params = std::move(p);
            } else if (tmpl == "IntraObjectPrecedence") {
                rule.params = IntraObjectPrecedence{jr.at("objectType").get<std::string>(),
                                                    jr.at("firstActivity").get<std::string>(),
                                                    jr.at("thenActivity").get<std::string>()};
            } else if (tmpl == "CrossObjectPrecedence") {
                rule.params = CrossObjectPrecedence{jr.at("subjectType").get<std::string>(),
                                                    jr.at("subjectActivity").get<std::string>(),
                                                    jr.at("guardType").get<std::string>(),
                                                    jr.at("guardActivity").get<std::string>()};
            } else {
                throw MalformedInput("unknown rule template: " + tmpl);
            }
            rules.push_back(std::move(rule));
        }
    } catch (const ordered_json::exception& e) {
        throw MalformedInput(std::string("bad rule file: ") + e.what());
    }
    return rules;
}

std::string rules_to_json(const std::vector<ComplianceRule>& rules) {
    ordered_json jRules = ordered_json::array();
    for (const auto& rule : rules) {
        ordered_json jr = ordered_json::object();
        jr["id"] = rule.ruleId;
        std::visit(
            [&](const auto& params) {
                using T = std::decay_t<decltype(params)>;
                if constexpr (std::is_same_v<T, ExistenceCount>) {
                    jr["template"] = "ExistenceCount";
                    jr["objectType"] = params.otype;
                    jr["activity"] = params.activity;
                    if (params.minCount) jr["minCount"] = *params.minCount;
                    if (params.maxCount) jr["maxCount"] = *params.maxCount;
                    if (params.exemptActivity) jr["exemptActivity"] = *params.exemptActivity;
                    if (!params.exemptIgnore.empty()) jr["exemptIgnore"] = params.exemptIgnore;
                } else if constexpr (std::is_same_v<T, IntraObjectPrecedence>) {
                    jr["template"] = "IntraObjectPrecedence";
                    jr["objectType"] = params.otype;
                    jr["firstActivity"] = params.firstActivity;
                    jr["thenActivity"] = params.thenActivity;
                } else {
                    jr["template"] = "CrossObjectPrecedence";
                    jr["subjectType"] = params.subjectType;
                    jr["subjectActivity"] = params.subjectActivity;
                    jr["guardType"] = params.guardType;
                    jr["guardActivity"] = params.guardActivity;
                }
            },
            rule.params);
        jRules.push_back(std::move(jr));
    }
    ordered_json doc = ordered_json::object();
    doc["rules"] = std::move(jRules);
    return doc.dump(2) + "\n";
}

std::string reports_to_json(const std::vector<ViolationReport>& reports) {
    ordered_json jReports = ordered_json::array();
    for (const auto& report : reports) {
        ordered_json jr = ordered_json::object();
        jr["ruleId"] = report.ruleId;
        if (report.error.has_value()) {
            jr["error"] = *report.error;
        } else {
            jr["violationCount"] = report.violationCount;
            ordered_json jOffenders = ordered_json::array();
            for (const auto& offender : report.offenders) {
                ordered_json jo = ordered_json::object();
                jo["oid"] = offender.oid;
                if (offender.eid.has_value()) jo["eid"] = *offender.eid;
                jOffenders.push_back(std::move(jo));
            }
            jr["offenders"] = std::move(jOffenders);
        }
        jReports.push_back(std::move(jr));
    }
    ordered_json doc = ordered_json::object();
    doc["reports"] = std::move(jReports);
    return doc.dump(2) + "\n";
}

} // namespace ocpm::conformance
