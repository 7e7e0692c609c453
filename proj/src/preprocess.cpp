#include "ocpm/preprocess.hpp"

#include "ocpm/activities.hpp"
#include "ocpm/diag.hpp"
#include "ocpm/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

namespace ocpm::preprocess {

namespace {

using ordered_json = nlohmann::ordered_json;

// Core removal semantics shared by all three filters: strip references to the
// victims, drop events left without any reference, then drop objects whose
// reference count fell from >0 to 0 (transitive fallout, reported alongside
// the victims).
FilterResult remove_objects(const OCEventLog& log,
                            std::map<std::string, std::set<std::string>> victims) {
    std::unordered_set<std::string> victimOids;
    for (const auto& [otype, oids] : victims) victimOids.insert(oids.begin(), oids.end());

    FilterResult result;
    result.removedObjects = std::move(victims);
    if (victimOids.empty()) {
        result.log = log;
        return result;
    }

    std::vector<Event> events;
    events.reserve(log.events().size());
    std::unordered_map<std::string, std::size_t> survivorRefs;
    for (const auto& ev : log.events()) {
        Event copy = ev;
        for (auto it = copy.omap.begin(); it != copy.omap.end();) {
            auto& oids = it->second;
            oids.erase(std::remove_if(oids.begin(), oids.end(),
                                      [&](const std::string& oid) {
                                          return victimOids.count(oid) > 0;
                                      }),
                       oids.end());
            it = oids.empty() ? copy.omap.erase(it) : std::next(it);
        }
        if (copy.omap.empty()) {
            ++result.removedEventCount;
            continue;
        }
        for (const auto& [otype, oids] : copy.omap) {
            for (const auto& oid : oids) ++survivorRefs[oid];
        }
        events.push_back(std::move(copy));
    }

    std::vector<ObjectInstance> survivors;
    for (const auto& [oid, obj] : log.objects()) {
        if (victimOids.count(oid) > 0) continue;
        const bool hadRefs = !log.eventsOf(oid).empty();
        if (hadRefs && survivorRefs.find(oid) == survivorRefs.end()) {
            result.removedObjects[obj.otype].insert(oid); // transitive fallout
            continue;
        }
        survivors.push_back(obj);
    }

    result.log = OCEventLog::build(std::move(events), std::move(survivors), log.objectTypes());
    return result;
}

std::vector<std::string> trace_activities(const OCEventLog& log, const std::string& oid) {
    std::vector<std::string> acts;
    for (const std::uint32_t idx : log.eventsOf(oid)) {
        acts.push_back(log.events()[idx].activity);
    }
    return acts;
}

bool violates_pair(const std::vector<std::string>& trace, const PrecedencePair& pair) {
    if (pair.mode == ScopeMode::WholeTrace) {
        std::size_t firstBefore = trace.size(), firstAfter = trace.size();
        for (std::size_t i = 0; i < trace.size(); ++i) {
            if (firstBefore == trace.size() && trace[i] == pair.before) firstBefore = i;
            if (firstAfter == trace.size() && trace[i] == pair.after) firstAfter = i;
        }
        return firstAfter < trace.size() && firstAfter < firstBefore;
    }
    bool open = false;
    for (const auto& act : trace) {
        if (act == pair.before) {
            open = true;
        } else if (act == pair.after) {
            if (!open) return true;
            open = false;
        }
    }
    return false;
}

} // namespace

FilterResult filter_incomplete(const OCEventLog& log, const CompletionSpec& spec) {
    std::map<std::string, std::set<std::string>> victims;
    for (const auto& [otype, terminals] : spec.perType) {
        if (!log.hasType(otype)) {
            diag::warn("completion spec covers undeclared type \"" + otype + "\"; skipped");
            continue;
        }
        for (const auto& act : terminals) {
            if (log.activityVocabulary().count(act) == 0) {
                diag::warn("terminal activity \"" + act + "\" never occurs in the log");
            }
        }
        for (const auto& oid : log.oidsOfType(otype)) {
            bool complete = false;
            for (const std::uint32_t idx : log.eventsOf(oid)) {
                if (terminals.count(log.events()[idx].activity) > 0) {
                    complete = true;
                    break;
                }
            }
            if (!complete) victims[otype].insert(oid);
        }
    }
    return remove_objects(log, std::move(victims));
}

FilterResult filter_order_anomalies(const OCEventLog& log,
                                    const std::vector<PrecedencePair>& pairs) {
    std::map<std::string, std::set<std::string>> victims;
    for (const auto& pair : pairs) {
        if (!log.hasType(pair.scope)) {
            diag::warn("precedence pair scoped to undeclared type \"" + pair.scope +
                       "\"; skipped");
            continue;
        }
        for (const auto& oid : log.oidsOfType(pair.scope)) {
            if (violates_pair(trace_activities(log, oid), pair)) {
                victims[pair.scope].insert(oid);
            }
        }
    }
    return remove_objects(log, std::move(victims));
}

FilterResult filter_cardinality(const OCEventLog& log, const std::string& subject,
                                const std::string& related, int maxRelated) {
    if (!log.hasType(subject)) throw UnknownType("unknown object type: " + subject);
    if (!log.hasType(related)) throw UnknownType("unknown object type: " + related);
    if (maxRelated < 1) throw InvalidConfig("maxRelated must be >= 1");

    std::map<std::string, std::set<std::string>> victims;
    for (const auto& oid : log.oidsOfType(subject)) {
        std::unordered_set<std::string> relatedOids;
        for (const std::uint32_t idx : log.eventsOf(oid)) {
            if (const auto* refs = log.events()[idx].refs(related)) {
                relatedOids.insert(refs->begin(), refs->end());
            }
        }
        if (relatedOids.size() > static_cast<std::size_t>(maxRelated)) {
            victims[subject].insert(oid);
        }
    }
    return remove_objects(log, std::move(victims));
}

FlattenedLog derive_daily_cases(const OCEventLog& log, const std::string& otype) {
    if (!log.hasType(otype)) throw UnknownType("unknown object type: " + otype);
    FlattenedLog flat;
    flat.caseNotion = "daily:" + otype;
    for (const auto& oid : log.oidsOfType(otype)) {
        for (const std::uint32_t idx : log.eventsOf(oid)) {
            const Event& ev = log.events()[idx];
            flat.cases[oid + "@" + format_date(ev.timestamp)].push_back(
                TraceEvent{ev.eid, ev.activity, ev.timestamp});
        }
    }
    return flat;
}

PreprocessConfig PreprocessConfig::defaults() {
    namespace act = ocpm::activities;
    PreprocessConfig config;
    config.completion.perType[act::kScheduleType] = {act::kJobClosed, act::kReject};
    config.precedence.push_back(
        {act::kEnroute, act::kOnsite, act::kTechnicianType, ScopeMode::PerPair});
    config.precedence.push_back(
        {act::kSchedulerStart, act::kSchedulerEnd, act::kScheduleType, ScopeMode::WholeTrace});
    config.cardinality.push_back({act::kScheduleType, act::kTechnicianType, 1});
    return config;
}

PreprocessConfig PreprocessConfig::from_json(std::string_view text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const ordered_json::parse_error& e) {
        throw MalformedInput(std::string("preprocess config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw MalformedInput("preprocess config must be a JSON object");

    PreprocessConfig config;
    if (doc.contains("completion")) {
        for (const auto& [otype, acts] : doc["completion"].items()) {
            if (!acts.is_array()) throw MalformedInput("completion entries must be arrays");
            auto& set = config.completion.perType[otype];
            for (const auto& a : acts) set.insert(a.get<std::string>());
        }
    }
    if (doc.contains("precedence")) {
        for (const auto& jp : doc["precedence"]) {
            PrecedencePair pair;
            pair.before = jp.at("before").get<std::string>();
            pair.after = jp.at("after").get<std::string>();
            pair.scope = jp.at("scope").get<std::string>();
            if (pair.before == pair.after) {
                throw MalformedInput("precedence pair with before == after");
            }
            const std::string mode = jp.value("mode", std::string("whole-trace"));
            if (mode == "per-pair") {
                pair.mode = ScopeMode::PerPair;
            } else if (mode == "whole-trace") {
                pair.mode = ScopeMode::WholeTrace;
            } else {
                throw MalformedInput("unknown precedence mode: " + mode);
            }
            config.precedence.push_back(std::move(pair));
        }
    }
    if (doc.contains("cardinality")) {
        for (const auto& jc : doc["cardinality"]) {
            CardinalityLimit limit;
            limit.subject = jc.at("subject").get<std::string>();
            limit.related = jc.at("related").get<std::string>();
            limit.maxRelated = jc.value("maxRelated", 1);
            config.cardinality.push_back(std::move(limit));
        }
    }
    return config;
}

std::string PreprocessConfig::to_json() const {
    ordered_json doc = ordered_json::object();
    ordered_json jCompletion = ordered_json::object();
    for (const auto& [otype, acts] : completion.perType) jCompletion[otype] = acts;
    doc["completion"] = std::move(jCompletion);
    ordered_json jPairs = ordered_json::array();
    for (const auto& pair : precedence) {
        jPairs.push_back({{"before", pair.before},
                          {"after", pair.after},
                          {"scope", pair.scope},
                          {"mode", pair.mode == ScopeMode::PerPair ? "per-pair" : "whole-trace"}});
    }
    doc["precedence"] = std::move(jPairs);
    ordered_json jLimits = ordered_json::array();
    for (const auto& limit : cardinality) {
        jLimits.push_back({{"subject", limit.subject},
                           {"related", limit.related},
                           {"maxRelated", limit.maxRelated}});
    }
    doc["cardinality"] = std::move(jLimits);
    return doc.dump(2) + "\n";
}

PipelineResult run_pipeline(const OCEventLog& log, const PreprocessConfig& config) {
    PipelineResult result;
    result.eventsBefore = log.events().size();

    auto record = [&](const std::string& name, FilterResult filtered) {
        PipelineStage stage;
        stage.name = name;
        stage.removedObjects = std::move(filtered.removedObjects);
        stage.removedEventCount = filtered.removedEventCount;
        stage.eventsAfter = filtered.log.events().size();
        result.stages.push_back(std::move(stage));
        result.log = std::move(filtered.log);
    };

    record("incomplete", filter_incomplete(log, config.completion));
    record("order-anomalies", filter_order_anomalies(result.log, config.precedence));
    for (const auto& limit : config.cardinality) {
        if (!result.log.hasType(limit.subject) || !result.log.hasType(limit.related)) {
            diag::warn("cardinality limit on undeclared types skipped: " + limit.subject + "/" +
                       limit.related);
            continue;
        }
        record("cardinality",
               filter_cardinality(result.log, limit.subject, limit.related, limit.maxRelated));
    }
    return result;
}

std::string report_json(const PipelineResult& result) {
    ordered_json doc = ordered_json::object();
    doc["eventsBefore"] = result.eventsBefore;
    ordered_json jStages = ordered_json::array();
    for (const auto& stage : result.stages) {
        ordered_json jStage = ordered_json::object();
        jStage["name"] = stage.name;
        ordered_json jRemoved = ordered_json::object();
        for (const auto& [otype, oids] : stage.removedObjects) jRemoved[otype] = oids;
        jStage["removedObjects"] = std::move(jRemoved);
        jStage["removedEventCount"] = stage.removedEventCount;
        jStage["eventsAfter"] = stage.eventsAfter;
        jStages.push_back(std::move(jStage));
    }
    doc["stages"] = std::move(jStages);
    doc["eventsAfter"] = result.log.events().size();
    ordered_json jCounts = ordered_json::object();
    for (const auto& otype : result.log.objectTypes()) {
        jCounts[otype] = result.log.oidsOfType(otype).size();
    }
    doc["objectsAfter"] = std::move(jCounts);
    return doc.dump(2) + "\n";
}

} // namespace ocpm::preprocess
