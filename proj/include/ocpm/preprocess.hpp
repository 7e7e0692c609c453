#pragma once

#include "ocpm/ocel.hpp"

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace ocpm::preprocess {

/// Which activities mark an object of a type as finished. An object is
/// complete iff at least one of its events carries a terminal activity.
struct CompletionSpec {
    std::map<std::string, std::set<std::string>> perType;
};

enum class ScopeMode {
    /// Anomalous iff the first `after` occurs before the first `before`, or
    /// `after` occurs while `before` never does — checked once over the
    /// object's whole trace.
    WholeTrace,
    /// The same check per occurrence pairing: scanning the trace, each
    /// `before` opens a window that the next `after` closes; an `after`
    /// without an open window is an anomaly. Used for activities that repeat
    /// within one trace (a technician's trips).
    PerPair,
};

struct PrecedencePair {
    std::string before;
    std::string after;
    std::string scope; // object type whose objects the pair is checked within
    ScopeMode mode = ScopeMode::WholeTrace;
};

struct CardinalityLimit {
    std::string subject;
    std::string related;
    int maxRelated = 1;
};

struct FilterResult {
    OCEventLog log;
    std::map<std::string, std::set<std::string>> removedObjects; // otype -> oids
    std::size_t removedEventCount = 0;
};

/// Removes objects of spec-covered types that never reach a terminal
/// activity. An event is dropped iff all of its references are removed;
/// otherwise the dangling references are stripped. Objects of any type left
/// without a single event fall out transitively (and are reported).
FilterResult filter_incomplete(const OCEventLog& log, const CompletionSpec& spec);

/// Removes scoped objects whose traces violate a precedence pair (see
/// ScopeMode). Pairs whose scope type is not declared are skipped with a
/// warning.
FilterResult filter_order_anomalies(const OCEventLog& log,
                                    const std::vector<PrecedencePair>& pairs);

/// Removes subject objects co-appearing with more than `maxRelated` distinct
/// related-type objects. Throws UnknownType / InvalidConfig.
FilterResult filter_cardinality(const OCEventLog& log, const std::string& subject,
                                const std::string& related, int maxRelated);

/// Cases keyed by "<oid>@<YYYY-MM-DD>" (UTC date): every event referencing the
/// object joins the case of its own date.
FlattenedLog derive_daily_cases(const OCEventLog& log, const std::string& otype);

/// External pipeline configuration (JSON file): completion spec, precedence
/// pairs, cardinality limits.
struct PreprocessConfig {
    CompletionSpec completion;
    std::vector<PrecedencePair> precedence;
    std::vector<CardinalityLimit> cardinality;

    /// The after-sales defaults: schedules terminate at JOB CLOSED or REJECT;
    /// ENROUTE precedes ONSITE per technician trip; SCHEDULER START precedes
    /// SCHEDULER END per schedule; one technician per schedule.
    static PreprocessConfig defaults();
    static PreprocessConfig from_json(std::string_view text);
    std::string to_json() const;
};

struct PipelineStage {
    std::string name;
    std::map<std::string, std::set<std::string>> removedObjects;
    std::size_t removedEventCount = 0;
    std::size_t eventsAfter = 0;
};

struct PipelineResult {
    OCEventLog log;
    std::size_t eventsBefore = 0;
    std::vector<PipelineStage> stages;
};

/// Fixed composition: incomplete -> order anomalies -> cardinality. Rules
/// referencing undeclared types are skipped with a warning so the pipeline is
/// usable on any log.
PipelineResult run_pipeline(const OCEventLog& log, const PreprocessConfig& config);

/// Removed counts per step plus before/after totals, as a JSON document.
std::string report_json(const PipelineResult& result);

} // namespace ocpm::preprocess
