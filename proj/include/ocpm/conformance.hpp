#pragma once

#include "ocpm/ocel.hpp"

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ocpm::conformance {

/// Objects of `otype` must carry between minCount and maxCount occurrences of
/// `activity`; violations are counted per object. When `exemptActivity` is
/// set, an object whose trace contains it followed by nothing but
/// `exemptIgnore` activities is exempt (a rejected schedule that saw no
/// further processing owes no survey).
struct ExistenceCount {
    std::string otype;
    std::string activity;
    std::optional<int> minCount;
    std::optional<int> maxCount;
    std::optional<std::string> exemptActivity;
    std::set<std::string> exemptIgnore;
};

/// Every occurrence of `thenActivity` in an object's trace must be preceded
/// by at least one `firstActivity`; violations are counted per event.
struct IntraObjectPrecedence {
    std::string otype;
    std::string firstActivity;
    std::string thenActivity;
};

/// `subjectActivity` on a subject object must not occur before the associated
/// guard object performed `guardActivity` for it. Guard events are bound to
/// subjects with the trip association rule: the subject most recently
/// ACCEPTed by the guard object and not yet JOB DONE. Violations are counted
/// per (event, subject) occurrence.
struct CrossObjectPrecedence {
    std::string subjectType;
    std::string subjectActivity;
    std::string guardType;
    std::string guardActivity;
};

struct ComplianceRule {
    std::string ruleId;
    std::variant<ExistenceCount, IntraObjectPrecedence, CrossObjectPrecedence> params;
};

struct Offender {
    std::string oid;
    std::optional<std::string> eid; // present for per-event violations

    bool operator==(const Offender&) const = default;
};

struct ViolationReport {
    std::string ruleId;
    std::size_t violationCount = 0;
    std::vector<Offender> offenders;
    std::optional<std::string> error; // set instead of counts when unresolvable
};

/// Evaluates one rule. Throws UnknownType when a rule type is undeclared and
/// UnknownActivity when a precedence activity is absent from the vocabulary —
/// a typo guard, deliberately distinct from reporting zero violations. The
/// counted activity of ExistenceCount is exempt from that guard: its absence
/// is exactly what a min-count rule must be able to count.
ViolationReport check_rule(const OCEventLog& log, const ComplianceRule& rule);

/// The three after-sales rules: R1 every schedule gets a survey (rejected,
/// unprocessed schedules exempt); R2 no HOLD before the technician's bound
/// ONSITE; R3 surveys only after JOB DONE.
std::vector<ComplianceRule> default_rules();

/// Maps check_rule over `rules`; per-rule errors are captured in the report
/// instead of aborting the remaining rules. Reports come back ordered by
/// ruleId (duplicates retained).
std::vector<ViolationReport> check_all(const OCEventLog& log,
                                       const std::vector<ComplianceRule>& rules);

std::vector<ComplianceRule> rules_from_json(std::string_view text);
std::string rules_to_json(const std::vector<ComplianceRule>& rules);
std::string reports_to_json(const std::vector<ViolationReport>& reports);

} // namespace ocpm::conformance
