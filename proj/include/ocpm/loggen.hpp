#pragma once

#include "ocpm/discovery.hpp"
#include "ocpm/ocel.hpp"

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace ocpm::loggen {

/// Sampling distribution for duration parameters, in hours.
struct Dist {
    enum class Kind { Fixed, Uniform };
    Kind kind = Kind::Fixed;
    double lo = 0.0;
    double hi = 0.0;

    static Dist fixed(double value) { return {Kind::Fixed, value, value}; }
    static Dist uniform(double lo, double hi) { return {Kind::Uniform, lo, hi}; }

    double mean() const { return kind == Kind::Fixed ? lo : (lo + hi) / 2.0; }
    double stddev() const;
};

struct IntRange {
    int min = 1;
    int max = 1;
};

struct RegionWeight {
    std::string name;
    double weight = 1.0;
};

/// Generator parameters. Deviations D1-D3 and the three preprocessing
/// anomalies are mutually exclusive per schedule, sampled in the order
/// reject -> D1 -> D2 -> D3 -> incomplete -> orderAnomaly -> multiTechnician.
struct GenConfig {
    std::uint64_t seed = 1;
    int technicianCount = 4;
    IntRange schedulesPerTechnicianPerDay{1, 3};
    int dayCount = 5;
    std::vector<RegionWeight> regions{
        {"Tuzla EP", 3.0}, {"Istanbul Avrupa", 2.0}, {"Ankara", 2.0}, {"Izmir", 1.0}};

    Dist scheduledHours = Dist::uniform(7.0, 9.0);
    Dist transitHours = Dist::uniform(1.5, 2.5);
    Dist processingHours = Dist::uniform(2.0, 3.0);
    Dist lagHours = Dist::uniform(0.2, 0.8);
    Dist returnTransitHours = Dist::fixed(0.2);
    Dist overrunHours = Dist::uniform(0.5, 1.5);

    /// HOLD days stretch the technician's day span by this factor.
    double holdSpanFactor = 1.03;

    double pReject = 0.05;
    double pHold = 0.25; // per technician-day
    double pSurveyOmit = 0.0;          // D1
    double pHoldBeforeOnsite = 0.0;    // D2
    double pSurveyBeforeJobDone = 0.0; // D3
    double pIncomplete = 0.0;
    double pOrderAnomaly = 0.0;
    double pMultiTechnician = 0.0;
    double pOfficeReturn = 0.1;
    double pOverrun = 0.0;

    void validate() const; // throws InvalidConfig
    static GenConfig from_json(std::string_view text);
    std::string to_json() const;
};

/// What actually got injected, audited against the emitted events before the
/// generator returns. All metric fields are recomputed from the emitted
/// (minute-rounded) timestamps so detector comparisons are exact.
struct ScheduleRecord {
    std::string oid;
    std::string technician;
    std::string date; // of the emitted SCHEDULER START
    double scheduledHours = 0.0;
    double lagHours = 0.0;     // first ACCEPT (or REJECT) minus SCHEDULER START
    double transitHours = 0.0; // primary trip, -1 when the schedule has none
    double actualHours = 0.0;  // JOB CLOSED - ACCEPT
    bool hasActualHours = false;
    bool overwork = false;
    std::string deviation; // none|reject|D1|D2|D3|incomplete|orderAnomaly|multiTechnician
    bool officeReturn = false;
    bool overrun = false;
};

struct GroundTruth {
    std::map<std::string, std::set<std::string>> injected; // tag -> schedule oids
    std::size_t overworkCount = 0;
    double configuredMeanTransit = 0.0;
    double configuredMeanLag = 0.0;
    std::map<std::string, bool> holdDays; // "<technician>@<date>" -> HOLD emitted
    std::vector<ScheduleRecord> schedules;

    const std::set<std::string>& oids(const std::string& tag) const;
    std::string to_json() const;
};

struct GenResult {
    OCEventLog log;
    GroundTruth truth;
};

/// Deterministic synthetic after-sales log: same seed, byte-identical
/// serialization. Timestamps sit on a whole-minute grid.
GenResult generate(const GenConfig& config);

/// Hand-encoded OCDFG of the reference after-sales process, including the
/// HOLD and office-return cycles a deviation-free log can produce. Used as
/// the containment oracle for discovery.
discovery::OCDFG reference_model();

} // namespace ocpm::loggen
