#pragma once

#include "ocpm/time.hpp"

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ocpm {

/// Scalar attribute value carried by events (vmap) and objects (attributes).
/// Anything else in an input file (null, nested arrays/objects) is rejected.
using AttrValue = std::variant<std::string, std::int64_t, double, bool, Timestamp>;

struct ObjectInstance {
    std::string oid;
    std::string otype;
    std::map<std::string, AttrValue> attributes;

    bool operator==(const ObjectInstance&) const = default;
};

struct Event {
    std::string eid;
    std::string activity;
    Timestamp timestamp;
    /// Object references grouped by type; per-type oid lists are ordered and
    /// duplicate-free. An event with an entirely empty omap is invalid.
    std::map<std::string, std::vector<std::string>> omap;
    std::map<std::string, AttrValue> vmap;

    /// The oid list for `otype`, or nullptr when the event has no reference
    /// of that type.
    const std::vector<std::string>* refs(const std::string& otype) const {
        auto it = omap.find(otype);
        if (it == omap.end() || it->second.empty()) return nullptr;
        return &it->second;
    }

    bool operator==(const Event&) const = default;
};

/// Immutable object-centric event log. Construction validates every invariant
/// (unique ids, referential integrity, non-empty omaps) and establishes the
/// canonical event order: ascending (timestamp, eid), eid ties impossible.
/// All operations over a log are pure; instances are safe to share across
/// threads.
class OCEventLog {
public:
    OCEventLog() = default;

    /// Validates and assembles a log. `declaredTypes` may extend the types
    /// observed on objects; observed types are always included.
    /// Throws IntegrityError naming the offending identifier.
    static OCEventLog build(std::vector<Event> events, std::vector<ObjectInstance> objects,
                            std::set<std::string> declaredTypes = {});

    const std::vector<Event>& events() const { return events_; }
    const std::map<std::string, ObjectInstance>& objects() const { return objects_; }
    const std::set<std::string>& objectTypes() const { return objectTypes_; }
    const std::set<std::string>& activityVocabulary() const { return vocabulary_; }

    bool hasType(const std::string& otype) const { return objectTypes_.count(otype) > 0; }

    /// Indices (into events()) of the events referencing `oid`, in log order.
    const std::vector<std::uint32_t>& eventsOf(const std::string& oid) const;

    /// Oids of all objects of `otype`, ascending.
    std::vector<std::string> oidsOfType(const std::string& otype) const;

    bool operator==(const OCEventLog& other) const {
        return events_ == other.events_ && objects_ == other.objects_ &&
               objectTypes_ == other.objectTypes_;
    }

private:
    std::vector<Event> events_;
    std::map<std::string, ObjectInstance> objects_;
    std::set<std::string> objectTypes_;
    std::set<std::string> vocabulary_;
    std::map<std::string, std::vector<std::uint32_t>> byObject_;
};

/// One entry of a flattened trace.
struct TraceEvent {
    std::string eid;
    std::string activity;
    Timestamp timestamp;

    bool operator==(const TraceEvent&) const = default;
};

/// Classical (single-case-notion) view of an object-centric log. Events
/// referencing several objects are duplicated into every owning trace — the
/// convergence effect is intentional.
struct FlattenedLog {
    std::string caseNotion;
    std::map<std::string, std::vector<TraceEvent>> cases;
};

/// Parses the OCEL 1.0 JSON layout. "ocel:omap" may be the type-keyed form
/// {"type": ["oid", ...]} or the flat array form ["oid", ...]; flat entries
/// are typed by looking the oid up among the objects.
/// Throws MalformedInput (unparseable layout) or IntegrityError.
OCEventLog parse_ocel_json(std::string_view bytes);

/// Emits OCEL 1.0 JSON with fully deterministic layout: events ordered by
/// (timestamp, eid), all map keys lexicographic, timestamps at second
/// precision. Structurally equal logs serialize byte-identically.
std::string serialize_ocel_json(const OCEventLog& log);

/// Imports the tabular form: CSV with header `Id,Activity,Timestamp,<Type>...`
/// where each type cell holds `[a;b]` style oid lists or is empty. Objects are
/// materialized from the union of referenced oids per column.
OCEventLog import_table(std::string_view csv);

/// Keeps only references/objects of `keepTypes`; events left without any
/// reference are dropped. Throws UnknownType when keepTypes is not a subset of
/// the declared types.
OCEventLog project(const OCEventLog& log, const std::set<std::string>& keepTypes);

/// One case per object of `otype`; every event referencing the object joins
/// its trace (in log order). Objects without events yield empty traces.
FlattenedLog flatten(const OCEventLog& log, const std::string& otype);

} // namespace ocpm
