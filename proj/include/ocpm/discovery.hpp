#pragma once

#include "ocpm/ocel.hpp"

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace ocpm::discovery {

/// Directly-follows graph of one object type. Start/end tallies sum to the
/// number of non-empty cases of the flattened log they were mined from.
struct DFG {
    std::string otype;
    std::set<std::string> nodes;
    std::map<std::pair<std::string, std::string>, std::uint64_t> edges;
    std::map<std::string, std::uint64_t> startActivities;
    std::map<std::string, std::uint64_t> endActivities;

    bool operator==(const DFG&) const = default;
};

struct CardinalityStats {
    std::uint32_t minRefs = 0;
    std::uint32_t maxRefs = 0;
    bool mayBeAbsent = false; // equivalent to minRefs == 0

    bool operator==(const CardinalityStats&) const = default;
};

/// Exact reference-count ranges per (activity, object type), over all events.
struct CardinalityProfile {
    std::map<std::pair<std::string, std::string>, CardinalityStats> stats;

    const CardinalityStats* find(const std::string& activity, const std::string& otype) const {
        auto it = stats.find({activity, otype});
        return it == stats.end() ? nullptr : &it->second;
    }

    bool operator==(const CardinalityProfile&) const = default;
};

/// Object-centric DFG: one per-type DFG plus the cardinality profile and the
/// activities shared between types (those ever referencing the type).
struct OCDFG {
    std::map<std::string, DFG> perType;
    CardinalityProfile profile;
    std::map<std::string, std::set<std::string>> sharedActivities;

    bool operator==(const OCDFG&) const = default;
};

/// Object-centric Petri net assembled from an OCDFG: shared labeled
/// transitions, one typed place per directly-follows edge, per-type source and
/// sink places. An arc is variable iff the profile records maxRefs > 1 for
/// (transition activity, place type).
struct OCPN {
    struct Place {
        std::string id; // "<otype>|src", "<otype>|snk" or "<otype>|<a>-><b>"
        std::string otype;
        bool isSource = false;
        bool isSink = false;

        bool operator==(const Place&) const = default;
    };
    struct Arc {
        std::string placeId;
        std::string transition;
        bool placeToTransition = true;
        bool variable = false;

        bool operator==(const Arc&) const = default;
    };

    std::vector<Place> places;         // ascending by id
    std::set<std::string> transitions; // activity labels, shared across types
    std::vector<Arc> arcs;

    bool operator==(const OCPN&) const = default;
};

/// Counts directly-follows pairs within each trace of `flat`.
DFG discover_dfg(const FlattenedLog& flat, const std::string& otype);

CardinalityProfile cardinality_profile(const OCEventLog& log);

/// Flattens per declared type and mines every per-type DFG; deterministic for
/// a given log.
OCDFG discover_ocdfg(const OCEventLog& log);

OCPN assemble_ocpn(const OCDFG& ocdfg);

/// Structural sanity of an assembled net: along same-typed arcs, every
/// transition of a type is reachable from that type's source, and every place
/// lies on a source->sink path.
bool soundness_lite(const OCPN& net);

/// DOT digraph of the directly-follows edges, colored per type (schedule
/// purple, technician pink, others from a fixed palette). `minEdgeFreq`
/// prunes low-frequency edges for display only.
std::string export_dot(const OCDFG& ocdfg, std::uint64_t minEdgeFreq = 0);

/// DOT digraph of the net; variable arcs are drawn double-stroked.
std::string export_dot(const OCPN& net);

std::string to_json(const OCDFG& ocdfg);
std::string to_json(const OCPN& net);

} // namespace ocpm::discovery
