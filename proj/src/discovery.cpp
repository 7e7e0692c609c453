#include "ocpm/discovery.hpp"

#include "ocpm/activities.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <queue>
#include <sstream>
#include <unordered_set>

namespace ocpm::discovery {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

std::string type_color(const std::string& otype, std::size_t paletteIndex) {
    if (otype == activities::kScheduleType) return "purple";
    if (otype == activities::kTechnicianType) return "pink";
    static constexpr std::array<const char*, 6> kPalette{"blue",  "darkgreen", "orange",
                                                         "brown", "teal",      "crimson"};
    return kPalette[paletteIndex % kPalette.size()];
}

// Deterministic color assignment: schedule/technician fixed, remaining types
// take palette slots in lexicographic order.
std::map<std::string, std::string> color_map(const std::set<std::string>& types) {
    std::map<std::string, std::string> colors;
    std::size_t slot = 0;
    for (const auto& t : types) {
        if (t == activities::kScheduleType || t == activities::kTechnicianType) {
            colors[t] = type_color(t, 0);
        } else {
            colors[t] = type_color(t, slot++);
        }
    }
    return colors;
}

} // namespace

DFG discover_dfg(const FlattenedLog& flat, const std::string& otype) {
    DFG dfg;
    dfg.otype = otype;
    for (const auto& [caseId, trace] : flat.cases) {
        if (trace.empty()) continue;
        ++dfg.startActivities[trace.front().activity];
        ++dfg.endActivities[trace.back().activity];
        for (std::size_t i = 0; i < trace.size(); ++i) {
            dfg.nodes.insert(trace[i].activity);
            if (i + 1 < trace.size()) {
                ++dfg.edges[{trace[i].activity, trace[i + 1].activity}];
            }
        }
    }
    return dfg;
}

CardinalityProfile cardinality_profile(const OCEventLog& log) {
    CardinalityProfile profile;
    for (const auto& ev : log.events()) {
        for (const auto& otype : log.objectTypes()) {
            const auto* refs = ev.refs(otype);
            const auto n = static_cast<std::uint32_t>(refs == nullptr ? 0 : refs->size());
            auto [it, inserted] = profile.stats.try_emplace({ev.activity, otype},
                                                            CardinalityStats{n, n, n == 0});
            if (!inserted) {
                auto& s = it->second;
                s.minRefs = std::min(s.minRefs, n);
                s.maxRefs = std::max(s.maxRefs, n);
                s.mayBeAbsent = s.minRefs == 0;
            }
        }
    }
    return profile;
}

OCDFG discover_ocdfg(const OCEventLog& log) {
    OCDFG ocdfg;
    for (const auto& otype : log.objectTypes()) {
        ocdfg.perType[otype] = discover_dfg(flatten(log, otype), otype);
    }
    ocdfg.profile = cardinality_profile(log);
    for (const auto& [key, stats] : ocdfg.profile.stats) {
        if (stats.maxRefs >= 1) ocdfg.sharedActivities[key.first].insert(key.second);
    }
    return ocdfg;
}

OCPN assemble_ocpn(const OCDFG& ocdfg) {
    OCPN net;
    auto variable = [&](const std::string& activity, const std::string& otype) {
        const auto* stats = ocdfg.profile.find(activity, otype);
        return stats != nullptr && stats->maxRefs > 1;
    };

    for (const auto& [otype, dfg] : ocdfg.perType) {
        if (dfg.nodes.empty()) continue;
        for (const auto& node : dfg.nodes) net.transitions.insert(node);

        const std::string src = otype + "|src";
        const std::string snk = otype + "|snk";
        net.places.push_back({src, otype, true, false});
        net.places.push_back({snk, otype, false, true});
        for (const auto& [act, count] : dfg.startActivities) {
            net.arcs.push_back({src, act, true, variable(act, otype)});
        }
        for (const auto& [edge, count] : dfg.edges) {
            const std::string pid = otype + "|" + edge.first + "->" + edge.second;
            net.places.push_back({pid, otype, false, false});
            net.arcs.push_back({pid, edge.second, true, variable(edge.second, otype)});
            net.arcs.push_back({pid, edge.first, false, variable(edge.first, otype)});
        }
        for (const auto& [act, count] : dfg.endActivities) {
            net.arcs.push_back({snk, act, false, variable(act, otype)});
        }
    }

    std::sort(net.places.begin(), net.places.end(),
              [](const OCPN::Place& a, const OCPN::Place& b) { return a.id < b.id; });
    std::sort(net.arcs.begin(), net.arcs.end(), [](const OCPN::Arc& a, const OCPN::Arc& b) {
        return std::tie(a.placeId, a.transition, a.placeToTransition) <
               std::tie(b.placeId, b.transition, b.placeToTransition);
    });
    return net;
}

bool soundness_lite(const OCPN& net) {
    std::map<std::string, const OCPN::Place*> placeById;
    std::set<std::string> types;
    for (const auto& place : net.places) {
        placeById[place.id] = &place;
        types.insert(place.otype);
    }

    for (const auto& otype : types) {
        // Adjacency restricted to this type's places.
        std::map<std::string, std::vector<std::string>> fromPlace, fromTrans;
        std::map<std::string, std::vector<std::string>> toPlace, toTrans; // reversed
        std::set<std::string> typeTransitions;
        for (const auto& arc : net.arcs) {
            if (placeById.at(arc.placeId)->otype != otype) continue;
            typeTransitions.insert(arc.transition);
            if (arc.placeToTransition) {
                fromPlace[arc.placeId].push_back(arc.transition);
                toTrans[arc.transition].push_back(arc.placeId);
            } else {
                fromTrans[arc.transition].push_back(arc.placeId);
                toPlace[arc.placeId].push_back(arc.transition);
            }
        }

        auto reach = [](const std::string& start,
                        const std::map<std::string, std::vector<std::string>>& placeAdj,
                        const std::map<std::string, std::vector<std::string>>& transAdj) {
            std::set<std::string> seen{start};
            std::queue<std::pair<std::string, bool>> todo; // (node, isPlace)
            todo.push({start, true});
            while (!todo.empty()) {
                auto [node, isPlace] = todo.front();
                todo.pop();
                const auto& adj = isPlace ? placeAdj : transAdj;
                auto it = adj.find(node);
                if (it == adj.end()) continue;
                for (const auto& next : it->second) {
                    const std::string key = (isPlace ? "t:" : "p:") + next;
                    if (seen.insert(key).second) todo.push({next, !isPlace});
                }
            }
            return seen;
        };

        const auto forward = reach(otype + "|src", fromPlace, fromTrans);
        const auto backward = reach(otype + "|snk", toPlace, toTrans);

        for (const auto& trans : typeTransitions) {
            if (forward.count("t:" + trans) == 0) return false;
        }
        for (const auto& place : net.places) {
            if (place.otype != otype) continue;
            const bool fwd = place.isSource || forward.count("p:" + place.id) > 0;
            const bool bwd = place.isSink || backward.count("p:" + place.id) > 0;
            if (!fwd || !bwd) return false;
        }
    }
    return true;
}

std::string export_dot(const OCDFG& ocdfg, std::uint64_t minEdgeFreq) {
    std::set<std::string> types;
    for (const auto& [otype, dfg] : ocdfg.perType) types.insert(otype);
    const auto colors = color_map(types);

    std::ostringstream out;
    out << "digraph ocdfg {\n";
    out << "  rankdir=LR;\n";
    out << "  node [shape=box, style=rounded];\n";

    std::set<std::string> nodes;
    for (const auto& [otype, dfg] : ocdfg.perType) {
        nodes.insert(dfg.nodes.begin(), dfg.nodes.end());
    }
    for (const auto& node : nodes) out << "  " << quote(node) << ";\n";
    for (const auto& [otype, dfg] : ocdfg.perType) {
        for (const auto& [edge, freq] : dfg.edges) {
            if (freq < minEdgeFreq) continue;
            out << "  " << quote(edge.first) << " -> " << quote(edge.second) << " [label=\""
                << freq << "\", color=\"" << colors.at(otype) << "\"];\n";
        }
    }
    out << "}\n";
    return out.str();
}

std::string export_dot(const OCPN& net) {
    std::set<std::string> types;
    std::map<std::string, std::string> placeType;
    for (const auto& place : net.places) {
        types.insert(place.otype);
        placeType[place.id] = place.otype;
    }
    const auto colors = color_map(types);

    std::ostringstream out;
    out << "digraph ocpn {\n";
    out << "  rankdir=LR;\n";
    for (const auto& trans : net.transitions) {
        out << "  " << quote(trans) << " [shape=box];\n";
    }
    for (const auto& place : net.places) {
        out << "  " << quote(place.id) << " [shape="
            << (place.isSource || place.isSink ? "doublecircle" : "circle") << ", label=\"\""
            << ", color=\"" << colors.at(place.otype) << "\"];\n";
    }
    for (const auto& arc : net.arcs) {
        const std::string& color = colors.at(placeType.at(arc.placeId));
        const std::string stroke = arc.variable ? color + ":" + color : color;
        if (arc.placeToTransition) {
            out << "  " << quote(arc.placeId) << " -> " << quote(arc.transition);
        } else {
            out << "  " << quote(arc.transition) << " -> " << quote(arc.placeId);
        }
        out << " [color=\"" << stroke << "\"];\n";
    }
    out << "}\n";
    return out.str();
}

std::string to_json(const OCDFG& ocdfg) {
    ordered_json doc = ordered_json::object();
    ordered_json jTypes = ordered_json::object();
    for (const auto& [otype, dfg] : ocdfg.perType) {
        ordered_json jDfg = ordered_json::object();
        jDfg["nodes"] = dfg.nodes;
        ordered_json jEdges = ordered_json::array();
        for (const auto& [edge, freq] : dfg.edges) {
            jEdges.push_back({{"from", edge.first}, {"to", edge.second}, {"frequency", freq}});
        }
        jDfg["edges"] = std::move(jEdges);
        jDfg["startActivities"] = dfg.startActivities;
        jDfg["endActivities"] = dfg.endActivities;
        jTypes[otype] = std::move(jDfg);
    }
    doc["types"] = std::move(jTypes);

    ordered_json jProfile = ordered_json::array();
    for (const auto& [key, stats] : ocdfg.profile.stats) {
        jProfile.push_back({{"activity", key.first},
                            {"otype", key.second},
                            {"minRefs", stats.minRefs},
                            {"maxRefs", stats.maxRefs},
                            {"mayBeAbsent", stats.mayBeAbsent}});
    }
    doc["profile"] = std::move(jProfile);

    ordered_json jShared = ordered_json::object();
    for (const auto& [activity, typeSet] : ocdfg.sharedActivities) jShared[activity] = typeSet;
    doc["sharedActivities"] = std::move(jShared);
    return doc.dump(2) + "\n";
}

std::string to_json(const OCPN& net) {
    ordered_json doc = ordered_json::object();
    ordered_json jPlaces = ordered_json::array();
    for (const auto& place : net.places) {
        jPlaces.push_back({{"id", place.id},
                           {"otype", place.otype},
                           {"source", place.isSource},
                           {"sink", place.isSink}});
    }
    doc["places"] = std::move(jPlaces);
    doc["transitions"] = net.transitions;
    ordered_json jArcs = ordered_json::array();
    for (const auto& arc : net.arcs) {
        jArcs.push_back({{"place", arc.placeId},
                         {"transition", arc.transition},
                         {"direction", arc.placeToTransition ? "place->transition"
                                                             : "transition->place"},
                         {"variable", arc.variable}});
    }
    doc["arcs"] = std::move(jArcs);
    return doc.dump(2) + "\n";
}

} // namespace ocpm::discovery
