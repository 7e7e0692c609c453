#include "ocpm/ocel.hpp"

#include "ocpm/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <unordered_map>
#include <unordered_set>

namespace ocpm {

namespace {

using ordered_json = nlohmann::ordered_json;

// A vmap string in exactly the serializer's timestamp format is read back as
// a Timestamp, so timestamp attributes survive a round trip.
bool looks_like_iso_instant(const std::string& s) {
    if (s.size() != 20 || s[4] != '-' || s[7] != '-' || s[10] != 'T' || s[13] != ':' ||
        s[16] != ':' || s[19] != 'Z') {
        return false;
    }
    for (std::size_t i = 0; i < 19; ++i) {
        if (i == 4 || i == 7 || i == 10 || i == 13 || i == 16) continue;
        if (std::isdigit(static_cast<unsigned char>(s[i])) == 0) return false;
    }
    return true;
}

AttrValue attr_from_json(const ordered_json& v, const std::string& where) {
    switch (v.type()) {
        case ordered_json::value_t::string: {
            const auto& s = v.get_ref<const std::string&>();
            if (looks_like_iso_instant(s)) return parse_timestamp(s);
            return s;
        }
        case ordered_json::value_t::number_integer:
            return v.get<std::int64_t>();
        case ordered_json::value_t::number_unsigned: {
            const auto u = v.get<std::uint64_t>();
            if (u > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
                throw MalformedInput("integer attribute out of range in " + where);
            }
            return static_cast<std::int64_t>(u);
        }
        case ordered_json::value_t::number_float:
            return v.get<double>();
        case ordered_json::value_t::boolean:
            return v.get<bool>();
        default:
            throw MalformedInput("unsupported attribute value type in " + where);
    }
}

ordered_json attr_to_json(const AttrValue& v) {
    return std::visit(
        [](const auto& x) -> ordered_json {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Timestamp>) {
                return format_iso(x);
            } else {
                return x;
            }
        },
        v);
}

std::map<std::string, AttrValue> attr_map_from_json(const ordered_json& obj,
                                                    const std::string& where) {
    if (!obj.is_object()) throw MalformedInput("attribute map is not an object in " + where);
    std::map<std::string, AttrValue> out;
    for (const auto& [key, value] : obj.items()) {
        out.emplace(key, attr_from_json(value, where + "/" + key));
    }
    return out;
}

} // namespace

OCEventLog OCEventLog::build(std::vector<Event> events, std::vector<ObjectInstance> objects,
                             std::set<std::string> declaredTypes) {
    OCEventLog log;

    for (auto& obj : objects) {
        if (obj.otype.empty()) {
            throw IntegrityError("object \"" + obj.oid + "\" has an empty type");
        }
        declaredTypes.insert(obj.otype);
        auto [it, inserted] = log.objects_.emplace(obj.oid, std::move(obj));
        if (!inserted) throw IntegrityError("duplicate oid: " + it->first);
    }
    log.objectTypes_ = std::move(declaredTypes);

    std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
        if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
        return a.eid < b.eid;
    });

    std::unordered_set<std::string_view> seenEids;
    seenEids.reserve(events.size());
    for (auto& ev : events) {
        if (!seenEids.insert(ev.eid).second) {
            throw IntegrityError("duplicate eid: " + ev.eid);
        }
        // Empty per-type lists are equivalent to absent entries; normalize so
        // equality and serialization are canonical.
        for (auto it = ev.omap.begin(); it != ev.omap.end();) {
            it = it->second.empty() ? ev.omap.erase(it) : std::next(it);
        }
        if (ev.omap.empty()) {
            throw IntegrityError("event has no object references: " + ev.eid);
        }
        for (const auto& [otype, oids] : ev.omap) {
            std::unordered_set<std::string_view> inCell;
            for (const auto& oid : oids) {
                if (!inCell.insert(oid).second) {
                    throw IntegrityError("duplicate reference to \"" + oid + "\" in event " +
                                         ev.eid);
                }
                auto obj = log.objects_.find(oid);
                if (obj == log.objects_.end() || obj->second.otype != otype) {
                    throw IntegrityError("dangling reference to " + otype + " \"" + oid +
                                         "\" in event " + ev.eid);
                }
            }
        }
        log.vocabulary_.insert(ev.activity);
    }
    log.events_ = std::move(events);

    for (std::uint32_t i = 0; i < log.events_.size(); ++i) {
        for (const auto& [otype, oids] : log.events_[i].omap) {
            for (const auto& oid : oids) log.byObject_[oid].push_back(i);
        }
    }
    return log;
}

const std::vector<std::uint32_t>& OCEventLog::eventsOf(const std::string& oid) const {
    static const std::vector<std::uint32_t> kEmpty;
    auto it = byObject_.find(oid);
    return it == byObject_.end() ? kEmpty : it->second;
}

std::vector<std::string> OCEventLog::oidsOfType(const std::string& otype) const {
    std::vector<std::string> out;
    for (const auto& [oid, obj] : objects_) {
        if (obj.otype == otype) out.push_back(oid);
    }
    return out;
}

OCEventLog parse_ocel_json(std::string_view bytes) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(bytes);
    } catch (const ordered_json::parse_error& e) {
        throw MalformedInput(std::string("not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("ocel:global-log") || !doc.contains("ocel:events") ||
        !doc.contains("ocel:objects")) {
        throw MalformedInput("missing OCEL top-level keys");
    }
    const auto& jGlobal = doc["ocel:global-log"];
    const auto& jEvents = doc["ocel:events"];
    const auto& jObjects = doc["ocel:objects"];
    if (!jGlobal.is_object() || !jEvents.is_object() || !jObjects.is_object()) {
        throw MalformedInput("OCEL top-level values must be objects");
    }

    std::set<std::string> declared;
    if (jGlobal.contains("ocel:object-types")) {
        const auto& types = jGlobal["ocel:object-types"];
        if (!types.is_array()) throw MalformedInput("ocel:object-types must be an array");
        for (const auto& t : types) {
            if (!t.is_string()) throw MalformedInput("ocel:object-types entries must be strings");
            declared.insert(t.get<std::string>());
        }
    }

    std::vector<ObjectInstance> objects;
    std::unordered_map<std::string, std::string> typeOf;
    objects.reserve(jObjects.size());
    for (const auto& [oid, jObj] : jObjects.items()) {
        if (!jObj.is_object() || !jObj.contains("ocel:type") || !jObj["ocel:type"].is_string()) {
            throw MalformedInput("object \"" + oid + "\" lacks ocel:type");
        }
        ObjectInstance obj;
        obj.oid = oid;
        obj.otype = jObj["ocel:type"].get<std::string>();
        if (jObj.contains("ocel:ovmap")) {
            obj.attributes = attr_map_from_json(jObj["ocel:ovmap"], "object " + oid);
        }
        typeOf[oid] = obj.otype;
        objects.push_back(std::move(obj));
    }

    std::vector<Event> events;
    events.reserve(jEvents.size());
    for (const auto& [eid, jEv] : jEvents.items()) {
        if (!jEv.is_object() || !jEv.contains("ocel:activity") || !jEv.contains("ocel:timestamp") ||
            !jEv.contains("ocel:omap")) {
            throw MalformedInput("event \"" + eid + "\" lacks a required key");
        }
        if (!jEv["ocel:activity"].is_string() || !jEv["ocel:timestamp"].is_string()) {
            throw MalformedInput("event \"" + eid + "\" activity/timestamp must be strings");
        }
        Event ev;
        ev.eid = eid;
        ev.activity = jEv["ocel:activity"].get<std::string>();
        ev.timestamp = parse_timestamp(jEv["ocel:timestamp"].get<std::string>());

        const auto& jOmap = jEv["ocel:omap"];
        if (jOmap.is_object()) {
            for (const auto& [otype, jOids] : jOmap.items()) {
                if (!jOids.is_array()) {
                    throw MalformedInput("event \"" + eid + "\" omap lists must be arrays");
                }
                auto& list = ev.omap[otype];
                for (const auto& jOid : jOids) {
                    if (!jOid.is_string()) {
                        throw MalformedInput("event \"" + eid + "\" omap entries must be strings");
                    }
                    list.push_back(jOid.get<std::string>());
                }
            }
        } else if (jOmap.is_array()) {
            // Flat OCEL 1.0 form: oids only; the type comes from the object table.
            for (const auto& jOid : jOmap) {
                if (!jOid.is_string()) {
                    throw MalformedInput("event \"" + eid + "\" omap entries must be strings");
                }
                auto oid = jOid.get<std::string>();
                auto it = typeOf.find(oid);
                if (it == typeOf.end()) {
                    throw IntegrityError("dangling reference to \"" + oid + "\" in event " + eid);
                }
                ev.omap[it->second].push_back(std::move(oid));
            }
        } else {
            throw MalformedInput("event \"" + eid + "\" omap must be an object or array");
        }

        if (jEv.contains("ocel:vmap")) {
            ev.vmap = attr_map_from_json(jEv["ocel:vmap"], "event " + eid);
        }
        events.push_back(std::move(ev));
    }

    return OCEventLog::build(std::move(events), std::move(objects), std::move(declared));
}

std::string serialize_ocel_json(const OCEventLog& log) {
    ordered_json doc = ordered_json::object();

    ordered_json jEvents = ordered_json::object();
    for (const auto& ev : log.events()) {
        ordered_json jEv = ordered_json::object();
        jEv["ocel:activity"] = ev.activity;
        ordered_json jOmap = ordered_json::object();
        for (const auto& [otype, oids] : ev.omap) jOmap[otype] = oids;
        jEv["ocel:omap"] = std::move(jOmap);
        jEv["ocel:timestamp"] = format_iso(ev.timestamp);
        ordered_json jVmap = ordered_json::object();
        for (const auto& [key, value] : ev.vmap) jVmap[key] = attr_to_json(value);
        jEv["ocel:vmap"] = std::move(jVmap);
        jEvents[ev.eid] = std::move(jEv);
    }

    std::set<std::string> attributeNames;
    for (const auto& ev : log.events()) {
        for (const auto& [key, value] : ev.vmap) attributeNames.insert(key);
    }
    for (const auto& [oid, obj] : log.objects()) {
        for (const auto& [key, value] : obj.attributes) attributeNames.insert(key);
    }
    ordered_json jGlobal = ordered_json::object();
    jGlobal["ocel:attribute-names"] = attributeNames;
    jGlobal["ocel:object-types"] = log.objectTypes();
    jGlobal["ocel:ordering"] = "timestamp";
    jGlobal["ocel:version"] = "1.0";

    ordered_json jObjects = ordered_json::object();
    for (const auto& [oid, obj] : log.objects()) {
        ordered_json jObj = ordered_json::object();
        ordered_json jOvmap = ordered_json::object();
        for (const auto& [key, value] : obj.attributes) jOvmap[key] = attr_to_json(value);
        jObj["ocel:ovmap"] = std::move(jOvmap);
        jObj["ocel:type"] = obj.otype;
        jObjects[oid] = std::move(jObj);
    }

    doc["ocel:events"] = std::move(jEvents);
    doc["ocel:global-log"] = std::move(jGlobal);
    doc["ocel:objects"] = std::move(jObjects);
    return doc.dump(2) + "\n";
}

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b])) != 0) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])) != 0) --e;
    return std::string(s.substr(b, e - b));
}

// RFC 4180-ish: quoted cells with "" escapes, \r\n or \n records.
std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string cell;
    bool inQuotes = false;
    bool cellStarted = false;

    if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

    auto endCell = [&] {
        row.push_back(std::move(cell));
        cell.clear();
        cellStarted = false;
    };
    auto endRow = [&] {
        endCell();
        const bool blank = row.size() == 1 && row[0].empty();
        if (!blank) rows.push_back(std::move(row));
        row.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (inQuotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    cell += '"';
                    ++i;
                } else {
                    inQuotes = false;
                }
            } else {
                cell += c;
            }
        } else if (c == '"' && !cellStarted) {
            inQuotes = true;
            cellStarted = true;
        } else if (c == ',') {
            endCell();
        } else if (c == '\n') {
            if (!cell.empty() && cell.back() == '\r') cell.pop_back();
            endRow();
        } else {
            cell += c;
            cellStarted = true;
        }
    }
    if (inQuotes) throw MalformedInput("unterminated quote in CSV input");
    if (cellStarted || !row.empty()) {
        if (!cell.empty() && cell.back() == '\r') cell.pop_back();
        endRow();
    }
    return rows;
}

// `[a;b]` -> {a, b}; empty cell -> {}.
std::vector<std::string> parse_oid_cell(const std::string& raw, const std::string& eid) {
    const std::string cell = trim(raw);
    if (cell.empty()) return {};
    if (cell.front() != '[' || cell.back() != ']') {
        throw MalformedInput("bad oid list cell \"" + raw + "\" in row " + eid);
    }
    std::vector<std::string> oids;
    const std::string inner = cell.substr(1, cell.size() - 2);
    if (trim(inner).empty()) return {};
    std::size_t start = 0;
    while (true) {
        const std::size_t semi = inner.find(';', start);
        const std::string item = trim(inner.substr(start, semi - start));
        if (item.empty()) {
            throw MalformedInput("empty oid in cell \"" + raw + "\" in row " + eid);
        }
        oids.push_back(item);
        if (semi == std::string::npos) break;
        start = semi + 1;
    }
    return oids;
}

} // namespace

OCEventLog import_table(std::string_view csv) {
    const auto rows = parse_csv(csv);
    if (rows.empty()) throw MalformedInput("empty table");

    const auto& header = rows.front();
    if (header.size() < 3 || trim(header[0]) != "Id" || trim(header[1]) != "Activity" ||
        trim(header[2]) != "Timestamp") {
        throw MalformedInput("table header must start with Id,Activity,Timestamp");
    }
    std::vector<std::string> typeColumns;
    for (std::size_t c = 3; c < header.size(); ++c) {
        std::string name = trim(header[c]);
        if (name.empty()) throw MalformedInput("empty object-type column name in header");
        if (std::find(typeColumns.begin(), typeColumns.end(), name) != typeColumns.end()) {
            throw MalformedInput("duplicate column: " + name);
        }
        typeColumns.push_back(std::move(name));
    }

    std::vector<Event> events;
    std::map<std::string, std::set<std::string>> oidsPerType;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != header.size()) {
            throw MalformedInput("row " + std::to_string(r) + " has " +
                                 std::to_string(row.size()) + " cells, expected " +
                                 std::to_string(header.size()));
        }
        Event ev;
        ev.eid = trim(row[0]);
        if (ev.eid.empty()) throw MalformedInput("row " + std::to_string(r) + " has empty Id");
        ev.activity = trim(row[1]);
        if (ev.activity.empty()) throw MalformedInput("row " + ev.eid + " has empty Activity");
        ev.timestamp = parse_timestamp(trim(row[2]));
        for (std::size_t c = 0; c < typeColumns.size(); ++c) {
            auto oids = parse_oid_cell(row[3 + c], ev.eid);
            if (oids.empty()) continue;
            for (const auto& oid : oids) oidsPerType[typeColumns[c]].insert(oid);
            ev.omap[typeColumns[c]] = std::move(oids);
        }
        events.push_back(std::move(ev));
    }

    std::vector<ObjectInstance> objects;
    for (const auto& [otype, oids] : oidsPerType) {
        for (const auto& oid : oids) objects.push_back(ObjectInstance{oid, otype, {}});
    }
    std::set<std::string> declared(typeColumns.begin(), typeColumns.end());
    return OCEventLog::build(std::move(events), std::move(objects), std::move(declared));
}

OCEventLog project(const OCEventLog& log, const std::set<std::string>& keepTypes) {
    for (const auto& t : keepTypes) {
        if (!log.hasType(t)) throw UnknownType("unknown object type: " + t);
    }
    std::vector<Event> events;
    for (const auto& ev : log.events()) {
        Event copy = ev;
        for (auto it = copy.omap.begin(); it != copy.omap.end();) {
            it = keepTypes.count(it->first) == 0 ? copy.omap.erase(it) : std::next(it);
        }
        if (!copy.omap.empty()) events.push_back(std::move(copy));
    }
    std::vector<ObjectInstance> objects;
    for (const auto& [oid, obj] : log.objects()) {
        if (keepTypes.count(obj.otype) > 0) objects.push_back(obj);
    }
    return OCEventLog::build(std::move(events), std::move(objects), keepTypes);
}

FlattenedLog flatten(const OCEventLog& log, const std::string& otype) {
    if (!log.hasType(otype)) throw UnknownType("unknown object type: " + otype);
    FlattenedLog flat;
    flat.caseNotion = "object:" + otype;
    for (const auto& oid : log.oidsOfType(otype)) {
        auto& trace = flat.cases[oid];
        for (const std::uint32_t idx : log.eventsOf(oid)) {
            const Event& ev = log.events()[idx];
            trace.push_back(TraceEvent{ev.eid, ev.activity, ev.timestamp});
        }
    }
    return flat;
}

} // namespace ocpm
