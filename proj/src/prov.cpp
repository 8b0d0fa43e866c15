#include "adprov/prov.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include <json.hpp>

namespace adprov::prov {

using holder::ProvenanceRecord;
using holder::RecordKind;
using nlohmann::json;

std::string to_string(RelationKind k) {
    switch (k) {
        case RelationKind::WasAssociatedWith: return "wasAssociatedWith";
        case RelationKind::WasGeneratedBy: return "wasGeneratedBy";
        case RelationKind::Used: return "used";
        case RelationKind::WasInformedBy: return "wasInformedBy";
    }
    return "used";
}

std::string camel_label(std::string_view name) {
    std::string out;
    bool upper_next = true;
    for (char c : name) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            out += upper_next ? static_cast<char>(std::toupper(static_cast<unsigned char>(c)))
                              : c;
            upper_next = false;
        } else {
            upper_next = true;
        }
    }
    return out;
}

namespace {

std::string sanitize(std::string_view text) {
    std::string out;
    for (char c : text)
        out += std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.'
                   ? c
                   : '-';
    return out;
}

}  // namespace

ProvDocument map_to_prov(const std::vector<ProvenanceRecord>& records,
                         const holder::IntegrityVerdict& verdict) {
    if (!verdict.valid)
        throw MappingError("refusing to map a tampered chain (first bad record " +
                           verdict.first_bad_record_id + ")");
    ProvDocument doc;
    doc.namespaces["prov"] = "http://www.w3.org/ns/prov#";
    doc.namespaces["adprov"] = "urn:adprov:";
    if (records.empty()) return doc;

    const std::string instance = records.front().instance_id;
    for (const auto& r : records)
        if (r.instance_id != instance)
            throw MappingError("records from mixed instances ('" + instance + "' vs '" +
                               r.instance_id + "')");
    const std::string base = "adprov:" + sanitize(instance);

    // Agents deduplicated by name, ordinals in order of first appearance.
    std::map<std::string, std::string> agent_ids;
    auto agent_for = [&](const std::string& name) -> std::string {
        auto it = agent_ids.find(name);
        if (it != agent_ids.end()) return it->second;
        std::string id = base + "/agent/" + std::to_string(doc.agents.size());
        doc.agents.push_back({id, camel_label(name)});
        agent_ids.emplace(name, id);
        return id;
    };
    // Label -> activity id, for linking change activities to what they adapted.
    std::map<std::string, std::string> activity_by_label;

    size_t exec_ordinal = 0, change_ordinal = 0;
    for (const auto& r : records) {
        if (r.kind == RecordKind::Execution) {
            const std::string name = r.payload.value("activity", "");
            ProvActivity act;
            act.id = base + "/activity/" + std::to_string(exec_ordinal);
            act.label = camel_label(name);
            if (r.payload.contains("timestamp")) {
                auto ts = xes::Timestamp::parse(r.payload.at("timestamp").get<std::string>());
                act.start = ts;
                act.end = ts;
                act.attributes.emplace_back("adprov:timestamp", ts.to_iso8601());
            }
            activity_by_label.emplace(act.label, act.id);

            ProvEntity ent;
            ent.id = base + "/entity/" + std::to_string(exec_ordinal);
            ent.label = act.label + "LogEntry";
            ent.attributes.emplace_back("adprov:record_id", r.record_id);

            doc.relations.push_back(
                {RelationKind::WasGeneratedBy, ent.id, act.id, std::nullopt});
            if (r.payload.contains("resource"))
                doc.relations.push_back({RelationKind::WasAssociatedWith, act.id,
                                         agent_for(r.payload.at("resource").get<std::string>()),
                                         std::nullopt});
            doc.activities.push_back(std::move(act));
            doc.entities.push_back(std::move(ent));
            ++exec_ordinal;
        } else {
            const auto ce = holder::change_event_from_payload(instance, r.payload);
            const bool is_insert = ce.change_type == adaptation::ChangeType::Insert;
            ProvActivity act;
            act.id = base + "/change/" + std::to_string(change_ordinal);
            act.label = is_insert ? "InsertActivity" : "DeleteActivity";
            act.attributes.emplace_back("adprov:target", camel_label(ce.target_activity));
            act.attributes.emplace_back("adprov:change_time", ce.change_time.to_iso8601());
            doc.relations.push_back(
                {RelationKind::WasAssociatedWith, act.id, agent_for(ce.initiator), std::nullopt});
            if (is_insert) {
                auto it = activity_by_label.find(camel_label(ce.target_activity));
                if (it != activity_by_label.end())
                    doc.relations.push_back(
                        {RelationKind::WasInformedBy, it->second, act.id, std::nullopt});
            } else {
                ProvEntity tomb;
                tomb.id = base + "/tombstone/" + std::to_string(change_ordinal);
                tomb.label = camel_label(ce.target_activity) + "Deleted";
                tomb.attributes.emplace_back("adprov:deletedActivity", ce.target_activity);
                doc.relations.push_back(
                    {RelationKind::WasGeneratedBy, tomb.id, act.id, std::nullopt});
                doc.entities.push_back(std::move(tomb));
            }
            doc.activities.push_back(std::move(act));
            ++change_ordinal;
        }
    }
    return doc;
}

std::vector<std::string> validate_document(const ProvDocument& doc) {
    std::vector<std::string> problems;
    std::set<std::string> entity_ids, activity_ids, agent_ids, all;
    auto declare = [&](const std::string& id, std::set<std::string>& cls) {
        cls.insert(id);
        if (!all.insert(id).second) problems.push_back("duplicate id " + id);
    };
    for (const auto& e : doc.entities) declare(e.id, entity_ids);
    for (const auto& a : doc.activities) declare(a.id, activity_ids);
    for (const auto& g : doc.agents) declare(g.id, agent_ids);
    for (const auto& r : doc.relations) {
        auto expect = [&](const std::string& id, const std::set<std::string>& cls,
                          const char* what) {
            if (!cls.contains(id))
                problems.push_back(to_string(r.kind) + ": " + id + " is not a declared " + what);
        };
        switch (r.kind) {
            case RelationKind::WasAssociatedWith:
                expect(r.subject, activity_ids, "activity");
                expect(r.object, agent_ids, "agent");
                break;
            case RelationKind::WasGeneratedBy:
                expect(r.subject, entity_ids, "entity");
                expect(r.object, activity_ids, "activity");
                break;
            case RelationKind::Used:
                expect(r.subject, activity_ids, "activity");
                expect(r.object, entity_ids, "entity");
                break;
            case RelationKind::WasInformedBy:
                expect(r.subject, activity_ids, "activity");
                expect(r.object, activity_ids, "activity");
                break;
        }
    }
    return problems;
}

namespace {

void ensure_valid(const ProvDocument& doc) {
    auto problems = validate_document(doc);
    if (!problems.empty()) {
        std::string msg = "invalid PROV document:";
        for (const auto& p : problems) msg += "\n  " + p;
        throw MappingError(msg);
    }
}

std::string quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

template <typename T>
std::vector<const T*> sorted_by_id(const std::vector<T>& items) {
    std::vector<const T*> out;
    for (const auto& i : items) out.push_back(&i);
    std::sort(out.begin(), out.end(), [](const T* a, const T* b) { return a->id < b->id; });
    return out;
}

std::vector<const ProvRelation*> sorted_relations(const ProvDocument& doc) {
    std::vector<const ProvRelation*> out;
    for (const auto& r : doc.relations) out.push_back(&r);
    std::sort(out.begin(), out.end(), [](const ProvRelation* a, const ProvRelation* b) {
        auto ka = std::tuple(to_string(a->kind), a->subject, a->object);
        auto kb = std::tuple(to_string(b->kind), b->subject, b->object);
        return ka < kb;
    });
    return out;
}

}  // namespace

std::string serialize_provn(const ProvDocument& doc) {
    ensure_valid(doc);
    std::string out = "document\n";
    for (const auto& [prefix, uri] : doc.namespaces)
        out += "  prefix " + prefix + " <" + uri + ">\n";
    for (const auto* e : sorted_by_id(doc.entities)) {
        out += "  entity(" + e->id + ", [prov:label=" + quote(e->label);
        for (const auto& [k, v] : e->attributes) out += ", " + k + "=" + quote(v);
        out += "])\n";
    }
    for (const auto* a : sorted_by_id(doc.activities)) {
        out += "  activity(" + a->id + ", ";
        out += a->start ? a->start->to_iso8601() : "-";
        out += ", ";
        out += a->end ? a->end->to_iso8601() : "-";
        out += ", [prov:label=" + quote(a->label);
        for (const auto& [k, v] : a->attributes) out += ", " + k + "=" + quote(v);
        out += "])\n";
    }
    for (const auto* g : sorted_by_id(doc.agents))
        out += "  agent(" + g->id + ", [prov:label=" + quote(g->label) + "])\n";
    for (const auto* r : sorted_relations(doc)) {
        out += "  " + to_string(r->kind) + "(" + r->subject + ", " + r->object;
        if (r->kind == RelationKind::WasGeneratedBy) out += ", -";
        out += ")\n";
    }
    out += "endDocument\n";
    return out;
}

std::string serialize_prov_json(const ProvDocument& doc) {
    ensure_valid(doc);
    json j;
    json prefix = json::object();
    for (const auto& [p, uri] : doc.namespaces) prefix[p] = uri;
    j["prefix"] = std::move(prefix);
    json entities = json::object();
    for (const auto* e : sorted_by_id(doc.entities)) {
        json attrs{{"prov:label", e->label}};
        for (const auto& [k, v] : e->attributes) attrs[k] = v;
        entities[e->id] = std::move(attrs);
    }
    if (!entities.empty()) j["entity"] = std::move(entities);
    json activities = json::object();
    for (const auto* a : sorted_by_id(doc.activities)) {
        json attrs{{"prov:label", a->label}};
        if (a->start) attrs["prov:startTime"] = a->start->to_iso8601();
        if (a->end) attrs["prov:endTime"] = a->end->to_iso8601();
        for (const auto& [k, v] : a->attributes) attrs[k] = v;
        activities[a->id] = std::move(attrs);
    }
    if (!activities.empty()) j["activity"] = std::move(activities);
    json agents = json::object();
    for (const auto* g : sorted_by_id(doc.agents))
        agents[g->id] = json{{"prov:label", g->label}};
    if (!agents.empty()) j["agent"] = std::move(agents);

    std::map<RelationKind, std::pair<const char*, std::pair<const char*, const char*>>> spec = {
        {RelationKind::WasAssociatedWith,
         {"wasAssociatedWith", {"prov:activity", "prov:agent"}}},
        {RelationKind::WasGeneratedBy, {"wasGeneratedBy", {"prov:entity", "prov:activity"}}},
        {RelationKind::Used, {"used", {"prov:activity", "prov:entity"}}},
        {RelationKind::WasInformedBy, {"wasInformedBy", {"prov:informed", "prov:informant"}}},
    };
    std::map<std::string, json> groups;
    int counter = 0;
    for (const auto* r : sorted_relations(doc)) {
        const auto& [name, roles] = spec.at(r->kind);
        json rel{{roles.first, r->subject}, {roles.second, r->object}};
        groups[name]["_:r" + std::to_string(counter++)] = std::move(rel);
    }
    for (auto& [name, members] : groups) j[name] = std::move(members);
    return j.dump(2) + "\n";
}

namespace {

// DOT quoting keeps backslash escapes (\n line breaks) intact.
std::string dot_quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace

std::string to_dot(const ProvDocument& doc) {
    ensure_valid(doc);
    std::string out = "digraph provenance {\n  rankdir=BT;\n";
    for (const auto* e : sorted_by_id(doc.entities)) {
        out += "  " + dot_quote(e->id) + " [shape=ellipse, style=filled, fillcolor=\"#fffcc2\", label=" +
               dot_quote(e->label) + "];\n";
    }
    for (const auto* a : sorted_by_id(doc.activities)) {
        std::string label = a->label;
        for (const auto& [k, v] : a->attributes)
            if (k == "adprov:timestamp" || k == "adprov:change_time") label += "\\n" + v;
        out += "  " + dot_quote(a->id) + " [shape=box, style=filled, fillcolor=\"#9fb1fc\", label=" +
               dot_quote(label) + "];\n";
    }
    for (const auto* g : sorted_by_id(doc.agents)) {
        out += "  " + dot_quote(g->id) + " [shape=house, style=filled, fillcolor=\"#fdb266\", label=" +
               dot_quote(g->label) + "];\n";
    }
    for (const auto* r : sorted_relations(doc)) {
        out += "  " + dot_quote(r->subject) + " -> " + dot_quote(r->object) +
               " [label=" + dot_quote(to_string(r->kind)) + "];\n";
    }
    out += "}\n";
    return out;
}

}  // namespace adprov::prov
