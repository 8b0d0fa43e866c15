#include "adprov/adaptation.hpp"

#include <algorithm>
#include <charconv>

namespace adprov::adaptation {

using xes::Attribute;
using xes::AttributeValue;
using xes::Event;
using xes::EventLog;
using xes::Trace;
using xes::Violation;

std::string to_string(ChangeType t) {
    return t == ChangeType::Insert ? "insert" : "delete";
}

std::optional<ChangeType> change_type_from_string(std::string_view s) {
    if (s == "insert") return ChangeType::Insert;
    if (s == "delete") return ChangeType::Delete;
    return std::nullopt;
}

ChangePosition ChangePosition::after(std::string label) {
    return {Kind::AfterActivity, std::move(label), 0};
}
ChangePosition ChangePosition::before(std::string label) {
    return {Kind::BeforeActivity, std::move(label), 0};
}
ChangePosition ChangePosition::at(int index) {
    return {Kind::AtIndex, {}, index};
}

std::string ChangePosition::kind_text() const {
    switch (kind) {
        case Kind::AfterActivity: return "after";
        case Kind::BeforeActivity: return "before";
        case Kind::AtIndex: return "at_index";
    }
    return "at_index";
}

std::string ChangePosition::anchor_text() const {
    return kind == Kind::AtIndex ? std::to_string(index) : anchor_label;
}

void sort_canonical(std::vector<ChangeEvent>& changes) {
    std::stable_sort(changes.begin(), changes.end(),
                     [](const ChangeEvent& a, const ChangeEvent& b) {
                         if (a.change_time != b.change_time) return a.change_time < b.change_time;
                         std::string at = to_string(a.change_type), bt = to_string(b.change_type);
                         if (at != bt) return at < bt;
                         return a.target_activity < b.target_activity;
                     });
}

namespace {

bool has_adaptation_attr(const Event& ev) {
    return std::any_of(ev.attributes.begin(), ev.attributes.end(),
                       [](const Attribute& a) { return a.prefix() == kExtensionPrefix; });
}

std::optional<ChangePosition> parse_position(const std::string& kind,
                                             const std::string& anchor) {
    if (kind == "after" && !anchor.empty()) return ChangePosition::after(anchor);
    if (kind == "before" && !anchor.empty()) return ChangePosition::before(anchor);
    if (kind == "at_index") {
        int idx = 0;
        auto [p, ec] = std::from_chars(anchor.data(), anchor.data() + anchor.size(), idx);
        if (ec == std::errc{} && p == anchor.data() + anchor.size() && idx >= 0)
            return ChangePosition::at(idx);
    }
    return std::nullopt;
}

// Reads the facet set from an attribute list; fills `missing` with the keys
// that are absent or ill-typed.
std::optional<ChangeEvent> read_facets(const std::vector<Attribute>& attrs,
                                       const std::string& instance_id,
                                       std::vector<std::string>& missing) {
    auto find = [&](const char* key) -> const Attribute* {
        for (const auto& a : attrs)
            if (a.key == key) return &a;
        return nullptr;
    };
    ChangeEvent ce;
    ce.instance_id = instance_id;

    const Attribute* type = find(kKeyType);
    if (!type || type->value.kind != AttributeValue::Kind::String ||
        !change_type_from_string(type->value.as_string())) {
        missing.push_back(kKeyType);
    } else {
        ce.change_type = *change_type_from_string(type->value.as_string());
    }
    const Attribute* target = find(kKeyTarget);
    if (!target || target->value.kind != AttributeValue::Kind::String ||
        target->value.as_string().empty()) {
        missing.push_back(kKeyTarget);
    } else {
        ce.target_activity = target->value.as_string();
    }
    const Attribute* pk = find(kKeyPositionKind);
    const Attribute* pa = find(kKeyPositionAnchor);
    if (!pk || !pa || pk->value.kind != AttributeValue::Kind::String ||
        pa->value.kind != AttributeValue::Kind::String) {
        if (!pk) missing.push_back(kKeyPositionKind);
        if (!pa) missing.push_back(kKeyPositionAnchor);
    } else if (auto pos = parse_position(pk->value.as_string(), pa->value.as_string())) {
        ce.position = *pos;
    } else {
        missing.push_back(kKeyPositionKind);
    }
    const Attribute* who = find(kKeyInitiator);
    if (!who || who->value.kind != AttributeValue::Kind::String ||
        who->value.as_string().empty()) {
        missing.push_back(kKeyInitiator);
    } else {
        ce.initiator = who->value.as_string();
    }
    const Attribute* when = find(kKeyTime);
    if (!when || when->value.kind != AttributeValue::Kind::Timestamp) {
        missing.push_back(kKeyTime);
    } else {
        ce.change_time = when->value.as_timestamp();
    }
    if (const Attribute* note = find(kKeyNote);
        note && note->value.kind == AttributeValue::Kind::String)
        ce.note = note->value.as_string();

    if (!missing.empty()) return std::nullopt;
    return ce;
}

std::string join(const std::vector<std::string>& keys) {
    std::string out;
    for (const auto& k : keys) {
        if (!out.empty()) out += ", ";
        out += k;
    }
    return out;
}

}  // namespace

std::map<std::string, std::vector<ChangeEvent>> extract_change_events(const EventLog& log) {
    std::map<std::string, std::vector<ChangeEvent>> result;
    for (size_t t = 0; t < log.traces.size(); ++t) {
        const Trace& tr = log.traces[t];
        std::string instance = tr.instance_id().value_or("");
        std::vector<ChangeEvent> changes;
        for (size_t e = 0; e < tr.events.size(); ++e) {
            const Event& ev = tr.events[e];
            if (!has_adaptation_attr(ev)) continue;
            std::vector<std::string> missing;
            auto ce = read_facets(ev.attributes, instance, missing);
            if (!ce)
                throw ExtractionError("partial adaptation annotation on trace " +
                                      std::to_string(t) + " event " + std::to_string(e) +
                                      ": missing or ill-typed " + join(missing));
            if (ce->change_type != ChangeType::Insert)
                throw ExtractionError("delete annotation carried on an event (trace " +
                                      std::to_string(t) + " event " + std::to_string(e) + ")");
            changes.push_back(std::move(*ce));
        }
        if (const Attribute* group = tr.find(kKeyDeletes)) {
            for (const Attribute& del : group->children) {
                if (del.key != kKeyDelete) continue;
                std::vector<std::string> missing;
                auto ce = read_facets(del.children, instance, missing);
                if (!ce)
                    throw ExtractionError("partial delete annotation on trace " +
                                          std::to_string(t) + ": missing or ill-typed " +
                                          join(missing));
                changes.push_back(std::move(*ce));
            }
        }
        if (!changes.empty()) {
            sort_canonical(changes);
            result[instance] = std::move(changes);
        }
    }
    return result;
}

namespace {

void append_facets(std::vector<Attribute>& attrs, const ChangeEvent& ce) {
    attrs.push_back({kKeyType, AttributeValue::string(to_string(ce.change_type)), {}});
    attrs.push_back({kKeyTarget, AttributeValue::string(ce.target_activity), {}});
    attrs.push_back({kKeyPositionKind, AttributeValue::string(ce.position.kind_text()), {}});
    attrs.push_back({kKeyPositionAnchor, AttributeValue::string(ce.position.anchor_text()), {}});
    attrs.push_back({kKeyInitiator, AttributeValue::string(ce.initiator), {}});
    attrs.push_back({kKeyTime, AttributeValue::timestamp(ce.change_time), {}});
    if (ce.note) attrs.push_back({kKeyNote, AttributeValue::string(*ce.note), {}});
}

size_t synthesis_index(const Trace& tr, const ChangePosition& pos) {
    auto first_labeled = [&](const std::string& label) -> std::optional<size_t> {
        for (size_t i = 0; i < tr.events.size(); ++i)
            if (tr.events[i].activity() == label) return i;
        return std::nullopt;
    };
    switch (pos.kind) {
        case ChangePosition::Kind::AtIndex:
            return std::min<size_t>(static_cast<size_t>(pos.index), tr.events.size());
        case ChangePosition::Kind::AfterActivity:
            if (auto i = first_labeled(pos.anchor_label)) return *i + 1;
            return tr.events.size();
        case ChangePosition::Kind::BeforeActivity:
            if (auto i = first_labeled(pos.anchor_label)) return *i;
            return 0;
    }
    return tr.events.size();
}

void apply_insert(Trace& tr, const ChangeEvent& ce) {
    for (Event& ev : tr.events) {
        if (ev.activity() == ce.target_activity && !has_adaptation_attr(ev)) {
            append_facets(ev.attributes, ce);
            return;
        }
    }
    Event synthesized;
    synthesized.attributes.push_back(
        {"concept:name", AttributeValue::string(ce.target_activity), {}});
    append_facets(synthesized.attributes, ce);
    tr.events.insert(tr.events.begin() + synthesis_index(tr, ce.position),
                     std::move(synthesized));
}

void apply_delete(Trace& tr, const ChangeEvent& ce) {
    for (const Event& ev : tr.events)
        if (ev.activity() == ce.target_activity)
            throw AnnotationError("delete of '" + ce.target_activity +
                                  "' but the activity still occurs in trace '" +
                                  ce.instance_id + "'");
    Attribute* group = nullptr;
    for (Attribute& a : tr.attributes)
        if (a.key == kKeyDeletes) group = &a;
    if (!group) {
        tr.attributes.push_back({kKeyDeletes, AttributeValue::integer(0), {}});
        group = &tr.attributes.back();
    }
    Attribute del{kKeyDelete, AttributeValue::string(ce.target_activity), {}};
    append_facets(del.children, ce);
    group->children.push_back(std::move(del));
    group->value = AttributeValue::integer(static_cast<std::int64_t>(group->children.size()));
}

}  // namespace

EventLog annotate_log(const EventLog& log, const std::vector<ChangeEvent>& changes) {
    EventLog out = log;
    if (changes.empty()) return out;
    if (!out.has_extension(kExtensionPrefix))
        out.extensions.push_back({kExtensionName, kExtensionPrefix, kExtensionUri});

    std::map<std::string, std::vector<ChangeEvent>> by_instance;
    for (const auto& ce : changes) by_instance[ce.instance_id].push_back(ce);

    for (auto& [instance, list] : by_instance) {
        Trace* trace = nullptr;
        for (auto& tr : out.traces)
            if (tr.instance_id() == instance) trace = &tr;
        if (!trace) throw AnnotationError("unknown process instance '" + instance + "'");
        sort_canonical(list);
        // Inserts first so that delete checks see the final event set.
        for (const auto& ce : list)
            if (ce.change_type == ChangeType::Insert) apply_insert(*trace, ce);
        for (const auto& ce : list)
            if (ce.change_type == ChangeType::Delete) apply_delete(*trace, ce);
    }
    return out;
}

namespace {

void check_facets(const std::vector<Attribute>& attrs, int trace_idx, int event_idx,
                  bool expect_delete, std::vector<Violation>& out) {
    auto find = [&](const char* key) -> const Attribute* {
        for (const auto& a : attrs)
            if (a.key == key) return &a;
        return nullptr;
    };
    const Attribute* type = find(kKeyType);
    if (!type || type->value.kind != AttributeValue::Kind::String ||
        !change_type_from_string(type->value.as_string())) {
        out.push_back({"BAD_TYPE", trace_idx, event_idx, kKeyType,
                       type ? "adaptation:type must be \"insert\" or \"delete\""
                            : "adaptation:type missing"});
    } else {
        bool is_delete = type->value.as_string() == "delete";
        if (is_delete && !expect_delete)
            out.push_back({"DELETE_ON_EVENT", trace_idx, event_idx, kKeyType,
                           "delete annotations belong in the trace-level group"});
        if (!is_delete && expect_delete)
            out.push_back({"BAD_TYPE", trace_idx, event_idx, kKeyType,
                           "trace-level delete group entry with non-delete type"});
    }
    const Attribute* target = find(kKeyTarget);
    if (!target || target->value.kind != AttributeValue::Kind::String ||
        target->value.as_string().empty())
        out.push_back({"MISSING_WHAT", trace_idx, event_idx, kKeyTarget,
                       "adaptation:target missing or empty"});
    const Attribute* pk = find(kKeyPositionKind);
    const Attribute* pa = find(kKeyPositionAnchor);
    if (!pk || !pa) {
        out.push_back({"MISSING_WHERE", trace_idx, event_idx,
                       pk ? kKeyPositionAnchor : kKeyPositionKind,
                       "adaptation position keys missing"});
    } else if (pk->value.kind != AttributeValue::Kind::String ||
               pa->value.kind != AttributeValue::Kind::String ||
               !parse_position(pk->value.as_string(), pa->value.as_string())) {
        out.push_back({"BAD_POSITION", trace_idx, event_idx, kKeyPositionKind,
                       "unparseable change position"});
    }
    const Attribute* who = find(kKeyInitiator);
    if (!who || who->value.kind != AttributeValue::Kind::String ||
        who->value.as_string().empty())
        out.push_back({"MISSING_WHO", trace_idx, event_idx, kKeyInitiator,
                       "adaptation:initiator missing or empty"});
    const Attribute* when = find(kKeyTime);
    if (!when || when->value.kind != AttributeValue::Kind::Timestamp)
        out.push_back({"MISSING_WHEN", trace_idx, event_idx, kKeyTime,
                       "adaptation:time missing or not a timestamp"});
}

}  // namespace

std::vector<Violation> validate_adaptation(const EventLog& log) {
    std::vector<Violation> out;
    bool uses_extension = false;
    for (size_t t = 0; t < log.traces.size(); ++t) {
        const Trace& tr = log.traces[t];
        for (size_t e = 0; e < tr.events.size(); ++e) {
            const Event& ev = tr.events[e];
            if (!has_adaptation_attr(ev)) continue;
            uses_extension = true;
            check_facets(ev.attributes, static_cast<int>(t), static_cast<int>(e),
                         /*expect_delete=*/false, out);
            // Insert must not post-date the inserted activity's execution.
            const Attribute* when = ev.find(kKeyTime);
            const Attribute* exec = ev.find("time:timestamp");
            if (when && exec && when->value.kind == AttributeValue::Kind::Timestamp &&
                exec->value.kind == AttributeValue::Kind::Timestamp &&
                when->value.as_timestamp() > exec->value.as_timestamp())
                out.push_back({"TIME_AFTER_EXECUTION", static_cast<int>(t),
                               static_cast<int>(e), kKeyTime,
                               "change made after the inserted activity executed"});
        }
        if (const Attribute* group = tr.find(kKeyDeletes)) {
            uses_extension = true;
            for (const Attribute& del : group->children) {
                if (del.key != kKeyDelete) {
                    out.push_back({"BAD_TYPE", static_cast<int>(t), -1, del.key,
                                   "unexpected child in adaptation:deletes group"});
                    continue;
                }
                check_facets(del.children, static_cast<int>(t), -1, /*expect_delete=*/true,
                             out);
            }
        }
    }
    if (uses_extension && !log.has_extension(kExtensionPrefix))
        out.push_back({"UNDECLARED_EXTENSION", -1, -1, kExtensionPrefix,
                       "adaptation attributes used without extension declaration"});
    return out;
}

}  // namespace adprov::adaptation
