// Adaptation XES extension: vocabulary for recording insert/delete
// adaptations inside event logs, extraction of explicit change events,
// and annotation of logs with change events.
//
// Insert annotations ride on the inserted activity's event. Delete
// annotations ride on a trace-level attribute group, since a deleted
// activity produces no event of its own.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adprov/xes.hpp"

namespace adprov::adaptation {

inline constexpr const char* kExtensionName = "Adaptation";
inline constexpr const char* kExtensionPrefix = "adaptation";
inline constexpr const char* kExtensionUri =
    "https://raw.githubusercontent.com/ProvenanceHolder/ProvenanceHolder/refs/heads/main/"
    "adaptation.xesext";

// Attribute keys carried by annotated events / trace groups.
inline constexpr const char* kKeyType = "adaptation:type";
inline constexpr const char* kKeyTarget = "adaptation:target";
inline constexpr const char* kKeyPositionKind = "adaptation:position_kind";
inline constexpr const char* kKeyPositionAnchor = "adaptation:position_anchor";
inline constexpr const char* kKeyInitiator = "adaptation:initiator";
inline constexpr const char* kKeyTime = "adaptation:time";
inline constexpr const char* kKeyNote = "adaptation:note";
inline constexpr const char* kKeyDeletes = "adaptation:deletes";
inline constexpr const char* kKeyDelete = "adaptation:delete";

enum class ChangeType { Insert, Delete };

std::string to_string(ChangeType t);
std::optional<ChangeType> change_type_from_string(std::string_view s);

struct ChangePosition {
    enum class Kind { AfterActivity, BeforeActivity, AtIndex };

    Kind kind = Kind::AtIndex;
    std::string anchor_label;  // After/Before
    int index = 0;             // AtIndex, >= 0

    static ChangePosition after(std::string label);
    static ChangePosition before(std::string label);
    static ChangePosition at(int index);

    std::string kind_text() const;    // "after" | "before" | "at_index"
    std::string anchor_text() const;  // label or decimal index

    bool operator==(const ChangePosition&) const = default;
};

// One runtime adaptation of one process instance, with the full
// what/where/who/when facet set.
struct ChangeEvent {
    std::string instance_id;
    ChangeType change_type = ChangeType::Insert;
    std::string target_activity;
    ChangePosition position;
    std::string initiator;
    xes::Timestamp change_time;
    std::optional<std::string> note;

    bool operator==(const ChangeEvent&) const = default;
};

class ExtractionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class AnnotationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Canonical change order: by change_time, ties by (type, target) lexicographic.
void sort_canonical(std::vector<ChangeEvent>& changes);

// Explicit collection path: pulls ChangeEvents out of adaptation:* annotations.
// Events without adaptation attributes contribute nothing. Throws
// ExtractionError on partially annotated events (naming the missing keys).
std::map<std::string, std::vector<ChangeEvent>> extract_change_events(
    const xes::EventLog& log);

// Writes the change events into the log as adaptation:* annotations and
// declares the extension. Inserts annotate the target event (synthesized at
// the change position when absent); deletes are grouped under a trace-level
// adaptation:deletes attribute. Throws AnnotationError on unknown instances
// or deletes whose target still occurs in the trace.
xes::EventLog annotate_log(const xes::EventLog& log, const std::vector<ChangeEvent>& changes);

// Total. Rule ids: MISSING_WHAT, MISSING_WHERE, MISSING_WHO, MISSING_WHEN,
// BAD_TYPE, BAD_POSITION, DELETE_ON_EVENT, UNDECLARED_EXTENSION,
// TIME_AFTER_EXECUTION.
std::vector<xes::Violation> validate_adaptation(const xes::EventLog& log);

}  // namespace adprov::adaptation
