// Change detection for logs without explicit adaptation annotations:
// aligns each trace against the model's runs with a minimal insert/delete
// edit script and converts the surviving edits into ChangeEvents.

#pragma once

#include <string>
#include <vector>

#include "adprov/adaptation.hpp"
#include "adprov/model.hpp"
#include "adprov/xes.hpp"

namespace adprov::detect {

struct EditOp {
    enum class Kind { Insert, Delete };

    Kind kind = Kind::Insert;
    std::string label;
    // Insert: index of the inserted event in the observed sequence.
    // Delete: observed index before which the reference activity is missing.
    size_t trace_position = 0;

    bool operator==(const EditOp&) const = default;
};

// Minimum-length insert/delete script transforming `reference` into
// `observed` (LCS alignment, substitutions forbidden). Deterministic:
// at equal cost a Delete is taken before an Insert, earlier positions first.
std::vector<EditOp> edit_script(const std::vector<std::string>& reference,
                                const std::vector<std::string>& observed);

// Replays a script over the reference sequence.
std::vector<std::string> apply_script(const std::vector<std::string>& reference,
                                      const std::vector<EditOp>& script);

struct DetectionDefaults {
    std::string initiator = "unknown";
    xes::Timestamp change_time{};
    size_t max_runs = 10000;
};

// Aligns the trace against the run with the shortest edit script (ties:
// lexicographically smallest run). The who/when facets come from `defaults`
// and the note records that they were derived rather than recorded.
std::vector<adaptation::ChangeEvent> detect_changes(const model::ProcessModel& m,
                                                    const xes::Trace& trace,
                                                    const DetectionDefaults& defaults);

// detect_changes per trace followed by annotate_log.
xes::EventLog derive_annotated_log(const model::ProcessModel& m, const xes::EventLog& log,
                                   const DetectionDefaults& defaults);

}  // namespace adprov::detect
