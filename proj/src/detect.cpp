#include "adprov/detect.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace adprov::detect {

using adaptation::ChangeEvent;
using adaptation::ChangePosition;
using adaptation::ChangeType;

std::vector<EditOp> edit_script(const std::vector<std::string>& reference,
                                const std::vector<std::string>& observed) {
    const size_t m = reference.size(), n = observed.size();
    // cost[i][j] = edits to turn reference[i..] into observed[j..].
    std::vector<std::vector<size_t>> cost(m + 1, std::vector<size_t>(n + 1, 0));
    for (size_t i = 0; i <= m; ++i) cost[i][n] = m - i;
    for (size_t j = 0; j <= n; ++j) cost[m][j] = n - j;
    for (size_t i = m; i-- > 0;) {
        for (size_t j = n; j-- > 0;) {
            if (reference[i] == observed[j])
                cost[i][j] = cost[i + 1][j + 1];
            else
                cost[i][j] = 1 + std::min(cost[i + 1][j], cost[i][j + 1]);
        }
    }
    std::vector<EditOp> script;
    size_t i = 0, j = 0;
    while (i < m || j < n) {
        if (i < m && j < n && reference[i] == observed[j] && cost[i][j] == cost[i + 1][j + 1]) {
            ++i;
            ++j;
        } else if (i < m && cost[i][j] == 1 + cost[i + 1][j]) {
            // Delete wins ties against insert.
            script.push_back({EditOp::Kind::Delete, reference[i], j});
            ++i;
        } else {
            script.push_back({EditOp::Kind::Insert, observed[j], j});
            ++j;
        }
    }
    return script;
}

std::vector<std::string> apply_script(const std::vector<std::string>& reference,
                                      const std::vector<EditOp>& script) {
    std::vector<std::string> result;
    size_t ri = 0;
    for (const EditOp& op : script) {
        while (result.size() < op.trace_position) {
            if (ri >= reference.size())
                throw std::logic_error("edit script position beyond reference");
            result.push_back(reference[ri++]);
        }
        if (op.kind == EditOp::Kind::Insert) {
            result.push_back(op.label);
        } else {
            if (ri >= reference.size() || reference[ri] != op.label)
                throw std::logic_error("edit script deletes '" + op.label +
                                       "' which is not next in the reference");
            ++ri;
        }
    }
    while (ri < reference.size()) result.push_back(reference[ri++]);
    return result;
}

namespace {

std::vector<std::string> activity_sequence(const xes::Trace& trace) {
    std::vector<std::string> labels;
    for (const auto& ev : trace.events) {
        auto name = ev.activity();
        if (!name)
            throw std::runtime_error("trace '" + trace.instance_id().value_or("?") +
                                     "' has an event without concept:name");
        labels.push_back(*name);
    }
    return labels;
}

}  // namespace

std::vector<ChangeEvent> detect_changes(const model::ProcessModel& m, const xes::Trace& trace,
                                        const DetectionDefaults& defaults) {
    const std::vector<std::string> observed = activity_sequence(trace);
    const std::vector<model::Run> runs = model::enumerate_runs(m, defaults.max_runs);

    const model::Run* best_run = nullptr;
    std::vector<EditOp> best_script;
    for (const auto& run : runs) {
        auto script = edit_script(run.steps, observed);
        // Runs arrive lexicographically sorted, so the first minimum wins.
        if (!best_run || script.size() < best_script.size()) {
            best_run = &run;
            best_script = std::move(script);
        }
    }
    if (!best_run) return {};

    std::string instance = trace.instance_id().value_or("");
    std::vector<ChangeEvent> changes;
    for (const EditOp& op : best_script) {
        ChangeEvent ce;
        ce.instance_id = instance;
        ce.change_type = op.kind == EditOp::Kind::Insert ? ChangeType::Insert : ChangeType::Delete;
        ce.target_activity = op.label;
        ce.position = op.trace_position == 0
                          ? ChangePosition::at(0)
                          : ChangePosition::after(observed[op.trace_position - 1]);
        ce.initiator = defaults.initiator;
        ce.change_time = defaults.change_time;
        ce.note = "derived=true";
        changes.push_back(std::move(ce));
    }
    return changes;
}

xes::EventLog derive_annotated_log(const model::ProcessModel& m, const xes::EventLog& log,
                                   const DetectionDefaults& defaults) {
    std::vector<ChangeEvent> all;
    for (const auto& trace : log.traces) {
        auto changes = detect_changes(m, trace, defaults);
        all.insert(all.end(), changes.begin(), changes.end());
    }
    return adaptation::annotate_log(log, all);
}

}  // namespace adprov::detect
