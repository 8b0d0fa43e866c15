// Process models as acyclic activity graphs plus enumeration of their
// complete start-to-end runs.

#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace adprov::model {

struct ProcessModel {
    std::string name;
    std::set<std::string> activities;
    std::set<std::pair<std::string, std::string>> edges;
    std::string start;
    std::string end;
};

struct Run {
    std::vector<std::string> steps;

    bool operator==(const Run&) const = default;
    auto operator<=>(const Run&) const = default;
};

class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class RunBudgetExceeded : public std::runtime_error {
public:
    explicit RunBudgetExceeded(size_t budget)
        : std::runtime_error("run enumeration exceeds budget of " + std::to_string(budget)),
          budget(budget) {}
    size_t budget;
};

// Model JSON: {"name", "activities", "edges" (pairs), "start", "end"}.
// Rejects cycles, dangling edge endpoints and activities off every
// start->end path.
ProcessModel parse_model(std::string_view text);

// Validation used by parse_model; callable on hand-built models too.
void validate_model(const ProcessModel& m);

// All distinct start->end paths, lexicographic by label sequence.
// Throws RunBudgetExceeded rather than truncating.
std::vector<Run> enumerate_runs(const ProcessModel& m, size_t max_runs);

}  // namespace adprov::model
