#include "adprov/model.hpp"

#include <algorithm>
#include <functional>

#include <json.hpp>

namespace adprov::model {

ProcessModel parse_model(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ModelError(std::string("model JSON parse error: ") + e.what());
    }
    ProcessModel m;
    try {
        m.name = j.value("name", "");
        for (const auto& a : j.at("activities")) m.activities.insert(a.get<std::string>());
        for (const auto& e : j.at("edges")) {
            if (!e.is_array() || e.size() != 2)
                throw ModelError("model edge is not a [from, to] pair");
            m.edges.emplace(e[0].get<std::string>(), e[1].get<std::string>());
        }
        m.start = j.at("start").get<std::string>();
        m.end = j.at("end").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ModelError(std::string("bad model JSON: ") + e.what());
    }
    validate_model(m);
    return m;
}

void validate_model(const ProcessModel& m) {
    if (!m.activities.contains(m.start))
        throw ModelError("start activity '" + m.start + "' not declared");
    if (!m.activities.contains(m.end))
        throw ModelError("end activity '" + m.end + "' not declared");
    std::map<std::string, std::set<std::string>> succ, pred;
    for (const auto& [from, to] : m.edges) {
        if (!m.activities.contains(from))
            throw ModelError("edge from undeclared activity '" + from + "'");
        if (!m.activities.contains(to))
            throw ModelError("edge to undeclared activity '" + to + "'");
        succ[from].insert(to);
        pred[to].insert(from);
    }
    if (!pred[m.start].empty())
        throw ModelError("start activity '" + m.start + "' has incoming edges");
    if (!succ[m.end].empty())
        throw ModelError("end activity '" + m.end + "' has outgoing edges");

    // Cycle check: DFS with colors.
    std::map<std::string, int> color;  // 0 white, 1 gray, 2 black
    std::function<void(const std::string&)> dfs = [&](const std::string& node) {
        color[node] = 1;
        for (const auto& next : succ[node]) {
            if (color[next] == 1) throw ModelError("cycle through activity '" + next + "'");
            if (color[next] == 0) dfs(next);
        }
        color[node] = 2;
    };
    for (const auto& a : m.activities)
        if (color[a] == 0) dfs(a);

    // Every activity must lie on some start->end path.
    std::set<std::string> from_start, to_end;
    std::function<void(const std::string&, std::map<std::string, std::set<std::string>>&,
                       std::set<std::string>&)>
        reach = [&](const std::string& node, std::map<std::string, std::set<std::string>>& adj,
                    std::set<std::string>& seen) {
            if (!seen.insert(node).second) return;
            for (const auto& next : adj[node]) reach(next, adj, seen);
        };
    reach(m.start, succ, from_start);
    reach(m.end, pred, to_end);
    for (const auto& a : m.activities)
        if (!from_start.contains(a) || !to_end.contains(a))
            throw ModelError("activity '" + a + "' lies on no start-to-end path");
}

std::vector<Run> enumerate_runs(const ProcessModel& m, size_t max_runs) {
    validate_model(m);
    std::map<std::string, std::vector<std::string>> succ;
    for (const auto& [from, to] : m.edges) succ[from].push_back(to);
    for (auto& [_, next] : succ) std::sort(next.begin(), next.end());

    std::vector<Run> runs;
    std::vector<std::string> path{m.start};
    std::function<void()> walk = [&] {
        if (path.back() == m.end) {
            if (runs.size() >= max_runs) throw RunBudgetExceeded(max_runs);
            runs.push_back(Run{path});
            return;
        }
        for (const auto& next : succ[path.back()]) {
            path.push_back(next);
            walk();
            path.pop_back();
        }
    };
    walk();
    // Sorted successor order makes the DFS emit runs lexicographically.
    return runs;
}

}  // namespace adprov::model
