#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>

#include "adprov/model.hpp"
#include "helpers.hpp"

using namespace adprov;
using namespace adprov::testing;

namespace {

// Independent path counter: plain recursive DFS, no ordering logic shared
// with enumerate_runs.
size_t count_paths(const model::ProcessModel& m, const std::string& node) {
    if (node == m.end) return 1;
    size_t total = 0;
    for (const auto& [from, to] : m.edges)
        if (from == node) total += count_paths(m, to);
    return total;
}

model::ProcessModel random_dag(Rng& rng, size_t max_nodes = 10) {
    std::uniform_int_distribution<size_t> node_count(2, max_nodes);
    std::uniform_int_distribution<int> coin(0, 2);
    size_t n = node_count(rng);
    model::ProcessModel m;
    m.name = "random";
    std::vector<std::string> names;
    for (size_t i = 0; i < n; ++i) names.push_back("n" + std::to_string(i));
    m.start = names.front();
    m.end = names.back();
    // Spine keeps every node on a start->end path; extra forward edges add
    // branching without cycles.
    for (size_t i = 0; i + 1 < n; ++i) m.edges.emplace(names[i], names[i + 1]);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 2; j < n; ++j)
            if (i != 0 || j != n - 1 ? coin(rng) == 0 : false) m.edges.emplace(names[i], names[j]);
    for (const auto& name : names) m.activities.insert(name);
    return m;
}

}  // namespace

TEST_CASE("shopping model parses and has exactly one run") {
    auto m = model::parse_model(shopping_model_json());
    CHECK(m.activities.size() == 2);
    auto runs = model::enumerate_runs(m, 10);
    REQUIRE(runs.size() == 1);
    CHECK(runs[0].steps == std::vector<std::string>{"Add item to cart", "Checkout"});
}

TEST_CASE("single-activity model is valid with one run") {
    auto m = model::parse_model(R"({"name":"solo","activities":["A"],"edges":[],"start":"A","end":"A"})");
    auto runs = model::enumerate_runs(m, 10);
    REQUIRE(runs.size() == 1);
    CHECK(runs[0].steps == std::vector<std::string>{"A"});
}

TEST_CASE("model validation errors") {
    CHECK_THROWS_WITH_AS(
        model::parse_model(
            R"({"activities":["A","B"],"edges":[["A","C"]],"start":"A","end":"B"})"),
        doctest::Contains("undeclared"), model::ModelError);
    CHECK_THROWS_WITH_AS(
        model::parse_model(
            R"({"activities":["A","B","C","D"],"edges":[["A","B"],["B","C"],["C","B"],["B","D"]],"start":"A","end":"D"})"),
        doctest::Contains("cycle"), model::ModelError);
    CHECK_THROWS_WITH_AS(
        model::parse_model(
            R"({"activities":["A","B","X"],"edges":[["A","B"]],"start":"A","end":"B"})"),
        doctest::Contains("no start-to-end path"), model::ModelError);
    CHECK_THROWS_AS(model::parse_model("not json"), model::ModelError);
}

TEST_CASE("run enumeration is lexicographic, duplicate-free, and budget-checked") {
    auto m = model::parse_model(
        R"({"activities":["s","a","b","e"],"edges":[["s","a"],["s","b"],["a","e"],["b","e"]],"start":"s","end":"e"})");
    auto runs = model::enumerate_runs(m, 10);
    REQUIRE(runs.size() == 2);
    CHECK(runs[0].steps == std::vector<std::string>{"s", "a", "e"});
    CHECK(runs[1].steps == std::vector<std::string>{"s", "b", "e"});
    CHECK_THROWS_AS(model::enumerate_runs(m, 1), model::RunBudgetExceeded);
}

TEST_CASE("run count matches the DFS path-count oracle on random DAGs") {
    Rng rng(5150);
    for (int i = 0; i < 200; ++i) {
        auto m = random_dag(rng);
        auto runs = model::enumerate_runs(m, 100000);
        CHECK(runs.size() == count_paths(m, m.start));
        // Each run satisfies the run invariants and runs are strictly ordered.
        for (size_t r = 0; r < runs.size(); ++r) {
            const auto& steps = runs[r].steps;
            REQUIRE(!steps.empty());
            CHECK(steps.front() == m.start);
            CHECK(steps.back() == m.end);
            for (size_t s = 0; s + 1 < steps.size(); ++s)
                CHECK(m.edges.contains({steps[s], steps[s + 1]}));
            if (r > 0) CHECK(runs[r - 1] < runs[r]);
        }
    }
}
