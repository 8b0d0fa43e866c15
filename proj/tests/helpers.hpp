// Shared fixtures for the test suites: file loading, the worked shopping
// example, and generated log/change corpora.

#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "adprov/adaptation.hpp"
#include "adprov/xes.hpp"

namespace adprov::testing {

inline std::string load_file(const std::string& name) {
    std::ifstream in(std::string(ADPROV_TEST_DATA) + "/" + name, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline xes::EventLog shopping_log() {
    return xes::parse_xes(load_file("shopping_annotated.xes"));
}

inline std::string shopping_model_json() {
    return load_file("shopping_model.json");
}

using Rng = std::mt19937;

inline const std::vector<std::string>& activity_labels() {
    static const std::vector<std::string> labels = {"Receive order", "Check stock",
                                                    "Pack items",    "Ship order",
                                                    "Send invoice",  "Archive"};
    return labels;
}

// A log that passes validate_log: declared extensions, named traces,
// monotone event timestamps, a mix of attribute types.
inline xes::EventLog random_log(Rng& rng, size_t max_traces = 5, size_t max_events = 10) {
    using xes::Attribute;
    using xes::AttributeValue;

    xes::EventLog log;
    log.extensions = {
        {"Concept", "concept", "http://www.xes-standard.org/concept.xesext"},
        {"Time", "time", "http://www.xes-standard.org/time.xesext"},
        {"Organizational", "org", "http://www.xes-standard.org/org.xesext"},
    };
    log.classifiers = {{"Activity", "concept:name"}};

    std::uniform_int_distribution<size_t> trace_count(0, max_traces);
    std::uniform_int_distribution<size_t> event_count(0, max_events);
    std::uniform_int_distribution<size_t> label_pick(0, activity_labels().size() - 1);
    std::uniform_int_distribution<int> coin(0, 1);
    std::uniform_int_distribution<std::int64_t> int_value(-1000, 1000);

    size_t traces = trace_count(rng);
    for (size_t t = 0; t < traces; ++t) {
        xes::Trace tr;
        tr.attributes.push_back(
            {"concept:name", AttributeValue::string("inst-" + std::to_string(t)), {}});
        std::int64_t clock = 1700000000000 + static_cast<std::int64_t>(t) * 3600000;
        size_t events = event_count(rng);
        for (size_t e = 0; e < events; ++e) {
            xes::Event ev;
            ev.attributes.push_back(
                {"concept:name", AttributeValue::string(activity_labels()[label_pick(rng)]), {}});
            clock += 1000 + int_value(rng) % 500;
            ev.attributes.push_back(
                {"time:timestamp", AttributeValue::timestamp(xes::Timestamp{clock}), {}});
            if (coin(rng))
                ev.attributes.push_back(
                    {"org:resource",
                     AttributeValue::string("Resource" + std::to_string(coin(rng))), {}});
            if (coin(rng))
                ev.attributes.push_back({"cost", AttributeValue::integer(int_value(rng)), {}});
            if (coin(rng))
                ev.attributes.push_back({"priority", AttributeValue::real(0.5 * coin(rng)), {}});
            if (coin(rng)) ev.attributes.push_back({"rush", AttributeValue::boolean(coin(rng)), {}});
            tr.events.push_back(std::move(ev));
        }
        log.traces.push_back(std::move(tr));
    }
    return log;
}

// Change set valid for annotate_log on `log`: inserts target fresh labels,
// deletes target labels absent from the trace; change_times are distinct and
// precede every execution timestamp so the set is already canonical.
inline std::vector<adaptation::ChangeEvent> random_changes(Rng& rng, const xes::EventLog& log,
                                                           size_t max_per_trace = 3) {
    using adaptation::ChangeEvent;
    using adaptation::ChangePosition;
    using adaptation::ChangeType;

    std::vector<ChangeEvent> changes;
    std::uniform_int_distribution<size_t> count(0, max_per_trace);
    std::uniform_int_distribution<int> coin(0, 1);
    std::int64_t change_clock = 1600000000000;
    for (const auto& tr : log.traces) {
        std::string instance = tr.instance_id().value_or("");
        size_t n = count(rng);
        for (size_t i = 0; i < n; ++i) {
            ChangeEvent ce;
            ce.instance_id = instance;
            ce.change_time = xes::Timestamp{change_clock};
            change_clock += 1000;
            ce.initiator = coin(rng) ? "PersonA" : "PersonB";
            if (coin(rng)) {
                ce.change_type = ChangeType::Insert;
                ce.target_activity = "Extra step " + std::to_string(changes.size());
                if (!tr.events.empty() && coin(rng))
                    ce.position = ChangePosition::after(*tr.events.front().activity());
                else
                    ce.position = ChangePosition::at(
                        static_cast<int>(tr.events.size() > 0 ? i % tr.events.size() : 0));
            } else {
                ce.change_type = ChangeType::Delete;
                ce.target_activity = "Dropped step " + std::to_string(changes.size());
                ce.position = ChangePosition::before("end");
            }
            if (coin(rng)) ce.note = "requested by customer";
            changes.push_back(std::move(ce));
        }
    }
    return changes;
}

}  // namespace adprov::testing
