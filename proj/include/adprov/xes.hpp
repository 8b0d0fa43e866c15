// XES event log model: typed attributes, traces, events, extension and
// classifier declarations, plus parse/serialize/validate.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace adprov::xes {

// UTC instant with millisecond precision.
struct Timestamp {
    std::int64_t millis_since_epoch = 0;

    // ISO-8601 with milliseconds and trailing 'Z'.
    std::string to_iso8601() const;
    // Accepts 'Z' or numeric offsets and any fractional-second precision;
    // the result is normalized to UTC milliseconds.
    static Timestamp parse(std::string_view text);

    auto operator<=>(const Timestamp&) const = default;
};

bool is_uuid(std::string_view text);

struct AttributeValue {
    enum class Kind { String, Integer, Real, Boolean, Timestamp, Id };

    Kind kind = Kind::String;
    std::variant<std::string, std::int64_t, double, bool, xes::Timestamp> value;

    static AttributeValue string(std::string v);
    static AttributeValue integer(std::int64_t v);
    static AttributeValue real(double v);
    static AttributeValue boolean(bool v);
    static AttributeValue timestamp(Timestamp v);
    static AttributeValue id(std::string uuid);

    const std::string& as_string() const { return std::get<std::string>(value); }
    Timestamp as_timestamp() const { return std::get<xes::Timestamp>(value); }

    // XES text rendering of the value (what goes in the value="" slot).
    std::string to_text() const;

    bool operator==(const AttributeValue&) const = default;
};

struct Attribute {
    std::string key;  // "prefix:name" or bare name
    AttributeValue value;
    // Nested XES attributes, preserved but not interpreted by this layer.
    std::vector<Attribute> children;

    std::string prefix() const;  // empty when the key has no namespace

    bool operator==(const Attribute&) const = default;
};

struct Event {
    std::vector<Attribute> attributes;

    const Attribute* find(std::string_view key) const;
    // concept:name when present and a string.
    std::optional<std::string> activity() const;

    bool operator==(const Event&) const = default;
};

struct Trace {
    std::vector<Attribute> attributes;
    std::vector<Event> events;

    const Attribute* find(std::string_view key) const;
    std::optional<std::string> instance_id() const;  // concept:name

    bool operator==(const Trace&) const = default;
};

struct Extension {
    std::string name;
    std::string prefix;
    std::string uri;

    bool operator==(const Extension&) const = default;
};

struct GlobalScope {
    std::string scope;  // "trace" or "event"
    std::vector<Attribute> attributes;

    bool operator==(const GlobalScope&) const = default;
};

struct Classifier {
    std::string name;
    std::string keys;  // space-separated attribute keys

    bool operator==(const Classifier&) const = default;
};

struct EventLog {
    std::vector<Extension> extensions;
    std::vector<GlobalScope> globals;
    std::vector<Classifier> classifiers;
    std::vector<Attribute> attributes;  // log-level attributes
    std::vector<Trace> traces;

    bool has_extension(std::string_view prefix) const;
    const Trace* find_trace(std::string_view instance_id) const;

    bool operator==(const EventLog&) const = default;
};

// One broken invariant; indices are -1 where not applicable.
struct Violation {
    std::string rule_id;
    int trace_index = -1;
    int event_index = -1;
    std::string attribute_key;
    std::string detail;
};

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
public:
    ValidationError(std::string msg, std::vector<Violation> violations)
        : std::runtime_error(std::move(msg)), violations(std::move(violations)) {}
    explicit ValidationError(std::string msg) : std::runtime_error(std::move(msg)) {}
    std::vector<Violation> violations;
};

EventLog parse_xes(std::string_view document);

// Deterministic: identical logs serialize to identical bytes. Declarations
// come first (extensions, then globals, then classifiers), then log
// attributes, then traces. Throws ValidationError when the log is invalid.
std::string serialize_xes(const EventLog& log);

// Total. Empty result means every structural invariant holds.
// Rule ids: BAD_KEY, DUPLICATE_KEY, CONCEPT_NAME_NOT_STRING, BAD_ID,
// UNDECLARED_PREFIX, MISSING_TRACE_NAME.
std::vector<Violation> validate_log(const EventLog& log);

std::string describe(const Violation& v);

}  // namespace adprov::xes
