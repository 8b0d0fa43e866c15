#include "adprov/xes.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <set>

#include "adprov/xml.hpp"

namespace adprov::xes {

namespace {

// Days since 1970-01-01 for a civil date (Hinnant's algorithm).
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yr = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yr + (m <= 2));
}

int parse_int(std::string_view s, const char* what) {
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw ParseError(std::string("bad ") + what + " in timestamp: '" + std::string(s) + "'");
    return v;
}

}  // namespace

std::string Timestamp::to_iso8601() const {
    std::int64_t ms = millis_since_epoch;
    std::int64_t days = ms / 86400000;
    std::int64_t rem = ms % 86400000;
    if (rem < 0) {
        rem += 86400000;
        --days;
    }
    int y, mo, d;
    civil_from_days(days, y, mo, d);
    int h = static_cast<int>(rem / 3600000);
    int mi = static_cast<int>(rem / 60000 % 60);
    int s = static_cast<int>(rem / 1000 % 60);
    int milli = static_cast<int>(rem % 1000);
    char buf[40];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", y, mo, d, h, mi, s,
                  milli);
    return buf;
}

Timestamp Timestamp::parse(std::string_view text) {
    // YYYY-MM-DDTHH:MM:SS[.fraction][Z|±HH:MM|±HHMM]
    if (text.size() < 19 || text[4] != '-' || text[7] != '-' ||
        (text[10] != 'T' && text[10] != ' ') || text[13] != ':' || text[16] != ':')
        throw ParseError("bad timestamp '" + std::string(text) + "'");
    int y = parse_int(text.substr(0, 4), "year");
    int mo = parse_int(text.substr(5, 2), "month");
    int d = parse_int(text.substr(8, 2), "day");
    int h = parse_int(text.substr(11, 2), "hour");
    int mi = parse_int(text.substr(14, 2), "minute");
    int s = parse_int(text.substr(17, 2), "second");
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || s > 60)
        throw ParseError("timestamp field out of range in '" + std::string(text) + "'");
    size_t pos = 19;
    int milli = 0;
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        std::string frac(text.substr(start, pos - start));
        if (frac.empty()) throw ParseError("empty fraction in timestamp '" + std::string(text) + "'");
        frac.resize(3, '0');  // truncate/pad to millisecond precision
        milli = parse_int(frac.substr(0, 3), "fraction");
    }
    std::int64_t offset_min = 0;
    if (pos < text.size()) {
        char c = text[pos];
        if (c == 'Z' && pos + 1 == text.size()) {
            // UTC
        } else if (c == '+' || c == '-') {
            std::string_view off = text.substr(pos + 1);
            int oh = 0, om = 0;
            if (off.size() == 5 && off[2] == ':') {
                oh = parse_int(off.substr(0, 2), "offset hour");
                om = parse_int(off.substr(3, 2), "offset minute");
            } else if (off.size() == 4) {
                oh = parse_int(off.substr(0, 2), "offset hour");
                om = parse_int(off.substr(2, 2), "offset minute");
            } else if (off.size() == 2) {
                oh = parse_int(off, "offset hour");
            } else {
                throw ParseError("bad timezone offset in '" + std::string(text) + "'");
            }
            offset_min = (c == '+' ? 1 : -1) * (oh * 60 + om);
        } else {
            throw ParseError("trailing garbage in timestamp '" + std::string(text) + "'");
        }
    }
    std::int64_t ms = days_from_civil(y, mo, d) * 86400000LL +
                      (h * 3600LL + mi * 60LL + s) * 1000LL + milli - offset_min * 60000LL;
    return Timestamp{ms};
}

bool is_uuid(std::string_view text) {
    static constexpr std::array<int, 5> groups = {8, 4, 4, 4, 12};
    size_t pos = 0;
    for (size_t g = 0; g < groups.size(); ++g) {
        if (g > 0) {
            if (pos >= text.size() || text[pos] != '-') return false;
            ++pos;
        }
        for (int i = 0; i < groups[g]; ++i, ++pos) {
            if (pos >= text.size() || !std::isxdigit(static_cast<unsigned char>(text[pos])))
                return false;
        }
    }
    return pos == text.size();
}

AttributeValue AttributeValue::string(std::string v) {
    return {Kind::String, std::move(v)};
}
AttributeValue AttributeValue::integer(std::int64_t v) {
    return {Kind::Integer, v};
}
AttributeValue AttributeValue::real(double v) {
    return {Kind::Real, v};
}
AttributeValue AttributeValue::boolean(bool v) {
    return {Kind::Boolean, v};
}
AttributeValue AttributeValue::timestamp(Timestamp v) {
    return {Kind::Timestamp, v};
}
AttributeValue AttributeValue::id(std::string uuid) {
    return {Kind::Id, std::move(uuid)};
}

std::string AttributeValue::to_text() const {
    switch (kind) {
        case Kind::String:
        case Kind::Id:
            return std::get<std::string>(value);
        case Kind::Integer:
            return std::to_string(std::get<std::int64_t>(value));
        case Kind::Real: {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", std::get<double>(value));
            return buf;
        }
        case Kind::Boolean:
            return std::get<bool>(value) ? "true" : "false";
        case Kind::Timestamp:
            return std::get<Timestamp>(value).to_iso8601();
    }
    return {};
}

std::string Attribute::prefix() const {
    auto colon = key.find(':');
    return colon == std::string::npos ? std::string{} : key.substr(0, colon);
}

namespace {

const Attribute* find_attr(const std::vector<Attribute>& attrs, std::string_view key) {
    for (const auto& a : attrs)
        if (a.key == key) return &a;
    return nullptr;
}

}  // namespace

const Attribute* Event::find(std::string_view key) const {
    return find_attr(attributes, key);
}

std::optional<std::string> Event::activity() const {
    const Attribute* a = find("concept:name");
    if (a && a->value.kind == AttributeValue::Kind::String) return a->value.as_string();
    return std::nullopt;
}

const Attribute* Trace::find(std::string_view key) const {
    return find_attr(attributes, key);
}

std::optional<std::string> Trace::instance_id() const {
    const Attribute* a = find("concept:name");
    if (a && a->value.kind == AttributeValue::Kind::String) return a->value.as_string();
    return std::nullopt;
}

bool EventLog::has_extension(std::string_view prefix) const {
    return std::any_of(extensions.begin(), extensions.end(),
                       [&](const Extension& e) { return e.prefix == prefix; });
}

const Trace* EventLog::find_trace(std::string_view instance_id) const {
    for (const auto& t : traces)
        if (t.instance_id() == instance_id) return &t;
    return nullptr;
}

// ---------------------------------------------------------------- parsing

namespace {

[[noreturn]] void structural_error(const xml::Element& el, const std::string& what) {
    throw ValidationError(what + " (<" + el.name + "> at line " + std::to_string(el.line) +
                          ")");
}

bool is_attribute_tag(const std::string& tag) {
    return tag == "string" || tag == "int" || tag == "float" || tag == "boolean" ||
           tag == "date" || tag == "id";
}

Attribute parse_attribute(const xml::Element& el) {
    const std::string* key = el.attr("key");
    const std::string* value = el.attr("value");
    if (!key) structural_error(el, "attribute element without key");
    if (!value) structural_error(el, "attribute element without value");
    Attribute attr;
    attr.key = *key;
    if (el.name == "string") {
        attr.value = AttributeValue::string(*value);
    } else if (el.name == "int") {
        std::int64_t v = 0;
        auto [p, ec] = std::from_chars(value->data(), value->data() + value->size(), v);
        if (ec != std::errc{} || p != value->data() + value->size())
            structural_error(el, "bad int value '" + *value + "'");
        attr.value = AttributeValue::integer(v);
    } else if (el.name == "float") {
        try {
            size_t used = 0;
            double v = std::stod(*value, &used);
            if (used != value->size()) throw std::invalid_argument("trailing");
            attr.value = AttributeValue::real(v);
        } catch (const std::exception&) {
            structural_error(el, "bad float value '" + *value + "'");
        }
    } else if (el.name == "boolean") {
        if (*value == "true")
            attr.value = AttributeValue::boolean(true);
        else if (*value == "false")
            attr.value = AttributeValue::boolean(false);
        else
            structural_error(el, "bad boolean value '" + *value + "'");
    } else if (el.name == "date") {
        try {
            attr.value = AttributeValue::timestamp(Timestamp::parse(*value));
        } catch (const ParseError& e) {
            structural_error(el, e.what());
        }
    } else if (el.name == "id") {
        attr.value = AttributeValue::id(*value);
    } else {
        structural_error(el, "unknown attribute tag");
    }
    for (const auto& child : el.children) {
        if (!is_attribute_tag(child.name)) structural_error(child, "unknown attribute tag");
        attr.children.push_back(parse_attribute(child));
    }
    return attr;
}

Event parse_event(const xml::Element& el) {
    Event ev;
    for (const auto& child : el.children) {
        if (!is_attribute_tag(child.name))
            structural_error(child, child.name == "event" ? "nested event" : "unknown attribute tag");
        ev.attributes.push_back(parse_attribute(child));
    }
    return ev;
}

Trace parse_trace(const xml::Element& el) {
    Trace tr;
    for (const auto& child : el.children) {
        if (child.name == "event") {
            tr.events.push_back(parse_event(child));
        } else if (is_attribute_tag(child.name)) {
            if (!tr.events.empty())
                structural_error(child, "trace attribute after first event");
            tr.attributes.push_back(parse_attribute(child));
        } else {
            structural_error(child, "unknown element in trace");
        }
    }
    return tr;
}

}  // namespace

EventLog parse_xes(std::string_view document) {
    xml::Element root;
    try {
        root = xml::parse(document);
    } catch (const xml::ParseError& e) {
        throw ParseError(e.what());
    }
    if (root.name != "log") structural_error(root, "root element is not <log>");
    EventLog log;
    for (const auto& child : root.children) {
        if (child.name == "extension") {
            const std::string* name = child.attr("name");
            const std::string* prefix = child.attr("prefix");
            const std::string* uri = child.attr("uri");
            if (!name || !prefix || !uri)
                structural_error(child, "extension missing name/prefix/uri");
            log.extensions.push_back({*name, *prefix, *uri});
        } else if (child.name == "global") {
            const std::string* scope = child.attr("scope");
            GlobalScope g;
            g.scope = scope ? *scope : "event";
            for (const auto& a : child.children) {
                if (!is_attribute_tag(a.name)) structural_error(a, "unknown attribute tag");
                g.attributes.push_back(parse_attribute(a));
            }
            log.globals.push_back(std::move(g));
        } else if (child.name == "classifier") {
            const std::string* name = child.attr("name");
            const std::string* keys = child.attr("keys");
            if (!name || !keys) structural_error(child, "classifier missing name/keys");
            log.classifiers.push_back({*name, *keys});
        } else if (child.name == "trace") {
            log.traces.push_back(parse_trace(child));
        } else if (child.name == "event") {
            structural_error(child, "event outside trace");
        } else if (is_attribute_tag(child.name)) {
            log.attributes.push_back(parse_attribute(child));
        } else {
            structural_error(child, "unknown element in log");
        }
    }
    return log;
}

// ------------------------------------------------------------- validation

namespace {

void check_attrs(const std::vector<Attribute>& attrs, int trace_idx, int event_idx,
                 const std::set<std::string>& prefixes, std::vector<Violation>& out) {
    std::set<std::string_view> seen;
    for (const auto& a : attrs) {
        auto first = a.key.find(':');
        bool bad_key = a.key.empty() ||
                       (first != std::string::npos && a.key.find(':', first + 1) != std::string::npos);
        if (bad_key)
            out.push_back({"BAD_KEY", trace_idx, event_idx, a.key, "empty key or more than one ':'"});
        if (!seen.insert(a.key).second)
            out.push_back({"DUPLICATE_KEY", trace_idx, event_idx, a.key, "duplicate attribute key"});
        if (a.key == "concept:name" && a.value.kind != AttributeValue::Kind::String)
            out.push_back({"CONCEPT_NAME_NOT_STRING", trace_idx, event_idx, a.key,
                           "concept:name must be a string"});
        if (a.value.kind == AttributeValue::Kind::Id && !is_uuid(a.value.as_string()))
            out.push_back({"BAD_ID", trace_idx, event_idx, a.key,
                           "id value '" + a.value.as_string() + "' is not a UUID"});
        if (!bad_key && first != std::string::npos && !prefixes.contains(a.key.substr(0, first)))
            out.push_back({"UNDECLARED_PREFIX", trace_idx, event_idx, a.key,
                           "prefix '" + a.key.substr(0, first) + "' has no extension declaration"});
        // Nested attributes are opaque; only key sanity is enforced there.
    }
}

}  // namespace

std::vector<Violation> validate_log(const EventLog& log) {
    std::vector<Violation> out;
    std::set<std::string> prefixes;
    for (const auto& e : log.extensions) prefixes.insert(e.prefix);
    check_attrs(log.attributes, -1, -1, prefixes, out);
    for (size_t t = 0; t < log.traces.size(); ++t) {
        const Trace& tr = log.traces[t];
        check_attrs(tr.attributes, static_cast<int>(t), -1, prefixes, out);
        if (!tr.instance_id())
            out.push_back({"MISSING_TRACE_NAME", static_cast<int>(t), -1, "concept:name",
                           "trace has no concept:name instance id"});
        for (size_t e = 0; e < tr.events.size(); ++e)
            check_attrs(tr.events[e].attributes, static_cast<int>(t), static_cast<int>(e),
                        prefixes, out);
    }
    return out;
}

std::string describe(const Violation& v) {
    std::string s = v.rule_id;
    if (v.trace_index >= 0) s += " trace=" + std::to_string(v.trace_index);
    if (v.event_index >= 0) s += " event=" + std::to_string(v.event_index);
    if (!v.attribute_key.empty()) s += " key=" + v.attribute_key;
    if (!v.detail.empty()) s += " (" + v.detail + ")";
    return s;
}

// ---------------------------------------------------------- serialization

namespace {

const char* tag_for(AttributeValue::Kind kind) {
    switch (kind) {
        case AttributeValue::Kind::String: return "string";
        case AttributeValue::Kind::Integer: return "int";
        case AttributeValue::Kind::Real: return "float";
        case AttributeValue::Kind::Boolean: return "boolean";
        case AttributeValue::Kind::Timestamp: return "date";
        case AttributeValue::Kind::Id: return "id";
    }
    return "string";
}

void write_attribute(xml::Writer& w, const Attribute& a) {
    const char* tag = tag_for(a.value.kind);
    std::vector<std::pair<std::string, std::string>> xattrs = {{"key", a.key},
                                                               {"value", a.value.to_text()}};
    if (a.children.empty()) {
        w.self_closing(tag, xattrs);
    } else {
        w.open(tag, xattrs);
        for (const auto& c : a.children) write_attribute(w, c);
        w.close(tag);
    }
}

}  // namespace

std::string serialize_xes(const EventLog& log) {
    if (auto violations = validate_log(log); !violations.empty()) {
        std::string msg = "log fails validation:";
        for (const auto& v : violations) msg += "\n  " + describe(v);
        throw ValidationError(msg, std::move(violations));
    }
    xml::Writer w;
    w.prolog();
    w.open("log", {{"xes.version", "2.0"}, {"xes.features", ""}});
    for (const auto& e : log.extensions)
        w.self_closing("extension", {{"name", e.name}, {"prefix", e.prefix}, {"uri", e.uri}});
    for (const auto& g : log.globals) {
        w.open("global", {{"scope", g.scope}});
        for (const auto& a : g.attributes) write_attribute(w, a);
        w.close("global");
    }
    for (const auto& c : log.classifiers)
        w.self_closing("classifier", {{"name", c.name}, {"keys", c.keys}});
    for (const auto& a : log.attributes) write_attribute(w, a);
    for (const auto& tr : log.traces) {
        w.open("trace");
        for (const auto& a : tr.attributes) write_attribute(w, a);
        for (const auto& ev : tr.events) {
            if (ev.attributes.empty()) {
                w.self_closing("event");
                continue;
            }
            w.open("event");
            for (const auto& a : ev.attributes) write_attribute(w, a);
            w.close("event");
        }
        w.close("trace");
    }
    w.close("log");
    return w.take();
}

}  // namespace adprov::xes
