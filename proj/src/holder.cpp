#include "adprov/holder.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <fstream>
#include <mutex>
#include <random>

namespace adprov::holder {

using nlohmann::json;

std::string Digest::hex() const {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(64);
    for (unsigned char b : bytes) {
        out += digits[b >> 4];
        out += digits[b & 0xF];
    }
    return out;
}

Digest Digest::from_hex(std::string_view hex) {
    if (hex.size() != 64) throw StoreError("digest hex must be 64 characters");
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw StoreError("bad hex digit in digest");
    };
    Digest d;
    for (size_t i = 0; i < 32; ++i)
        d.bytes[i] = static_cast<unsigned char>((nibble(hex[2 * i]) << 4) | nibble(hex[2 * i + 1]));
    return d;
}

Digest sha256(std::string_view data) {
    Digest d;
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    EVP_DigestUpdate(ctx, data.data(), data.size());
    EVP_DigestFinal_ex(ctx, d.bytes.data(), &len);
    EVP_MD_CTX_free(ctx);
    return d;
}

std::string to_string(RecordKind k) {
    return k == RecordKind::Execution ? "execution" : "change";
}

std::optional<RecordKind> record_kind_from_string(std::string_view s) {
    if (s == "execution") return RecordKind::Execution;
    if (s == "change") return RecordKind::Change;
    return std::nullopt;
}

Digest ProvenanceRecord::compute_digest() const {
    // Canonical JSON over every field except the digest itself, so that any
    // single-field corruption breaks recomputation.
    json material{{"record_id", record_id},
                  {"instance_id", instance_id},
                  {"kind", holder::to_string(kind)},
                  {"payload", payload},
                  {"recorded_at", recorded_at.to_iso8601()},
                  {"prev_digest", prev_digest.hex()}};
    return sha256(material.dump());
}

json ProvenanceRecord::to_json() const {
    return json{{"record_id", record_id},
                {"instance_id", instance_id},
                {"kind", holder::to_string(kind)},
                {"payload", payload},
                {"recorded_at", recorded_at.to_iso8601()},
                {"prev_digest", prev_digest.hex()},
                {"digest", digest.hex()}};
}

ProvenanceRecord ProvenanceRecord::from_json(const json& j) {
    ProvenanceRecord r;
    try {
        r.record_id = j.at("record_id").get<std::string>();
        r.instance_id = j.at("instance_id").get<std::string>();
        auto kind = record_kind_from_string(j.at("kind").get<std::string>());
        if (!kind) throw StoreError("unknown record kind");
        r.kind = *kind;
        r.payload = j.at("payload");
        r.recorded_at = xes::Timestamp::parse(j.at("recorded_at").get<std::string>());
        r.prev_digest = Digest::from_hex(j.at("prev_digest").get<std::string>());
        r.digest = Digest::from_hex(j.at("digest").get<std::string>());
    } catch (const json::exception& e) {
        throw StoreError(std::string("bad provenance record: ") + e.what());
    }
    return r;
}

bool ProvenanceQuery::matches(const ProvenanceRecord& r) const {
    if (instance_id && r.instance_id != *instance_id) return false;
    if (kind_filter && r.kind != *kind_filter) return false;
    if (from && r.recorded_at < *from) return false;
    if (to && *to < r.recorded_at) return false;
    return true;
}

void MemoryProvider::append_batch(const std::vector<ProvenanceRecord>& batch) {
    records_.insert(records_.end(), batch.begin(), batch.end());
}

FileProvider::FileProvider(std::string id, std::filesystem::path path)
    : id_(std::move(id)), path_(std::move(path)) {
    std::ifstream in(path_);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            records_.push_back(ProvenanceRecord::from_json(json::parse(line)));
        } catch (const json::parse_error& e) {
            throw StoreError("corrupt provenance file " + path_.string() + ": " + e.what());
        }
    }
}

void FileProvider::append_batch(const std::vector<ProvenanceRecord>& batch) {
    std::uintmax_t original_size =
        std::filesystem::exists(path_) ? std::filesystem::file_size(path_) : 0;
    try {
        std::ofstream out(path_, std::ios::app);
        if (!out) throw StoreError("cannot open provenance file " + path_.string());
        for (const auto& r : batch) {
            out << r.to_json().dump() << '\n';
            if (!out) throw StoreError("write failure on " + path_.string());
        }
        out.flush();
        if (!out) throw StoreError("flush failure on " + path_.string());
    } catch (...) {
        std::filesystem::resize_file(path_, original_size);  // roll back partial appends
        throw;
    }
    records_.insert(records_.end(), batch.begin(), batch.end());
}

IntegrityVerdict validate_records(const std::vector<ProvenanceRecord>& records) {
    Digest prev = Digest::zero();
    for (const auto& r : records) {
        if (r.prev_digest != prev || r.compute_digest() != r.digest)
            return IntegrityVerdict::tampered(r.record_id);
        prev = r.digest;
    }
    return IntegrityVerdict::ok();
}

std::string generate_uuid() {
    static thread_local std::mt19937_64 rng{std::random_device{}()};
    std::uniform_int_distribution<uint64_t> dist;
    uint64_t hi = dist(rng), lo = dist(rng);
    hi = (hi & 0xFFFFFFFFFFFF0FFFULL) | 0x0000000000004000ULL;  // version 4
    lo = (lo & 0x3FFFFFFFFFFFFFFFULL) | 0x8000000000000000ULL;  // variant 10
    char buf[37];
    std::snprintf(buf, sizeof buf, "%08llx-%04llx-%04llx-%04llx-%012llx",
                  static_cast<unsigned long long>(hi >> 32),
                  static_cast<unsigned long long>((hi >> 16) & 0xFFFF),
                  static_cast<unsigned long long>(hi & 0xFFFF),
                  static_cast<unsigned long long>(lo >> 48),
                  static_cast<unsigned long long>(lo & 0xFFFFFFFFFFFFULL));
    return buf;
}

namespace {

xes::Timestamp now_utc() {
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::system_clock::now().time_since_epoch())
                  .count();
    return xes::Timestamp{ms};
}

json attribute_to_json(const xes::Attribute& a) {
    json j{{"key", a.key}, {"type", "string"}, {"value", a.value.to_text()}};
    switch (a.value.kind) {
        case xes::AttributeValue::Kind::String: j["type"] = "string"; break;
        case xes::AttributeValue::Kind::Integer: j["type"] = "int"; break;
        case xes::AttributeValue::Kind::Real: j["type"] = "float"; break;
        case xes::AttributeValue::Kind::Boolean: j["type"] = "boolean"; break;
        case xes::AttributeValue::Kind::Timestamp: j["type"] = "date"; break;
        case xes::AttributeValue::Kind::Id: j["type"] = "id"; break;
    }
    if (!a.children.empty()) {
        json kids = json::array();
        for (const auto& c : a.children) kids.push_back(attribute_to_json(c));
        j["children"] = std::move(kids);
    }
    return j;
}

json execution_payload(const xes::Event& ev) {
    json j;
    j["activity"] = ev.activity().value_or("");
    if (const auto* res = ev.find("org:resource");
        res && res->value.kind == xes::AttributeValue::Kind::String)
        j["resource"] = res->value.as_string();
    if (const auto* ts = ev.find("time:timestamp");
        ts && ts->value.kind == xes::AttributeValue::Kind::Timestamp)
        j["timestamp"] = ts->value.as_timestamp().to_iso8601();
    json attrs = json::array();
    for (const auto& a : ev.attributes) attrs.push_back(attribute_to_json(a));
    j["attributes"] = std::move(attrs);
    return j;
}

json change_payload(const adaptation::ChangeEvent& ce) {
    json j;
    j["change_type"] = adaptation::to_string(ce.change_type);
    j["target"] = ce.target_activity;
    j["position_kind"] = ce.position.kind_text();
    j["position_anchor"] = ce.position.anchor_text();
    j["initiator"] = ce.initiator;
    j["change_time"] = ce.change_time.to_iso8601();
    if (ce.note) j["note"] = *ce.note;
    return j;
}

}  // namespace

adaptation::ChangeEvent change_event_from_payload(const std::string& instance_id,
                                                  const json& payload) {
    adaptation::ChangeEvent ce;
    ce.instance_id = instance_id;
    try {
        auto type = adaptation::change_type_from_string(
            payload.at("change_type").get<std::string>());
        if (!type) throw StoreError("unknown change_type in payload");
        ce.change_type = *type;
        ce.target_activity = payload.at("target").get<std::string>();
        std::string kind = payload.at("position_kind").get<std::string>();
        std::string anchor = payload.at("position_anchor").get<std::string>();
        if (kind == "after")
            ce.position = adaptation::ChangePosition::after(anchor);
        else if (kind == "before")
            ce.position = adaptation::ChangePosition::before(anchor);
        else
            ce.position = adaptation::ChangePosition::at(std::stoi(anchor));
        ce.initiator = payload.at("initiator").get<std::string>();
        ce.change_time = xes::Timestamp::parse(payload.at("change_time").get<std::string>());
        if (payload.contains("note")) ce.note = payload.at("note").get<std::string>();
    } catch (const json::exception& e) {
        throw StoreError(std::string("bad change payload: ") + e.what());
    }
    return ce;
}

Controller::Controller() : clock_(now_utc), id_gen_(generate_uuid) {}

Controller::Controller(Clock clock, IdGen id_gen)
    : clock_(std::move(clock)), id_gen_(std::move(id_gen)) {}

Provider& Controller::add_provider(std::unique_ptr<Provider> provider) {
    std::unique_lock lock(mutex_);
    providers_.push_back(std::move(provider));
    return *providers_.back();
}

std::vector<ProviderDescriptor> Controller::providers() const {
    std::shared_lock lock(mutex_);
    std::vector<ProviderDescriptor> out;
    for (const auto& p : providers_)
        out.push_back({p->id(), p->storage_kind(), p->size()});
    return out;
}

Provider* Controller::find_provider(std::string_view id) {
    std::shared_lock lock(mutex_);
    for (const auto& p : providers_)
        if (p->id() == id) return p.get();
    return nullptr;
}

ProvenanceRecord Controller::make_record(std::string instance_id, RecordKind kind,
                                         json payload, const Digest& prev) const {
    ProvenanceRecord r;
    r.record_id = id_gen_();
    r.instance_id = std::move(instance_id);
    r.kind = kind;
    r.payload = std::move(payload);
    r.recorded_at = clock_();
    r.prev_digest = prev;
    r.digest = r.compute_digest();
    return r;
}

std::vector<std::string> Controller::append(std::vector<ProvenanceRecord> batch) {
    if (providers_.empty()) throw StoreError("no provider registered");
    providers_.front()->append_batch(batch);
    std::vector<std::string> ids;
    ids.reserve(batch.size());
    for (const auto& r : batch) ids.push_back(r.record_id);
    return ids;
}

std::vector<std::string> Controller::collect(const xes::EventLog& log) {
    auto violations = xes::validate_log(log);
    auto adaptation_violations = adaptation::validate_adaptation(log);
    violations.insert(violations.end(), adaptation_violations.begin(),
                      adaptation_violations.end());
    if (!violations.empty())
        throw ValidationRejected("log rejected by validation", std::move(violations));

    std::unique_lock lock(mutex_);
    if (providers_.empty()) throw StoreError("no provider registered");
    Digest prev =
        providers_.front()->size() ? providers_.front()->records().back().digest : Digest::zero();

    std::vector<ProvenanceRecord> batch;
    for (const auto& trace : log.traces) {
        const std::string instance = trace.instance_id().value_or("");
        for (const auto& ev : trace.events) {
            batch.push_back(make_record(instance, RecordKind::Execution,
                                        execution_payload(ev), prev));
            prev = batch.back().digest;
            // Insert change events ride on their carrier event.
            bool annotated = false;
            for (const auto& a : ev.attributes)
                if (a.key == adaptation::kKeyType) annotated = true;
            if (annotated) {
                xes::EventLog single;
                single.extensions = log.extensions;
                xes::Trace tr;
                tr.attributes = trace.attributes;
                // Strip the trace-level delete group; handled below.
                std::erase_if(tr.attributes, [](const xes::Attribute& a) {
                    return a.key == adaptation::kKeyDeletes;
                });
                tr.events.push_back(ev);
                single.traces.push_back(std::move(tr));
                auto extracted = adaptation::extract_change_events(single);
                for (const auto& [_, changes] : extracted) {
                    for (const auto& ce : changes) {
                        batch.push_back(make_record(instance, RecordKind::Change,
                                                    change_payload(ce), prev));
                        prev = batch.back().digest;
                    }
                }
            }
        }
        if (const auto* group = trace.find(adaptation::kKeyDeletes)) {
            xes::EventLog single;
            single.extensions = log.extensions;
            xes::Trace tr;
            tr.attributes = trace.attributes;
            single.traces.push_back(std::move(tr));
            auto extracted = adaptation::extract_change_events(single);
            (void)group;
            for (const auto& [_, changes] : extracted) {
                for (const auto& ce : changes) {
                    batch.push_back(
                        make_record(instance, RecordKind::Change, change_payload(ce), prev));
                    prev = batch.back().digest;
                }
            }
        }
    }
    return append(std::move(batch));
}

std::vector<std::string> Controller::collect_raw(const std::vector<RawEntry>& entries) {
    std::unique_lock lock(mutex_);
    if (providers_.empty()) throw StoreError("no provider registered");
    Digest prev =
        providers_.front()->size() ? providers_.front()->records().back().digest : Digest::zero();
    std::vector<ProvenanceRecord> batch;
    for (const auto& e : entries) {
        batch.push_back(make_record(e.instance_id, e.kind, e.payload, prev));
        prev = batch.back().digest;
    }
    return append(std::move(batch));
}

std::pair<std::vector<ProvenanceRecord>, IntegrityVerdict> Controller::retrieve(
    const ProvenanceQuery& query) const {
    std::shared_lock lock(mutex_);
    std::vector<ProvenanceRecord> out;
    IntegrityVerdict verdict = IntegrityVerdict::ok();
    for (const auto& p : providers_) {
        if (verdict.valid) {
            auto v = validate_records(p->records());
            if (!v.valid) verdict = v;
        }
        for (const auto& r : p->records())
            if (query.matches(r)) out.push_back(r);
    }
    return {std::move(out), verdict};
}

IntegrityVerdict Controller::validate_chain(std::string_view provider_id) const {
    std::shared_lock lock(mutex_);
    for (const auto& p : providers_)
        if (p->id() == provider_id) return validate_records(p->records());
    throw StoreError("unknown provider '" + std::string(provider_id) + "'");
}

size_t Controller::migrate(std::string_view from_id, std::string_view to_id) {
    std::unique_lock lock(mutex_);
    Provider* from = nullptr;
    Provider* to = nullptr;
    for (const auto& p : providers_) {
        if (p->id() == from_id) from = p.get();
        if (p->id() == to_id) to = p.get();
    }
    if (!from) throw StoreError("unknown provider '" + std::string(from_id) + "'");
    if (!to) throw StoreError("unknown provider '" + std::string(to_id) + "'");
    auto verdict = validate_records(from->records());
    if (!verdict.valid)
        throw StoreError("refusing to migrate tampered chain (first bad record " +
                         verdict.first_bad_record_id + ")");
    if (to->size() != 0) throw StoreError("destination provider is not empty");
    to->append_batch(from->records());
    return from->size();
}

}  // namespace adprov::holder
