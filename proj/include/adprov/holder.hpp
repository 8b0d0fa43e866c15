// Provenance Holder core: controller composing receive/validate/record into
// Collect and retrieve/validate into Retrieve, over pluggable providers with
// append-only hash-chained storage.

#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "adprov/adaptation.hpp"
#include "adprov/xes.hpp"

namespace adprov::holder {

struct Digest {
    std::array<unsigned char, 32> bytes{};

    std::string hex() const;
    static Digest from_hex(std::string_view hex);
    static Digest zero() { return {}; }

    bool operator==(const Digest&) const = default;
};

Digest sha256(std::string_view data);

enum class RecordKind { Execution, Change };

std::string to_string(RecordKind k);
std::optional<RecordKind> record_kind_from_string(std::string_view s);

struct ProvenanceRecord {
    std::string record_id;  // UUID
    std::string instance_id;
    RecordKind kind = RecordKind::Execution;
    nlohmann::json payload;  // canonicalized on digesting (sorted keys, compact)
    xes::Timestamp recorded_at;
    Digest prev_digest;  // all-zero for the genesis record
    Digest digest;       // SHA-256 over every other field, canonically serialized

    // Recomputes the digest from the other fields.
    Digest compute_digest() const;

    nlohmann::json to_json() const;
    static ProvenanceRecord from_json(const nlohmann::json& j);

    bool operator==(const ProvenanceRecord&) const = default;
};

struct IntegrityVerdict {
    bool valid = true;
    std::string first_bad_record_id;  // set when !valid

    static IntegrityVerdict ok() { return {}; }
    static IntegrityVerdict tampered(std::string id) { return {false, std::move(id)}; }
};

struct ProvenanceQuery {
    std::optional<std::string> instance_id;
    std::optional<RecordKind> kind_filter;
    std::optional<xes::Timestamp> from;
    std::optional<xes::Timestamp> to;

    bool matches(const ProvenanceRecord& r) const;
};

class StoreError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Storage backend contract: record / retrieve / migrate (migration is
// driven by the controller through append + records()).
class Provider {
public:
    virtual ~Provider() = default;

    virtual std::string id() const = 0;
    virtual std::string storage_kind() const = 0;  // "memory" | "append_only_file"
    virtual size_t size() const = 0;
    virtual const std::vector<ProvenanceRecord>& records() const = 0;
    // Appends all records or none.
    virtual void append_batch(const std::vector<ProvenanceRecord>& batch) = 0;
};

class MemoryProvider : public Provider {
public:
    explicit MemoryProvider(std::string id) : id_(std::move(id)) {}

    std::string id() const override { return id_; }
    std::string storage_kind() const override { return "memory"; }
    size_t size() const override { return records_.size(); }
    const std::vector<ProvenanceRecord>& records() const override { return records_; }
    void append_batch(const std::vector<ProvenanceRecord>& batch) override;

private:
    std::string id_;
    std::vector<ProvenanceRecord> records_;
};

// One JSON object per line; loads the whole chain at construction.
class FileProvider : public Provider {
public:
    FileProvider(std::string id, std::filesystem::path path);

    std::string id() const override { return id_; }
    std::string storage_kind() const override { return "append_only_file"; }
    size_t size() const override { return records_.size(); }
    const std::vector<ProvenanceRecord>& records() const override { return records_; }
    void append_batch(const std::vector<ProvenanceRecord>& batch) override;

    const std::filesystem::path& path() const { return path_; }

private:
    std::string id_;
    std::filesystem::path path_;
    std::vector<ProvenanceRecord> records_;
};

struct ProviderDescriptor {
    std::string provider_id;
    std::string storage_kind;
    size_t record_count = 0;
};

class ValidationRejected : public std::runtime_error {
public:
    ValidationRejected(std::string msg, std::vector<xes::Violation> violations)
        : std::runtime_error(std::move(msg)), violations(std::move(violations)) {}
    std::vector<xes::Violation> violations;
};

// Single-writer, multi-reader controller over the registered providers.
// Writes go to the default (first registered) provider.
class Controller {
public:
    using Clock = std::function<xes::Timestamp()>;
    using IdGen = std::function<std::string()>;

    Controller();
    Controller(Clock clock, IdGen id_gen);

    // Takes ownership; the first registered provider receives writes.
    Provider& add_provider(std::unique_ptr<Provider> provider);
    std::vector<ProviderDescriptor> providers() const;
    Provider* find_provider(std::string_view id);

    // Collect = receive + validate + record. One record per execution event
    // plus one per change event (inserted right after its carrier event's
    // record; trace-level deletes follow the trace's last event). Atomic.
    std::vector<std::string> collect(const xes::EventLog& log);

    struct RawEntry {
        std::string instance_id;
        RecordKind kind = RecordKind::Execution;
        nlohmann::json payload;
    };
    std::vector<std::string> collect_raw(const std::vector<RawEntry>& entries);

    // Retrieve = retrieve + validate; integrity failures are a verdict.
    std::pair<std::vector<ProvenanceRecord>, IntegrityVerdict> retrieve(
        const ProvenanceQuery& query) const;

    IntegrityVerdict validate_chain(std::string_view provider_id) const;

    // Copy semantics; destination must be empty and source Valid.
    size_t migrate(std::string_view from_id, std::string_view to_id);

private:
    std::vector<std::string> append(std::vector<ProvenanceRecord> batch);
    ProvenanceRecord make_record(std::string instance_id, RecordKind kind,
                                 nlohmann::json payload, const Digest& prev) const;

    mutable std::shared_mutex mutex_;
    std::vector<std::unique_ptr<Provider>> providers_;
    Clock clock_;
    IdGen id_gen_;
};

IntegrityVerdict validate_records(const std::vector<ProvenanceRecord>& records);

// Rebuilds a ChangeEvent from a Change record's payload.
adaptation::ChangeEvent change_event_from_payload(const std::string& instance_id,
                                                  const nlohmann::json& payload);

// Random (version 4) UUID text.
std::string generate_uuid();

}  // namespace adprov::holder
