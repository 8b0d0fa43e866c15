// PROV-DM document model built from an instance's provenance records,
// with PROV-N, PROV-JSON and Graphviz DOT serializers.
//
// Mapping: execution and change records become Activities; the log entries
// they write become Entities; resources and change initiators become Agents.
// An insertion links the adapted activity to the change activity with
// wasInformedBy; a deletion generates a tombstone entity carrying the
// deleted activity's name.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adprov/holder.hpp"

namespace adprov::prov {

struct ProvEntity {
    std::string id;
    std::string label;
    std::vector<std::pair<std::string, std::string>> attributes;
};

struct ProvActivity {
    std::string id;
    std::string label;
    std::optional<xes::Timestamp> start;
    std::optional<xes::Timestamp> end;
    std::vector<std::pair<std::string, std::string>> attributes;
};

struct ProvAgent {
    std::string id;
    std::string label;
};

enum class RelationKind { WasAssociatedWith, WasGeneratedBy, Used, WasInformedBy };

std::string to_string(RelationKind k);

struct ProvRelation {
    RelationKind kind = RelationKind::Used;
    std::string subject;
    std::string object;
    std::optional<std::string> role;
};

struct ProvDocument {
    std::map<std::string, std::string> namespaces;  // prefix -> URI
    std::vector<ProvEntity> entities;
    std::vector<ProvActivity> activities;
    std::vector<ProvAgent> agents;
    std::vector<ProvRelation> relations;
};

class MappingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// "Add item to cart" -> "AddItemToCart".
std::string camel_label(std::string_view name);

// All records must share one instance and the chain verdict must be Valid.
ProvDocument map_to_prov(const std::vector<holder::ProvenanceRecord>& records,
                         const holder::IntegrityVerdict& verdict);

// Empty result means the document is well-formed (unique ids, declared
// relation endpoints, kind-appropriate endpoint classes).
std::vector<std::string> validate_document(const ProvDocument& doc);

// All three are deterministic; elements are sorted by id within sections.
std::string serialize_provn(const ProvDocument& doc);
std::string serialize_prov_json(const ProvDocument& doc);
std::string to_dot(const ProvDocument& doc);

}  // namespace adprov::prov
