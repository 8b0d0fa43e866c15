#include "adprov/service.hpp"

#include <httplib.h>

#include "adprov/detect.hpp"
#include "adprov/prov.hpp"

namespace adprov::service {

using nlohmann::json;

json change_event_to_json(const adaptation::ChangeEvent& ce) {
    json j{{"instance_id", ce.instance_id},
           {"change_type", adaptation::to_string(ce.change_type)},
           {"target", ce.target_activity},
           {"position_kind", ce.position.kind_text()},
           {"position_anchor", ce.position.anchor_text()},
           {"initiator", ce.initiator},
           {"change_time", ce.change_time.to_iso8601()}};
    if (ce.note) j["note"] = *ce.note;
    return j;
}

namespace {

void reply_error(httplib::Response& res, int status, const std::string& code,
                 const std::string& detail,
                 const std::vector<xes::Violation>& violations = {}) {
    json body{{"code", code}, {"detail", detail}};
    if (!violations.empty()) {
        json v = json::array();
        for (const auto& viol : violations) v.push_back(xes::describe(viol));
        body["violations"] = std::move(v);
    }
    res.status = status;
    res.set_content(body.dump(2), "application/json");
}

void handle_collect(ServiceState& state, const httplib::Request& req,
                    httplib::Response& res) {
    bool detect = req.get_param_value("detect") == "true";
    xes::EventLog log;
    try {
        log = xes::parse_xes(req.body);
    } catch (const xes::ParseError& e) {
        return reply_error(res, 400, "malformed_xml", e.what());
    } catch (const xes::ValidationError& e) {
        return reply_error(res, 422, "invalid_xes", e.what(), e.violations);
    }
    if (detect) {
        std::string model_id = req.get_param_value("model");
        detect::DetectionDefaults defaults;
        defaults.initiator = state.derived_initiator;
        {
            std::lock_guard lock(state.models_mutex);
            auto it = state.models.find(model_id);
            if (it == state.models.end())
                return reply_error(res, 404, "unknown_model",
                                   "no registered model '" + model_id + "'");
            try {
                log = detect::derive_annotated_log(it->second, log, defaults);
            } catch (const model::RunBudgetExceeded& e) {
                return reply_error(res, 422, "run_budget_exceeded", e.what());
            } catch (const std::exception& e) {
                return reply_error(res, 422, "detection_failed", e.what());
            }
        }
    }
    try {
        auto ids = state.controller.collect(log);
        size_t change_count = 0;
        for (const auto& [_, changes] : adaptation::extract_change_events(log))
            change_count += changes.size();
        json body{{"record_ids", ids}, {"change_count", change_count}};
        res.set_content(body.dump(2), "application/json");
    } catch (const holder::ValidationRejected& e) {
        reply_error(res, 422, "validation_failed", e.what(), e.violations);
    } catch (const std::exception& e) {
        reply_error(res, 500, "store_failure", e.what());
    }
}

void handle_provenance(ServiceState& state, const httplib::Request& req,
                       httplib::Response& res) {
    const std::string instance = req.path_params.at("id");
    std::string format = req.get_param_value("format");
    if (format.empty()) format = "prov-n";
    if (format != "prov-n" && format != "prov-json" && format != "dot")
        return reply_error(res, 400, "bad_format",
                           "format must be prov-n, prov-json or dot");
    holder::ProvenanceQuery query;
    query.instance_id = instance;
    auto [records, verdict] = state.controller.retrieve(query);
    res.set_header("X-AdProv-Integrity", verdict.valid ? "valid" : "tampered");
    if (!verdict.valid)
        return reply_error(res, 409, "tampered_store",
                           "first bad record " + verdict.first_bad_record_id);
    if (records.empty())
        return reply_error(res, 404, "unknown_instance",
                           "no provenance for instance '" + instance + "'");
    auto doc = prov::map_to_prov(records, verdict);
    if (format == "prov-n")
        res.set_content(prov::serialize_provn(doc), "text/provenance-notation");
    else if (format == "prov-json")
        res.set_content(prov::serialize_prov_json(doc), "application/json");
    else
        res.set_content(prov::to_dot(doc), "text/vnd.graphviz");
}

void handle_changes(ServiceState& state, const httplib::Request& req,
                    httplib::Response& res) {
    const std::string instance = req.path_params.at("id");
    holder::ProvenanceQuery query;
    query.instance_id = instance;
    auto [records, verdict] = state.controller.retrieve(query);
    res.set_header("X-AdProv-Integrity", verdict.valid ? "valid" : "tampered");
    if (!verdict.valid)
        return reply_error(res, 409, "tampered_store",
                           "first bad record " + verdict.first_bad_record_id);
    if (records.empty())
        return reply_error(res, 404, "unknown_instance",
                           "no provenance for instance '" + instance + "'");
    json body = json::array();
    for (const auto& r : records)
        if (r.kind == holder::RecordKind::Change)
            body.push_back(change_event_to_json(
                holder::change_event_from_payload(r.instance_id, r.payload)));
    res.set_content(body.dump(2), "application/json");
}

}  // namespace

std::unique_ptr<httplib::Server> make_server(ServiceState& state) {
    auto server = std::make_unique<httplib::Server>();

    server->Post("/collect/xes", [&state](const httplib::Request& req, httplib::Response& res) {
        handle_collect(state, req, res);
    });

    server->Get("/instances/:id/provenance",
                [&state](const httplib::Request& req, httplib::Response& res) {
                    handle_provenance(state, req, res);
                });

    server->Get("/instances/:id/changes",
                [&state](const httplib::Request& req, httplib::Response& res) {
                    handle_changes(state, req, res);
                });

    server->Post("/models", [&state](const httplib::Request& req, httplib::Response& res) {
        model::ProcessModel m;
        try {
            m = model::parse_model(req.body);
        } catch (const model::ModelError& e) {
            return reply_error(res, 422, "invalid_model", e.what());
        }
        std::string id = m.name.empty() ? "model-" : m.name;
        {
            std::lock_guard lock(state.models_mutex);
            if (state.models.contains(id)) id += "-" + std::to_string(state.models.size());
            state.models[id] = std::move(m);
        }
        res.set_content(json{{"model_id", id}}.dump(2), "application/json");
    });

    server->Get("/providers", [&state](const httplib::Request&, httplib::Response& res) {
        json body = json::array();
        for (const auto& p : state.controller.providers())
            body.push_back(json{{"provider_id", p.provider_id},
                                {"storage_kind", p.storage_kind},
                                {"record_count", p.record_count}});
        res.set_content(body.dump(2), "application/json");
    });

    server->Post("/migrate", [&state](const httplib::Request& req, httplib::Response& res) {
        try {
            json j = json::parse(req.body);
            size_t count = state.controller.migrate(j.at("from").get<std::string>(),
                                                    j.at("to").get<std::string>());
            res.set_content(json{{"migrated", count}}.dump(2), "application/json");
        } catch (const json::exception& e) {
            reply_error(res, 400, "bad_request", e.what());
        } catch (const holder::StoreError& e) {
            reply_error(res, 409, "migration_refused", e.what());
        }
    });

    server->Get("/health", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(json{{"status", "ok"}}.dump(2), "application/json");
    });

    return server;
}

}  // namespace adprov::service
