// HTTP facade exposing the Provenance Holder's two external operations
// (collect and retrieve) plus model registration and provider management.

#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "adprov/holder.hpp"
#include "adprov/model.hpp"

namespace httplib {
class Server;
}

namespace adprov::service {

struct ServiceState {
    holder::Controller controller;
    std::map<std::string, model::ProcessModel> models;
    std::mutex models_mutex;

    // Defaults used when /collect/xes runs with detect=true.
    std::string derived_initiator = "unknown";
};

// Routes:
//   POST /collect/xes?detect=&model=        (body: XES XML)
//   GET  /instances/{id}/provenance?format=prov-n|prov-json|dot
//   GET  /instances/{id}/changes
//   POST /models                            (body: model JSON)
//   GET  /providers
//   POST /migrate                           (body: {"from": .., "to": ..})
//   GET  /health
std::unique_ptr<httplib::Server> make_server(ServiceState& state);

nlohmann::json change_event_to_json(const adaptation::ChangeEvent& ce);

}  // namespace adprov::service
