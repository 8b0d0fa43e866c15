// adprov: command-line driver for the provenance pipeline.
//
//   adprov ingest <log.xes> [--model m.json --detect] [--store dir]
//   adprov export <instance-id> --format prov-n|prov-json|dot [--out file]
//   adprov changes <instance-id>
//   adprov validate [--store dir]
//   adprov migrate <from.jsonl> <to.jsonl>
//   adprov serve [--port N] [--store dir]
//
// Exit codes: 0 success, 2 validation failure, 3 not found, 4 integrity
// failure, 1 anything else.

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <httplib.h>

#include "adprov/detect.hpp"
#include "adprov/prov.hpp"
#include "adprov/service.hpp"

namespace fs = std::filesystem;
using namespace adprov;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNotFound = 3;
constexpr int kExitIntegrity = 4;

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path store_file(const fs::path& store_dir) {
    fs::create_directories(store_dir);
    return store_dir / "records.jsonl";
}

// Exclusive advisory lock held for the lifetime of a write command.
class StoreLock {
public:
    explicit StoreLock(const fs::path& store_dir) {
        fs::create_directories(store_dir);
        fd_ = ::open((store_dir / ".lock").c_str(), O_CREAT | O_RDWR, 0644);
        if (fd_ < 0 || ::flock(fd_, LOCK_EX) != 0)
            throw std::runtime_error("cannot lock store " + store_dir.string());
    }
    ~StoreLock() {
        if (fd_ >= 0) {
            ::flock(fd_, LOCK_UN);
            ::close(fd_);
        }
    }
    StoreLock(const StoreLock&) = delete;
    StoreLock& operator=(const StoreLock&) = delete;

private:
    int fd_ = -1;
};

std::unique_ptr<holder::Controller> open_store(const fs::path& store_dir) {
    auto controller = std::make_unique<holder::Controller>();
    controller->add_provider(
        std::make_unique<holder::FileProvider>("store", store_file(store_dir)));
    return controller;
}

int run_ingest(const fs::path& log_path, const fs::path& model_path, bool detect,
               const fs::path& store_dir) {
    xes::EventLog log = xes::parse_xes(read_file(log_path));
    if (detect) {
        if (model_path.empty()) {
            std::cerr << "--detect requires --model\n";
            return kExitValidation;
        }
        auto m = model::parse_model(read_file(model_path));
        detect::DetectionDefaults defaults;
        // Stamp derived changes with the latest execution time in the log.
        for (const auto& tr : log.traces)
            for (const auto& ev : tr.events)
                if (const auto* ts = ev.find("time:timestamp");
                    ts && ts->value.kind == xes::AttributeValue::Kind::Timestamp &&
                    defaults.change_time < ts->value.as_timestamp())
                    defaults.change_time = ts->value.as_timestamp();
        log = detect::derive_annotated_log(m, log, defaults);
    }
    StoreLock lock(store_dir);
    auto controller = open_store(store_dir);
    try {
        auto ids = controller->collect(log);
        size_t changes = 0;
        for (const auto& [_, list] : adaptation::extract_change_events(log))
            changes += list.size();
        std::cout << ids.size() << " records, " << changes
                  << (changes == 1 ? " change\n" : " changes\n");
        for (const auto& id : ids) std::cout << id << "\n";
        return 0;
    } catch (const holder::ValidationRejected& e) {
        std::cerr << e.what() << "\n";
        for (const auto& v : e.violations) std::cerr << "  " << xes::describe(v) << "\n";
        return kExitValidation;
    }
}

int run_export(const std::string& instance, const std::string& format, const fs::path& out,
               const fs::path& store_dir) {
    auto controller = open_store(store_dir);
    holder::ProvenanceQuery query;
    query.instance_id = instance;
    auto [records, verdict] = controller->retrieve(query);
    if (!verdict.valid) {
        std::cerr << "Tampered at " << verdict.first_bad_record_id << "\n";
        return kExitIntegrity;
    }
    if (records.empty()) {
        std::cerr << "no provenance for instance '" << instance << "'\n";
        return kExitNotFound;
    }
    auto doc = prov::map_to_prov(records, verdict);
    std::string text;
    if (format == "prov-n")
        text = prov::serialize_provn(doc);
    else if (format == "prov-json")
        text = prov::serialize_prov_json(doc);
    else if (format == "dot")
        text = prov::to_dot(doc);
    else {
        std::cerr << "unknown format '" << format << "'\n";
        return 1;
    }
    if (out.empty()) {
        std::cout << text;
    } else {
        std::ofstream file(out, std::ios::binary);
        file << text;
        if (!file) {
            std::cerr << "cannot write " << out << "\n";
            return 1;
        }
    }
    return 0;
}

int run_changes(const std::string& instance, const fs::path& store_dir) {
    auto controller = open_store(store_dir);
    holder::ProvenanceQuery query;
    query.instance_id = instance;
    query.kind_filter = holder::RecordKind::Change;
    auto [records, verdict] = controller->retrieve(query);
    if (!verdict.valid) {
        std::cerr << "Tampered at " << verdict.first_bad_record_id << "\n";
        return kExitIntegrity;
    }
    for (const auto& r : records) {
        auto ce = holder::change_event_from_payload(r.instance_id, r.payload);
        std::cout << adaptation::to_string(ce.change_type) << " " << ce.target_activity << " ("
                  << ce.position.kind_text() << " " << ce.position.anchor_text() << ") by "
                  << ce.initiator << " at " << ce.change_time.to_iso8601() << "\n";
    }
    return 0;
}

int run_validate(const fs::path& store_dir) {
    auto controller = open_store(store_dir);
    auto verdict = controller->validate_chain("store");
    if (verdict.valid) {
        std::cout << "Valid\n";
        return 0;
    }
    std::cout << "Tampered at " << verdict.first_bad_record_id << "\n";
    return kExitIntegrity;
}

int run_migrate(const fs::path& from, const fs::path& to) {
    holder::Controller controller;
    controller.add_provider(std::make_unique<holder::FileProvider>("from", from));
    controller.add_provider(std::make_unique<holder::FileProvider>("to", to));
    size_t count = controller.migrate("from", "to");
    std::cout << count << " records migrated\n";
    return 0;
}

int run_serve(int port, const fs::path& store_dir) {
    service::ServiceState state;
    state.controller.add_provider(
        std::make_unique<holder::FileProvider>("store", store_file(store_dir)));
    auto server = service::make_server(state);
    std::cerr << "adprov listening on port " << port << "\n";
    if (!server->listen("0.0.0.0", port)) {
        std::cerr << "cannot bind port " << port << "\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Provenance of runtime workflow adaptations"};
    app.require_subcommand(1);

    fs::path store_dir = "adprov-store";

    auto* ingest = app.add_subcommand("ingest", "Collect an XES log into the store");
    fs::path log_path, model_path;
    bool detect_flag = false;
    ingest->add_option("log", log_path, "XES log file")->required();
    ingest->add_option("--model", model_path, "process model JSON (for --detect)");
    ingest->add_flag("--detect", detect_flag, "derive change events by model alignment");
    ingest->add_option("--store", store_dir, "store directory");

    auto* exp = app.add_subcommand("export", "Export an instance's provenance");
    std::string instance, format = "prov-n";
    fs::path out_path;
    exp->add_option("instance", instance, "process instance id")->required();
    exp->add_option("--format", format, "prov-n|prov-json|dot");
    exp->add_option("--out", out_path, "output file (default stdout)");
    exp->add_option("--store", store_dir, "store directory");

    auto* chg = app.add_subcommand("changes", "List an instance's change events");
    chg->add_option("instance", instance, "process instance id")->required();
    chg->add_option("--store", store_dir, "store directory");

    auto* val = app.add_subcommand("validate", "Validate the store's hash chain");
    val->add_option("--store", store_dir, "store directory");

    auto* mig = app.add_subcommand("migrate", "Copy a provenance chain between files");
    fs::path mig_from, mig_to;
    mig->add_option("from", mig_from, "source records.jsonl")->required();
    mig->add_option("to", mig_to, "destination records.jsonl")->required();

    auto* srv = app.add_subcommand("serve", "Run the HTTP service");
    int port = 8470;
    srv->add_option("--port", port, "listen port");
    srv->add_option("--store", store_dir, "store directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (ingest->parsed()) return run_ingest(log_path, model_path, detect_flag, store_dir);
        if (exp->parsed()) return run_export(instance, format, out_path, store_dir);
        if (chg->parsed()) return run_changes(instance, store_dir);
        if (val->parsed()) return run_validate(store_dir);
        if (mig->parsed()) return run_migrate(mig_from, mig_to);
        if (srv->parsed()) return run_serve(port, store_dir);
    } catch (const xes::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitValidation;
    } catch (const xes::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return kExitValidation;
    } catch (const model::ModelError& e) {
        std::cerr << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    return 0;
}
