// Ingestion server and operator commands.
//
//   serve run [--config FILE]
//   serve admin review --token T [--approve ID]... [--remove ID]...
//   serve admin export --token T [--out DIR] [--source S]... [--model M]... [--from TS] [--to TS]

#include "sharelm/ingest/config.hpp"
#include "sharelm/ingest/http_server.hpp"
#include "sharelm/ingest/sqlite_store.hpp"
#include "sharelm/json_codec.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <iostream>
#include <thread>

namespace {

using namespace sharelm::ingest;

sharelm::Timestamp wall_clock() {
    return std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now());
}

ServerConfig resolve_config(const std::string& path) {
    ServerConfig config = path.empty() ? ServerConfig{} : load_config(path);
    apply_env_overrides(config);
    return config;
}

bool check_token(const ServerConfig& config, const std::string& token) {
    if (config.operator_token.empty()) {
        std::cerr << "serve: no operator token configured; set operator_token or SHARELM_OPERATOR_TOKEN\n";
        return false;
    }
    if (token != config.operator_token) {
        std::cerr << "serve: operator token mismatch\n";
        return false;
    }
    return true;
}

int run_server(const ServerConfig& config) {
    // Block termination signals here so the serving thread inherits the mask
    // and sigwait below receives them.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    SqliteConversationStore store(config.store_path);
    IngestionService service(store, config.limits, wall_clock);
    HttpServer server(service, config);
    if (server.bind() < 0) {
        std::cerr << "serve: cannot bind " << config.listen_address << ":" << config.port << "\n";
        return 1;
    }
    std::cerr << "serve: listening on " << config.listen_address << ":" << server.port() << ", store "
              << config.store_path << "\n";
    std::thread worker([&server] { server.serve(); });
    int received = 0;
    sigwait(&signals, &received);
    std::cerr << "serve: shutting down\n";
    server.stop();
    worker.join();
    return 0;
}

int review(const ServerConfig& config, const std::vector<std::string>& approve, const std::vector<std::string>& remove) {
    SqliteConversationStore store(config.store_path);
    IngestionService service(store, config.limits, wall_clock);
    int status = 0;
    for (const auto& id : approve) {
        if (!service.approve(id)) {
            std::cerr << "serve: " << id << " is not quarantined\n";
            status = 1;
        }
    }
    for (const auto& id : remove) {
        if (!service.remove(id)) {
            std::cerr << "serve: " << id << " not found or already removed\n";
            status = 1;
        }
    }
    for (const auto& row : service.quarantined()) {
        std::cout << row.conversation_id << "\t" << (row.user_id ? *row.user_id : "-") << "\t"
                  << sharelm::format_rfc3339(row.received_at) << "\n";
        if (row.record) {
            for (const auto& m : row.record->conversation) {
                std::cout << "    " << sharelm::to_string(m.role) << ": " << m.text << "\n";
            }
        }
    }
    return status;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ShareLM ingestion service"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);

    auto* run = app.add_subcommand("run", "Serve the HTTP API");

    auto* admin = app.add_subcommand("admin", "Operator commands");
    admin->require_subcommand(1);
    std::string token;
    admin->add_option("--token", token, "Operator token")->required();

    auto* review_cmd = admin->add_subcommand("review", "List quarantined conversations; approve or remove them");
    std::vector<std::string> approve;
    std::vector<std::string> remove;
    review_cmd->add_option("--approve", approve, "Return a quarantined conversation to active");
    review_cmd->add_option("--remove", remove, "Remove a conversation and erase its content");

    auto* export_cmd = admin->add_subcommand("export", "Write a staging release");
    std::string out_dir;
    std::vector<std::string> sources;
    std::vector<std::string> models;
    std::string from;
    std::string to;
    export_cmd->add_option("--out", out_dir, "Release directory (default: release_dir from config)");
    export_cmd->add_option("--source", sources, "Only these sources");
    export_cmd->add_option("--model", models, "Only these models");
    export_cmd->add_option("--from", from, "Earliest conversation timestamp (RFC 3339)");
    export_cmd->add_option("--to", to, "Latest conversation timestamp (RFC 3339)");

    CLI11_PARSE(app, argc, argv);

    try {
        ServerConfig config = resolve_config(config_path);
        if (*run) return run_server(config);
        if (!check_token(config, token)) return 1;
        if (*review_cmd) return review(config, approve, remove);

        ReleaseFilter filter;
        filter.sources = sources;
        filter.models = models;
        auto instant = [](const std::string& text, const char* name) -> std::optional<sharelm::Timestamp> {
            if (text.empty()) return std::nullopt;
            auto ts = sharelm::normalize_timestamp(text);
            if (!ts) throw std::invalid_argument(std::string(name) + ": not a timestamp: " + text);
            return ts;
        };
        filter.from = instant(from, "--from");
        filter.to = instant(to, "--to");
        SqliteConversationStore store(config.store_path);
        IngestionService service(store, config.limits, wall_clock);
        auto files = service.export_release(filter, out_dir.empty() ? config.release_dir : out_dir);
        std::cout << to_json(files.manifest).dump(2) << "\n";
        std::cerr << "serve: wrote " << files.records_path.string() << " and " << files.manifest_path.string() << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "serve: " << e.what() << "\n";
        return 1;
    }
}
