#include "sharelm/ingest/http_server.hpp"

#include "sharelm/io.hpp"
#include "sharelm/json_codec.hpp"

#include <httplib.h>

namespace sharelm::ingest {

namespace {

constexpr const char* kJson = "application/json";

void reply(httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_content(r.body.dump() + "\n", kJson);
}

void reply_error(httplib::Response& res, int status, const std::string& message) {
    nlohmann::ordered_json body;
    body["error"] = message;
    reply(res, {status, body});
}

}  // namespace

HttpServer::HttpServer(IngestionService& service, ServerConfig config)
    : service_(service), config_(std::move(config)), server_(std::make_unique<httplib::Server>()) {
    // Leave one byte of headroom so the service, not the transport, reports
    // oversized batches with a JSON body.
    server_->set_payload_max_length(config_.limits.max_batch_bytes + 1);

    server_->Post("/api/v1/conversations", [this](const httplib::Request& req, httplib::Response& res) {
        reply(res, service_.handle_upload(req.body));
    });

    server_->Post("/api/v1/removal-requests", [this](const httplib::Request& req, httplib::Response& res) {
        reply(res, service_.handle_removal_request(req.body));
    });

    server_->Get("/api/v1/health", [this](const httplib::Request&, httplib::Response& res) {
        reply(res, service_.get_health());
    });

    server_->Post("/api/v1/releases/export", [this](const httplib::Request& req, httplib::Response& res) {
        if (config_.operator_token.empty()) {
            reply_error(res, 403, "export disabled: no operator token configured");
            return;
        }
        if (req.get_header_value("Authorization") != "Bearer " + config_.operator_token) {
            reply_error(res, 401, "operator token required");
            return;
        }
        ReleaseFilter filter;
        try {
            filter = release_filter_from_json(req.body.empty() ? nlohmann::json(nullptr) : nlohmann::json::parse(req.body));
        } catch (const nlohmann::json::parse_error&) {
            reply_error(res, 400, "malformed JSON");
            return;
        } catch (const ParseError& e) {
            reply_error(res, 400, e.reason());
            return;
        }
        try {
            auto files = service_.export_release(filter, config_.release_dir);
            reply(res, {200, to_json(files.manifest)});
        } catch (const StoreUnavailable& e) {
            reply_error(res, 503, std::string("store unavailable: ") + e.what());
        } catch (const IoError& e) {
            reply_error(res, 500, e.what());
        }
    });

    server_->set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string message = "internal error";
        try {
            std::rethrow_exception(ep);
        } catch (const StoreUnavailable& e) {
            reply_error(res, 503, std::string("store unavailable: ") + e.what());
            return;
        } catch (const std::exception& e) {
            message = e.what();
        } catch (...) {
        }
        reply_error(res, 500, message);
    });
}

HttpServer::~HttpServer() {
    stop();
}

int HttpServer::bind() {
    if (config_.port == 0) {
        port_ = server_->bind_to_any_port(config_.listen_address);
    } else {
        port_ = server_->bind_to_port(config_.listen_address, config_.port) ? config_.port : -1;
    }
    return port_;
}

void HttpServer::serve() {
    server_->listen_after_bind();
}

void HttpServer::stop() {
    if (server_) server_->stop();
}

}  // namespace sharelm::ingest
