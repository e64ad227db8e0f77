#pragma once

#include "sharelm/ingest/config.hpp"
#include "sharelm/ingest/service.hpp"

#include <memory>
#include <string>

namespace httplib {
class Server;
}

namespace sharelm::ingest {

/// HTTP/1.1 front end for IngestionService.
///
///   POST /api/v1/conversations       upload batch
///   POST /api/v1/removal-requests    removal or report
///   GET  /api/v1/health              status document
///   POST /api/v1/releases/export     operator only (Authorization: Bearer <token>)
class HttpServer {
public:
    HttpServer(IngestionService& service, ServerConfig config);
    ~HttpServer();

    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds the listen address. Port 0 picks a free port. Returns the bound
    /// port, or -1 on failure.
    int bind();

    /// Serves until stop(). Call after bind().
    void serve();

    void stop();

    int port() const noexcept { return port_; }

private:
    IngestionService& service_;
    ServerConfig config_;
    std::unique_ptr<httplib::Server> server_;
    int port_ = -1;
};

}  // namespace sharelm::ingest
