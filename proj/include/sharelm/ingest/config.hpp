#pragma once

#include "sharelm/ingest/service.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <string>

namespace sharelm::ingest {

struct ServerConfig {
    std::string listen_address = "127.0.0.1";
    int port = 8080;
    std::string store_path = "sharelm.db";
    ServiceLimits limits;
    std::string operator_token;  // empty disables the export endpoint
    std::string release_dir = "releases";
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Reads a JSON config file. Missing keys keep their defaults; unknown keys
/// are errors.
ServerConfig load_config(const std::filesystem::path& path);
ServerConfig config_from_json(const nlohmann::json& value);

using EnvLookup = std::function<std::optional<std::string>(const char*)>;

/// SHARELM_LISTEN_ADDRESS, SHARELM_PORT, SHARELM_STORE_PATH,
/// SHARELM_MAX_BATCH_RECORDS, SHARELM_MAX_BATCH_BYTES,
/// SHARELM_OPERATOR_TOKEN, SHARELM_RELEASE_DIR.
void apply_env_overrides(ServerConfig& config, const EnvLookup& lookup);
void apply_env_overrides(ServerConfig& config);

}  // namespace sharelm::ingest
