#include "sharelm/ingest/config.hpp"

#include "sharelm/io.hpp"

#include <charconv>
#include <cstdlib>

namespace sharelm::ingest {

namespace {

template <typename T>
T parse_number(std::string_view text, const char* name) {
    T value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw ConfigError(std::string(name) + ": expected a number, got \"" + std::string(text) + "\"");
    }
    return value;
}

void check_port(int port) {
    if (port < 0 || port > 65535) throw ConfigError("port: out of range");
}

}  // namespace

ServerConfig config_from_json(const nlohmann::json& value) {
    if (!value.is_object()) throw ConfigError("config: expected object");
    ServerConfig config;
    try {
        for (const auto& [key, v] : value.items()) {
            if (key == "listen_address") {
                config.listen_address = v.get<std::string>();
            } else if (key == "port") {
                config.port = v.get<int>();
            } else if (key == "store_path") {
                config.store_path = v.get<std::string>();
            } else if (key == "max_batch_records") {
                config.limits.max_batch_records = v.get<std::size_t>();
            } else if (key == "max_batch_bytes") {
                config.limits.max_batch_bytes = v.get<std::size_t>();
            } else if (key == "operator_token") {
                config.operator_token = v.get<std::string>();
            } else if (key == "release_dir") {
                config.release_dir = v.get<std::string>();
            } else {
                throw ConfigError("config: unknown key " + key);
            }
        }
    } catch (const nlohmann::json::type_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    check_port(config.port);
    return config;
}

ServerConfig load_config(const std::filesystem::path& path) {
    try {
        return config_from_json(nlohmann::json::parse(read_file(path)));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    } catch (const IoError& e) {
        throw ConfigError(e.what());
    }
}

void apply_env_overrides(ServerConfig& config, const EnvLookup& lookup) {
    if (auto v = lookup("SHARELM_LISTEN_ADDRESS")) config.listen_address = *v;
    if (auto v = lookup("SHARELM_PORT")) {
        config.port = parse_number<int>(*v, "SHARELM_PORT");
        check_port(config.port);
    }
    if (auto v = lookup("SHARELM_STORE_PATH")) config.store_path = *v;
    if (auto v = lookup("SHARELM_MAX_BATCH_RECORDS")) {
        config.limits.max_batch_records = parse_number<std::size_t>(*v, "SHARELM_MAX_BATCH_RECORDS");
    }
    if (auto v = lookup("SHARELM_MAX_BATCH_BYTES")) {
        config.limits.max_batch_bytes = parse_number<std::size_t>(*v, "SHARELM_MAX_BATCH_BYTES");
    }
    if (auto v = lookup("SHARELM_OPERATOR_TOKEN")) config.operator_token = *v;
    if (auto v = lookup("SHARELM_RELEASE_DIR")) config.release_dir = *v;
}

void apply_env_overrides(ServerConfig& config) {
    apply_env_overrides(config, [](const char* name) -> std::optional<std::string> {
        const char* value = std::getenv(name);
        if (!value) return std::nullopt;
        return std::string(value);
    });
}

}  // namespace sharelm::ingest
