#pragma once

#include "sharelm/record.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sharelm {

/// Malformed JSON, wrong field types, missing or unknown keys.
/// `offset` is the byte position of a syntax error, 0 for schema errors.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t offset, std::string reason);

    std::size_t offset() const noexcept { return offset_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    std::size_t offset_;
    std::string reason_;
};

/// Thrown by serialize_record when handed a record that fails validation.
class InvalidRecord : public std::invalid_argument {
public:
    explicit InvalidRecord(ValidationReport report);

    const ValidationReport& report() const noexcept { return report_; }

private:
    ValidationReport report_;
};

/// Key order follows kRecordFieldNames; absent optionals become null.
nlohmann::ordered_json record_to_json(const UnifiedRecord& record);

/// Strict schema: all eight keys required, no others allowed. Does not run
/// validate_record; semantic checks are the caller's business.
UnifiedRecord record_from_json(const nlohmann::json& value);

/// One JSON-Lines line, without the trailing newline. Deterministic.
std::string serialize_record(const UnifiedRecord& record);

UnifiedRecord parse_record(std::string_view line);

nlohmann::ordered_json message_to_json(const Message& message);
Message message_from_json(const nlohmann::json& value, const std::string& path);

nlohmann::ordered_json string_map_to_json(const StringMap& values);
StringMap string_map_from_json(const nlohmann::json& value, const std::string& path);

}  // namespace sharelm
