#pragma once

#include "sharelm/record.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sharelm::unify {

enum class Family { pairwise_preference, arena_pairs, survey_conversations, plugin_native };

std::string_view to_string(Family family);
std::optional<Family> parse_family(std::string_view text);

/// Adapter definition as loaded from config/adapters/<name>.json. `mapping`
/// holds the family-specific field table.
struct AdapterConfig {
    std::string source_name;
    Family family = Family::plugin_native;
    std::string input_format;
    std::string license_note;
    bool gated = false;
    nlohmann::json mapping = nlohmann::json::object();
};

class AdapterConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

AdapterConfig adapter_config_from_json(const nlohmann::json& value);

/// Prefix for source fields that have no slot in the unified schema.
inline constexpr std::string_view kPassthroughPrefix = "x_";

/// Outcome of converting one input row. Either records or problems, never
/// both: a row that cannot be fully converted is skipped as a whole.
struct RowResult {
    std::vector<UnifiedRecord> records;
    std::vector<std::string> problems;
};

class SourceAdapter {
public:
    explicit SourceAdapter(AdapterConfig config) : config_(std::move(config)) {}
    virtual ~SourceAdapter() = default;

    const AdapterConfig& config() const noexcept { return config_; }
    const std::string& source_name() const noexcept { return config_.source_name; }

    /// Records a successful row yields. Pair families emit two.
    virtual std::size_t records_per_row() const { return 1; }

    /// `line_number` is 1-based and used for generated local ids.
    virtual RowResult convert(std::string_view line, std::size_t line_number) const = 0;

private:
    AdapterConfig config_;
};

/// Throws AdapterConfigError when the mapping table is unusable.
std::unique_ptr<SourceAdapter> make_adapter(AdapterConfig config);

class AdapterRegistry {
public:
    /// Registry holding every config shipped in config/adapters.
    static AdapterRegistry builtin();

    /// Adds or replaces the adapter with the same source_name.
    void add(AdapterConfig config);

    const SourceAdapter* find(std::string_view source_name) const;
    std::vector<std::string> names() const;

private:
    std::map<std::string, std::unique_ptr<SourceAdapter>, std::less<>> adapters_;
};

/// (file name, JSON text) for each bundled adapter config. Generated at build
/// time from config/adapters.
const std::vector<std::pair<std::string, std::string>>& builtin_adapter_configs();

}  // namespace sharelm::unify
