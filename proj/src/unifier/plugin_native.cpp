// Lines already in the release format pass through after re-validation.

#include "sharelm/json_codec.hpp"

#include "mapping.hpp"

namespace sharelm::unify::detail {

namespace {

class PluginNativeAdapter final : public SourceAdapter {
public:
    using SourceAdapter::SourceAdapter;

    RowResult convert(std::string_view line, std::size_t) const override {
        RowResult result;
        try {
            result.records.push_back(parse_record(line));
        } catch (const ParseError& e) {
            result.problems.push_back(e.reason());
            return result;
        }
        if (result.records.front().source != source_name()) {
            result.problems.push_back("source: expected \"" + source_name() + "\", got \"" +
                                      result.records.front().source + "\"");
        }
        validate_all(result.records, result.problems);
        if (!result.problems.empty()) result.records.clear();
        return result;
    }
};

}  // namespace

std::unique_ptr<SourceAdapter> make_plugin_native_adapter(AdapterConfig config) {
    return std::make_unique<PluginNativeAdapter>(std::move(config));
}

}  // namespace sharelm::unify::detail
