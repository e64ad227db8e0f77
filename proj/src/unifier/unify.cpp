#include "sharelm/unifier/unify.hpp"

#include "sharelm/io.hpp"
#include "sharelm/json_codec.hpp"

#include <fstream>
#include <unordered_set>

namespace sharelm::unify {

SourceInput parse_source_argument(std::string_view argument) {
    auto colon = argument.find(':');
    if (colon == std::string_view::npos || colon == 0 || colon + 1 == argument.size()) {
        throw std::invalid_argument("expected <name>:<path>, got \"" + std::string(argument) + "\"");
    }
    return {std::string(argument.substr(0, colon)), std::string(argument.substr(colon + 1))};
}

nlohmann::ordered_json to_json(const UnifyReport& report) {
    nlohmann::ordered_json j;
    j["per_source"] = nlohmann::ordered_json::object();
    for (const auto& [name, s] : report.per_source) {
        nlohmann::ordered_json entry;
        entry["rows"] = s.rows;
        entry["read"] = s.read;
        entry["converted"] = s.converted;
        entry["skipped"] = s.skipped;
        entry["violation_count"] = s.violation_count;
        entry["duplicates"] = s.duplicates;
        entry["issues"] = nlohmann::ordered_json::array();
        for (const auto& issue : s.issues) {
            entry["issues"].push_back({{"file", issue.file}, {"line", issue.line}, {"problem", issue.problem}});
        }
        j["per_source"][name] = std::move(entry);
    }
    j["total_records"] = report.total_records;
    j["distinct_models"] = report.distinct_models;
    j["duplicates"] = report.duplicates;
    return j;
}

UnifyResult unify_to_memory(const AdapterRegistry& registry, const std::vector<SourceInput>& inputs,
                            const UnifyOptions& options) {
    // Refuse before reading anything.
    for (const auto& input : inputs) {
        const SourceAdapter* adapter = registry.find(input.source_name);
        if (!adapter) throw UnifyError("no adapter registered for source \"" + input.source_name + "\"");
        if (adapter->config().gated && !options.acknowledged_gated.count(input.source_name)) {
            throw UnifyError("source \"" + input.source_name +
                             "\" is gated; review its terms of use and pass --acknowledge-gated " +
                             input.source_name + " (" + adapter->config().license_note + ")");
        }
    }

    UnifyResult result;
    std::unordered_set<std::string> seen_ids;
    std::set<std::string> models;
    for (const auto& input : inputs) {
        const SourceAdapter& adapter = *registry.find(input.source_name);
        SourceStats& stats = result.report.per_source[input.source_name];
        std::ifstream in(input.path, std::ios::binary);
        if (!in) throw UnifyError("cannot read " + input.path.string());
        std::string line;
        std::size_t line_number = 0;
        while (std::getline(in, line)) {
            ++line_number;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.find_first_not_of(" \t") == std::string::npos) continue;
            ++stats.rows;
            stats.read += adapter.records_per_row();
            RowResult row = adapter.convert(line, line_number);
            if (row.records.empty()) {
                if (row.problems.empty()) row.problems.push_back("row produced no records");
                stats.skipped += adapter.records_per_row();
                stats.violation_count += row.problems.size();
                for (auto& problem : row.problems) {
                    if (stats.issues.size() >= options.max_issues_per_source) break;
                    stats.issues.push_back({input.path.string(), line_number, std::move(problem)});
                }
                continue;
            }
            stats.converted += row.records.size();
            for (auto& record : row.records) {
                if (!seen_ids.insert(record.conversation_id).second) {
                    ++stats.duplicates;
                    ++result.report.duplicates;
                    continue;
                }
                if (record.model_name) models.insert(*record.model_name);
                result.output += serialize_record(record);
                result.output += '\n';
                ++result.report.total_records;
            }
        }
        if (in.bad()) throw UnifyError("read error on " + input.path.string());
    }
    result.report.distinct_models = models.size();
    return result;
}

UnifyReport unify(const AdapterRegistry& registry, const std::vector<SourceInput>& inputs,
                  const std::filesystem::path& out, const UnifyOptions& options) {
    UnifyResult result = unify_to_memory(registry, inputs, options);
    try {
        write_file_atomically(out, result.output);
    } catch (const IoError& e) {
        throw UnifyError(e.what());
    }
    return result.report;
}

}  // namespace sharelm::unify
