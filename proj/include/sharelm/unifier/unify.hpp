#pragma once

#include "sharelm/unifier/adapter.hpp"

#include <filesystem>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace sharelm::unify {

struct SourceInput {
    std::string source_name;
    std::filesystem::path path;
};

/// Parses "<name>:<path>". Throws std::invalid_argument.
SourceInput parse_source_argument(std::string_view argument);

struct RowIssue {
    std::string file;
    std::size_t line = 0;
    std::string problem;
};

/// Counts are in record slots: a row of a pair family is two slots, so
/// read == converted + skipped holds for every family. `rows` counts input
/// lines.
struct SourceStats {
    std::size_t rows = 0;
    std::size_t read = 0;
    std::size_t converted = 0;
    std::size_t skipped = 0;
    std::size_t violation_count = 0;
    std::size_t duplicates = 0;
    std::vector<RowIssue> issues;  // first few only; see UnifyOptions
};

struct UnifyReport {
    std::map<std::string, SourceStats> per_source;
    std::size_t total_records = 0;
    std::size_t distinct_models = 0;
    std::size_t duplicates = 0;
};

nlohmann::ordered_json to_json(const UnifyReport& report);

struct UnifyOptions {
    std::set<std::string> acknowledged_gated;
    std::size_t max_issues_per_source = 50;
};

/// Missing adapter, unacknowledged gated source, unreadable input.
class UnifyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct UnifyResult {
    UnifyReport report;
    std::string output;  // JSON Lines, one record per line
};

/// Runs every input through its adapter in argument order, keeps the first
/// record per conversation_id and returns the merged lines.
UnifyResult unify_to_memory(const AdapterRegistry& registry, const std::vector<SourceInput>& inputs,
                            const UnifyOptions& options = {});

/// As unify_to_memory, then writes `out` atomically.
UnifyReport unify(const AdapterRegistry& registry, const std::vector<SourceInput>& inputs,
                  const std::filesystem::path& out, const UnifyOptions& options = {});

}  // namespace sharelm::unify
