// Converts source datasets into unified JSON Lines.
// Exit codes: 0 success, 1 refusal or I/O error, 2 zero records converted.

#include "sharelm/io.hpp"
#include "sharelm/unifier/unify.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Unify conversation datasets into the release format"};
    std::vector<std::string> sources;
    std::string out_path;
    std::vector<std::string> acknowledged;
    std::string report_path;
    std::vector<std::string> adapter_configs;
    bool list = false;
    app.add_option("--source", sources, "<name>:<path> input, repeatable");
    app.add_option("--out", out_path, "Output JSON Lines file");
    app.add_option("--acknowledge-gated", acknowledged, "Accept the terms of a gated source, repeatable");
    app.add_option("--report", report_path, "Write the JSON report here");
    app.add_option("--adapter-config", adapter_configs, "Extra or replacement adapter config, repeatable")
        ->check(CLI::ExistingFile);
    app.add_flag("--list-adapters", list, "Print registered adapters and exit");
    CLI11_PARSE(app, argc, argv);

    using namespace sharelm::unify;
    try {
        AdapterRegistry registry = AdapterRegistry::builtin();
        for (const auto& path : adapter_configs) {
            auto value = nlohmann::json::parse(sharelm::read_file(path));
            if (value.is_array()) {
                for (const auto& item : value) registry.add(adapter_config_from_json(item));
            } else {
                registry.add(adapter_config_from_json(value));
            }
        }
        if (list) {
            for (const auto& name : registry.names()) {
                const auto& c = registry.find(name)->config();
                std::cout << name << "\t" << to_string(c.family) << (c.gated ? "\tgated" : "") << "\t" << c.license_note
                          << "\n";
            }
            return 0;
        }
        if (sources.empty() || out_path.empty()) {
            std::cerr << "unify: --source and --out are required\n";
            return 1;
        }
        std::vector<SourceInput> inputs;
        for (const auto& s : sources) inputs.push_back(parse_source_argument(s));
        UnifyOptions options;
        options.acknowledged_gated.insert(acknowledged.begin(), acknowledged.end());
        UnifyReport report = unify(registry, inputs, out_path, options);
        std::string report_text = to_json(report).dump(2) + "\n";
        if (!report_path.empty()) sharelm::write_file_atomically(report_path, report_text);

        std::size_t converted = 0;
        for (const auto& [name, stats] : report.per_source) {
            converted += stats.converted;
            std::cerr << name << ": read " << stats.read << ", converted " << stats.converted << ", skipped "
                      << stats.skipped << ", duplicates " << stats.duplicates << "\n";
        }
        std::cerr << "wrote " << report.total_records << " records (" << report.distinct_models << " models) to "
                  << out_path << "\n";
        return converted == 0 ? 2 : 0;
    } catch (const std::exception& e) {
        std::cerr << "unify: " << e.what() << "\n";
        return 1;
    }
}
