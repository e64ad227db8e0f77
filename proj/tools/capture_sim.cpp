// Replays a scripted browsing session against the capture protocol and emits
// one JSON trace line per step.

#include "sharelm/capture/replay.hpp"
#include "sharelm/io.hpp"
#include "sharelm/json_codec.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Replay a scripted capture session with a simulated clock"};
    std::string session_path;
    std::string clock_path;
    std::string trace_path;
    std::string store_path;
    app.add_option("--session", session_path, "Session script, one JSON step per line")->required()->check(CLI::ExistingFile);
    app.add_option("--clock-script", clock_path, "Clock script JSON")->required()->check(CLI::ExistingFile);
    app.add_option("--emit-trace", trace_path, "Write the trace here instead of stdout");
    app.add_option("--dump-store", store_path, "Write the final local store state as JSON");
    CLI11_PARSE(app, argc, argv);

    try {
        auto clock = sharelm::capture::clock_script_from_json(nlohmann::json::parse(sharelm::read_file(clock_path)));
        sharelm::capture::SessionReplayer replayer(clock);
        auto trace = replayer.run(sharelm::read_lines(session_path));
        std::string text;
        for (const auto& line : trace) {
            text += line;
            text += '\n';
        }
        if (trace_path.empty()) {
            std::cout << text;
        } else {
            sharelm::write_file_atomically(trace_path, text);
        }
        if (!store_path.empty()) {
            replayer.store().save(store_path);
        }
    } catch (const sharelm::ParseError& e) {
        std::cerr << "capture-sim: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "capture-sim: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "capture-sim: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
