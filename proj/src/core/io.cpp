#include "sharelm/io.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <unistd.h>

namespace sharelm {

namespace fs = std::filesystem;

void write_file_atomically(const fs::path& path, std::string_view contents) {
    static std::atomic<unsigned> counter{0};
    fs::path temp = path;
    temp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);

    std::FILE* file = std::fopen(temp.c_str(), "wb");
    if (file == nullptr) {
        throw IoError("cannot open " + temp.string() + " for writing");
    }
    bool ok = std::fwrite(contents.data(), 1, contents.size(), file) == contents.size();
    ok = std::fflush(file) == 0 && ok;
    ok = ::fsync(::fileno(file)) == 0 && ok;
    ok = std::fclose(file) == 0 && ok;

    std::error_code ec;
    if (ok) {
        fs::rename(temp, path, ec);
    }
    if (!ok || ec) {
        fs::remove(temp, ec);
        throw IoError("failed to write " + path.string());
    }
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::vector<std::string> read_lines(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read " + path.string());
    }
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (!line.empty()) {
            lines.push_back(std::move(line));
        }
    }
    return lines;
}

}  // namespace sharelm
