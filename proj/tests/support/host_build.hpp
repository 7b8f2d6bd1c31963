#pragma once

// Builds generated C with the host compiler and the Arduino shim, then runs it on a trace.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>

namespace host {

struct Build {
    bool ok = false;
    std::string log;
    std::filesystem::path binary;
};

inline std::filesystem::path scratch_dir() {
    static std::filesystem::path dir = [] {
        std::random_device rd;
        auto d = std::filesystem::temp_directory_path() / ("dedc-test-" + std::to_string(rd()));
        std::filesystem::create_directories(d);
        return d;
    }();
    return dir;
}

inline std::string capture(const std::string& command, int& status) {
    std::string out;
    FILE* pipe = popen(command.c_str(), "r");
    if (!pipe) {
        status = -1;
        return out;
    }
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
    status = pclose(pipe);
    return out;
}

inline Build build(const std::string& name, const std::string& c_source) {
    Build b;
    auto dir = scratch_dir();
    auto src = dir / (name + ".c");
    std::ofstream(src) << c_source;
    b.binary = dir / name;
    std::string cmd = std::string(DEDC_TEST_CC) + " -std=c99 -Wall -Wextra -Werror -pedantic -I" DEDC_SHIM_DIR " " +
                      src.string() + " " DEDC_SHIM_DIR "/arduino_shim.c -o " + b.binary.string() + " 2>&1";
    int status = 0;
    b.log = capture(cmd, status);
    b.ok = status == 0;
    return b;
}

inline std::string run(const Build& b, const std::string& trace_path) {
    int status = 0;
    return capture(b.binary.string() + " " + trace_path, status);
}

}  // namespace host
