#pragma once

// Runs the command-line binary through the shell and captures stdout.

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <string>

namespace pathfinder::testing {

struct RunResult {
    int status = -1;
    std::string out;
};

inline RunResult run_command(const std::string& cmd) {
    RunResult r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    const int raw = ::pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

inline RunResult run_cli(const std::string& args) {
    return run_command(std::string("'") + PATHFINDER_CLI + "' " + args + " 2>/dev/null");
}

}  // namespace pathfinder::testing
