#pragma once

// Helpers for driving the installed CLI binary from tests. The binary path
// arrives through a compile definition.

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

namespace cli_runner {

inline std::string binary_path() {
#ifdef ELASTIRANK_CLI_PATH
    return ELASTIRANK_CLI_PATH;
#else
    return "elastirank";
#endif
}

struct RunResult {
    int exit_code = -1;
    std::string stderr_text;
};

/// Runs the CLI with the given arguments inside `workdir`; stderr is captured.
inline RunResult run(const std::filesystem::path& workdir, const std::string& args) {
    const auto err_file = workdir / ".stderr.txt";
    std::ostringstream cmd;
    cmd << "cd '" << workdir.string() << "' && '" << binary_path() << "' " << args << " 2> '"
        << err_file.string() << "' > /dev/null";
    const int status = std::system(cmd.str().c_str());
    RunResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream err(err_file);
    std::ostringstream text;
    text << err.rdbuf();
    result.stderr_text = text.str();
    std::filesystem::remove(err_file);
    return result;
}

inline std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

/// File body with `#` comment lines stripped.
inline std::string body_of(const std::filesystem::path& path) {
    std::istringstream in(slurp(path));
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.front() == '#') continue;
        out << line << '\n';
    }
    return out.str();
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag) {
        path = std::filesystem::temp_directory_path() /
               ("elastirank_" + tag + "_" + std::to_string(::getpid()));
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace cli_runner
