#pragma once

// Minimal shell runner for CLI tests: captures stdout, stderr, and the
// exit code of a command line run through /bin/sh.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace testsupport {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

inline std::string shell_quote(const std::string& s) {
    std::string quoted = "'";
    for (char c : s) {
        if (c == '\'') quoted += "'\\''";
        else quoted.push_back(c);
    }
    quoted += "'";
    return quoted;
}

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Runs `command` with stdout/stderr captured. stdin_text, when
// nonempty, is piped in through a temp file.
inline RunResult run_command(const std::string& command, const std::string& stdin_text = "") {
    static int counter = 0;
    const std::string base =
        "/tmp/hetq_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++);
    const std::string out_path = base + ".out";
    const std::string err_path = base + ".err";
    const std::string in_path = base + ".in";

    std::string full = command;
    if (!stdin_text.empty()) {
        std::ofstream in(in_path, std::ios::binary);
        in << stdin_text;
        full += " < " + shell_quote(in_path);
    }
    full += " > " + shell_quote(out_path) + " 2> " + shell_quote(err_path);

    const int status = std::system(full.c_str());
    RunResult res;
    if (WIFEXITED(status)) res.exit_code = WEXITSTATUS(status);
    res.out = slurp(out_path);
    res.err = slurp(err_path);
    std::remove(out_path.c_str());
    std::remove(err_path.c_str());
    if (!stdin_text.empty()) std::remove(in_path.c_str());
    return res;
}

} // namespace testsupport
