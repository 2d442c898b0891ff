#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace tdual::cli {

enum ExitCode : int { kOk = 0, kVerificationFailed = 1, kInputError = 2 };

struct CommandConfig {
    std::string subcommand;
    std::vector<std::string> inputs;
    std::string output;   // empty: write to the output stream
    std::uint64_t seed = 42;
    int trials = 100;
    double tol = 1e-9;
    std::string format = "table";   // json | table
};

/// Parses and runs one command line (without the program name). The seed default can be
/// overridden by the TDUAL_SEED environment variable.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tdual::cli
