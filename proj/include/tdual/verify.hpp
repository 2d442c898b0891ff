#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace tdual::verify {

class UnknownSuite : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct SuiteOptions {
    std::uint64_t seed = 42;
    int trials = 100;
    double tol = 1e-9;
};

struct CheckResult {
    std::string suite;
    std::string name;
    bool pass = false;
    nlohmann::json detail;   // witness on failure
};

/// metrics, dyonic, cohomology, gerbes, semifree
const std::vector<std::string>& suite_names();
/// "all" runs every suite in order; throws UnknownSuite otherwise.
std::vector<CheckResult> run_suite(const std::string& name, const SuiteOptions& opts = {});

nlohmann::json to_json(const std::vector<CheckResult>& results);

}  // namespace tdual::verify
