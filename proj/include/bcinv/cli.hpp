#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace bcinv::cli {

struct RunConfig {
    std::string command;             ///< forward | invert | spectral | roundtrip | compare
    std::string potential = "zero";  ///< CSV path or zero, const:c, sine, step
    std::string response;            ///< r.csv for invert / compare
    double L = 1.0;
    std::optional<double> T;         ///< defaults to L (or the response horizon)
    std::size_t n = 201;             ///< samples of q on [0, L]
    double tol = 1e-12;
    std::string method = "bc";       ///< bc | remling | gl | gl-classical | simon
    int n_max = 100;
    double k_min = 5.0;
    double k_max = 20.0;
    int k_count = 16;
    std::string out = ".";
    bool strict_positivity = false;
};

enum ExitCode : int { kOk = 0, kBadConfig = 2, kSolverFailure = 3, kPositivityViolation = 4 };

/// Canonical JSON text of the settings that influence results (excludes `out`).
std::string canonical_json(const RunConfig& config);

/// FNV-1a 64-bit hash of canonical_json, as 16 hex digits.
std::string config_hash(const RunConfig& config);

/// Reads a JSON config file; unknown keys are a configuration error.
RunConfig load_config(const std::string& path);

/// Runs one command, writing artifacts to config.out. Messages go to `log`.
int run(const RunConfig& config, std::ostream& log);

/// Parses command-line arguments (flags override --config) and runs.
int main(int argc, const char* const* argv, std::ostream& log);

}  // namespace bcinv::cli
