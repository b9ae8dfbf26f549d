#pragma once

// Batch driver: config parsing, verification commands and reports.

#include "hkt/brane.hpp"
#include "hkt/calib.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hkt::cli {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct MBraneRequest {
    brane::MKind kind = brane::MKind::M5;
    double q = 1.0;
};

struct RunInput {
    brane::SuperpositionConfig superposition;
    std::optional<calib::CalibrationKind> form;
    std::optional<MBraneRequest> mbrane;
    std::vector<std::string> warnings;
};

// JSON text: {"taus": [{"p1", "p2", "a": [w, x, y, z], "r": real}], "box": [lo, hi],
// "form": name, "mbrane": {"kind": "M2" | "M5", "q": real}}. Throws ConfigError.
RunInput parse_config(const std::string& text);

struct RunOptions {
    std::optional<double> step;   // overrides every finite-difference step
    std::uint64_t seed = 1;
    std::optional<int> samples;   // sample points (planes for calibrate)
    int restarts = 256;
    std::optional<calib::CalibrationKind> form;
};

struct Check {
    std::string name;
    double value = 0;
    double threshold = 0;
    std::string relation;  // "<", ">", "=="
    bool pass = false;
};

struct Report {
    std::string command;
    std::uint64_t seed = 0;
    std::vector<Check> checks;
    std::vector<std::string> warnings;
    std::map<std::string, std::string> details;   // name -> JSON text
    std::map<std::string, std::string> sidecars;  // name -> CSV text

    bool passed() const;
    std::string to_json() const;
};

inline const std::vector<std::string> kCommands = {"verify-hkt", "holonomy", "calibrate", "eom", "charges", "tau-class", "report"};

// Throws std::invalid_argument for an unknown command.
Report run(const std::string& command, const RunInput& input, const RunOptions& opts = {});

// Exit codes.
inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailure = 2;
inline constexpr int kExitConfigError = 3;

int main_entry(int argc, char** argv);

}  // namespace hkt::cli
