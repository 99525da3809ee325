#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace aemod {
namespace cli {

inline constexpr const char* kToolVersion = "0.1.0";

/// Reproducibility sidecar written next to every output file: the command,
/// the resolved parameters, seeds and timing needed to regenerate it.
struct RunManifest {
    std::string command;
    std::string config_path;
    nlohmann::json resolved;  // effective parameters after flag/env resolution
    std::vector<std::string> outputs;
    double wall_clock_sec = 0.0;

    /// Writes "<output>.manifest.json" for every listed output.
    void write() const;
};

}  // namespace cli
}  // namespace aemod
