#include "manifest.hpp"

#include <chrono>

#include "aemod/json_io.hpp"

namespace aemod {
namespace cli {

void RunManifest::write() const {
    const auto now = std::chrono::system_clock::now();
    const auto unix_sec =
        std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
    nlohmann::json j{{"tool", "aemod"},
                     {"version", kToolVersion},
                     {"command", command},
                     {"config", config_path},
                     {"resolved", resolved},
                     {"outputs", outputs},
                     {"wall_clock_sec", wall_clock_sec},
                     {"written_at_unix", unix_sec}};
    for (const auto& path : outputs)
        io::write_file_atomic(path + ".manifest.json", j.dump(2) + "\n");
}

}  // namespace cli
}  // namespace aemod
