#pragma once

#include <cstdint>
#include <string>

#include "mfgclaw/io.hpp"

namespace mfgclaw {

struct CliOptions {
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool strict = false;
};

// Exit codes: 0 ok, 2 config error, 3 solver error, 4 ambiguity under --strict.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitAmbiguous = 4;

/// Build a GameModel from the "model" object of a config document.
GameModel model_from_json(const Json& j);

Profile1D profile_from_json(const Json& j);

/// Run one CLI command; writes its outputs plus manifest.json under out_dir
/// and reports failures through the returned exit code (error.json carries
/// the machine-readable message).
int run_command(const std::string& command, const CliOptions& opts);

} // namespace mfgclaw
