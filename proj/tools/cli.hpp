#pragma once

#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

namespace xorland::cli {

enum ExitCode : int { kOk = 0, kVerifyFailed = 1, kUsage = 2, kIo = 3 };

/// Provenance block written into every artifact: the subcommand, its
/// parameters, the tool version and all numerical tolerances in force.
struct RunConfig {
  std::string subcommand;
  nlohmann::json params = nlohmann::json::object();

  nlohmann::json to_json() const;
};

const char* version();

/// Parses argv and runs one subcommand. Normal output goes to `out`,
/// diagnostics and per-step logs to `err`. Returns an ExitCode.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace xorland::cli
