#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace icsthreat::cli {

/// Exit codes of the command-line tool.
enum Exit : int { Ok = 0, Findings = 1, Usage = 2, Io = 3, Network = 4 };

/// Runs one command line (without the program name). Data goes to `out`,
/// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// $ICSTHREAT_DATA_DIR, else the data directory of the source tree.
std::filesystem::path data_dir();

/// Name of the environment variable holding the NVD API key.
inline constexpr const char* kApiKeyVariable = "NVD_API_KEY";

} // namespace icsthreat::cli
