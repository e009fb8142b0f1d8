#pragma once

#include <ostream>
#include <string>
#include <string_view>

namespace lingcast::cli {

inline constexpr std::string_view kToolName = "lingcast";
inline constexpr std::string_view kVersion = "0.1.0";

/// Lower-case hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

/// Runs one command line (argv[0] is the program name). Data goes to files
/// or `out`; diagnostics go to `err`. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lingcast::cli
