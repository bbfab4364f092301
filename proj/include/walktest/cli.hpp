#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace walktest {

inline constexpr const char* kVersion = "0.1.0";

/// Runs the command line. Exit codes: 0 success, 1 domain error (JSON
/// diagnostic on `err`), 2 usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Hex SHA-256 of a file's bytes.
std::string file_sha256(const std::string& path);

}  // namespace walktest
