#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace spdtraj::cli {

/// Runs the command line `args` (without the program name). Returns the exit
/// code: 0 success, 1 runtime or numerical failure, 2 configuration error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);

}  // namespace spdtraj::cli
