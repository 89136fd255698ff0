#pragma once
// Command-line surface. Kept as a library function so tests can drive every
// subcommand in-process.
//
// Exit codes: 0 success, 1 validation/check/data failure, 2 usage error,
// 3 provider/transport error. Diagnostics go to the error stream only.

#include <ostream>
#include <string>
#include <vector>

namespace kgov::cli {

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace kgov::cli
