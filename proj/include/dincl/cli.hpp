#ifndef DINCL_CLI_HPP
#define DINCL_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace dincl::cli {

inline constexpr const char* kVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSolver = 3;

/// Runs the command line `args` (args[0] is the program name). Diagnostics go
/// to `err`, progress summaries to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace dincl::cli

#endif // DINCL_CLI_HPP
