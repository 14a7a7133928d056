#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ccvo::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;  ///< verification or acceptance failed
inline constexpr int kExitConfig = 2;  ///< bad flags or configuration

/// Entry point behind the `ccvo` binary. args[0] is the program name.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ccvo::cli
