#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gridstab::cli {

// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFail = 1;       // certificate not all-pass
inline constexpr int kExitParse = 2;      // unreadable / invalid case file
inline constexpr int kExitPowerFlow = 3;  // power flow did not converge
inline constexpr int kExitAssumption = 4; // Assumption 1 violated

// Entry point used by the gridstab binary and by tests.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);
int run(int argc, char** argv);

}  // namespace gridstab::cli
