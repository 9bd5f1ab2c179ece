#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ugp/error.hpp"

namespace ugp::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitParse = 2,
    kExitDomain = 3,
    kExitDifficulty = 4,
    kExitConvergence = 5,
};

[[nodiscard]] int exit_code_for(ErrorCode code) noexcept;

/// Runs one `ugp` command. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ugp::cli
