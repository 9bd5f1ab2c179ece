#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ugp {

enum class ErrorCode {
    InvalidParameter,
    AlphaOutOfRange,
    YOutOfRange,
    QuadratureNonConvergence,
    InfeasibleDual,
    DegreeOfDifficultyNegative,
    NonConvergence,
    RankDeficient,
    ParseError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// that callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

inline void require(bool condition, ErrorCode code, const std::string& message) {
    if (!condition) fail(code, message);
}

/// Throws AlphaOutOfRange unless 0 < level < 1.
void require_open_unit(double level, std::string_view what);

}  // namespace ugp
