#include "ugp/error.hpp"

#include <cmath>

namespace ugp {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidParameter: return "InvalidParameter";
        case ErrorCode::AlphaOutOfRange: return "AlphaOutOfRange";
        case ErrorCode::YOutOfRange: return "YOutOfRange";
        case ErrorCode::QuadratureNonConvergence: return "QuadratureNonConvergence";
        case ErrorCode::InfeasibleDual: return "InfeasibleDual";
        case ErrorCode::DegreeOfDifficultyNegative: return "DegreeOfDifficultyNegative";
        case ErrorCode::NonConvergence: return "NonConvergence";
        case ErrorCode::RankDeficient: return "RankDeficient";
        case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

void require_open_unit(double level, std::string_view what) {
    if (!(std::isfinite(level) && level > 0.0 && level < 1.0)) {
        fail(ErrorCode::AlphaOutOfRange,
             std::string(what) + " must lie in the open interval (0,1), got " + std::to_string(level));
    }
}

}  // namespace ugp
