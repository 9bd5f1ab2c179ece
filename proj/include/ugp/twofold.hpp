#pragma once

// Two-fold uncertain variables.
//
// For a two-fold variable the distribution value at x is itself uncertain:
// inside the support it is a linear variable L(lo,hi) whose band is the base
// single-fold value widened by theta_l to the left and theta_r to the right,
// with the widths clamped so that the band never crosses the neighbouring
// knot levels. At the knots (x=b, and x=c for the trapezoid) the value is a
// fixed constant.
//
// Collapsing the band with a critical-value criterion gives a single-fold
// distribution of the form
//
//     Phi(x) = base(x) - k * min(distance to the lower knot level,
//                                distance to the upper knot level)
//
// with k = alpha*theta_l - (1-alpha)*theta_r (optimistic),
//      k = (1-alpha)*theta_l - alpha*theta_r (pessimistic),
//      k = (theta_l - theta_r)/2 (expected).

#include <cstddef>
#include <variant>
#include <vector>

#include "ugp/uncert_core.hpp"

namespace ugp {

enum class TwoFoldFamily { Triangular, Trapezoidal };

class TwoFoldUV {
public:
    static TwoFoldUV triangular(double a, double b, double c, double theta_l, double theta_r);
    static TwoFoldUV trapezoidal(double a, double b, double c, double d, double theta_l, double theta_r);

    [[nodiscard]] TwoFoldFamily family() const noexcept { return family_; }
    /// (a,b,c) or (a,b,c,d).
    [[nodiscard]] const std::vector<double>& params() const noexcept { return params_; }
    [[nodiscard]] double theta_l() const noexcept { return theta_l_; }
    [[nodiscard]] double theta_r() const noexcept { return theta_r_; }
    [[nodiscard]] double lo() const noexcept { return params_.front(); }
    [[nodiscard]] double hi() const noexcept { return params_.back(); }

    /// The single-fold family the band is centred on.
    [[nodiscard]] UncertaintyDistribution base() const;

private:
    TwoFoldUV(TwoFoldFamily family, std::vector<double> params, double theta_l, double theta_r);

    TwoFoldFamily family_;
    std::vector<double> params_;
    double theta_l_;
    double theta_r_;
};

class ReductionCriterion {
public:
    static ReductionCriterion optimistic(double alpha);
    static ReductionCriterion pessimistic(double alpha);
    static ReductionCriterion expected() noexcept { return ReductionCriterion(CriticalKind::Expected, 0.5); }

    [[nodiscard]] CriticalKind kind() const noexcept { return kind_; }
    [[nodiscard]] double alpha() const noexcept { return alpha_; }

    /// The scalar k multiplying the clamped band width.
    [[nodiscard]] double multiplier(double theta_l, double theta_r) const noexcept;

private:
    ReductionCriterion(CriticalKind kind, double alpha) : kind_(kind), alpha_(alpha) {}

    CriticalKind kind_;
    double alpha_;
};

struct ConstantEnvelope {
    double value;
};

struct LinearBand {
    double lo;
    double hi;
};

struct TwoFoldSurfacePoint {
    double x;
    std::variant<ConstantEnvelope, LinearBand> envelope;
};

[[nodiscard]] TwoFoldSurfacePoint surface_at(const TwoFoldUV& tf, double x);

/// M{Phi(x) <= y}: the linear ramp of the band at x evaluated at y.
/// Knot abscissas return their constant for every y.
[[nodiscard]] double twofold_cdf(const TwoFoldUV& tf, double x, double y);

[[nodiscard]] PiecewiseUD reduce(const TwoFoldUV& tf, const ReductionCriterion& criterion);

/// Same construction with an explicit multiplier (|k| <= 1 keeps the result
/// monotone). reduce() is this with k taken from the criterion.
[[nodiscard]] PiecewiseUD reduce_with_multiplier(const TwoFoldUV& tf, double k);

[[nodiscard]] double reduced_inverse(const TwoFoldUV& tf, const ReductionCriterion& criterion, double gamma);

struct CurvePoint {
    double x;
    double value;
};

/// `samples` evenly spaced points across [lo, hi] of the distribution.
[[nodiscard]] std::vector<CurvePoint> sample_curve(const PiecewiseUD& ud, std::size_t samples);

}  // namespace ugp
