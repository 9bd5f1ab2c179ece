#include "ugp/twofold.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ugp/error.hpp"

namespace ugp {

namespace {

void require_theta(double theta, const char* name) {
    require(std::isfinite(theta) && theta >= 0.0 && theta <= 1.0, ErrorCode::InvalidParameter,
            std::string(name) + " must lie in [0,1], got " + std::to_string(theta));
}

LinearBand band(double base, double width, double theta_l, double theta_r) {
    return LinearBand{base - theta_l * width, base + theta_r * width};
}

TwoFoldSurfacePoint triangular_surface(const TwoFoldUV& tf, double x) {
    const auto& p = tf.params();
    const double a = p[0], b = p[1], c = p[2];
    if (x <= a) return {x, ConstantEnvelope{0.0}};
    if (x >= c) return {x, ConstantEnvelope{1.0}};
    const double knot = (b - a) / (c - a);
    if (x == b) return {x, ConstantEnvelope{knot}};
    if (x < b) {
        const double base = (x - a) * (x - a) / ((b - a) * (c - a));
        return {x, band(base, std::min(base, knot - base), tf.theta_l(), tf.theta_r())};
    }
    const double tail = (c - x) * (c - x) / ((c - a) * (c - b));
    const double width = std::min((c - b) / (c - a) - tail, tail);
    return {x, band(1.0 - tail, width, tf.theta_l(), tf.theta_r())};
}

TwoFoldSurfacePoint trapezoidal_surface(const TwoFoldUV& tf, double x) {
    const auto& p = tf.params();
    const double a = p[0], b = p[1], c = p[2], d = p[3];
    const double s = d + c - a - b;
    if (x <= a) return {x, ConstantEnvelope{0.0}};
    if (x >= d) return {x, ConstantEnvelope{1.0}};
    const double lower_knee = (b - a) / s;
    const double upper_knee = (2.0 * c - a - b) / s;
    if (x == b) return {x, ConstantEnvelope{lower_knee}};
    if (x == c) return {x, ConstantEnvelope{upper_knee}};
    if (x < b) {
        const double base = (x - a) * (x - a) / (s * (b - a));
        return {x, band(base, std::min(base, lower_knee - base), tf.theta_l(), tf.theta_r())};
    }
    if (x < c) {
        const double base = (2.0 * x - a - b) / s;
        return {x, band(base, std::min(base - lower_knee, upper_knee - base), tf.theta_l(), tf.theta_r())};
    }
    const double tail = (d - x) * (d - x) / (s * (d - c));
    const double width = std::min((d - c) / s - tail, tail);
    return {x, band(1.0 - tail, width, tf.theta_l(), tf.theta_r())};
}

// Each monotone piece of the base family splits where the clamped width
// switches from one knot distance to the other.
PiecewiseUD reduce_triangular(const TwoFoldUV& tf, double k) {
    const auto& p = tf.params();
    const double a = p[0], b = p[1], c = p[2];
    const double rise = 1.0 / ((b - a) * (c - a));
    const double fall = 1.0 / ((c - a) * (c - b));
    const double knot = (b - a) / (c - a);
    const double upper_gap = (c - b) / (c - a);
    const double left_split = a + (b - a) / std::numbers::sqrt2;
    const double right_split = c - (c - b) / std::numbers::sqrt2;
    return PiecewiseUD({a, left_split, b, right_split, c},
                       {
                           QuadraticSegment{0.0, (1.0 - k) * rise, a},
                           QuadraticSegment{-k * knot, (1.0 + k) * rise, a},
                           QuadraticSegment{1.0 - k * upper_gap, -(1.0 - k) * fall, c},
                           QuadraticSegment{1.0, -(1.0 + k) * fall, c},
                       },
                       {KnotValue{b, knot}});
}

PiecewiseUD reduce_trapezoidal(const TwoFoldUV& tf, double k) {
    const auto& p = tf.params();
    const double a = p[0], b = p[1], c = p[2], d = p[3];
    const double s = d + c - a - b;
    const double rise = 1.0 / (s * (b - a));
    const double fall = 1.0 / (s * (d - c));
    const double lower_knee = (b - a) / s;
    const double upper_knee = (2.0 * c - a - b) / s;
    const double upper_gap = (d - c) / s;
    // Middle piece (2x-a-b)/s as intercept + slope*x.
    const double intercept = -(a + b) / s;
    const double slope = 2.0 / s;
    const double left_split = a + (b - a) / std::numbers::sqrt2;
    const double middle_split = 0.5 * (b + c);
    const double right_split = d - (d - c) / std::numbers::sqrt2;
    return PiecewiseUD({a, left_split, b, middle_split, c, right_split, d},
                       {
                           QuadraticSegment{0.0, (1.0 - k) * rise, a},
                           QuadraticSegment{-k * lower_knee, (1.0 + k) * rise, a},
                           AffineSegment{(1.0 - k) * intercept + k * lower_knee, (1.0 - k) * slope},
                           AffineSegment{(1.0 + k) * intercept - k * upper_knee, (1.0 + k) * slope},
                           QuadraticSegment{1.0 - k * upper_gap, -(1.0 - k) * fall, d},
                           QuadraticSegment{1.0, -(1.0 + k) * fall, d},
                       },
                       {KnotValue{b, lower_knee}, KnotValue{c, upper_knee}});
}

}  // namespace

TwoFoldUV::TwoFoldUV(TwoFoldFamily family, std::vector<double> params, double theta_l, double theta_r)
    : family_(family), params_(std::move(params)), theta_l_(theta_l), theta_r_(theta_r) {
    require_theta(theta_l, "theta_l");
    require_theta(theta_r, "theta_r");
    (void)base();  // validates the support parameters
}

TwoFoldUV TwoFoldUV::triangular(double a, double b, double c, double theta_l, double theta_r) {
    return TwoFoldUV(TwoFoldFamily::Triangular, {a, b, c}, theta_l, theta_r);
}

TwoFoldUV TwoFoldUV::trapezoidal(double a, double b, double c, double d, double theta_l, double theta_r) {
    return TwoFoldUV(TwoFoldFamily::Trapezoidal, {a, b, c, d}, theta_l, theta_r);
}

UncertaintyDistribution TwoFoldUV::base() const {
    if (family_ == TwoFoldFamily::Triangular) return TriangularUD(params_[0], params_[1], params_[2]);
    return TrapezoidalUD(params_[0], params_[1], params_[2], params_[3]);
}

ReductionCriterion ReductionCriterion::optimistic(double alpha) {
    require_open_unit(alpha, "alpha");
    return ReductionCriterion(CriticalKind::Optimistic, alpha);
}

ReductionCriterion ReductionCriterion::pessimistic(double alpha) {
    require_open_unit(alpha, "alpha");
    return ReductionCriterion(CriticalKind::Pessimistic, alpha);
}

double ReductionCriterion::multiplier(double theta_l, double theta_r) const noexcept {
    switch (kind_) {
        case CriticalKind::Optimistic: return alpha_ * theta_l - (1.0 - alpha_) * theta_r;
        case CriticalKind::Pessimistic: return (1.0 - alpha_) * theta_l - alpha_ * theta_r;
        case CriticalKind::Expected: return 0.5 * (theta_l - theta_r);
    }
    return 0.0;
}

TwoFoldSurfacePoint surface_at(const TwoFoldUV& tf, double x) {
    return tf.family() == TwoFoldFamily::Triangular ? triangular_surface(tf, x) : trapezoidal_surface(tf, x);
}

double twofold_cdf(const TwoFoldUV& tf, double x, double y) {
    require(std::isfinite(y) && y >= 0.0 && y <= 1.0, ErrorCode::YOutOfRange,
            "y must lie in [0,1], got " + std::to_string(y));
    const auto point = surface_at(tf, x);
    if (const auto* constant = std::get_if<ConstantEnvelope>(&point.envelope)) return constant->value;
    const auto& ramp = std::get<LinearBand>(point.envelope);
    if (y < ramp.lo) return 0.0;
    if (y >= ramp.hi) return 1.0;
    return (y - ramp.lo) / (ramp.hi - ramp.lo);
}

PiecewiseUD reduce_with_multiplier(const TwoFoldUV& tf, double k) {
    return tf.family() == TwoFoldFamily::Triangular ? reduce_triangular(tf, k) : reduce_trapezoidal(tf, k);
}

PiecewiseUD reduce(const TwoFoldUV& tf, const ReductionCriterion& criterion) {
    return reduce_with_multiplier(tf, criterion.multiplier(tf.theta_l(), tf.theta_r()));
}

double reduced_inverse(const TwoFoldUV& tf, const ReductionCriterion& criterion, double gamma) {
    require_open_unit(gamma, "gamma");
    return reduce(tf, criterion).inverse(gamma);
}

std::vector<CurvePoint> sample_curve(const PiecewiseUD& ud, std::size_t samples) {
    require(samples >= 2, ErrorCode::InvalidParameter, "curve sampling needs at least two samples");
    std::vector<CurvePoint> curve;
    curve.reserve(samples);
    const double step = (ud.hi() - ud.lo()) / static_cast<double>(samples - 1);
    for (std::size_t i = 0; i < samples; ++i) {
        const double x = i + 1 == samples ? ud.hi() : ud.lo() + step * static_cast<double>(i);
        curve.push_back({x, ud.cdf(x)});
    }
    return curve;
}

}  // namespace ugp
