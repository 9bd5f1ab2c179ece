#pragma once

// Single-fold uncertainty distributions.
//
// A distribution Phi(x) = M{xi <= x} is non-decreasing, 0 below its support
// and 1 above it. The native families (linear, triangular, trapezoidal) have
// closed-form inverses and expected values; everything else (in particular
// the reduced distributions produced by the two-fold module) is carried by
// PiecewiseUD, whose segments are simple enough to invert and integrate
// analytically.

#include <cstddef>
#include <functional>
#include <span>
#include <variant>
#include <vector>

namespace ugp {

// ---------------------------------------------------------------------------
// Native families
// ---------------------------------------------------------------------------

class PiecewiseUD;

/// L(a,b): a straight ramp from a to b.
class LinearUD {
public:
    LinearUD(double a, double b);

    [[nodiscard]] double a() const noexcept { return a_; }
    [[nodiscard]] double b() const noexcept { return b_; }
    [[nodiscard]] double lo() const noexcept { return a_; }
    [[nodiscard]] double hi() const noexcept { return b_; }

    [[nodiscard]] double cdf(double x) const noexcept;
    [[nodiscard]] double inverse(double alpha) const;
    [[nodiscard]] double optimistic(double alpha) const;
    [[nodiscard]] double pessimistic(double alpha) const;
    [[nodiscard]] double expected() const noexcept;
    [[nodiscard]] PiecewiseUD to_piecewise() const;

private:
    double a_;
    double b_;
};

/// TRI(a,b,c): quadratic rise on [a,b], quadratic approach to 1 on [b,c].
class TriangularUD {
public:
    TriangularUD(double a, double b, double c);

    [[nodiscard]] double a() const noexcept { return a_; }
    [[nodiscard]] double b() const noexcept { return b_; }
    [[nodiscard]] double c() const noexcept { return c_; }
    [[nodiscard]] double lo() const noexcept { return a_; }
    [[nodiscard]] double hi() const noexcept { return c_; }
    /// Phi(b) = (b-a)/(c-a).
    [[nodiscard]] double mode_level() const noexcept { return (b_ - a_) / (c_ - a_); }

    [[nodiscard]] double cdf(double x) const noexcept;
    [[nodiscard]] double inverse(double alpha) const;
    [[nodiscard]] double optimistic(double alpha) const;
    [[nodiscard]] double pessimistic(double alpha) const;
    [[nodiscard]] double expected() const noexcept;
    [[nodiscard]] PiecewiseUD to_piecewise() const;

private:
    double a_;
    double b_;
    double c_;
};

/// TRA(a,b,c,d): quadratic on [a,b], linear on [b,c], quadratic on [c,d].
class TrapezoidalUD {
public:
    TrapezoidalUD(double a, double b, double c, double d);

    [[nodiscard]] double a() const noexcept { return a_; }
    [[nodiscard]] double b() const noexcept { return b_; }
    [[nodiscard]] double c() const noexcept { return c_; }
    [[nodiscard]] double d() const noexcept { return d_; }
    [[nodiscard]] double lo() const noexcept { return a_; }
    [[nodiscard]] double hi() const noexcept { return d_; }
    /// d + c - a - b, the common denominator of every branch.
    [[nodiscard]] double spread() const noexcept { return d_ + c_ - a_ - b_; }
    /// Phi(b) and Phi(c).
    [[nodiscard]] double lower_knee() const noexcept { return (b_ - a_) / spread(); }
    [[nodiscard]] double upper_knee() const noexcept { return (2.0 * c_ - a_ - b_) / spread(); }

    [[nodiscard]] double cdf(double x) const noexcept;
    [[nodiscard]] double inverse(double alpha) const;
    [[nodiscard]] double optimistic(double alpha) const;
    [[nodiscard]] double pessimistic(double alpha) const;
    [[nodiscard]] double expected() const noexcept;
    [[nodiscard]] PiecewiseUD to_piecewise() const;

private:
    double a_;
    double b_;
    double c_;
    double d_;
};

// ---------------------------------------------------------------------------
// Piecewise carrier
// ---------------------------------------------------------------------------

struct ConstantSegment {
    double value;
};

/// intercept + slope * x
struct AffineSegment {
    double intercept;
    double slope;
};

/// offset + scale * (x - center)^2
struct QuadraticSegment {
    double offset;
    double scale;
    double center;
};

using Segment = std::variant<ConstantSegment, AffineSegment, QuadraticSegment>;

[[nodiscard]] double segment_value(const Segment& segment, double x) noexcept;

/// Value taken exactly at an interior breakpoint, overriding the adjacent
/// segments (the reduced distributions define isolated values at x=b, x=c).
struct KnotValue {
    double x;
    double value;
};

class PiecewiseUD {
public:
    /// `breakpoints` must be strictly increasing with one more entry than
    /// `segments`; segment i covers [breakpoints[i], breakpoints[i+1]].
    /// Monotonicity is not enforced here; see check_regularity.
    PiecewiseUD(std::vector<double> breakpoints, std::vector<Segment> segments,
                std::vector<KnotValue> knots = {});

    [[nodiscard]] double lo() const noexcept { return breakpoints_.front(); }
    [[nodiscard]] double hi() const noexcept { return breakpoints_.back(); }
    [[nodiscard]] std::span<const double> breakpoints() const noexcept { return breakpoints_; }
    [[nodiscard]] std::span<const Segment> segments() const noexcept { return segments_; }
    [[nodiscard]] std::span<const KnotValue> knots() const noexcept { return knots_; }

    [[nodiscard]] double cdf(double x) const noexcept;
    /// inf{x : Phi(x) >= alpha}.
    [[nodiscard]] double inverse(double alpha) const;
    [[nodiscard]] double optimistic(double alpha) const { return inverse(1.0 - check(alpha)); }
    [[nodiscard]] double pessimistic(double alpha) const { return inverse(alpha); }

private:
    static double check(double alpha);

    std::vector<double> breakpoints_;
    std::vector<Segment> segments_;
    std::vector<KnotValue> knots_;
};

using UncertaintyDistribution = std::variant<LinearUD, TriangularUD, TrapezoidalUD, PiecewiseUD>;

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

enum class CriticalKind { Optimistic, Pessimistic, Expected };

class CriticalValueQuery {
public:
    static CriticalValueQuery optimistic(double alpha);
    static CriticalValueQuery pessimistic(double alpha);
    static CriticalValueQuery expected() noexcept { return CriticalValueQuery(CriticalKind::Expected, 0.0); }

    [[nodiscard]] CriticalKind kind() const noexcept { return kind_; }
    /// Meaningless for the expected-value query.
    [[nodiscard]] double alpha() const noexcept { return alpha_; }

private:
    CriticalValueQuery(CriticalKind kind, double alpha) : kind_(kind), alpha_(alpha) {}

    CriticalKind kind_;
    double alpha_;
};

[[nodiscard]] double ud_eval(const UncertaintyDistribution& ud, double x) noexcept;
[[nodiscard]] double ud_inverse(const UncertaintyDistribution& ud, double alpha);
[[nodiscard]] double support_lo(const UncertaintyDistribution& ud) noexcept;
[[nodiscard]] double support_hi(const UncertaintyDistribution& ud) noexcept;
[[nodiscard]] PiecewiseUD to_piecewise(const UncertaintyDistribution& ud);

/// Closed forms for native families, generic inversion/integration for
/// piecewise distributions.
[[nodiscard]] double critical_value(const UncertaintyDistribution& ud, const CriticalValueQuery& query);

inline constexpr double kQuadratureTolerance = 1e-10;
inline constexpr int kQuadratureMaxDepth = 60;

/// Expected value as the integral of the inverse distribution over (0,1).
/// Uses exact per-segment antiderivatives; falls back to adaptive Simpson
/// when a segment cannot be inverted in closed form.
[[nodiscard]] double expected_via_quadrature(const PiecewiseUD& ud);

/// The closed-form half of expected_via_quadrature. Returns false in
/// `ok` when some segment is not invertible analytically.
[[nodiscard]] double expected_analytic(const PiecewiseUD& ud, bool* ok = nullptr);

/// lo + integral over the support of (1 - Phi), by adaptive Simpson.
[[nodiscard]] double expected_adaptive_simpson(const PiecewiseUD& ud,
                                               double tolerance = kQuadratureTolerance,
                                               int max_depth = kQuadratureMaxDepth);

struct RegularityViolation {
    double x_left;
    double x_right;
    double value_left;
    double value_right;
};

struct RegularityReport {
    std::vector<RegularityViolation> decreases;
    std::vector<double> out_of_range;  // abscissas where Phi left [0,1]
    double value_at_lo = 0.0;
    double value_at_hi = 1.0;
    std::size_t samples = 0;

    [[nodiscard]] bool regular() const noexcept {
        return decreases.empty() && out_of_range.empty() && value_at_lo == 0.0 && value_at_hi == 1.0;
    }
};

inline constexpr std::size_t kRegularityGridPoints = 10000;
inline constexpr double kRegularitySlack = 1e-12;

/// Samples Phi on a uniform grid over [lo-1, hi+1] (plus every breakpoint)
/// and records each decrease larger than the slack.
[[nodiscard]] RegularityReport check_regularity(const UncertaintyDistribution& ud);

// ---------------------------------------------------------------------------
// Numeric utilities shared by the other modules
// ---------------------------------------------------------------------------

/// Smallest x in [lo,hi] with f(x) >= target for non-decreasing f, to an
/// absolute tolerance on x.
[[nodiscard]] double bisect_increasing(const std::function<double(double)>& f, double lo, double hi,
                                       double target, double tolerance = 1e-12);

/// Adaptive Simpson on [a,b]. Throws QuadratureNonConvergence when some
/// subinterval still misses its share of the tolerance at max_depth.
[[nodiscard]] double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                      double tolerance = kQuadratureTolerance,
                                      int max_depth = kQuadratureMaxDepth);

}  // namespace ugp
