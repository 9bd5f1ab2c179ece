#include "ugp/uncert_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ugp/error.hpp"

namespace ugp {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool finite_all(std::initializer_list<double> values) {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

std::string params_text(std::initializer_list<double> values) {
    std::ostringstream out;
    out << '(';
    bool first = true;
    for (double v : values) {
        if (!first) out << ',';
        out << v;
        first = false;
    }
    out << ')';
    return out.str();
}

// Quadratic segments are only invertible on the branch that keeps the
// center outside the interval; the slack absorbs round-off in the split
// points computed from sqrt(2).
bool segment_invertible(const Segment& segment, double x0, double x1) {
    const double slack = 1e-9 * std::max(1.0, std::abs(x1) + std::abs(x0));
    return std::visit(overloaded{
                          [](const ConstantSegment&) { return true; },
                          [](const AffineSegment& s) { return s.slope >= 0.0; },
                          [&](const QuadraticSegment& s) {
                              if (s.scale == 0.0) return true;
                              if (s.scale > 0.0) return s.center <= x0 + slack;
                              return s.center >= x1 - slack;
                          },
                      },
                      segment);
}

// Root of segment(x) = level inside [x0,x1]; the caller guarantees
// segment(x0) < level <= segment(x1).
double segment_root(const Segment& segment, double x0, double x1, double level) {
    double root = std::numeric_limits<double>::quiet_NaN();
    if (segment_invertible(segment, x0, x1)) {
        root = std::visit(overloaded{
                              [&](const ConstantSegment&) { return x0; },
                              [&](const AffineSegment& s) {
                                  return s.slope > 0.0 ? (level - s.intercept) / s.slope : x0;
                              },
                              [&](const QuadraticSegment& s) {
                                  if (s.scale == 0.0) return x0;
                                  const double u = std::max(0.0, (level - s.offset) / s.scale);
                                  return s.scale > 0.0 ? s.center + std::sqrt(u) : s.center - std::sqrt(u);
                              },
                          },
                          segment);
    }
    if (!std::isfinite(root)) {
        return bisect_increasing([&](double x) { return segment_value(segment, x); }, x0, x1, level);
    }
    return std::clamp(root, x0, x1);
}

// Integral of the segment's inverse over [g0,g1] where g0 = segment(x0),
// g1 = segment(x1).
double segment_inverse_integral(const Segment& segment, double g0, double g1) {
    return std::visit(overloaded{
                          [](const ConstantSegment&) { return 0.0; },
                          [&](const AffineSegment& s) {
                              if (s.slope == 0.0) return 0.0;
                              const double u0 = g0 - s.intercept;
                              const double u1 = g1 - s.intercept;
                              return (u1 * u1 - u0 * u0) / (2.0 * s.slope);
                          },
                          [&](const QuadraticSegment& s) {
                              if (s.scale == 0.0) return 0.0;
                              const double u0 = std::max(0.0, (g0 - s.offset) / s.scale);
                              const double u1 = std::max(0.0, (g1 - s.offset) / s.scale);
                              const double sign = s.scale > 0.0 ? 1.0 : -1.0;
                              return s.center * (g1 - g0) +
                                     sign * (2.0 * s.scale / 3.0) * (u1 * std::sqrt(u1) - u0 * std::sqrt(u0));
                          },
                      },
                      segment);
}

double simpson_step(const std::function<double(double)>& f, double a, double fa, double m, double fm,
                    double b, double fb, double whole, double tolerance, int depth, int max_depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    // A few forced levels keep a lucky first estimate from being accepted.
    constexpr int kMinDepth = 4;
    if (depth >= kMinDepth && std::abs(delta) <= 15.0 * tolerance) {
        return left + right + delta / 15.0;
    }
    if (depth >= max_depth) {
        fail(ErrorCode::QuadratureNonConvergence,
             "adaptive Simpson did not reach tolerance near x=" + std::to_string(m));
    }
    return simpson_step(f, a, fa, lm, flm, m, fm, left, 0.5 * tolerance, depth + 1, max_depth) +
           simpson_step(f, m, fm, rm, frm, b, fb, right, 0.5 * tolerance, depth + 1, max_depth);
}

}  // namespace

// ---------------------------------------------------------------------------
// LinearUD
// ---------------------------------------------------------------------------

LinearUD::LinearUD(double a, double b) : a_(a), b_(b) {
    require(finite_all({a, b}) && a < b, ErrorCode::InvalidParameter,
            "linear distribution requires a < b, got " + params_text({a, b}));
}

double LinearUD::cdf(double x) const noexcept {
    if (x <= a_) return 0.0;
    if (x >= b_) return 1.0;
    return (x - a_) / (b_ - a_);
}

double LinearUD::inverse(double alpha) const {
    require_open_unit(alpha, "alpha");
    return (1.0 - alpha) * a_ + alpha * b_;
}

double LinearUD::optimistic(double alpha) const {
    require_open_unit(alpha, "alpha");
    return alpha * a_ + (1.0 - alpha) * b_;
}

double LinearUD::pessimistic(double alpha) const { return inverse(alpha); }

double LinearUD::expected() const noexcept { return 0.5 * (a_ + b_); }

PiecewiseUD LinearUD::to_piecewise() const {
    const double slope = 1.0 / (b_ - a_);
    return PiecewiseUD({a_, b_}, {AffineSegment{-a_ * slope, slope}});
}

// ---------------------------------------------------------------------------
// TriangularUD
// ---------------------------------------------------------------------------

TriangularUD::TriangularUD(double a, double b, double c) : a_(a), b_(b), c_(c) {
    require(finite_all({a, b, c}) && a < b && b < c, ErrorCode::InvalidParameter,
            "triangular distribution requires a < b < c, got " + params_text({a, b, c}));
}

double TriangularUD::cdf(double x) const noexcept {
    if (x <= a_) return 0.0;
    if (x >= c_) return 1.0;
    if (x <= b_) return (x - a_) * (x - a_) / ((b_ - a_) * (c_ - a_));
    return 1.0 - (c_ - x) * (c_ - x) / ((c_ - a_) * (c_ - b_));
}

double TriangularUD::inverse(double alpha) const {
    require_open_unit(alpha, "alpha");
    if (alpha <= mode_level()) return a_ + std::sqrt(alpha * (b_ - a_) * (c_ - a_));
    return c_ - std::sqrt((1.0 - alpha) * (c_ - a_) * (c_ - b_));
}

double TriangularUD::optimistic(double alpha) const {
    require_open_unit(alpha, "alpha");
    // The left branch applies while the upper-tail level 1-alpha is below Phi(b).
    if (1.0 - alpha <= mode_level()) return a_ + std::sqrt((1.0 - alpha) * (b_ - a_) * (c_ - a_));
    return c_ - std::sqrt(alpha * (c_ - a_) * (c_ - b_));
}

double TriangularUD::pessimistic(double alpha) const { return inverse(alpha); }

double TriangularUD::expected() const noexcept { return (a_ + b_ + c_) / 3.0; }

PiecewiseUD TriangularUD::to_piecewise() const {
    const double rise = 1.0 / ((b_ - a_) * (c_ - a_));
    const double fall = 1.0 / ((c_ - a_) * (c_ - b_));
    return PiecewiseUD({a_, b_, c_}, {QuadraticSegment{0.0, rise, a_}, QuadraticSegment{1.0, -fall, c_}});
}

// ---------------------------------------------------------------------------
// TrapezoidalUD
// ---------------------------------------------------------------------------

TrapezoidalUD::TrapezoidalUD(double a, double b, double c, double d) : a_(a), b_(b), c_(c), d_(d) {
    require(finite_all({a, b, c, d}) && a < b && b < c && c < d, ErrorCode::InvalidParameter,
            "trapezoidal distribution requires a < b < c < d, got " + params_text({a, b, c, d}));
}

double TrapezoidalUD::cdf(double x) const noexcept {
    const double s = spread();
    if (x <= a_) return 0.0;
    if (x >= d_) return 1.0;
    if (x <= b_) return (x - a_) * (x - a_) / (s * (b_ - a_));
    if (x <= c_) return (2.0 * x - a_ - b_) / s;
    return 1.0 - (d_ - x) * (d_ - x) / (s * (d_ - c_));
}

double TrapezoidalUD::inverse(double alpha) const {
    require_open_unit(alpha, "alpha");
    const double s = spread();
    if (alpha <= lower_knee()) return a_ + std::sqrt(alpha * s * (b_ - a_));
    if (alpha <= upper_knee()) return 0.5 * ((a_ + b_) + alpha * s);
    return d_ - std::sqrt((1.0 - alpha) * s * (d_ - c_));
}

double TrapezoidalUD::optimistic(double alpha) const {
    require_open_unit(alpha, "alpha");
    const double s = spread();
    const double tail = 1.0 - alpha;
    if (tail <= lower_knee()) return a_ + std::sqrt(tail * s * (b_ - a_));
    if (tail <= upper_knee()) return 0.5 * ((a_ + b_) + tail * s);
    return d_ - std::sqrt(alpha * s * (d_ - c_));
}

double TrapezoidalUD::pessimistic(double alpha) const { return inverse(alpha); }

double TrapezoidalUD::expected() const noexcept {
    const double upper = (d_ * d_ * d_ - c_ * c_ * c_) / (d_ - c_);
    const double lower = (b_ * b_ * b_ - a_ * a_ * a_) / (b_ - a_);
    return (upper - lower) / (3.0 * spread());
}

PiecewiseUD TrapezoidalUD::to_piecewise() const {
    const double s = spread();
    return PiecewiseUD({a_, b_, c_, d_}, {QuadraticSegment{0.0, 1.0 / (s * (b_ - a_)), a_},
                                          AffineSegment{-(a_ + b_) / s, 2.0 / s},
                                          QuadraticSegment{1.0, -1.0 / (s * (d_ - c_)), d_}});
}

// ---------------------------------------------------------------------------
// PiecewiseUD
// ---------------------------------------------------------------------------

double segment_value(const Segment& segment, double x) noexcept {
    return std::visit(overloaded{
                          [](const ConstantSegment& s) { return s.value; },
                          [&](const AffineSegment& s) { return s.intercept + s.slope * x; },
                          [&](const QuadraticSegment& s) {
                              const double dx = x - s.center;
                              return s.offset + s.scale * dx * dx;
                          },
                      },
                      segment);
}

PiecewiseUD::PiecewiseUD(std::vector<double> breakpoints, std::vector<Segment> segments,
                         std::vector<KnotValue> knots)
    : breakpoints_(std::move(breakpoints)), segments_(std::move(segments)), knots_(std::move(knots)) {
    require(breakpoints_.size() >= 2, ErrorCode::InvalidParameter, "piecewise distribution needs two breakpoints");
    require(segments_.size() + 1 == breakpoints_.size(), ErrorCode::InvalidParameter,
            "piecewise distribution needs exactly one segment per breakpoint interval");
    for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
        require(std::isfinite(breakpoints_[i]), ErrorCode::InvalidParameter, "breakpoints must be finite");
        if (i > 0) {
            require(breakpoints_[i - 1] < breakpoints_[i], ErrorCode::InvalidParameter,
                    "breakpoints must be strictly increasing");
        }
    }
    std::sort(knots_.begin(), knots_.end(), [](const KnotValue& l, const KnotValue& r) { return l.x < r.x; });
    for (const auto& knot : knots_) {
        require(knot.x > lo() && knot.x < hi(), ErrorCode::InvalidParameter,
                "knot values are only allowed strictly inside the support");
        require(std::binary_search(breakpoints_.begin(), breakpoints_.end(), knot.x), ErrorCode::InvalidParameter,
                "knot values must sit on a breakpoint");
    }
}

double PiecewiseUD::check(double alpha) {
    require_open_unit(alpha, "alpha");
    return alpha;
}

double PiecewiseUD::cdf(double x) const noexcept {
    if (std::isnan(x)) return x;
    if (x <= lo()) return 0.0;
    if (x >= hi()) return 1.0;
    for (const auto& knot : knots_) {
        if (knot.x == x) return knot.value;
    }
    const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
    const auto index = static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
    return segment_value(segments_[index], x);
}

double PiecewiseUD::inverse(double alpha) const {
    require_open_unit(alpha, "alpha");
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        const double x0 = breakpoints_[i];
        const double x1 = breakpoints_[i + 1];
        if (i > 0 && cdf(x0) >= alpha) return x0;
        const Segment& segment = segments_[i];
        if (segment_value(segment, x0) >= alpha) return x0;
        if (segment_value(segment, x1) >= alpha) return segment_root(segment, x0, x1, alpha);
    }
    return hi();
}

// ---------------------------------------------------------------------------
// Generic operations
// ---------------------------------------------------------------------------

CriticalValueQuery CriticalValueQuery::optimistic(double alpha) {
    require_open_unit(alpha, "alpha");
    return CriticalValueQuery(CriticalKind::Optimistic, alpha);
}

CriticalValueQuery CriticalValueQuery::pessimistic(double alpha) {
    require_open_unit(alpha, "alpha");
    return CriticalValueQuery(CriticalKind::Pessimistic, alpha);
}

double ud_eval(const UncertaintyDistribution& ud, double x) noexcept {
    return std::visit([x](const auto& d) { return d.cdf(x); }, ud);
}

double ud_inverse(const UncertaintyDistribution& ud, double alpha) {
    return std::visit([alpha](const auto& d) { return d.inverse(alpha); }, ud);
}

double support_lo(const UncertaintyDistribution& ud) noexcept {
    return std::visit([](const auto& d) { return d.lo(); }, ud);
}

double support_hi(const UncertaintyDistribution& ud) noexcept {
    return std::visit([](const auto& d) { return d.hi(); }, ud);
}

PiecewiseUD to_piecewise(const UncertaintyDistribution& ud) {
    return std::visit(overloaded{
                          [](const PiecewiseUD& d) { return d; },
                          [](const auto& d) { return d.to_piecewise(); },
                      },
                      ud);
}

double critical_value(const UncertaintyDistribution& ud, const CriticalValueQuery& query) {
    switch (query.kind()) {
        case CriticalKind::Optimistic:
            return std::visit([&](const auto& d) { return d.optimistic(query.alpha()); }, ud);
        case CriticalKind::Pessimistic:
            return std::visit([&](const auto& d) { return d.pessimistic(query.alpha()); }, ud);
        case CriticalKind::Expected:
            return std::visit(overloaded{
                                  [](const PiecewiseUD& d) { return expected_via_quadrature(d); },
                                  [](const auto& d) { return d.expected(); },
                              },
                              ud);
    }
    return 0.0;
}

double expected_analytic(const PiecewiseUD& ud, bool* ok) {
    const auto breakpoints = ud.breakpoints();
    const auto segments = ud.segments();
    double total = 0.0;
    double level = 0.0;  // Phi just left of the current breakpoint
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const double x0 = breakpoints[i];
        const double x1 = breakpoints[i + 1];
        if (!segment_invertible(segments[i], x0, x1)) {
            if (ok != nullptr) *ok = false;
            return std::numeric_limits<double>::quiet_NaN();
        }
        const double g0 = segment_value(segments[i], x0);
        const double g1 = segment_value(segments[i], x1);
        // A jump at x0 maps a whole interval of levels onto x0.
        total += x0 * (g0 - level);
        total += segment_inverse_integral(segments[i], g0, g1);
        level = g1;
    }
    total += ud.hi() * (1.0 - level);
    if (ok != nullptr) *ok = true;
    return total;
}

double expected_adaptive_simpson(const PiecewiseUD& ud, double tolerance, int max_depth) {
    const auto survival = [&ud](double x) { return 1.0 - ud.cdf(x); };
    return ud.lo() + adaptive_simpson(survival, ud.lo(), ud.hi(), tolerance, max_depth);
}

double expected_via_quadrature(const PiecewiseUD& ud) {
    bool ok = false;
    const double value = expected_analytic(ud, &ok);
    if (ok) return value;
    return expected_adaptive_simpson(ud);
}

RegularityReport check_regularity(const UncertaintyDistribution& ud) {
    const double lo = support_lo(ud);
    const double hi = support_hi(ud);
    std::vector<double> grid;
    grid.reserve(kRegularityGridPoints + 16);
    const double start = lo - 1.0;
    const double step = (hi - lo + 2.0) / static_cast<double>(kRegularityGridPoints - 1);
    for (std::size_t i = 0; i < kRegularityGridPoints; ++i) grid.push_back(start + step * static_cast<double>(i));
    if (const auto* piecewise = std::get_if<PiecewiseUD>(&ud)) {
        grid.insert(grid.end(), piecewise->breakpoints().begin(), piecewise->breakpoints().end());
    } else {
        grid.push_back(lo);
        grid.push_back(hi);
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    RegularityReport report;
    report.samples = grid.size();
    report.value_at_lo = ud_eval(ud, lo);
    report.value_at_hi = ud_eval(ud, hi);
    double previous = ud_eval(ud, grid.front());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double value = ud_eval(ud, grid[i]);
        if (!(value >= 0.0 && value <= 1.0)) report.out_of_range.push_back(grid[i]);
        if (i > 0 && value < previous - kRegularitySlack) {
            report.decreases.push_back({grid[i - 1], grid[i], previous, value});
        }
        previous = value;
    }
    return report;
}

double bisect_increasing(const std::function<double(double)>& f, double lo, double hi, double target,
                         double tolerance) {
    if (f(lo) >= target) return lo;
    // Invariant: f(lo) < target <= f(hi) (or hi is the right end).
    for (int iteration = 0; iteration < 200 && hi - lo > tolerance; ++iteration) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (f(mid) >= target) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tolerance,
                        int max_depth) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a);
    const double fm = f(m);
    const double fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_step(f, a, fa, m, fm, b, fb, whole, tolerance, 0, max_depth);
}

}  // namespace ugp
