#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "approx.hpp"
#include "oracles.hpp"
#include "ugp/error.hpp"
#include "ugp/twofold.hpp"

using Catch::Approx;
using namespace ugp;

namespace {

struct Draw {
    TwoFoldUV tf;
    std::vector<double> p;
};

Draw random_twofold(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> p{1.0 + 20.0 * unit(rng)};
    const bool triangular = unit(rng) < 0.5;
    for (int i = 0; i < (triangular ? 2 : 3); ++i) p.push_back(p.back() + 0.1 + 10.0 * unit(rng));
    const double tl = unit(rng);
    const double tr = unit(rng);
    return {triangular ? TwoFoldUV::triangular(p[0], p[1], p[2], tl, tr)
                       : TwoFoldUV::trapezoidal(p[0], p[1], p[2], p[3], tl, tr),
            p};
}

oracle::Band band_of(const Draw& d, double x) {
    const auto& p = d.p;
    if (d.tf.family() == TwoFoldFamily::Triangular) {
        return oracle::tri_band(p[0], p[1], p[2], d.tf.theta_l(), d.tf.theta_r(), x);
    }
    return oracle::tra_band(p[0], p[1], p[2], p[3], d.tf.theta_l(), d.tf.theta_r(), x);
}

std::vector<double> grid(double lo, double hi, int count) {
    std::vector<double> xs;
    for (int i = 0; i < count; ++i) xs.push_back(lo - 0.5 + (hi - lo + 1.0) * i / (count - 1));
    return xs;
}

}  // namespace

TEST_CASE("parameters and degrees are validated") {
    CHECK_THROWS_AS(TwoFoldUV::triangular(1, 1, 2, 0.5, 0.5), Error);
    CHECK_THROWS_AS(TwoFoldUV::triangular(1, 2, 3, 1.5, 0.5), Error);
    CHECK_THROWS_AS(TwoFoldUV::trapezoidal(1, 2, 3, 4, 0.5, -0.1), Error);
    CHECK_THROWS_AS(ReductionCriterion::optimistic(1.0), Error);
    CHECK_THROWS_AS(ReductionCriterion::pessimistic(0.0), Error);
}

TEST_CASE("surface bands match the clamped-width definition") {
    std::mt19937_64 rng(3);
    for (int draw = 0; draw < 100; ++draw) {
        const Draw d = random_twofold(rng);
        for (const double x : grid(d.tf.lo(), d.tf.hi(), 301)) {
            const auto point = surface_at(d.tf, x);
            const auto expected = band_of(d, x);
            if (expected.constant) {
                REQUIRE(std::holds_alternative<ConstantEnvelope>(point.envelope));
                CHECK(std::get<ConstantEnvelope>(point.envelope).value == near(expected.lo, 1e-15));
            } else {
                REQUIRE(std::holds_alternative<LinearBand>(point.envelope));
                const auto& band = std::get<LinearBand>(point.envelope);
                CHECK(band.lo == near(expected.lo, 1e-14));
                CHECK(band.hi == near(expected.hi, 1e-14));
                CHECK(band.lo >= -1e-15);
                CHECK(band.hi <= 1.0 + 1e-15);
                CHECK(band.lo <= band.hi);
            }
        }
    }
}

TEST_CASE("two-fold cdf is the band ramp and rejects y outside [0,1]") {
    const auto tf = TwoFoldUV::triangular(2, 4, 5, 0.5, 0.6);
    const auto band = std::get<LinearBand>(surface_at(tf, 3.0).envelope);
    CHECK(twofold_cdf(tf, 3.0, band.lo - 1e-9) == 0.0);
    CHECK(twofold_cdf(tf, 3.0, band.hi) == 1.0);
    CHECK(twofold_cdf(tf, 3.0, 0.5 * (band.lo + band.hi)) == Approx(0.5));
    CHECK(twofold_cdf(tf, 4.0, 0.1) == Approx(2.0 / 3.0));
    CHECK_THROWS_AS(twofold_cdf(tf, 3.0, 1.2), Error);
    try {
        (void)twofold_cdf(tf, 3.0, -0.1);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::YOutOfRange);
    }
}

TEST_CASE("reduced distributions equal the collapsed linear band") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unit(0.01, 0.99);
    for (int draw = 0; draw < 100; ++draw) {
        const Draw d = random_twofold(rng);
        const double alpha = unit(rng);
        const auto sup = reduce(d.tf, ReductionCriterion::optimistic(alpha));
        const auto inf = reduce(d.tf, ReductionCriterion::pessimistic(alpha));
        const auto exp = reduce(d.tf, ReductionCriterion::expected());
        for (const double x : grid(d.tf.lo(), d.tf.hi(), 501)) {
            const auto band = band_of(d, x);
            CHECK(sup.cdf(x) == near(oracle::linear_optimistic(band, alpha), 1e-13));
            CHECK(inf.cdf(x) == near(oracle::linear_pessimistic(band, alpha), 1e-13));
            CHECK(exp.cdf(x) == near(oracle::linear_expected(band), 1e-13));
        }
    }
}

TEST_CASE("example reduction of TRI(2,4,5;0.5,0.6) by the expected value") {
    const auto reduced = reduce(TwoFoldUV::triangular(2, 4, 5, 0.5, 0.6), ReductionCriterion::expected());
    // base (3-2)^2/6 = 1/6 on the lower half of the rise; k = -0.05.
    CHECK(reduced.cdf(3.0) == near(1.0 / 6.0 * 1.05, 1e-15));
    CHECK(reduced.cdf(3.0) == near(0.175, 1e-15));
    CHECK(reduced.cdf(4.0) == near(2.0 / 3.0, 1e-15));
}

TEST_CASE("benchmark coefficient distributions match their hand-derived forms") {
    // Expected-value reduction of TRI(10,20,25;0.5,0.6): k = -1/20.
    const auto tri = reduce(TwoFoldUV::triangular(10, 20, 25, 0.5, 0.6), ReductionCriterion::expected());
    const auto tri_form = [](double x) {
        if (x <= 10) return 0.0;
        if (x <= 10 + 5 * std::sqrt(2.0)) return (x - 10) * (x - 10) / 150 * (1 + 1.0 / 20);
        if (x < 20) return (x - 10) * (x - 10) / 150 + (2.0 / 3 - (x - 10) * (x - 10) / 150) / 20;
        if (x == 20) return 2.0 / 3;
        if (x <= 25 - 5 / std::sqrt(2.0)) return 1 - (25 - x) * (25 - x) / 75 + (1.0 / 3 - (25 - x) * (25 - x) / 75) / 20;
        if (x < 25) return 1 - (25 - x) * (25 - x) / 75 + (25 - x) * (25 - x) / 75 / 20;
        return 1.0;
    };
    // Expected-value reduction of TRA(6,7,8,9;0.5,0.7): k = -1/10.
    const auto tra = reduce(TwoFoldUV::trapezoidal(6, 7, 8, 9, 0.5, 0.7), ReductionCriterion::expected());
    const auto tra_form = [](double x) {
        if (x <= 6) return 0.0;
        if (x <= 6 + 1 / std::sqrt(2.0)) return (x - 6) * (x - 6) / 4 * (1 + 0.1);
        if (x < 7) return (x - 6) * (x - 6) / 4 + (0.25 - (x - 6) * (x - 6) / 4) / 10;
        if (x == 7) return 0.25;
        if (x <= 7.5) return (2 * x - 13) / 4 + ((2 * x - 13) / 4 - 0.25) / 10;
        if (x < 8) return (2 * x - 13) / 4 + (0.75 - (2 * x - 13) / 4) / 10;
        if (x == 8) return 0.75;
        if (x <= 9 - 1 / std::sqrt(2.0)) return 1 - (9 - x) * (9 - x) / 4 + (0.25 - (9 - x) * (9 - x) / 4) / 10;
        if (x < 9) return 1 - (9 - x) * (9 - x) / 4 + (9 - x) * (9 - x) / 4 / 10;
        return 1.0;
    };
    for (int i = 0; i <= 2000; ++i) {
        const double x1 = 9.0 + 17.0 * i / 2000.0;
        CHECK(tri.cdf(x1) == near(tri_form(x1), 1e-13));
        const double x2 = 5.5 + 4.0 * i / 2000.0;
        CHECK(tra.cdf(x2) == near(tra_form(x2), 1e-13));
    }
    for (const double knot : {20.0}) CHECK(tri.cdf(knot) == near(tri_form(knot), 1e-15));
    for (const double knot : {7.0, 8.0}) CHECK(tra.cdf(knot) == near(tra_form(knot), 1e-15));
}

TEST_CASE("criterion identities and the zero-degree limit") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> unit(0.01, 0.99);
    for (int draw = 0; draw < 50; ++draw) {
        const Draw d = random_twofold(rng);
        const double alpha = unit(rng);
        const auto inf = reduce(d.tf, ReductionCriterion::pessimistic(alpha));
        const auto sup = reduce(d.tf, ReductionCriterion::optimistic(1 - alpha));
        const auto exp = reduce(d.tf, ReductionCriterion::expected());
        const auto half = reduce(d.tf, ReductionCriterion::optimistic(0.5));
        const auto flat = reduce_with_multiplier(d.tf, 0.0);
        const auto base = d.tf.base();
        for (const double x : grid(d.tf.lo(), d.tf.hi(), 400)) {
            CHECK(inf.cdf(x) == near(sup.cdf(x), 1e-12));
            CHECK(exp.cdf(x) == near(half.cdf(x), 1e-12));
            CHECK(flat.cdf(x) == near(ud_eval(base, x), 1e-12));
        }
        CHECK(check_regularity(inf).regular());
        CHECK(check_regularity(exp).regular());
    }
}

TEST_CASE("optimistic reduction of TRI(2,4,5;0.5,0.6) at 0.9 is regular") {
    const auto reduced = reduce(TwoFoldUV::triangular(2, 4, 5, 0.5, 0.6), ReductionCriterion::optimistic(0.9));
    const auto report = check_regularity(reduced);
    CHECK(report.regular());
    CHECK(report.value_at_lo == 0.0);
    CHECK(report.value_at_hi == 1.0);
}

TEST_CASE("reduced inverse round-trips and validates gamma") {
    const auto tf = TwoFoldUV::trapezoidal(10, 15, 20, 25, 0.5, 0.6);
    const auto criterion = ReductionCriterion::expected();
    const auto reduced = reduce(tf, criterion);
    for (int i = 1; i < 100; ++i) {
        const double g = i / 100.0;
        CHECK(reduced.cdf(reduced_inverse(tf, criterion, g)) == near(g, 1e-12));
    }
    CHECK_THROWS_AS(reduced_inverse(tf, criterion, 1.0), Error);
}

TEST_CASE("curve sampling covers the support") {
    const auto reduced = reduce(TwoFoldUV::triangular(2, 4, 5, 0.0, 0.0), ReductionCriterion::expected());
    const auto curve = sample_curve(reduced, 1000);
    REQUIRE(curve.size() == 1000);
    CHECK(curve.front().x == 2.0);
    CHECK(curve.back().x == 5.0);
    for (const auto& point : curve) CHECK(point.value == near(oracle::tri_cdf(2, 4, 5, point.x), 1e-14));
    CHECK_THROWS_AS(sample_curve(reduced, 1), Error);
}
